"""Binary cache files for discrete-log contexts and Kloosterman tables.

Context file ``ctx_<q>.bin``: magic ``RMCTX``, one version byte, ``q`` as
8-byte little-endian, then ``ind`` and ``inv`` on ``1..q-1`` as 8-byte
little-endian integers.  Kloosterman file ``kl_<q>_<k>.bin``: magic
``RMKLT``, version byte, ``q`` and ``k`` as 8-byte little-endian, then
``q-1`` little-endian complex128 values.

Caches are an optimization only.  Anything unreadable is reported with a
warning, rebuilt and rewritten.
"""
from __future__ import annotations

import logging
import os
import struct
from pathlib import Path

import numpy as np

from .arith import PrimeContext, build_context, check_odd_prime, context_from_tables
from .kloosterman import KlTable, kl_all

log = logging.getLogger(__name__)

CACHE_VERSION = 1
CTX_MAGIC = b"RMCTX"
KL_MAGIC = b"RMKLT"
_I8 = np.dtype("<i8")
_C16 = np.dtype("<c16")


def _atomic_write(path: Path, payload: bytes):
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def context_path(cache_dir, q: int) -> Path:
    return Path(cache_dir) / f"ctx_{q}.bin"


def kl_path(cache_dir, q: int, k: int) -> Path:
    return Path(cache_dir) / f"kl_{q}_{k}.bin"


def write_context(path, ctx: PrimeContext):
    head = CTX_MAGIC + bytes([CACHE_VERSION]) + struct.pack("<Q", ctx.q)
    body = ctx.ind[1:].astype(_I8).tobytes() + ctx.inv[1:].astype(_I8).tobytes()
    _atomic_write(Path(path), head + body)


def read_context(path, q: int) -> PrimeContext:
    """Parse a context file; raises ``ValueError`` on any mismatch."""
    data = Path(path).read_bytes()
    n = len(CTX_MAGIC)
    if data[:n] != CTX_MAGIC:
        raise ValueError("bad magic")
    if data[n] != CACHE_VERSION:
        raise ValueError(f"cache version {data[n]} != {CACHE_VERSION}")
    (stored_q,) = struct.unpack("<Q", data[n + 1 : n + 9])
    if stored_q != q:
        raise ValueError(f"cache holds q={stored_q}, wanted {q}")
    body = data[n + 9 :]
    if len(body) != 2 * 8 * (q - 1):
        raise ValueError("truncated table")
    arr = np.frombuffer(body, dtype=_I8).astype(np.int64)
    ind, inv = arr[: q - 1], arr[q - 1 :]
    if np.any(np.sort(ind) != np.arange(q - 1)):
        raise ValueError("discrete-log table is not a bijection")
    g = int(np.flatnonzero(ind == 1)[0]) + 1  # the residue with discrete log 1
    return context_from_tables(q, g, ind, inv)


def load_context(cache_dir, q: int) -> PrimeContext:
    """Context for ``q`` from ``cache_dir``, building and writing it when absent or unreadable."""
    q = check_odd_prime(q)
    path = context_path(cache_dir, q)
    if path.exists():
        try:
            return read_context(path, q)
        except (ValueError, IndexError, struct.error) as exc:
            log.warning("ignoring context cache %s (%s); recomputing", path, exc)
    ctx = build_context(q)
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    write_context(path, ctx)
    return ctx


def write_kl(path, table: KlTable):
    head = KL_MAGIC + bytes([CACHE_VERSION]) + struct.pack("<QQ", table.q, table.k)
    _atomic_write(Path(path), head + table.values.astype(_C16).tobytes())


def read_kl(path, q: int, k: int) -> KlTable:
    data = Path(path).read_bytes()
    n = len(KL_MAGIC)
    if data[:n] != KL_MAGIC:
        raise ValueError("bad magic")
    if data[n] != CACHE_VERSION:
        raise ValueError(f"cache version {data[n]} != {CACHE_VERSION}")
    sq, sk = struct.unpack("<QQ", data[n + 1 : n + 17])
    if (sq, sk) != (q, k):
        raise ValueError(f"cache holds (q, k)=({sq}, {sk}), wanted ({q}, {k})")
    body = data[n + 17 :]
    if len(body) != 16 * (q - 1):
        raise ValueError("truncated table")
    return KlTable(q, k, np.frombuffer(body, dtype=_C16).astype(complex))


def load_kl(cache_dir, ctx: PrimeContext, k: int) -> KlTable:
    path = kl_path(cache_dir, ctx.q, k)
    if path.exists():
        try:
            return read_kl(path, ctx.q, k)
        except (ValueError, IndexError, struct.error) as exc:
            log.warning("ignoring Kloosterman cache %s (%s); recomputing", path, exc)
    table = kl_all(k, ctx)
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    write_kl(path, table)
    return table


def cache_io(cache_dir, q: int, k: int | None = None):
    """Round-trip helper: the context for ``q`` and, when ``k`` is given, its ``Kl_k`` table."""
    ctx = load_context(cache_dir, q)
    return ctx if k is None else (ctx, load_kl(cache_dir, ctx, k))
