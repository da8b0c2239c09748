"""Hot loops: pair decoding, bitset transitive closure and popcount.

Every kernel exists twice, ``*_numba`` and ``*_numpy``; the unsuffixed name
is bound to whichever path ``_accel.USE_NUMBA`` selects.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

WORD = 64


def n_words(n):
    return (n + WORD - 1) // WORD


def row_offsets(n):
    """Linear index of the first pair (i, i+1) of row i, for i = 0..n (0-based)."""
    i = np.arange(n + 1, dtype=np.int64)
    return i * (2 * n - i - 1) // 2


# --- pair decoding --------------------------------------------------------


@njit(cache=True, nogil=True)
def decode_pairs_numba(lin, n):
    m = lin.shape[0]
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    i = 0
    start = 0
    nxt = n - 1
    for k in range(m):
        x = lin[k]
        while x >= nxt:
            i += 1
            start = nxt
            nxt = start + (n - 1 - i)
        src[k] = i
        dst[k] = i + 1 + (x - start)
    return src, dst


def decode_pairs_numpy(lin, n):
    offsets = row_offsets(n)
    src = np.searchsorted(offsets, lin, side="right") - 1
    dst = src + 1 + (lin - offsets[src])
    return src.astype(np.int64), dst.astype(np.int64)


# --- reverse-topological bitset closure ------------------------------------


@njit(cache=True, nogil=True)
def closure_numba(indptr, indices, order, n):
    w = (n + 63) // 64
    reach = np.zeros((n, w), dtype=np.uint64)
    one = np.uint64(1)
    for t in range(n - 1, -1, -1):
        v = order[t]
        row = reach[v]
        row[v >> 6] |= one << np.uint64(v & 63)
        for e in range(indptr[v], indptr[v + 1]):
            other = reach[indices[e]]
            for k in range(w):
                row[k] |= other[k]
    return reach


def closure_numpy(indptr, indices, order, n):
    w = n_words(n)
    reach = np.zeros((n, w), dtype=np.uint64)
    verts = np.arange(n, dtype=np.uint64)
    reach[np.arange(n), (verts >> np.uint64(6)).astype(np.int64)] = np.uint64(1) << (verts & np.uint64(63))
    for v in order[::-1]:
        lo, hi = indptr[v], indptr[v + 1]
        if hi > lo:
            reach[v] |= np.bitwise_or.reduce(reach[indices[lo:hi]], axis=0)
    return reach


# --- popcount ---------------------------------------------------------------


@njit(cache=True, nogil=True)
def row_popcount_numba(bits):
    n, w = bits.shape
    out = np.zeros(n, dtype=np.int64)
    m1 = np.uint64(0x5555555555555555)
    m2 = np.uint64(0x3333333333333333)
    m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    h01 = np.uint64(0x0101010101010101)
    for i in range(n):
        s = 0
        for k in range(w):
            x = bits[i, k]
            x = x - ((x >> np.uint64(1)) & m1)
            x = (x & m2) + ((x >> np.uint64(2)) & m2)
            x = (x + (x >> np.uint64(4))) & m4
            s += int((x * h01) >> np.uint64(56))
        out[i] = s
    return out


def row_popcount_numpy(bits):
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(bits).sum(axis=1, dtype=np.int64)
    as_bytes = np.ascontiguousarray(bits).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1).sum(axis=1, dtype=np.int64)


if USE_NUMBA:
    decode_pairs = decode_pairs_numba
    closure = closure_numba
    row_popcount = row_popcount_numba
else:
    decode_pairs = decode_pairs_numpy
    closure = closure_numpy
    row_popcount = row_popcount_numpy
