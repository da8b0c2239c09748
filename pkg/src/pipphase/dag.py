"""Acyclic digraphs on [n], Barak-Erdos sampling and bitset reachability.

Vertices are labelled 1..n everywhere in the public API and in files;
arrays handed to the kernels are 0-based.
"""

import heapq
import io
import os
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import ClosureTooLargeError, InvalidGraphError
from .rng import make_rng

MAX_CLOSURE_N = 1 << 16
GEOMETRIC_BELOW = 0.1


class Dag:
    """Immutable acyclic digraph. ``edges`` is an (m, 2) int64 array, 1-based, sorted."""

    __slots__ = ("n", "edges", "_indptr", "_indices", "_order", "_increasing")

    def __init__(self, n, edges=()):
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InvalidGraphError(f"vertex count must be a positive integer, got {n!r}")
        n = int(n)
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InvalidGraphError("edges must be a sequence of (i, j) pairs")
        if arr.size and (arr.min() < 1 or arr.max() > n):
            raise InvalidGraphError(f"edge endpoint outside 1..{n}")
        src, dst = arr[:, 0], arr[:, 1]
        if np.any(src == dst):
            raise InvalidGraphError("self-loop")
        key = (src - 1) * n + (dst - 1)
        order = np.argsort(key, kind="stable")
        key = key[order]
        if key.size > 1 and np.any(key[1:] == key[:-1]):
            raise InvalidGraphError("duplicate edge")
        arr = np.ascontiguousarray(arr[order])
        arr.setflags(write=False)
        self.n = n
        self.edges = arr
        self._increasing = bool(np.all(arr[:, 0] < arr[:, 1]))

        counts = np.bincount(arr[:, 0] - 1, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.ascontiguousarray(arr[:, 1] - 1)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        self._indptr = indptr
        self._indices = indices
        self._order = self._topological_order()

    def _topological_order(self):
        n = self.n
        if self._increasing:
            order = np.arange(n, dtype=np.int64)
        else:
            indeg = np.bincount(self._indices, minlength=n).tolist()
            heap = [v for v in range(n) if indeg[v] == 0]
            heapq.heapify(heap)
            out = []
            indptr, indices = self._indptr, self._indices
            while heap:
                v = heapq.heappop(heap)
                out.append(v)
                for w in indices[indptr[v]:indptr[v + 1]].tolist():
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        heapq.heappush(heap, w)
            if len(out) != n:
                raise InvalidGraphError("graph contains a directed cycle")
            order = np.asarray(out, dtype=np.int64)
        order.setflags(write=False)
        return order

    @property
    def n_edges(self):
        return int(self.edges.shape[0])

    @property
    def is_natural(self):
        """True when every edge (i, j) has i < j, as in Barak-Erdos samples."""
        return self._increasing

    def csr(self):
        """0-based (indptr, indices) adjacency."""
        return self._indptr, self._indices

    def successors(self, i):
        lo, hi = self._indptr[i - 1], self._indptr[i]
        return (self._indices[lo:hi] + 1).tolist()

    def out_degrees(self):
        return np.diff(self._indptr)

    def max_out_degree(self):
        return int(self.out_degrees().max(initial=0))

    def topological_order(self):
        """0-based order, ties broken by smallest label."""
        return self._order

    def edge_set(self):
        return {(int(a), int(b)) for a, b in self.edges}

    def __eq__(self, other):
        return isinstance(other, Dag) and self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        return f"Dag(n={self.n}, edges={self.n_edges})"


class Closure:
    """Reflexive transitive closure as packed 64-bit bitsets, one row per vertex."""

    __slots__ = ("n", "reach", "sizes", "gamma_star", "delta")

    def __init__(self, n, reach):
        self.n = n
        reach.setflags(write=False)
        self.reach = reach
        sizes = _kernels.row_popcount(reach)
        sizes.setflags(write=False)
        self.sizes = sizes
        self.gamma_star = int(sizes.max())
        self.delta = self.gamma_star - 1

    @property
    def nbytes(self):
        return int(self.reach.nbytes)

    def reaches(self, i, j):
        """``j`` in Gamma*(i), 1-based."""
        j0 = j - 1
        return bool((int(self.reach[i - 1, j0 >> 6]) >> (j0 & 63)) & 1)

    def members(self, i):
        bits = np.unpackbits(self.reach[i - 1].view(np.uint8), bitorder="little")[: self.n]
        return (np.flatnonzero(bits) + 1).tolist()

    def mask(self, i):
        """Gamma*(i) as a Python int with bit k set for vertex k+1."""
        out = 0
        for k, word in enumerate(self.reach[i - 1].tolist()):
            out |= int(word) << (64 * k)
        return out

    def as_dag(self):
        """The transitive-closure graph G* (no self-loops)."""
        edges = [(i, j) for i in range(1, self.n + 1) for j in self.members(i) if j != i]
        return Dag(self.n, edges)

    def __eq__(self, other):
        return isinstance(other, Closure) and self.n == other.n and np.array_equal(self.reach, other.reach)

    def __hash__(self):
        return hash((self.n, self.reach.tobytes()))


def sample_barak_erdos(n, p, seed):
    """Sample G_d(n, p): each pair i < j becomes the edge (i, j) with probability ``p``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidGraphError(f"n must be a positive integer, got {n!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    n = int(n)
    total = n * (n - 1) // 2
    rng = make_rng(seed)
    if p == 0.0 or total == 0:
        lin = np.zeros(0, dtype=np.int64)
    elif p == 1.0:
        lin = np.arange(total, dtype=np.int64)
    elif p < GEOMETRIC_BELOW:
        lin = _geometric_positions(rng, p, total)
    else:
        lin = _bernoulli_positions(rng, p, n)
    src, dst = _kernels.decode_pairs(lin, n)
    edges = np.stack([src + 1, dst + 1], axis=1) if lin.size else np.zeros((0, 2), dtype=np.int64)
    return Dag(n, edges)


def _geometric_positions(rng, p, total):
    chunks = []
    cur = -1
    while True:
        expected = (total - 1 - cur) * p
        size = int(expected + 6.0 * np.sqrt(expected) + 16)
        # saturating jumps keep cumsum clear of int64 overflow for tiny p
        jumps = np.minimum(rng.geometric(p, size=size), total + 1)
        pos = cur + np.cumsum(jumps)
        if pos[-1] >= total:
            chunks.append(pos[pos < total])
            break
        chunks.append(pos)
        cur = int(pos[-1])
    return np.concatenate(chunks).astype(np.int64)


def _bernoulli_positions(rng, p, n):
    offsets = _kernels.row_offsets(n)
    chunks = []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - 1 - i) < p)
        chunks.append(hits + offsets[i])
    return np.concatenate(chunks).astype(np.int64) if chunks else np.zeros(0, dtype=np.int64)


def transitive_closure(g):
    if g.n > MAX_CLOSURE_N:
        raise ClosureTooLargeError(
            f"closure of n={g.n} needs {g.n * g.n // 8} bytes; cap is n <= {MAX_CLOSURE_N}"
        )
    indptr, indices = g.csr()
    reach = _kernels.closure(indptr, indices, g.topological_order(), g.n)
    return Closure(g.n, reach)


def rtc_sizes(c):
    return [int(s) for s in c.sizes]


def linear_extension(g):
    return tuple(int(v) + 1 for v in g.topological_order())


def density(g):
    return Fraction(g.n_edges, g.n)


# --- edge-list files --------------------------------------------------------


def dumps_edge_list(g):
    buf = io.StringIO()
    buf.write(f"{g.n}\n")
    for a, b in g.edges.tolist():
        buf.write(f"{a} {b}\n")
    return buf.getvalue()


def loads_edge_list(text):
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidGraphError("empty edge-list file")
    try:
        n = int(lines[0])
        edges = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise InvalidGraphError(f"malformed edge list: {exc}") from None
    if any(len(e) != 2 for e in edges):
        raise InvalidGraphError("each edge line needs exactly two labels")
    return Dag(n, edges)


def write_edge_list(g, path):
    with open(os.fspath(path), "w") as fh:
        fh.write(dumps_edge_list(g))


def read_edge_list(path):
    with open(os.fspath(path)) as fh:
        return loads_edge_list(fh.read())
