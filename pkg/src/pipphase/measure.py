"""Exact probability measures on {0,1}^n and the admissibility checks.

Configurations are indexed by integers: bit k of the index is coordinate
k + 1. In text form a configuration is a binary string with coordinate 1
leftmost.
"""

import io
import os

import numpy as np

from .dag import Closure, Dag
from .errors import (
    DimensionMismatchError,
    EnumerationTooLargeError,
    InvalidMeasureError,
    SearchBudgetExceeded,
    UndefinedConditionalError,
)
from .rng import make_rng

MAX_DENSE_N = 20
MAX_ENUM_N = 12
DEFAULT_TOL = 1e-9
SUM_TOL = 1e-12


def cube(table, n):
    """View a length-2**n table as an n-axis array with axis k = coordinate k+1."""
    return table.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1)))


def flatten(arr):
    n = arr.ndim
    return np.ascontiguousarray(arr.transpose(tuple(range(n - 1, -1, -1)))).reshape(-1)


def bitstring(index, n):
    return "".join("1" if (index >> k) & 1 else "0" for k in range(n))


def parse_bitstring(s):
    return sum(1 << k for k, ch in enumerate(s) if ch == "1")


class Measure:
    """Probability measure on {0,1}^n in dense, product or mixture form."""

    __slots__ = ("n", "form", "params", "weights", "components", "_table")

    def __init__(self, n, form, table=None, params=None, weights=None, components=None):
        self.n = n
        self.form = form
        self.params = params
        self.weights = weights
        self.components = components
        self._table = table

    @property
    def table(self):
        if self._table is None:
            if self.n > MAX_DENSE_N:
                raise EnumerationTooLargeError(f"dense form capped at n <= {MAX_DENSE_N}")
            if self.form == "product":
                t = np.ones(1)
                for p in self.params:
                    t = np.concatenate([t * (1.0 - p), t * p])
            else:
                t = sum(w * comp.table for w, comp in zip(self.weights, self.components))
            t.setflags(write=False)
            self._table = t
        return self._table

    def cube(self):
        return cube(self.table, self.n)

    def marginals(self):
        """P(X_k = 1) for every coordinate."""
        if self.form == "product":
            return np.asarray(self.params, dtype=float)
        if self.form == "mixture":
            return sum(w * comp.marginals() for w, comp in zip(self.weights, self.components))
        c = self.cube()
        return np.array([c.take(1, axis=k).sum() for k in range(self.n)])

    def to_dense(self):
        return Measure(self.n, "dense", table=self.table)

    def sample(self, rng, size):
        """Draw ``size`` configurations as a (size, n) bool array."""
        if self.form == "product":
            return rng.random((size, self.n)) < np.asarray(self.params)
        if self.form == "mixture":
            which = rng.choice(len(self.weights), size=size, p=np.asarray(self.weights))
            probs = np.array([comp.params for comp in self.components])[which]
            return rng.random((size, self.n)) < probs
        idx = rng.choice(self.table.size, size=size, p=self.table)
        return ((idx[:, None] >> np.arange(self.n)) & 1).astype(bool)

    def __repr__(self):
        if self.form == "product":
            return f"Measure(product, n={self.n}, params={list(self.params)})"
        if self.form == "mixture":
            return f"Measure(mixture, n={self.n}, k={len(self.weights)})"
        return f"Measure(dense, n={self.n})"


def _check_prob(x, what):
    if not 0.0 <= x <= 1.0:
        raise InvalidMeasureError(f"{what} must lie in [0, 1], got {x!r}")


def dense_measure(table):
    t = np.array(table, dtype=float)
    if t.ndim != 1 or t.size < 2 or t.size & (t.size - 1):
        raise InvalidMeasureError("dense table length must be a power of two >= 2")
    n = t.size.bit_length() - 1
    if n > MAX_DENSE_N:
        raise InvalidMeasureError(f"dense form capped at n <= {MAX_DENSE_N}")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise InvalidMeasureError("negative or non-finite probability")
    if abs(t.sum() - 1.0) > SUM_TOL:
        raise InvalidMeasureError(f"probabilities sum to {t.sum()!r}, not 1")
    t.setflags(write=False)
    return Measure(n, "dense", table=t)


def product_measure(params):
    ps = tuple(float(p) for p in params)
    if not ps:
        raise InvalidMeasureError("need at least one coordinate")
    for p in ps:
        _check_prob(p, "product parameter")
    return Measure(len(ps), "product", params=ps)


def bernoulli(n, q):
    """The i.i.d. product measure with one-probability ``q`` on n coordinates."""
    return product_measure([q] * n)


def point_mass(n, index):
    t = np.zeros(1 << n)
    t[index] = 1.0
    return dense_measure(t)


def mixture(weights, components):
    ws = tuple(float(w) for w in weights)
    comps = tuple(components)
    if not ws or len(ws) != len(comps):
        raise InvalidMeasureError("need one weight per component")
    for w in ws:
        _check_prob(w, "mixture weight")
    if abs(sum(ws) - 1.0) > SUM_TOL:
        raise InvalidMeasureError(f"mixture weights sum to {sum(ws)!r}, not 1")
    if any(c.form != "product" for c in comps):
        raise InvalidMeasureError("mixture components must be product measures")
    n = comps[0].n
    if any(c.n != n for c in comps):
        raise DimensionMismatchError("mixture components differ in dimension")
    return Measure(n, "mixture", weights=ws, components=comps)


class Event:
    """Subset of {0,1}^n as a membership table of length 2**n."""

    __slots__ = ("n", "members")

    def __init__(self, n, members):
        members = np.asarray(members, dtype=bool)
        if members.shape != (1 << n,):
            raise DimensionMismatchError(f"event table must have 2**{n} entries")
        members.setflags(write=False)
        self.n = n
        self.members = members

    @classmethod
    def full(cls, n):
        return cls(n, np.ones(1 << n, dtype=bool))

    @classmethod
    def empty(cls, n):
        return cls(n, np.zeros(1 << n, dtype=bool))

    @classmethod
    def coordinate(cls, n, i, value=1):
        """{omega : omega(i) = value}, i 1-based."""
        bits = (np.arange(1 << n) >> (i - 1)) & 1
        return cls(n, bits == value)

    @classmethod
    def from_mask(cls, n, mask):
        """Event given as an integer whose bit x marks configuration x."""
        return cls(n, [(mask >> x) & 1 for x in range(1 << n)])

    @classmethod
    def from_predicate(cls, n, pred):
        return cls(n, [bool(pred(x)) for x in range(1 << n)])

    @classmethod
    def at_least(cls, n, k):
        """At least k coordinates equal to one."""
        return cls(n, popcounts(n) >= k)

    def __and__(self, other):
        _same_n(self, other)
        return Event(self.n, self.members & other.members)

    def __or__(self, other):
        _same_n(self, other)
        return Event(self.n, self.members | other.members)

    def __invert__(self):
        return Event(self.n, ~self.members)

    def __eq__(self, other):
        return isinstance(other, Event) and self.n == other.n and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((self.n, self.members.tobytes()))

    def __repr__(self):
        return f"Event(n={self.n}, size={int(self.members.sum())})"


def popcounts(n):
    """Number of ones in every configuration of {0,1}^n."""
    x = np.arange(1 << n)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


def _same_n(a, b):
    if a.n != b.n:
        raise DimensionMismatchError(f"dimension mismatch: {a.n} vs {b.n}")


def prob(m, e):
    _same_n(m, e)
    return float(m.table[e.members].sum())


def conditional(m, a, given):
    _same_n(m, a)
    _same_n(m, given)
    den = prob(m, given)
    if den <= 0.0:
        raise UndefinedConditionalError("conditioning event has probability zero")
    return prob(m, a & given) / den


def failure_free_prob(m):
    if m.form == "product":
        return float(np.prod([1.0 - p for p in m.params]))
    if m.form == "mixture":
        return sum(w * failure_free_prob(c) for w, c in zip(m.weights, m.components))
    return float(m.table[0])


def complement_measure(m):
    """Law of the bit-flipped configuration."""
    if m.form == "product":
        return product_measure([1.0 - p for p in m.params])
    if m.form == "mixture":
        return mixture(m.weights, [complement_measure(c) for c in m.components])
    t = m.table[::-1].copy()
    t.setflags(write=False)
    return Measure(m.n, "dense", table=t)


def tv_distance(m1, m2):
    _same_n(m1, m2)
    return 0.5 * float(np.abs(m1.table - m2.table).sum())


# --- enumeration over conditioning patterns ---------------------------------

# Ternary role codes per conditioned coordinate: value 0, value 1, excluded.
ROLE_ZERO, ROLE_ONE, ROLE_FREE = 0, 1, 2


def pattern_masses(arr, target, conditioned, ternary=True):
    """Joint masses for every assignment pattern on ``conditioned``.

    ``arr`` is a cube (axis k = coordinate k, 0-based). Returns ``(num, den)``
    arrays indexed by one role code per conditioned coordinate, where ``num``
    is P(pattern, X_target = 1) and ``den`` is P(pattern). With
    ``ternary=False`` the role codes are only (value 0, excluded).
    """
    n = arr.ndim
    keep = list(conditioned) + [target]
    drop = tuple(k for k in range(n) if k not in keep)
    a = arr.sum(axis=drop) if drop else arr
    rem = sorted(keep)
    a = a.transpose([rem.index(k) for k in keep])
    for ax in range(len(conditioned)):
        a0 = np.take(a, 0, axis=ax)
        a1 = np.take(a, 1, axis=ax)
        parts = (a0, a1, a0 + a1) if ternary else (a0, a0 + a1)
        a = np.stack(parts, axis=ax)
    return a[..., 1], a[..., 0] + a[..., 1]


def extreme_conditional(arr, target, conditioned, ternary=True, worst="max"):
    """Largest (or smallest) positive-probability conditional P(X_target=1 | pattern).

    Returns ``(value, pattern)`` with ``pattern`` a tuple of role codes, or
    ``(None, None)`` when every pattern has probability zero.
    """
    num, den = pattern_masses(arr, target, conditioned, ternary)
    ok = den > 0.0
    if not np.any(ok):
        return None, None
    ratio = np.where(ok, num / np.where(ok, den, 1.0), -np.inf if worst == "max" else np.inf)
    flat = int(np.argmax(ratio) if worst == "max" else np.argmin(ratio))
    pattern = np.unravel_index(flat, ratio.shape) if ratio.ndim else ()
    return float(ratio.reshape(-1)[flat]), tuple(int(p) for p in pattern)


def _enum_guard(n, cap=MAX_ENUM_N):
    if n > cap:
        raise EnumerationTooLargeError(f"exhaustive enumeration capped at n <= {cap}, got {n}")


def _closed_neighbourhoods(g, n):
    """0-based closed out-neighbourhoods from a Closure (Gamma*) or a Dag (N-bar)."""
    if isinstance(g, Closure):
        return [set(v - 1 for v in g.members(i)) for i in range(1, n + 1)]
    if isinstance(g, Dag):
        return [set(v - 1 for v in g.successors(i)) | {i - 1} for i in range(1, n + 1)]
    raise TypeError("expected a Dag or a Closure")


def admissibility_violation(m, c, eps, tol=DEFAULT_TOL):
    """First (vertex, Y, Y', conditional) breaking eps-admissibility, or None."""
    _same_n(m, c)
    _enum_guard(m.n)
    arr = m.cube()
    for i, hood in enumerate(_closed_neighbourhoods(c, m.n)):
        outside = [k for k in range(m.n) if k not in hood]
        value, pattern = extreme_conditional(arr, i, outside, worst="max")
        if value is not None and value > eps + tol:
            return _witness(i, outside, pattern, value)
    return None


def is_epsilon_admissible(m, c, eps, tol=DEFAULT_TOL):
    return admissibility_violation(m, c, eps, tol) is None


def w_violation(m, g, eta, tol=DEFAULT_TOL):
    _same_n(m, g)
    _enum_guard(m.n)
    arr = m.cube()
    for i, hood in enumerate(_closed_neighbourhoods(g, m.n)):
        outside = [k for k in range(m.n) if k not in hood]
        value, pattern = extreme_conditional(arr, i, outside, worst="min")
        if value is not None and value < eta - tol:
            return _witness(i, outside, pattern, value)
    return None


def is_in_W(m, g, eta, tol=DEFAULT_TOL):
    """Conditionals of X_i = 1 outside the closed out-neighbourhood are >= eta.

    ``g`` may be a Dag (neighbourhoods N(i) + i) or a Closure (Gamma*(i)).
    """
    return w_violation(m, g, eta, tol) is None


def _witness(i, coords, pattern, value):
    ones = [coords[k] + 1 for k, r in enumerate(pattern) if r == ROLE_ONE]
    zeros = [coords[k] + 1 for k, r in enumerate(pattern) if r == ROLE_ZERO]
    return {"vertex": i + 1, "Y": ones, "Y_prime": zeros, "conditional": value}


# --- constructive samplers ---------------------------------------------------


def random_mixture(n, lo, hi, rng, max_components=4, boundary_share=0.25):
    """Mixture of up to ``max_components`` products with parameters in [lo, hi].

    A share of parameters is pinned to the endpoint ``hi`` (or ``lo``) so that
    boundary conditionals get exercised.
    """
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    weights /= weights.sum()
    u = rng.random((k, n))
    u[rng.random((k, n)) < boundary_share] = 1.0
    params = lo + (hi - lo) * u
    params = np.clip(params, 0.0, 1.0)
    return mixture(weights, [product_measure(row) for row in params])


def _perturb_until(base, accept, rng, budget, scale=0.5):
    table = np.asarray(base.table)
    for attempt in range(budget):
        s = scale * 0.7**attempt
        cand = table * np.exp(s * rng.standard_normal(table.size))
        cand /= cand.sum()
        m = Measure(base.n, "dense", table=cand)
        m.table.setflags(write=False)
        if accept(m):
            return m
    raise SearchBudgetExceeded(f"no accepted perturbation within {budget} attempts")


PERTURB_BUDGET = 64


def sample_admissible(c, eps, seed, strategy="mixture"):
    """Random eps-admissible measure for the closure ``c``.

    ``mixture``: convex combination of products with parameters <= eps, so
    every conditional is a convex combination of values <= eps.
    ``perturb-verify``: log-normal perturbation of a dense admissible table,
    shrinking the noise until the exhaustive check passes (budget 64 tries).
    """
    n = c.n
    _enum_guard(n)
    rng = make_rng(seed)
    if strategy == "mixture":
        return random_mixture(n, 0.0, eps, rng)
    if strategy == "perturb-verify":
        base = random_mixture(n, 0.0, eps / 2, rng)
        return _perturb_until(base, lambda m: is_epsilon_admissible(m, c, eps, tol=0.0), rng, PERTURB_BUDGET)
    raise ValueError(f"unknown strategy {strategy!r}")


def sample_w_member(g, eta, seed, strategy="mixture"):
    """Random member of W^g_eta; mirror image of ``sample_admissible``."""
    n = g.n
    _enum_guard(n)
    rng = make_rng(seed)
    if strategy == "mixture":
        return random_mixture(n, 1.0, eta, rng)
    if strategy == "perturb-verify":
        base = random_mixture(n, 1.0, (1.0 + eta) / 2, rng)
        return _perturb_until(base, lambda m: is_in_W(m, g, eta, tol=0.0), rng, PERTURB_BUDGET)
    raise ValueError(f"unknown strategy {strategy!r}")


def chain_measure(order, lo, hi, seed):
    """Dense measure built along ``order`` (0-based vertices).

    Each X_v is Bernoulli with a parameter in [lo, hi] that depends arbitrarily
    on the values already drawn, so every conditional given a subset of the
    earlier vertices lies in [lo, hi].
    """
    order = [int(v) for v in order]
    n = len(order)
    _enum_guard(n, MAX_DENSE_N)
    rng = make_rng(seed)
    arr = np.ones(())
    for _ in order:
        q = rng.uniform(lo, hi, size=arr.shape)
        arr = np.stack([arr * (1.0 - q), arr * q], axis=-1)
    arr = arr.transpose([order.index(k) for k in range(n)])
    t = flatten(arr)
    t /= t.sum()
    t.setflags(write=False)
    return Measure(n, "dense", table=t)


# --- text serialization ------------------------------------------------------


def _fmt(x):
    return f"{x:.17g}"


def dumps_measure(m):
    buf = io.StringIO()
    if m.form == "product":
        buf.write(f"product\nn {m.n}\nparams {' '.join(_fmt(p) for p in m.params)}\n")
    elif m.form == "mixture":
        buf.write(f"mixture\nn {m.n}\ncomponents {len(m.weights)}\n")
        for w, comp in zip(m.weights, m.components):
            buf.write(f"weight {_fmt(w)} params {' '.join(_fmt(p) for p in comp.params)}\n")
    else:
        buf.write(f"{m.n}\n")
        for idx, p in enumerate(m.table):
            buf.write(f"{bitstring(idx, m.n)} {_fmt(float(p))}\n")
    return buf.getvalue()


def loads_measure(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidMeasureError("empty measure file")
    head = lines[0]
    try:
        if head == "product":
            return product_measure(float(x) for x in lines[2].split()[1:])
        if head == "mixture":
            weights, comps = [], []
            for ln in lines[3:]:
                toks = ln.split()
                weights.append(float(toks[1]))
                comps.append(product_measure(float(x) for x in toks[3:]))
            return mixture(weights, comps)
        n = int(head)
        table = np.zeros(1 << n)
        for ln in lines[1:]:
            bits, p = ln.split()
            if len(bits) != n:
                raise InvalidMeasureError(f"configuration {bits!r} is not {n} bits")
            table[parse_bitstring(bits)] = float(p)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, InvalidMeasureError):
            raise
        raise InvalidMeasureError(f"malformed measure file: {exc}") from None
    return dense_measure(table)


def write_measure(m, path):
    with open(os.fspath(path), "w") as fh:
        fh.write(dumps_measure(m))


def read_measure(path):
    with open(os.fspath(path)) as fh:
        return loads_measure(fh.read())
