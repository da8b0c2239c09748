"""Stochastic domination on {0,1}^n: decision, couplings and the classical criteria.

``dominates(nu, mu)`` asks whether mu is stochastically dominated by nu. It is
decided as a transport problem: supplies mu(x), demands nu(y) and uncapacitated
arcs x -> y only where x <= y componentwise. By Strassen's theorem a flow that
ships all of mu exists exactly when mu is dominated by nu. Probabilities are
scaled to integers (resolution 1e-12) and the max-flow is computed exactly.
"""

import io
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .dag import Dag
from .errors import (
    EnumerationTooLargeError,
    NotDominatedError,
    NotIncreasingError,
    NotProductMeasureError,
    PreconditionError,
    TheoremViolation,
)
from .formulas import rho as rho_params
from .formulas import theta
from .measure import (
    DEFAULT_TOL,
    Event,
    Measure,
    _same_n,
    bernoulli,
    bitstring,
    extreme_conditional,
    flatten,
    parse_bitstring,
    prob,
    w_violation,
)

SCALE = 10**12
MAX_FLOW_N = 10
MAX_UPSET_N = 4


def _guard(n, cap, what):
    if n > cap:
        raise EnumerationTooLargeError(f"{what} capped at n <= {cap}, got {n}")


def is_increasing(e):
    members = e.members
    idx = np.arange(1 << e.n)
    for k in range(e.n):
        low = idx[(idx >> k) & 1 == 0]
        if np.any(members[low] & ~members[low | (1 << k)]):
            return False
    return True


def upsets(n):
    """Every increasing event of {0,1}^n (168 of them for n = 4). Test oracle."""
    _guard(n, MAX_UPSET_N, "upset enumeration")
    size = 1 << n
    masks = np.arange(1 << size, dtype=np.int64)
    ok = np.ones(masks.size, dtype=bool)
    for x in range(size):
        for k in range(n):
            if not (x >> k) & 1:
                y = x | (1 << k)
                ok &= ((masks >> x) & 1) <= ((masks >> y) & 1)
    return [Event.from_mask(n, int(m)) for m in masks[ok]]


def dominates_by_upsets(nu, mu, tol=DEFAULT_TOL):
    """Oracle: mu(U) <= nu(U) + tol for every increasing U (n <= 4)."""
    _same_n(nu, mu)
    ups = np.array([u.members for u in upsets(mu.n)], dtype=float)
    return bool(np.all(ups @ mu.table <= ups @ nu.table + tol))


def _scaled(table):
    return [int(round(float(p) * SCALE)) for p in table]


def _transport(mu, nu):
    """Exact integer max-flow for the monotone transport network."""
    n = mu.n
    supply = _scaled(mu.table)
    demand = _scaled(nu.table)
    g = nx.DiGraph()
    g.add_node("s")
    g.add_node("t")
    src = [x for x in range(1 << n) if supply[x] > 0]
    dst = [y for y in range(1 << n) if demand[y] > 0]
    for x in src:
        g.add_edge("s", ("a", x), capacity=supply[x])
    for y in dst:
        g.add_edge(("b", y), "t", capacity=demand[y])
    for x in src:
        for y in dst:
            if x & ~y == 0:
                g.add_edge(("a", x), ("b", y))
    value, flow = nx.maximum_flow(g, "s", "t")
    return value, flow, sum(supply)


def _feasible(value, total, n, tol):
    slack = max(1 << n, int(round(tol * SCALE)))
    return value >= total - slack


def dominates(nu, mu, tol=DEFAULT_TOL):
    """True iff mu is stochastically dominated by nu (within ``tol`` of mass)."""
    _same_n(nu, mu)
    _guard(mu.n, MAX_FLOW_N, "flow-based domination")
    value, _, total = _transport(mu, nu)
    return _feasible(value, total, mu.n, tol)


@dataclass(frozen=True)
class Coupling:
    """Joint law on pairs (x, y) with x <= y; keys are configuration indices."""

    n: int
    joint: dict

    def left_marginal(self):
        out = np.zeros(1 << self.n)
        for (x, _), m in self.joint.items():
            out[x] += m
        return out

    def right_marginal(self):
        out = np.zeros(1 << self.n)
        for (_, y), m in self.joint.items():
            out[y] += m
        return out

    def total(self):
        return math.fsum(self.joint.values())

    def invariant_errors(self, mu, nu, tol=DEFAULT_TOL):
        errs = []
        if any(x & ~y for x, y in self.joint):
            errs.append("support contains a non-comparable pair")
        if any(m < 0 for m in self.joint.values()):
            errs.append("negative mass")
        if abs(self.total() - 1.0) > tol:
            errs.append(f"total mass {self.total()!r}")
        if np.max(np.abs(self.left_marginal() - mu.table)) > tol:
            errs.append("left marginal differs from the dominated measure")
        if np.max(np.abs(self.right_marginal() - nu.table)) > tol:
            errs.append("right marginal differs from the dominating measure")
        return errs

    def dumps(self):
        buf = io.StringIO()
        for (x, y), m in sorted(self.joint.items()):
            buf.write(f"{bitstring(x, self.n)} {bitstring(y, self.n)} {m:.17g}\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text):
        joint = {}
        n = None
        for ln in text.splitlines():
            if not ln.strip():
                continue
            a, b, m = ln.split()
            n = len(a)
            joint[(parse_bitstring(a), parse_bitstring(b))] = float(m)
        return cls(n, joint)


def extract_coupling(mu, nu, tol=DEFAULT_TOL):
    """A monotone coupling of mu (left) under nu (right)."""
    _same_n(mu, nu)
    _guard(mu.n, MAX_FLOW_N, "coupling extraction")
    value, flow, total = _transport(mu, nu)
    if not _feasible(value, total, mu.n, tol):
        raise NotDominatedError("no monotone coupling: mu is not dominated by nu")
    joint = {}
    for u, arcs in flow.items():
        if not (isinstance(u, tuple) and u[0] == "a"):
            continue
        for v, f in arcs.items():
            if f > 0:
                joint[(u[1], v[1])] = f / SCALE
    return Coupling(mu.n, joint)


def holley_violation(m, eta, order, tol=DEFAULT_TOL):
    _guard(m.n, 12, "Holley enumeration")
    order = [int(v) - 1 for v in order]
    if sorted(order) != list(range(m.n)):
        raise ValueError("order must be a permutation of 1..n")
    arr = m.cube()
    for t, v in enumerate(order):
        value, pattern = extreme_conditional(arr, v, order[:t], worst="min")
        if value is not None and value < eta - tol:
            return {"vertex": v + 1, "position": t, "conditional": value, "pattern": pattern}
    return None


def holley_check(m, eta, order, tol=DEFAULT_TOL):
    """Every conditional of X_i = 1 given values of earlier vertices is >= eta."""
    return holley_violation(m, eta, order, tol) is None


def fkg_check(m, e1, e2, tol=DEFAULT_TOL):
    if m.form != "product":
        raise NotProductMeasureError("FKG check needs a product measure")
    for e in (e1, e2):
        if not is_increasing(e):
            raise NotIncreasingError("FKG check needs increasing events")
    return prob(m, e1 & e2) >= prob(m, e1) * prob(m, e2) - tol


# --- lopsided local lemma ------------------------------------------------------


@dataclass(frozen=True)
class LllInstance:
    measure: Measure
    graph: Dag
    r: tuple

    def __post_init__(self):
        if self.measure.n != self.graph.n or len(self.r) != self.graph.n:
            raise ValueError("measure, graph and r must agree in dimension")
        if any(not 0.0 <= x < 1.0 for x in self.r):
            raise ValueError("every r_i must lie in [0, 1)")


@dataclass(frozen=True)
class LllReport:
    condition_holds: bool
    bound: float
    exact: float
    worst_slack: float


def lll_verify(inst, tol=DEFAULT_TOL):
    """Check the local-lemma condition on H_i = {x_i = 1} and compare its bound.

    Condition: P(H_i | no H_j for j in Y) <= r_i * prod_{j in N(i)} (1 - r_j) for
    every Y outside the closed out-neighbourhood of i. When it holds the
    no-event probability must be at least prod (1 - r_i).
    """
    m, g, r = inst.measure, inst.graph, inst.r
    _guard(m.n, MAX_FLOW_N, "local-lemma enumeration")
    arr = m.cube()
    holds = True
    worst = math.inf
    for i in range(m.n):
        succ = [j - 1 for j in g.successors(i + 1)]
        rhs = r[i] * math.prod(1.0 - r[j] for j in succ)
        hood = set(succ) | {i}
        outside = [k for k in range(m.n) if k not in hood]
        value, _ = extreme_conditional(arr, i, outside, ternary=False, worst="max")
        if value is None:
            continue
        worst = min(worst, rhs - value)
        if value > rhs + tol:
            holds = False
    bound = math.prod(1.0 - x for x in r)
    exact = float(m.table[0])
    if holds and exact < bound - tol:
        raise TheoremViolation(f"local lemma: P(no event)={exact!r} < bound {bound!r}")
    return LllReport(holds, bound, exact, worst)


# --- constructions for the W-class domination theorem --------------------------


def lss_construct(mu, lam):
    """Exact law of Z = X * Y with X ~ mu and Y ~ Bernoulli(lam)^n independent."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    _guard(mu.n, 12, "thinning construction")
    a = mu.cube().copy()
    for k in range(mu.n):
        a0 = np.take(a, 0, axis=k)
        a1 = np.take(a, 1, axis=k)
        a = np.stack([a0 + (1.0 - lam) * a1, lam * a1], axis=k)
    t = flatten(a)
    t.setflags(write=False)
    return Measure(mu.n, "dense", table=t)


def zdom_violation(z_law, alpha, lam, tol=DEFAULT_TOL):
    _guard(z_law.n, MAX_FLOW_N, "zdom enumeration")
    arr = z_law.cube()
    target = alpha * lam
    for i in range(z_law.n):
        others = [k for k in range(z_law.n) if k != i]
        value, pattern = extreme_conditional(arr, i, others, worst="min")
        if value is not None and value < target - tol:
            return {"vertex": i + 1, "conditional": value, "pattern": pattern}
    return None


def verify_zdom(z_law, alpha, lam, tol=DEFAULT_TOL):
    """P(Z_i = 1 | any positive-probability assignment elsewhere) >= alpha * lam."""
    return zdom_violation(z_law, alpha, lam, tol) is None


def appendix_delta(g):
    """Out-degree bound used by the W-class theorem (at least 1)."""
    return max(1, g.max_out_degree())


def verify_appendix_theorem(g, mu, eta, tol=DEFAULT_TOL):
    """Check that mu dominates Bernoulli(rho)^n for a W-member mu on the DAG g."""
    _guard(mu.n, MAX_FLOW_N, "appendix verification")
    if mu.n != g.n:
        raise PreconditionError("dimension", "measure and graph differ in size")
    delta = appendix_delta(g)
    eps = 1.0 - eta
    limit = theta(delta + 1)
    if eps > limit * (1.0 + 1e-12):
        raise PreconditionError("epsicond", f"eps={eps!r} exceeds {limit!r} for delta={delta}")
    bad = w_violation(mu, g, eta, tol)
    if bad is not None:
        raise PreconditionError("W-membership", f"conditional {bad['conditional']!r} < eta at {bad}")
    params = rho_params(delta, min(max(eps, 0.0), limit))
    return dominates(mu, bernoulli(mu.n, params.rho), tol)
