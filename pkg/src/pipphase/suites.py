"""Randomised property suites behind ``pipphase verify``.

Each suite draws ``cases`` instances from a seeded generator, checks one
family of invariants, and records every violation with the offending
instance serialized for replay.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import domination as dom
from . import measure as ml
from .dag import Dag, dumps_edge_list, sample_barak_erdos, transitive_closure
from .formulas import cond1_rhs, cond2_rhs, f_epsilon_exact, majority_bound, rho, theta
from .rng import derive_seed, make_rng

SUITES = ("admissible", "domination", "holley", "fkg", "lll", "appendix", "majority")
ADMISSIBLE_EPS = (0.05, 0.1, 0.25)


@dataclass
class SuiteReport:
    suite: str
    cases: int
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def fail(self, case, message, **instance):
        self.failures.append({"case": case, "message": message, "instance": instance})

    def render(self):
        lines = [f"suite={self.suite} cases={self.cases} failures={len(self.failures)}"]
        for f in self.failures:
            lines.append(f"FAIL case {f['case']}: {f['message']}")
            for key, val in f["instance"].items():
                text = val if isinstance(val, str) else repr(val)
                lines.append(f"  [{key}]")
                lines.extend("    " + ln for ln in text.rstrip("\n").splitlines())
        return "\n".join(lines)


def random_dag(rng, n, p=None):
    if p is None:
        p = float(rng.uniform(0.1, 0.7))
    return sample_barak_erdos(n, p, int(rng.integers(0, 2**63)))


def bounded_outdegree_dag(rng, n, delta):
    """Random natural-order DAG whose out-degrees are at most ``delta``, one vertex hitting it."""
    while True:
        edges = []
        for i in range(1, n):
            k = int(rng.integers(0, min(delta, n - i) + 1))
            for j in rng.choice(np.arange(i + 1, n + 1), size=k, replace=False):
                edges.append((i, int(j)))
        g = Dag(n, edges)
        if g.max_out_degree() == delta:
            return g


def random_dense(rng, n, sparsity=0.3):
    t = rng.exponential(size=1 << n)
    t[rng.random(1 << n) < sparsity] = 0.0
    if t.sum() == 0.0:
        t[int(rng.integers(0, 1 << n))] = 1.0
    return ml.dense_measure(t / t.sum())


def push_up(rng, m):
    """A measure dominating ``m``: each atom sends a random share to a random superset."""
    n = m.n
    out = np.zeros(1 << n)
    for x, p in enumerate(m.table):
        if p == 0.0:
            continue
        y = x | int(rng.integers(0, 1 << n))
        share = float(rng.random())
        out[x] += p * (1.0 - share)
        out[y] += p * share
    return ml.dense_measure(out / out.sum())


def random_upset(rng, n):
    """Upward closure of a few random configurations."""
    size = 1 << n
    gens = rng.integers(0, size, size=int(rng.integers(0, 4)))
    members = np.zeros(size, dtype=bool)
    idx = np.arange(size)
    for x in gens:
        members |= (idx & int(x)) == int(x)
    return ml.Event(n, members)


# --- suites --------------------------------------------------------------------


def suite_admissible(cases, seed):
    rep = SuiteReport("admissible", cases)
    for k in range(cases):
        rng = make_rng(derive_seed(seed, k))
        n = int(rng.integers(1, 9))
        g = random_dag(rng, n)
        clo = transitive_closure(g)
        eps = ADMISSIBLE_EPS[k % len(ADMISSIBLE_EPS)]
        strategy = "perturb-verify" if k % 5 == 4 and n <= 6 else "mixture"
        m = ml.sample_admissible(clo, eps, derive_seed(seed, k, 1), strategy)
        inst = {"graph": dumps_edge_list(g), "measure": ml.dumps_measure(m), "eps": eps}
        if not ml.is_epsilon_admissible(m, clo, eps):
            rep.fail(k, "generated measure is not eps-admissible", **inst)
            continue
        floor = f_epsilon_exact(n, eps)
        ff = ml.failure_free_prob(m)
        if ff < floor - 1e-12:
            rep.fail(k, f"failure-free probability {ff!r} below (1-eps)^n = {floor!r}", **inst)
        attained = ml.failure_free_prob(ml.bernoulli(n, eps))
        if abs(attained - floor) > 1e-12:
            rep.fail(k, f"product measure gives {attained!r}, expected {floor!r}", **inst)
        if n <= 6 and not ml.is_in_W(ml.complement_measure(m), clo, 1.0 - eps):
            rep.fail(k, "complement of an admissible measure is not in W on G*", **inst)
    return rep


def suite_domination(cases, seed):
    rep = SuiteReport("domination", cases)
    for k in range(cases):
        rng = make_rng(derive_seed(seed, k))
        n = int(rng.integers(1, 5))
        mu = random_dense(rng, n)
        nu = push_up(rng, mu) if k % 2 == 0 else random_dense(rng, n)
        inst = {"mu": ml.dumps_measure(mu), "nu": ml.dumps_measure(nu)}
        flow = dom.dominates(nu, mu)
        oracle = dom.dominates_by_upsets(nu, mu)
        if flow != oracle:
            rep.fail(k, f"flow says {flow}, upset enumeration says {oracle}", **inst)
            continue
        if k % 2 == 0 and not flow:
            rep.fail(k, "pushed-up measure not recognised as dominating", **inst)
        if flow:
            errs = dom.extract_coupling(mu, nu).invariant_errors(mu, nu)
            if errs:
                rep.fail(k, "coupling invariants: " + "; ".join(errs), **inst)
    return rep


def suite_holley(cases, seed):
    rep = SuiteReport("holley", cases)
    for k in range(cases):
        rng = make_rng(derive_seed(seed, k))
        n = int(rng.integers(1, 6))
        eta = float(rng.uniform(0.5, 0.95))
        order = [int(v) for v in rng.permutation(n)]
        m = ml.chain_measure(order, eta, 1.0, derive_seed(seed, k, 1))
        order1 = [v + 1 for v in order]
        inst = {"measure": ml.dumps_measure(m), "eta": eta, "order": order1}
        if not dom.holley_check(m, eta, order1):
            rep.fail(k, "chain measure fails the Holley condition it was built to satisfy", **inst)
        elif not dom.dominates(m, ml.bernoulli(n, eta)):
            rep.fail(k, "Holley condition holds but the measure does not dominate Bernoulli(eta)", **inst)
    return rep


def suite_fkg(cases, seed):
    rep = SuiteReport("fkg", cases)
    for k in range(cases):
        rng = make_rng(derive_seed(seed, k))
        n = int(rng.integers(1, 6))
        m = ml.product_measure(rng.random(n))
        e1, e2 = random_upset(rng, n), random_upset(rng, n)
        if not dom.fkg_check(m, e1, e2, tol=1e-12):
            rep.fail(k, "FKG inequality violated", measure=ml.dumps_measure(m),
                     e1=np.flatnonzero(e1.members).tolist(), e2=np.flatnonzero(e2.members).tolist())
    return rep


def lll_instance(rng, n, seed):
    """Admissible instance on the closure graph with r_i = 1/(Delta+1)."""
    while True:
        g = random_dag(rng, n)
        clo = transitive_closure(g)
        if clo.delta >= 1:
            break
    delta = clo.delta
    u = 1.0 if rng.random() < 0.3 else float(rng.random())
    eps = theta(delta + 1) * u
    m = ml.sample_admissible(clo, eps, seed)
    return dom.LllInstance(m, clo.as_dag(), tuple([1.0 / (delta + 1)] * n)), g, eps


def suite_lll(cases, seed):
    rep = SuiteReport("lll", cases)
    for k in range(cases):
        rng = make_rng(derive_seed(seed, k))
        n = int(rng.integers(2, 9))
        inst, g, eps = lll_instance(rng, n, derive_seed(seed, k, 1))
        info = {"graph": dumps_edge_list(g), "measure": ml.dumps_measure(inst.measure), "eps": eps}
        try:
            res = dom.lll_verify(inst)
        except dom.TheoremViolation as exc:
            rep.fail(k, str(exc), **info)
            continue
        if not res.condition_holds:
            rep.fail(k, f"local-lemma condition fails (slack {res.worst_slack!r})", **info)
        elif res.exact < res.bound - 1e-9:
            rep.fail(k, f"exact {res.exact!r} below bound {res.bound!r}", **info)
    return rep


def appendix_case(rng, seed, k):
    delta = 1 + k % 2
    n = int(rng.integers(delta + 1, 7))
    g = bounded_outdegree_dag(rng, n, delta)
    eps = theta(delta + 1)
    strategy = "perturb-verify" if k % 4 == 3 else "mixture"
    m = ml.sample_w_member(g, 1.0 - eps, seed, strategy)
    return g, m, delta, eps


def suite_appendix(cases, seed):
    rep = SuiteReport("appendix", cases)
    for k in range(cases):
        rng = make_rng(derive_seed(seed, k))
        g, m, delta, eps = appendix_case(rng, derive_seed(seed, k, 1), k)
        info = {"graph": dumps_edge_list(g), "measure": ml.dumps_measure(m), "eps": eps}
        if not dom.verify_appendix_theorem(g, m, 1.0 - eps):
            rep.fail(k, "W-member does not dominate Bernoulli(rho)", **info)
        params = rho(delta, eps)
        if not dom.verify_zdom(dom.lss_construct(m, params.lam), params.alpha, params.lam):
            rep.fail(k, "thinned law violates the alpha*lambda conditional bound", **info)
        if abs(cond1_rhs(params.alpha, params.lam, delta) - eps) > 1e-12:
            rep.fail(k, "cond1 not tight", **info)
        if eps > cond2_rhs(params.alpha, delta) + 1e-12:
            rep.fail(k, "cond2 violated", **info)
    return rep


def layered_network(a, d):
    """d disjoint groups of a gates, every gate wired into one output gate."""
    out = a * d + 1
    return Dag(out, [(i, out) for i in range(1, out)])


def majority_probability(m, a, d, samples, rng, chunk=20000):
    """Monte Carlo P(more than half the gates have not failed) under failure law m."""
    total = a * d + 1
    hits = 0
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        failed = m.sample(rng, size)
        hits += int(np.count_nonzero((total - failed.sum(axis=1)) * 2 > total))
        done += size
    return hits / samples


MAJORITY_GRID = [(a, 3, 0.1) for a in (16, 64)] + [(4, 2, 0.2), (8, 3, 0.25), (16, 1, 0.05)]


def suite_majority(cases, seed, samples=100_000):
    rep = SuiteReport("majority", cases)
    for k in range(cases):
        a, d, eps = MAJORITY_GRID[k % len(MAJORITY_GRID)]
        rng = make_rng(derive_seed(seed, k))
        n = a * d + 1
        if k % 2 == 0:
            m = ml.bernoulli(n, eps)
        else:
            m = ml.random_mixture(n, 0.0, eps, rng)
        est = majority_probability(m, a, d, samples, rng)
        bound = majority_bound(1.0 - eps, a, d)
        se = math.sqrt(max(est * (1.0 - est), 0.0) / samples)
        if est < bound - 3.0 * se:
            rep.fail(k, f"P(M) ~ {est!r} below bound {bound!r} - 3se", a=a, d=d, eps=eps,
                     measure=ml.dumps_measure(m))
    return rep


_RUNNERS = {
    "admissible": suite_admissible,
    "domination": suite_domination,
    "holley": suite_holley,
    "fkg": suite_fkg,
    "lll": suite_lll,
    "appendix": suite_appendix,
    "majority": suite_majority,
}


def run_verification_suite(suite, cases, seed):
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if cases < 1:
        raise ValueError("cases must be >= 1")
    return _RUNNERS[suite](cases, seed)
