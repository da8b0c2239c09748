import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipphase import domination as de
from pipphase import formulas as fb
from pipphase import measure as ml
from pipphase.dag import Dag, linear_extension, sample_barak_erdos, transitive_closure
from pipphase.errors import (
    EnumerationTooLargeError,
    NotDominatedError,
    NotIncreasingError,
    NotProductMeasureError,
    PreconditionError,
)
from pipphase.measure import Event
from pipphase.rng import make_rng

from oracles import conditionals, dominated_by_enumeration, monotone_sets


def random_dense(n, rng, alpha=0.7):
    return ml.dense_measure(rng.dirichlet(np.full(1 << n, alpha)))


def push_up(m, rng, share=0.5):
    """Move a random share of each configuration's mass to a random superset."""
    t = np.array(m.table)
    out = np.zeros_like(t)
    full = t.size - 1
    for x, p in enumerate(t):
        free = full & ~x
        extra = int(rng.integers(0, free + 1)) & free
        out[x] += (1 - share) * p
        out[x | extra] += share * p
    return ml.dense_measure(out / out.sum())


# --- increasing events ----------------------------------------------------------


def test_is_increasing_examples():
    assert de.is_increasing(Event.coordinate(3, 1, 1))
    assert not de.is_increasing(Event.coordinate(3, 1, 0))
    assert de.is_increasing(Event.at_least(3, 2))
    assert de.is_increasing(Event.full(2)) and de.is_increasing(Event.empty(2))


@pytest.mark.parametrize("n,count", [(1, 3), (2, 6), (3, 20), (4, 168)])
def test_upset_counts_match_oracle(n, count):
    ups = de.upsets(n)
    assert len(ups) == count
    got = {frozenset(np.flatnonzero(u.members).tolist()) for u in ups}
    assert got == set(monotone_sets(n))
    assert all(de.is_increasing(u) for u in ups)


def test_is_increasing_agrees_with_oracle_on_all_n3_events():
    mono = set(monotone_sets(3))
    for mask in range(256):
        e = Event.from_mask(3, mask)
        members = frozenset(np.flatnonzero(e.members).tolist())
        assert de.is_increasing(e) == (members in mono)


# --- domination -------------------------------------------------------------


def test_dominates_examples():
    hi, lo = ml.bernoulli(3, 0.5), ml.bernoulli(3, 0.2)
    assert de.dominates(hi, lo)
    assert dominated_by_enumeration(lo.table, hi.table, 3)
    assert not de.dominates(lo, hi)
    witness = Event.at_least(3, 1)
    assert ml.prob(hi, witness) > ml.prob(lo, witness)
    assert not dominated_by_enumeration(hi.table, lo.table, 3)
    m = random_dense(4, make_rng(2))
    assert de.dominates(m, m)


def test_dominates_size_guard():
    with pytest.raises(EnumerationTooLargeError):
        de.dominates(ml.bernoulli(11, 0.5), ml.bernoulli(11, 0.4))


def test_strassen_equivalence_n4():
    rng = make_rng(20240)
    agree = pos = 0
    for case in range(1000):
        n = int(rng.integers(1, 5))
        mu = random_dense(n, rng)
        nu = push_up(mu, rng) if case % 2 else random_dense(n, rng)
        flow = de.dominates(nu, mu)
        enum = dominated_by_enumeration(mu.table, nu.table, n)
        assert flow == enum == de.dominates_by_upsets(nu, mu)
        agree += 1
        pos += flow
    assert agree == 1000
    assert 300 < pos < 1000


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_reflexive_and_transitive(n, seed):
    rng = make_rng(seed)
    a = random_dense(n, rng)
    b = push_up(a, rng)
    c = push_up(b, rng)
    assert de.dominates(a, a)
    assert de.dominates(b, a) and de.dominates(c, b)
    assert de.dominates(c, a)


def test_bernoulli_grid():
    grid = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]
    for n in (1, 3):
        for p in grid:
            for q in grid:
                assert de.dominates(ml.bernoulli(n, q), ml.bernoulli(n, p)) == (p <= q)


def test_near_tie_is_decided_by_tolerance():
    a = ml.bernoulli(2, 0.3)
    b = ml.bernoulli(2, 0.3 - 1e-11)
    assert de.dominates(b, a)
    assert not de.dominates(ml.bernoulli(2, 0.3 - 1e-6), a)


# --- couplings -------------------------------------------------------------------


def test_coupling_n1_is_forced():
    cp = de.extract_coupling(ml.bernoulli(1, 0.2), ml.bernoulli(1, 0.5))
    joint = {k: v for k, v in cp.joint.items() if v > 0}
    assert set(joint) == {(1, 1), (0, 1), (0, 0)}
    assert joint[(1, 1)] == pytest.approx(0.2, abs=1e-12)
    assert joint[(0, 1)] == pytest.approx(0.3, abs=1e-12)
    assert joint[(0, 0)] == pytest.approx(0.5, abs=1e-12)


def test_coupling_examples():
    m = random_dense(3, make_rng(4))
    assert de.extract_coupling(m, m).invariant_errors(m, m) == []
    mu, nu = ml.bernoulli(2, 0.25), ml.bernoulli(2, 0.75)
    cp = de.extract_coupling(mu, nu)
    assert cp.invariant_errors(mu, nu) == []
    np.testing.assert_allclose(cp.left_marginal(), [0.5625, 0.1875, 0.1875, 0.0625], atol=1e-9)
    np.testing.assert_allclose(cp.right_marginal(), [0.0625, 0.1875, 0.1875, 0.5625], atol=1e-9)


def test_coupling_refuses_non_domination():
    with pytest.raises(NotDominatedError):
        de.extract_coupling(ml.bernoulli(2, 0.6), ml.bernoulli(2, 0.5))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_extracted_couplings_satisfy_invariants(n, seed):
    rng = make_rng(seed)
    mu = random_dense(n, rng)
    nu = push_up(mu, rng)
    cp = de.extract_coupling(mu, nu)
    assert cp.invariant_errors(mu, nu) == []
    assert all(x & ~y == 0 for x, y in cp.joint)


def test_coupling_invariant_errors_detect_problems():
    mu, nu = ml.bernoulli(1, 0.2), ml.bernoulli(1, 0.5)
    bad = de.Coupling(1, {(1, 0): 0.2, (0, 0): 0.8})
    errs = bad.invariant_errors(mu, nu)
    assert any("non-comparable" in e for e in errs)
    assert any("right marginal" in e for e in errs)


def test_coupling_text_round_trip():
    mu, nu = ml.bernoulli(2, 0.25), ml.bernoulli(2, 0.75)
    cp = de.extract_coupling(mu, nu)
    back = de.Coupling.loads(cp.dumps())
    assert back.n == 2
    assert back.joint == pytest.approx(cp.joint)


# --- Holley, FKG --------------------------------------------------------------------


def test_holley_examples(diamond):
    order = (1, 2, 3, 4)
    assert de.holley_check(ml.bernoulli(4, 0.7), 0.7, order)
    assert not de.holley_check(ml.bernoulli(4, 0.35), 0.7, order)
    c = transitive_closure(diamond)
    for seed in range(5):
        adm = ml.sample_admissible(c, 0.15, seed)
        comp = ml.complement_measure(adm)
        assert de.holley_check(comp, 0.85, linear_extension(diamond))


def test_holley_rejects_bad_order():
    with pytest.raises(ValueError):
        de.holley_check(ml.bernoulli(3, 0.5), 0.5, (1, 1, 2))


def test_holley_agrees_with_enumeration():
    rng = make_rng(9)
    for _ in range(30):
        m = random_dense(3, rng, alpha=3.0)
        order = [int(v) + 1 for v in rng.permutation(3)]
        eta = float(rng.uniform(0.2, 0.6))
        t = np.asarray(m.table)
        expect = all(
            val >= eta - 1e-9
            for pos, v in enumerate(order)
            for val in conditionals(t, 3, v - 1, [u - 1 for u in order[:pos]])
        )
        assert de.holley_check(m, eta, order) == expect


def test_holley_soundness():
    rng = make_rng(31)
    for case in range(120):
        n = int(rng.integers(1, 6))
        eta = float(rng.uniform(0.3, 0.9))
        order = rng.permutation(n)
        if case % 2:
            m = ml.chain_measure(order, eta, 1.0, int(rng.integers(2**32)))
        else:
            m = ml.random_mixture(n, 1.0, eta, rng)
        assert de.holley_check(m, eta, [int(v) + 1 for v in order])
        assert de.dominates(m, ml.bernoulli(n, eta))


def test_fkg_examples():
    m = ml.bernoulli(2, 0.5)
    h1 = Event.coordinate(2, 1)
    h2 = Event.coordinate(2, 1) & Event.coordinate(2, 2)
    assert ml.prob(m, h1 & h2) == 0.25 and ml.prob(m, h1) * ml.prob(m, h2) == 0.125
    assert de.fkg_check(m, h1, h2)
    p = ml.product_measure([0.3, 0.6, 0.8])
    a, b = Event.coordinate(3, 1), Event.coordinate(3, 2) | Event.coordinate(3, 3)
    assert ml.prob(p, a & b) == pytest.approx(ml.prob(p, a) * ml.prob(p, b), abs=1e-15)
    assert de.fkg_check(p, a, b, tol=1e-15)
    assert de.fkg_check(p, Event.full(3), b)


def test_fkg_errors():
    m = ml.bernoulli(2, 0.5)
    with pytest.raises(NotIncreasingError):
        de.fkg_check(m, Event.coordinate(2, 1, 0), Event.full(2))
    with pytest.raises(NotProductMeasureError):
        de.fkg_check(m.to_dense(), Event.full(2), Event.full(2))


def test_fkg_exhaustive_n3():
    ups = de.upsets(3)
    for params in ([0.5] * 3, [0.1, 0.6, 0.95], [0.0, 0.3, 1.0]):
        m = ml.product_measure(params)
        for a in ups:
            for b in ups:
                assert de.fkg_check(m, a, b, tol=1e-12)


@pytest.mark.parametrize("n", [4, 5])
def test_fkg_sampled(n):
    rng = make_rng(n)
    events = []
    while len(events) < 40:
        e = Event(n, rng.random(1 << n) < 0.5)
        # upward closure of a random set
        mem = np.array(e.members)
        for _ in range(n):
            for k in range(n):
                idx = np.flatnonzero(mem)
                mem[idx | (1 << k)] = True
        events.append(Event(n, mem))
    for _ in range(5):
        m = ml.product_measure(rng.random(n))
        for a in events[:20]:
            for b in events[20:]:
                assert de.fkg_check(m, a, b, tol=1e-12)


# --- lopsided local lemma ------------------------------------------------------------


def bounded_dag(n, d, rng):
    edges = []
    for i in range(1, n):
        targets = rng.choice(np.arange(i + 1, n + 1), size=min(d, n - i), replace=False)
        edges += [(i, int(t)) for t in targets[: int(rng.integers(0, d + 1))]]
    return Dag(n, edges)


@pytest.mark.parametrize("n,d", [(5, 1), (6, 2), (7, 3)])
def test_lll_boundary_product(n, d):
    g = bounded_dag(n, d, make_rng(n))
    delta = max(1, g.max_out_degree())
    eps = fb.theta(delta + 1)
    r = (1 / (delta + 1),) * n
    rep = de.lll_verify(de.LllInstance(ml.bernoulli(n, eps), g, r))
    assert rep.condition_holds
    assert rep.exact == pytest.approx((1 - eps) ** n)
    assert rep.bound == pytest.approx((1 - 1 / (delta + 1)) ** n)
    assert rep.exact >= rep.bound


def test_lll_zero_r():
    g = Dag(3, [(1, 2)])
    rep = de.lll_verify(de.LllInstance(ml.bernoulli(3, 0.0), g, (0.0, 0.0, 0.0)))
    assert rep.condition_holds and rep.bound == 1.0 and rep.exact == 1.0


def test_lll_condition_fails_above_threshold():
    g = Dag(3, [(1, 2), (2, 3)])
    rep = de.lll_verify(de.LllInstance(ml.bernoulli(3, 0.3), g, (0.5,) * 3))
    assert not rep.condition_holds
    assert rep.worst_slack < 0


def test_lll_on_admissible_mixtures():
    rng = make_rng(77)
    for case in range(60):
        n = int(rng.integers(2, 8))
        g = bounded_dag(n, 2, rng)
        delta = max(1, g.max_out_degree())
        eps = fb.theta(delta + 1) * float(rng.uniform(0.5, 1.0))
        c = transitive_closure(g)
        m = ml.sample_admissible(c, eps, case)
        rep = de.lll_verify(de.LllInstance(m, g, (1 / (delta + 1),) * n))
        if rep.condition_holds:
            assert rep.exact >= rep.bound - 1e-9


def test_lll_instance_validation():
    with pytest.raises(ValueError):
        de.LllInstance(ml.bernoulli(2, 0.1), Dag(2, []), (0.5, 1.0))
    with pytest.raises(ValueError):
        de.LllInstance(ml.bernoulli(2, 0.1), Dag(3, []), (0.5, 0.5))


# --- thinning construction and the W-class theorem ----------------------------------------


def test_lss_examples():
    z = de.lss_construct(ml.bernoulli(1, 0.8), 0.5)
    np.testing.assert_allclose(z.table, [0.6, 0.4], atol=1e-15)
    m = random_dense(3, make_rng(5))
    np.testing.assert_allclose(de.lss_construct(m, 1.0).table, m.table, atol=1e-15)
    np.testing.assert_allclose(de.lss_construct(m, 0.0).table, ml.point_mass(3, 0).table, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_lss_matches_brute_force(n, seed, lam):
    m = random_dense(n, make_rng(seed))
    got = de.lss_construct(m, lam).table
    expect = np.zeros(1 << n)
    for x, px in enumerate(m.table):
        for y in range(1 << n):
            k = bin(y).count("1")
            expect[x & y] += px * lam**k * (1 - lam) ** (n - k)
    np.testing.assert_allclose(got, expect, atol=1e-14)


def test_zdom_examples():
    a = 1 - math.sqrt(0.2)
    assert a == pytest.approx(0.55279, abs=1e-5)
    z = de.lss_construct(ml.bernoulli(2, 0.8), a)
    assert z.marginals()[0] == pytest.approx(0.44223, abs=1e-5)
    assert a * a == pytest.approx(0.30557, abs=1e-5)
    assert de.verify_zdom(z, a, a)
    assert de.verify_zdom(ml.point_mass(3, 7), 1.0, 1.0)
    assert not de.verify_zdom(ml.point_mass(3, 0), 0.5, 0.5)


def test_rho_parameters_match_zdom_example():
    r = fb.rho(1, 0.2)
    assert r.alpha == pytest.approx(1 - math.sqrt(0.2), abs=1e-14)
    assert r.lam == pytest.approx(1 - math.sqrt(0.2), abs=1e-14)


def test_appendix_examples():
    path = Dag(4, [(1, 2), (2, 3), (3, 4)])
    eta = 1 - fb.theta(2)
    assert de.verify_appendix_theorem(path, ml.bernoulli(4, eta), eta)
    rng = make_rng(12)
    for _ in range(10):
        mu = ml.random_mixture(4, 1.0, 0.75, rng)
        assert de.verify_appendix_theorem(path, mu, 0.75)
    assert de.verify_appendix_theorem(path, ml.point_mass(4, 15), 1.0)
    d2 = Dag(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
    eta2 = 1 - fb.theta(3)
    assert de.verify_appendix_theorem(d2, ml.bernoulli(4, eta2), eta2)


def test_appendix_preconditions():
    path = Dag(3, [(1, 2), (2, 3)])
    with pytest.raises(PreconditionError, match="epsicond"):
        de.verify_appendix_theorem(path, ml.bernoulli(3, 0.7), 0.7)
    with pytest.raises(PreconditionError, match="W-membership"):
        de.verify_appendix_theorem(path, ml.bernoulli(3, 0.6), 0.8)


def test_appendix_pipeline_random():
    rng = make_rng(2718)
    for case in range(100):
        n = int(rng.integers(2, 7))
        d = 1 + case % 2
        g = bounded_dag(n, d, rng)
        delta = de.appendix_delta(g)
        eps = fb.theta(delta + 1) * (1.0 if case % 3 else float(rng.uniform(0.2, 1.0)))
        eta = 1 - eps
        mu = ml.random_mixture(n, 1.0, eta, rng)
        assert ml.is_in_W(mu, g, eta)
        assert de.verify_appendix_theorem(g, mu, eta)
        r = fb.rho(delta, eps)
        assert de.verify_zdom(de.lss_construct(mu, r.lam), r.alpha, r.lam)
