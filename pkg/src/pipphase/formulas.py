"""Closed-form quantities for the failure-free probability and its bounds.

Natural logarithms throughout. Powers of numbers close to one are evaluated
as ``exp(n * log1p(-x))`` so that values such as (1 - 3e-5) ** 16384 keep
full relative precision.
"""

import math
from dataclasses import dataclass

E = math.e


def theta(x):
    """(x-1)**(x-1) / x**x for x >= 1, with theta(1) = 1 (0**0 = 1)."""
    if x < 1:
        raise ValueError(f"theta is defined for x >= 1, got {x!r}")
    if x == 1:
        return 1.0
    return math.exp((x - 1) * math.log(x - 1) - x * math.log(x))


def power_of_complement(n, q):
    """(1 - q) ** n for q in [0, 1], n >= 0."""
    if n == 0:
        return 1.0
    if q >= 1.0:
        return 0.0
    return math.exp(n * math.log1p(-q))


def f_epsilon_exact(n, eps):
    """Minimum failure-free probability over eps-admissible laws on n gates."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    return power_of_complement(n, eps)


def phase_limit(c):
    if c < 0:
        raise ValueError("c must be non-negative")
    if c <= 1:
        return 0.0
    return math.exp(-c / (E * (c - 1)))


def lll_lower_bound(delta, n):
    """(1 - 1/(delta+1)) ** n."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return power_of_complement(n, 1.0 / (delta + 1))


def f_g_exact(delta, n):
    """(1 - delta**delta / (delta+1)**(delta+1)) ** n."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return f_epsilon_exact(n, theta(delta + 1))


def lll_threshold(delta):
    """Largest eps for which r_i = 1/(delta+1) satisfies the local-lemma condition."""
    return theta(delta + 1)


@dataclass(frozen=True)
class PhasePoint:
    c: float
    n: int
    gamma_star: int
    f_n: float
    f_limit: float

    @classmethod
    def from_gamma(cls, c, n, gamma_star):
        return cls(c, n, gamma_star, f_epsilon_exact(n, theta(gamma_star)), phase_limit(c))


@dataclass(frozen=True)
class PtWindow:
    lo: float
    hi: float
    regime: str
    A: float
    kappa: float
    center: float

    def contains(self, gamma_star):
        if self.regime == "subcritical":
            return self.lo < gamma_star <= self.hi
        return self.lo <= gamma_star <= self.hi


def pittel_tungol_window(n, c, A=1.0, kappa=0.1):
    """Whp window for the largest reflexive transitive closure of G_d(n, c log(n)/n).

    ``A`` and ``kappa`` are heuristic defaults; only their existence is known.
    """
    if n < 16:
        raise ValueError("window needs n >= 16 so that log log n > 0")
    if A <= 0:
        raise ValueError("A must be positive")
    if not 0.0 < kappa < 1.0:
        raise ValueError("kappa must lie in (0, 1)")
    if c < 0:
        raise ValueError("c must be non-negative")
    ln = math.log(n)
    if c >= 1:
        center = n * (1.0 - 1.0 / c) + 2.0 * n * math.log(ln) / (c * ln)
        half = A * n / ln
        return PtWindow(center - half, center + half, "critical-or-super", A, kappa, center)
    hi = n**c * ln
    lo = (1.0 - kappa) * hi
    return PtWindow(lo, hi, "subcritical", A, kappa, 0.5 * (lo + hi))


def majority_bound(eta, a, d):
    """eta * (1 - exp(-a (4 eta - 2)**2)) ** d; requires eta >= 1/2."""
    if eta < 0.5 or eta > 1.0:
        raise ValueError(f"majority bound needs 1/2 <= eta <= 1, got {eta!r}")
    if a < 1 or d < 0:
        raise ValueError("a must be positive and d non-negative")
    per_subnet = -math.expm1(-a * (4.0 * eta - 2.0) ** 2)
    return eta * per_subnet**d


@dataclass(frozen=True)
class RhoParams:
    alpha: float
    lam: float
    rho: float


def rho(delta, eps):
    """Domination parameter for W-members on graphs of out-degree <= delta."""
    if delta < 1 or int(delta) != delta:
        raise ValueError("delta must be an integer >= 1")
    limit = theta(delta + 1)
    if eps < 0 or eps > limit * (1.0 + 1e-12):
        raise ValueError(
            f"epsicond violated: eps={eps!r} exceeds delta**delta/(delta+1)**(delta+1)={limit!r}"
        )
    eps = min(eps, limit)
    root = 1.0 / (delta + 1)
    alpha = 1.0 - eps**root / delta ** (delta * root)
    lam = 1.0 - (eps * delta) ** root
    return RhoParams(alpha, lam, alpha * lam)


def cond1_rhs(alpha, lam, delta):
    return (1.0 - alpha) * (1.0 - lam) ** delta


def cond2_rhs(alpha, delta):
    return (1.0 - alpha) * alpha**delta


# --- Programmer-Hacker game ---------------------------------------------------


@dataclass(frozen=True)
class GameParams:
    eps0: float
    n0: int
    c: float
    delta_margin: float

    def satisfies_invariants(self):
        return (
            self.eps0 <= 1.0 / (E * (1.0 - 1.0 / self.c) * self.n0)
            and self.c * math.log(self.n0) / self.n0 <= 1.0
        )


WINNING_C = E * math.log(2) / (E * math.log(2) - 1.0)


def game_parameters(eps0):
    """Smallest n0 and largest c with eps0 <= 1/(e(1 - 1/c) n0) and c ln(n0)/n0 <= 1.

    With c = n0/ln n0 the first bound equals 1/(e(n0 - ln n0)), which decreases
    in n0, so an ascending scan over n0 stops at n0 = 2. When even n0 = 2 fails
    with that c, c is lowered to the largest value meeting the eps0 bound.
    """
    if not 0.0 < eps0 < 1.0:
        raise ValueError("eps0 must lie in (0, 1)")
    n0 = 2
    c = n0 / math.log(n0)
    if eps0 > 1.0 / (E * (1.0 - 1.0 / c) * n0):
        c = 1.0 / (1.0 - 1.0 / (E * eps0 * n0))
        while eps0 > 1.0 / (E * (1.0 - 1.0 / c) * n0):
            c = math.nextafter(c, 1.0)
    return GameParams(eps0, n0, c, phase_limit(c) - 0.5)
