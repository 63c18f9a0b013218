"""Closed forms, solver-defined constants, regime classification, and the
diameter bounds they combine into.

Every solver output satisfies its defining relation to 1e-10 on substitution.
Ceiling arithmetic near integer boundaries runs in 50-digit precision, and an
exact integer hit rounds up one more step, so the emitted integer bounds are
reproducible and conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import mpmath as mp

from .errors import InternalConsistencyError, ParameterError
from .model import KroneckerParams

#: Tolerance for the regime boundary beta + gamma = 1 (float parameter sums
#: like 0.3 + 0.7 miss 1.0 by one ulp).
BOUNDARY_TOL = 1e-12

_MP_DPS = 50


class Verdict(Enum):
    AAS_CONNECTED = "AAS_CONNECTED"
    AAS_DISCONNECTED = "AAS_DISCONNECTED"
    SUBCRITICAL_EXTENSION = "SUBCRITICAL_EXTENSION"


@dataclass(frozen=True)
class ConnectivityVerdict:
    verdict: Verdict
    matched_case: str

    def __str__(self):
        return f"{self.verdict.value} ({self.matched_case})"


def classify_connectivity(params: KroneckerParams) -> ConnectivityVerdict:
    """The four-case connectivity classification, plus an explicit flag for
    the subcritical regime the theorem statement does not cover.

    Exactly one case fires for every valid parameter triple.
    """
    alpha, beta, gamma = params.as_tuple()
    s = beta + gamma
    if abs(s - 1.0) <= BOUNDARY_TOL:
        if beta != 1.0:
            return ConnectivityVerdict(Verdict.AAS_DISCONNECTED,
                                       "beta+gamma=1, beta!=1")
        if alpha == 0.0:
            return ConnectivityVerdict(Verdict.AAS_DISCONNECTED,
                                       "beta=1, alpha=gamma=0")
        return ConnectivityVerdict(Verdict.AAS_CONNECTED,
                                   "beta=1, alpha>0, gamma=0")
    if s > 1.0:
        return ConnectivityVerdict(Verdict.AAS_CONNECTED, "beta+gamma>1")
    return ConnectivityVerdict(
        Verdict.SUBCRITICAL_EXTENSION,
        "beta+gamma<1: outside the theorem, disconnected by isolated-vertex reasoning")


def solve_eta(alpha: float) -> float:
    """The largest eta in (0, 1) with alpha^eta * sqrt(alpha^2 + 1) = 1 + eta.

    The defining function is strictly decreasing on (0, 1) for alpha <= 1, so
    bisection finds the unique (hence largest) root; the residual at the
    returned value is below 1e-12.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"solve_eta requires 0 < alpha <= 1, got {alpha}")
    scale = math.sqrt(alpha * alpha + 1.0)

    def f(e: float) -> float:
        return alpha ** e * scale - 1.0 - e

    lo, hi = 0.0, 1.0
    if f(lo) <= 0.0:
        raise ParameterError("no root in (0, 1)")  # cannot happen: f(0) > 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    eta = 0.5 * (lo + hi)
    if abs(f(eta)) > 1e-12:
        raise ParameterError(f"bisection residual {f(eta):.3e} above tolerance")
    return eta


def epsilon_star(alpha: float, beta: float) -> float:
    """Supremum of the eps satisfying (alpha+beta)^(1-eps) * (4*alpha*beta)^eps > 1,
    clamped to 1.

    When 4*alpha*beta >= 1 both factors are >= 1 and every eps in (0, 1)
    works; otherwise the boundary value ln(alpha+beta) / ln((alpha+beta)/(4*alpha*beta))
    makes the product exactly 1.
    """
    if alpha <= 0.0:
        raise ParameterError(f"epsilon_star requires alpha > 0, got {alpha}")
    s = alpha + beta
    if s <= 1.0:
        raise ParameterError(
            f"epsilon_star requires alpha + beta > 1, got {s}; "
            "the condition fails as eps -> 0")
    four_ab = 4.0 * alpha * beta
    if four_ab >= 1.0:
        return 1.0
    return min(1.0, math.log(s) / math.log(s / four_ab))


def _ceil_conservative(x: "mp.mpf") -> int:
    """Ceiling with exact integers pushed up one more step."""
    floor = mp.floor(x)
    if x == floor:
        return int(floor) + 1
    return int(mp.ceil(x))


def _drift_step_bound_mp(a_mp, b_mp, epsilon) -> int:
    if a_mp == b_mp:
        return 0
    drift = abs((a_mp - b_mp) / (a_mp + b_mp))
    return _ceil_conservative(mp.log(epsilon) / mp.log(drift))


def drift_step_bound(alpha: float, beta: float, epsilon: float) -> int:
    """Steps until the drift contraction pushes the relative weight deviation
    below epsilon: ceil(log_|drift|(epsilon)), 0 when alpha = beta (one step
    reaches n/2 exactly)."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if alpha + beta <= 0:
        raise ParameterError("drift bound requires alpha + beta > 0")
    with mp.workdps(_MP_DPS):
        return _drift_step_bound_mp(mp.mpf(alpha), mp.mpf(beta), mp.mpf(epsilon))


@dataclass(frozen=True)
class TheoryConstants:
    """The derived constant bundle for one parameter point, with the formula
    provenance of each entry.

    ``a = c + 2 * c_prime`` exactly; integer bounds are all >= 1.
    """

    eta: float | None
    epsilon: float
    xi: float
    k: int
    path_bound_mid: int
    c: int
    b: int
    c_prime: int
    a: int
    provenance: dict = field(compare=False, default_factory=dict)


def constants_pipeline(params: KroneckerParams) -> TheoryConstants:
    """Derive (eps, xi, k, path bound, c, b, c', a) for the supercritical
    diagonal case alpha = gamma, beta + gamma > 1.

    eps is half the supremum over the two constraints (growth rate > 1 and
    the common-neighbor condition), xi the square root of the growth rate at
    that eps, and the integer bounds follow by conservative ceilings.
    """
    alpha, beta, gamma = params.as_tuple()
    if alpha != gamma:
        raise ParameterError(
            f"constants pipeline requires alpha = gamma, got {alpha} != {gamma}")
    if beta + gamma <= 1.0 + BOUNDARY_TOL:
        raise ParameterError(
            f"constants pipeline requires beta + gamma > 1, got {beta + gamma}")
    if alpha <= 0.0:
        raise ParameterError("constants pipeline requires alpha > 0")
    with mp.workdps(_MP_DPS):
        a_mp, b_mp = mp.mpf(alpha), mp.mpf(beta)
        s = a_mp + b_mp
        mn = min(a_mp, b_mp)
        eps_growth = mp.log(s) / mp.log(s / mn) if mn < s else mp.mpf(1)
        four_ab = 4 * a_mp * b_mp
        if four_ab >= 1:
            eps_common = mp.mpf(1)
        else:
            eps_common = min(mp.mpf(1), mp.log(s) / mp.log(s / four_ab))
        eps = min(eps_growth, eps_common, mp.mpf(1)) / 2
        growth = mn ** eps * s ** (1 - eps)
        xi = mp.sqrt(growth)
        log_xi_2 = mp.log(2) / mp.log(xi)
        k = 2 * _ceil_conservative(log_xi_2)
        path_bound_mid = 2 * k
        c = 8 * _ceil_conservative(log_xi_2 / eps)
        b_steps = _drift_step_bound_mp(a_mp, b_mp, eps)
        c_prime = b_steps + 2
        bound = c + 2 * c_prime
        eps_f, xi_f = float(eps), float(xi)
    eta = solve_eta(alpha) if alpha > 0 else None
    provenance = {
        "eta": "largest root of alpha^eta*sqrt(alpha^2+1)=1+eta (bisection)",
        "epsilon": "half of min(growth bound ln(a+b)/ln((a+b)/min(a,b)), "
                   "common-neighbor bound, 1)",
        "xi": "sqrt(min(a,b)^eps * (a+b)^(1-eps))",
        "k": "2*ceil(log_xi 2)",
        "path_bound_mid": "2*k = 4*ceil(log_xi 2)",
        "c": "8*ceil(log_xi(2)/eps), middle-layer diameter bound",
        "b": "ceil(log_|drift|(eps)) drift steps, 0 when alpha=beta",
        "c_prime": "b + 2: drift phase plus one targeting step each side",
        "a": "c + 2*c_prime, whole-graph diameter bound",
    }
    return TheoryConstants(eta, eps_f, xi_f, k, path_bound_mid, c,
                           b_steps, c_prime, int(bound), provenance)


def expected_degree(params: KroneckerParams, n: int, w: int) -> float:
    """Expected degree of a weight-w vertex: the class-sum identity
    (alpha+beta)^w * (beta+gamma)^(n-w) minus the self term."""
    alpha, beta, gamma = params.as_tuple()
    return ((alpha + beta) ** w * (beta + gamma) ** (n - w)
            - alpha ** w * gamma ** (n - w))


def _rounded_class(alpha: float, beta: float, n: int, w: int) -> tuple[int, int]:
    frac = alpha / (alpha + beta)
    return round(frac * w), round(frac * (n - w))


def max_term_bound(n: int, w: int, alpha: float, beta: float) -> float:
    """The near-maximal term of the degree sum at the rounded split, checked
    against the (alpha+beta)^n / n^2 floor.

    The exponent of beta is the one consistent with the sum identity
    (the complementary share), with integer exponents from the rounding.
    """
    if not (0 < alpha and 0 < beta):
        raise ParameterError("max_term_bound requires positive alpha, beta")
    if not 0 <= w <= n:
        raise ParameterError(f"weight w={w} outside [0, {n}]")
    r, s = _rounded_class(alpha, beta, n, w)
    value = (math.comb(w, r) * math.comb(n - w, s)
             * alpha ** (r + s) * beta ** ((w - r) + (n - w - s)))
    floor = (alpha + beta) ** n / n ** 2
    if value < floor * (1.0 - 1e-12):
        raise InternalConsistencyError(
            f"max-term bound violated at n={n}, w={w}: {value} < {floor}")
    return value


@dataclass(frozen=True)
class DriftTarget:
    """One contraction step of the weight drift: the exact target weight, its
    nearest integer, the realizable class weight, and the expected number of
    neighbors in that class."""

    target: Fraction
    target_nearest: int
    shared_ones: int
    shared_zeros: int
    achieved_weight: int
    expected_count: float


def _as_fraction(x: float) -> Fraction:
    # exact for decimal-literal parameters; repr round-trips the double
    return Fraction(repr(float(x)))


def weight_drift_target(n: int, w: int, alpha: float, beta: float) -> DriftTarget:
    """Target weight n/2 + drift * (w - n/2) with drift = (alpha-beta)/(alpha+beta),
    and the expected count of neighbors in the rounded signature class that
    realizes it."""
    if alpha + beta <= 0:
        raise ParameterError("weight drift requires alpha + beta > 0")
    fa, fb = _as_fraction(alpha), _as_fraction(beta)
    drift = (fa - fb) / (fa + fb)
    target = Fraction(n, 2) + drift * (Fraction(w) - Fraction(n, 2))
    r, s = _rounded_class(alpha, beta, n, w)
    expected = (math.comb(w, r) * math.comb(n - w, s)
                * alpha ** (r + s) * beta ** ((w - r) + (n - w - s)))
    achieved = r + (n - w - s)
    return DriftTarget(target, round(target), r, s, achieved, expected)


def drift_trajectory(n: int, w0: int, alpha: float, beta: float,
                     steps: int) -> list[Fraction]:
    """The closed-form drift recurrence as exact rationals:
    w_i = n/2 + drift^i * (w0 - n/2), so the deviation contracts geometrically
    by |drift| each step."""
    if steps < 0:
        raise ParameterError("steps must be >= 0")
    fa, fb = _as_fraction(alpha), _as_fraction(beta)
    drift = (fa - fb) / (fa + fb)
    half = Fraction(n, 2)
    dev = Fraction(w0) - half
    out = [Fraction(w0)]
    for _ in range(steps):
        dev *= drift
        out.append(half + dev)
    return out


@dataclass(frozen=True)
class Beta1Bound:
    """Exact no-common-neighbor probability over the structured candidates,
    and the exponential upper bound it must not exceed."""

    exact_product: float
    paper_bound: float


def beta1_no_common_neighbor(alpha: float, w: int, t: int) -> Beta1Bound:
    """P(no structured candidate is a common neighbor) in the beta=1 case.

    A candidate keeps j of the w ones and saturates all zero positions; it is
    a common neighbor of the weight-w vertex and its distance-t heavier twin
    with probability alpha^(2j+t), independently across candidates.  The
    exact value is prod_j (1 - alpha^(2j+t))^C(w, j) over j = 1..w-1; the
    exponential form exp(-alpha^t * ((alpha^2+1)^w - alpha^(2w) - 1)) bounds
    it from above.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"beta1 case requires 0 < alpha <= 1, got {alpha}")
    if not 1 <= t < w:
        raise ParameterError(f"requires 1 <= t < w, got t={t}, w={w}")
    exact = 1.0
    exponent_sum = 0.0
    for j in range(1, w):
        p_common = alpha ** (2 * j + t)
        exact *= (1.0 - p_common) ** math.comb(w, j)
        exponent_sum += math.comb(w, j) * p_common
    sum_bound = math.exp(-exponent_sum)
    paper_bound = math.exp(-(alpha ** t)
                           * ((alpha ** 2 + 1.0) ** w - alpha ** (2 * w) - 1.0))
    if exact > sum_bound + 1e-12:
        raise InternalConsistencyError(
            "exact product exceeds its 1-x <= e^-x majorant")
    if sum_bound > paper_bound + 1e-12:
        raise InternalConsistencyError(
            "summed bound exceeds the closed exponential form")
    return Beta1Bound(exact, paper_bound)


def beta1_path_bound(alpha: float) -> int:
    """Path-length bound ceil(1/eta) + 2 for the beta=1, gamma=0 regime."""
    if alpha <= 0.0:
        raise ParameterError(
            "beta1 path bound needs alpha > 0; alpha = 0 is the disconnected case")
    eta = solve_eta(alpha)
    with mp.workdps(_MP_DPS):
        return _ceil_conservative(1 / mp.mpf(eta)) + 2


def diameter_upper_bound(params: KroneckerParams) -> int:
    """The constant diameter bound for a connected regime.

    The beta=1 branch uses the path bound from eta; the supercritical branch
    lowers alpha to gamma (which can only increase the diameter) and runs the
    constants pipeline on the diagonal point.
    """
    verdict = classify_connectivity(params)
    if verdict.verdict is not Verdict.AAS_CONNECTED:
        raise ParameterError(
            f"diameter bound is defined only in the connected regime; "
            f"got {verdict}")
    if verdict.matched_case.startswith("beta=1"):
        return beta1_path_bound(params.alpha)
    reduced = KroneckerParams(params.gamma, params.beta, params.gamma)
    return constants_pipeline(reduced).a


def constants_report(params: KroneckerParams) -> dict:
    """Flat key/value bundle for display: branch-aware, always ending with the
    overall bound ``a``."""
    verdict = classify_connectivity(params)
    report: dict = {
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "verdict": verdict.verdict.value,
        "matched_case": verdict.matched_case,
    }
    if verdict.verdict is not Verdict.AAS_CONNECTED:
        report["a"] = None
        return report
    if verdict.matched_case.startswith("beta=1"):
        eta = solve_eta(params.alpha)
        report["eta"] = eta
        report["a"] = beta1_path_bound(params.alpha)
        return report
    reduced = params if params.alpha == params.gamma else \
        KroneckerParams(params.gamma, params.beta, params.gamma)
    if reduced is not params:
        report["reduced_alpha"] = reduced.alpha
    bundle = constants_pipeline(reduced)
    report.update({
        "eta": bundle.eta,
        "epsilon": bundle.epsilon,
        "xi": bundle.xi,
        "k": bundle.k,
        "path_bound_mid": bundle.path_bound_mid,
        "c": bundle.c,
        "b": bundle.b,
        "c_prime": bundle.c_prime,
        "a": bundle.a,
    })
    return report
