"""
Shannon entropy bounds from indices of coincidence.

Given the power sums I^(s) = sum_j p_j^s for s = 2..n, the maximal
probability is bounded by the root Upsilon of an oval-curve equation.
Rescaling the probabilities by Upsilon moves all approximation points
into [0, 1], where the polynomial envelopes of poly_estimators apply;
summing them gives two-sided entropy estimates.

All entropies are in nats.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import optimize
from scipy.special import xlogy

from .coefficients import (
    CHEB_MAX_DEGREE,
    CoefficientTable,
    cheb_lower_coeffs,
    cheb_shifted_coeffs,
    cheb_upper_coeffs,
    taylor_lower_coeffs,
    taylor_upper_coeffs,
)
from .errors import (
    ConvergenceFailure,
    DegreeOutOfRange,
    DomainError,
    InfeasibleIndex,
    InvalidDistribution,
    InvalidTag,
)
from .poly_estimators import eval_g

logger = logging.getLogger(__name__)

DISTRIBUTION_TOLERANCE = 1e-12
INDEX_TOLERANCE = 1e-12
# I^(n) within this relative distance of L^(1-n) is treated as uniform
FLOOR_RTOL = 1e-12


class Method(Enum):
    """Estimator family used for a two-sided bound."""

    TAYLOR = "taylor"
    CHEBYSHEV = "cheb"


def parse_method(method: "Method | str") -> Method:
    if isinstance(method, Method):
        return method
    try:
        return Method(method)
    except ValueError:
        raise InvalidTag(
            f"Unknown method '{method}'. Valid: taylor, cheb"
        ) from None


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Finite discrete distribution over L outcomes."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=float).ravel()
        if arr.size < 1:
            raise InvalidDistribution("distribution needs >= 1 outcome")
        if np.any(np.isnan(arr)) or np.any(arr < 0.0):
            raise InvalidDistribution("probabilities must be nonnegative")
        total = float(np.sum(arr))
        if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
            raise InvalidDistribution(
                f"probabilities sum to {total!r}, expected 1"
            )
        object.__setattr__(self, "probs", arr)

    @property
    def L(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.L


def as_distribution(
    p: "ProbabilityVector | Iterable[float]",
) -> ProbabilityVector:
    if isinstance(p, ProbabilityVector):
        return p
    return ProbabilityVector(np.asarray(list(p), dtype=float))


@dataclass(frozen=True)
class IndexVector:
    """Power sums I^(2)..I^(n); I^(1) = 1 is implicit."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DegreeOutOfRange("IndexVector needs at least I^(2)")
        for s, v in enumerate(vals, start=2):
            if not 0.0 < v <= 1.0 + INDEX_TOLERANCE:
                raise InfeasibleIndex(f"I^({s}) = {v!r} outside (0, 1]")
        for s in range(1, len(vals)):
            if vals[s] > vals[s - 1] + INDEX_TOLERANCE:
                raise InfeasibleIndex(
                    f"I^({s + 2}) exceeds I^({s + 1}); indices must be "
                    "nonincreasing"
                )
        object.__setattr__(self, "values", vals)

    @property
    def degree(self) -> int:
        return len(self.values) + 1

    def index(self, s: int) -> float:
        if s == 1:
            return 1.0
        if not 2 <= s <= self.degree:
            raise DegreeOutOfRange(
                f"index s={s} not available (degree {self.degree})"
            )
        return self.values[s - 2]

    def power_sums(self) -> tuple[float, ...]:
        """I^(1)..I^(n), starting with the implicit 1."""
        return (1.0, *self.values)


@dataclass(frozen=True)
class TwoSidedBound:
    lower: float
    upper: float
    upsilon: float
    method: Method
    degree: int

    def contains(self, value: float, slack: float = 1e-10) -> bool:
        return self.lower - slack <= value <= self.upper + slack


# ---------------------------------------------------------------------------
# Entropy primitives
# ---------------------------------------------------------------------------


def _check_power(s: int) -> None:
    if s < 2:
        raise DegreeOutOfRange(f"power s must be >= 2, got {s}")


def shannon_entropy(p: ProbabilityVector | Iterable[float]) -> float:
    """-sum p ln p with 0 ln 0 = 0."""
    probs = as_distribution(p).probs
    return float(-np.sum(xlogy(probs, probs)))


def index_coincidence(
    p: ProbabilityVector | Iterable[float], s: int
) -> float:
    """I^(s) = sum p^s."""
    _check_power(s)
    probs = as_distribution(p).probs
    return float(np.sum(probs**s))


def tsallis_entropy(p: ProbabilityVector | Iterable[float], s: int) -> float:
    """H_s = (I^(s) - 1) / (1 - s)."""
    return (index_coincidence(p, s) - 1.0) / (1.0 - s)


def index_vector_from_distribution(
    p: ProbabilityVector | Iterable[float], n: int
) -> IndexVector:
    if n < 2:
        raise DegreeOutOfRange(f"degree must be >= 2, got {n}")
    dist = as_distribution(p)
    return IndexVector(
        tuple(index_coincidence(dist, s) for s in range(2, n + 1))
    )


# ---------------------------------------------------------------------------
# Maximal probability root
# ---------------------------------------------------------------------------


def upsilon_closed_form_n2(L: int, I: float) -> float:
    """Upsilon for n = 2: (1 + sqrt(L-1) sqrt(L I - 1)) / L."""
    if L < 2:
        raise DomainError(f"L must be >= 2, got {L}")
    radicand = max(L * I - 1.0, 0.0)
    return (1.0 + math.sqrt(L - 1) * math.sqrt(radicand)) / L


def upsilon_root(
    L: int,
    n: int,
    I: float,
    *,
    xtol: float = 1e-13,
    maxiter: int = 200,
) -> float:
    """
    Upper bound on max_j p_j given sum_j p_j^n = I over L outcomes.

    Solves (1 - U)^n + (L-1)^(n-1) U^n = (L-1)^(n-1) I for its root in
    [1/L, 1], where the scaled left side is strictly increasing.

    Raises:
        InfeasibleIndex: If I lies outside [L^(1-n), 1]
        ConvergenceFailure: If bisection does not converge
    """
    if L < 2:
        raise DomainError(f"L must be >= 2, got {L}")
    if n < 2:
        raise DegreeOutOfRange(f"n must be >= 2, got {n}")
    floor = float(L) ** (1 - n)
    if I < floor * (1.0 - FLOOR_RTOL) or I > 1.0 + INDEX_TOLERANCE:
        raise InfeasibleIndex(
            f"I^({n}) = {I!r} outside [{floor!r}, 1] for L={L}"
        )
    lo, hi = 1.0 / L, 1.0
    if I <= floor * (1.0 + FLOOR_RTOL):
        return lo
    if I >= 1.0:
        return hi

    scale = float(L - 1) ** (n - 1)

    def psi(u: float) -> float:
        return (1.0 - u) ** n / scale + u**n - I

    if psi(lo) >= 0.0:
        return lo
    if psi(hi) <= 0.0:
        return hi

    root, info = optimize.bisect(
        psi, lo, hi, xtol=xtol, maxiter=maxiter, full_output=True, disp=False
    )
    if not info.converged:
        logger.info(
            f"Bisection for Upsilon failed: L={L} n={n} I={I!r} "
            f"({info.iterations} iterations)"
        )
        raise ConvergenceFailure(
            f"Upsilon root did not converge for L={L}, n={n}, I={I!r}",
            best_defect=abs(psi(root)),
        )
    return float(root)


# ---------------------------------------------------------------------------
# Two-sided bounds
# ---------------------------------------------------------------------------


def _rescaled_value(
    table: CoefficientTable,
    power_sums: Sequence[float],
    L: int,
    upsilon: float,
) -> float:
    """const * U * L + sum_s c_s U^(1-s) I^(s) - ln U."""
    total = 0.0
    for s, coeff in table.entries.items():
        if s == 0:
            total += float(coeff) * upsilon * L
        else:
            total += float(coeff) * upsilon ** (1 - s) * power_sums[s - 1]
    return total - math.log(upsilon)


def rescaled_bounds(
    power_sums: Sequence[float],
    L: int,
    upsilon: float,
    method: Method | str,
) -> TwoSidedBound:
    """
    Two-sided entropy estimate from power sums I^(1)..I^(n).

    upsilon must bound every probability from above. The Taylor family
    uses degree n; the Chebyshev family uses min(n, 15). Shared by the
    classical, design-averaged and von Neumann bounds.
    """
    method = parse_method(method)
    n = len(power_sums)
    if n < 2:
        raise DegreeOutOfRange(f"need power sums up to n >= 2, got {n}")
    if method is Method.TAYLOR:
        lower_tab, upper_tab = taylor_lower_coeffs(n), taylor_upper_coeffs(n)
    else:
        n = min(n, CHEB_MAX_DEGREE)
        lower_tab, upper_tab = cheb_lower_coeffs(n), cheb_upper_coeffs(n)
    return TwoSidedBound(
        lower=_rescaled_value(lower_tab, power_sums, L, upsilon),
        upper=_rescaled_value(upper_tab, power_sums, L, upsilon),
        upsilon=upsilon,
        method=method,
        degree=n,
    )


def prop1_bounds(
    idx: IndexVector,
    L: int,
    method: Method | str,
    *,
    xtol: float = 1e-13,
    maxiter: int = 200,
) -> TwoSidedBound:
    if L < 2:
        raise DomainError(f"L must be >= 2, got {L}")
    upsilon = upsilon_root(
        L, idx.degree, idx.index(idx.degree), xtol=xtol, maxiter=maxiter
    )
    return rescaled_bounds(idx.power_sums(), L, upsilon, method)


def prop1_taylor(idx: IndexVector, L: int, **kwargs) -> TwoSidedBound:
    """Taylor two-sided estimate with Upsilon from I^(n)."""
    return prop1_bounds(idx, L, Method.TAYLOR, **kwargs)


def prop1_chebyshev(idx: IndexVector, L: int, **kwargs) -> TwoSidedBound:
    """Chebyshev two-sided estimate; Upsilon still from the full I^(n)."""
    return prop1_bounds(idx, L, Method.CHEBYSHEV, **kwargs)


def generic_polynomial_bounds(
    q: Mapping[int, Fraction | float],
    idx: IndexVector,
    L: int,
) -> tuple[float, float]:
    """
    Un-rescaled bounds from any q with q(0) = 0 and x ln x <= q(x) on [0,1].

    lower = -sum_s q_s I^(s); upper = L - 1 + sum_s q_s / s (L - I^(s)),
    both summed from s = 1 with I^(1) = 1.
    """
    lower = 0.0
    upper = float(L - 1)
    for s, coeff in q.items():
        if s == 0:
            continue
        c = float(coeff)
        lower -= c * idx.index(s)
        upper += c / s * (L - idx.index(s))
    return lower, upper


def g_polynomial(n: int) -> dict[int, Fraction]:
    """Coefficients of g_n, the Chebyshev upper envelope of x ln x."""
    return {s: -v for s, v in cheb_lower_coeffs(n).entries.items()}


# ---------------------------------------------------------------------------
# Reference bounds and the Shannon-Tsallis check
# ---------------------------------------------------------------------------


def id_estimate(I2: float, K: int) -> float:
    """
    Information-diagram lower bound on H_1 from I^(2), maximized over
    integer k in 1..K-1 (ties go to the smaller k).
    """
    if K < 2:
        raise DomainError(f"K must be >= 2, got {K}")
    if I2 < 1.0 / K - INDEX_TOLERANCE or I2 > 1.0 + INDEX_TOLERANCE:
        raise InfeasibleIndex(f"I^(2) = {I2!r} outside [1/{K}, 1]")
    best = -math.inf
    for k in range(1, K):
        log_ratio = math.log((k + 1) / k)
        value = math.log(k + 1) + k * log_ratio * (1.0 - (k + 1) * I2)
        if value > best:
            best = value
    return best


def mub_bound(purity: float) -> float:
    """(2 - tr rho^2)/3 ln 4, average entropy bound for three qubit MUBs."""
    if not 0.5 - INDEX_TOLERANCE <= purity <= 1.0 + INDEX_TOLERANCE:
        raise DomainError(f"qubit purity {purity!r} outside [1/2, 1]")
    return (2.0 - purity) / 3.0 * math.log(4.0)


@dataclass(frozen=True)
class ConjectureCheck:
    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


def tsallis_combination(
    p: ProbabilityVector | Iterable[float], n: int
) -> float:
    """(-1)^n / (2n^2) sum_{s=2..n} c_n^(s) H_s(p), from Tsallis entropies."""
    dist = as_distribution(p)
    c = cheb_shifted_coeffs(n).entries
    scale = (-1) ** n / (2.0 * n * n)
    return scale * sum(
        float(c[s]) * tsallis_entropy(dist, s) for s in range(2, n + 1)
    )


def tsan1_check(
    p: ProbabilityVector | Iterable[float],
    n: int,
    tolerance: float = 1e-12,
) -> ConjectureCheck:
    """
    Check H_1(p) >= (-1)^n/(2n^2) sum_s c_n^(s) H_s(p).

    The right side equals -sum_j g_n(p_j); it is evaluated that way
    because the Tsallis form cancels catastrophically for large n.
    """
    if not 2 <= n <= CHEB_MAX_DEGREE:
        raise DegreeOutOfRange(
            f"degree must be in 2..{CHEB_MAX_DEGREE}, got {n}"
        )
    dist = as_distribution(p)
    lhs = shannon_entropy(dist)
    rhs = -float(np.sum(eval_g(n, dist.probs)))
    return ConjectureCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - tolerance)


def random_distribution(
    rng: np.random.Generator, L: int
) -> ProbabilityVector:
    """Uniform sample from the probability simplex (flat Dirichlet)."""
    probs = rng.dirichlet(np.ones(L))
    probs = probs / probs.sum()
    return ProbabilityVector(probs)


@dataclass(frozen=True)
class ConjectureSweep:
    degree: int
    samples: int
    worst_margin: float
    worst_L: int
    holds: bool


def conjecture_sweep(
    n: int,
    samples: int,
    rng: np.random.Generator,
    max_L: int = 64,
    tolerance: float = 1e-12,
) -> ConjectureSweep:
    """
    Worst margin of the Shannon-Tsallis inequality at degree n over random
    distributions with L drawn uniformly from 2..max_L.
    """
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    if max_L < 2:
        raise DomainError(f"max_L must be >= 2, got {max_L}")
    worst, worst_L = math.inf, 0
    for _ in range(samples):
        L = int(rng.integers(2, max_L + 1))
        margin = tsan1_check(random_distribution(rng, L), n, tolerance).margin
        if margin < worst:
            worst, worst_L = margin, L
    logger.debug(f"Conjecture n={n}: worst margin {worst:.3e} at L={worst_L}")
    return ConjectureSweep(n, samples, worst, worst_L, worst >= -tolerance)
