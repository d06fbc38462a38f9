"""
Entropic relations for design-structured measurements.

The sums of s-th powers of outcome probabilities of a t-design POVM
depend on the state only through tr(rho^s), so the classical two-sided
bounds of bounds.py turn into uncertainty (lower) and certainty (upper)
relations. Pure states give the smallest lower bound found numerically;
that value is the right side of the steering inequalities.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import (
    Method,
    TwoSidedBound,
    parse_method,
    rescaled_bounds,
    shannon_entropy,
    upsilon_root,
)
from .designs import (
    MomentVector,
    QuantumDesign,
    QuantumState,
    beta_bar_from_moments,
    povm_probabilities,
)
from .errors import (
    BoundViolation,
    DegreeOutOfRange,
    DimensionError,
    DomainError,
)

logger = logging.getLogger(__name__)

SANDWICH_SLACK = 1e-10

# (design name, method) pairs that passed state_independent_check
_certified: set[tuple[str, Method]] = set()
_certified_lock = threading.Lock()


@dataclass(frozen=True)
class RelationResult:
    method: Method
    lower: float
    upper: float
    upsilon: float
    clipped: bool
    average_entropy: float

    def holds(self, slack: float = SANDWICH_SLACK) -> bool:
        return (
            self.lower - slack
            <= self.average_entropy
            <= self.upper + slack
        )


@dataclass(frozen=True)
class IndependenceCheck:
    holds: bool
    worst_margin: float
    samples: int


@dataclass(frozen=True)
class SteeringBound:
    """Right side of the entropic steering inequality."""

    value: float
    certified: bool


@dataclass(frozen=True)
class MaxProbBound:
    bound: float
    measured: float


def average_entropy(design: QuantumDesign, rho: QuantumState) -> float:
    """(1/M) sum over POVM groups of the Shannon entropy."""
    dists = povm_probabilities(design, rho)
    return float(np.mean([shannon_entropy(p) for p in dists]))


def _design_bounds(
    design: QuantumDesign, m: MomentVector, method: Method
) -> tuple[TwoSidedBound, bool]:
    _check_moments(design, m)
    t = design.t
    beta_full = beta_bar_from_moments(design, m, t, per_group=False)
    raw = design.M * upsilon_root(design.K, t, beta_full)
    clipped = raw > 1.0
    upsilon = min(raw, 1.0)
    if clipped:
        logger.info(
            f"Upsilon clipped at 1 for {design.name} "
            f"(M * Upsilon = {raw:.6f})"
        )
    sums = (1.0,) + tuple(
        beta_bar_from_moments(design, m, s, per_group=True)
        for s in range(2, t + 1)
    )
    return rescaled_bounds(sums, design.ell, upsilon, method), clipped


def _check_moments(design: QuantumDesign, m: MomentVector) -> None:
    if m.d != design.d:
        raise DimensionError(
            f"design has d={design.d} but moments have d={m.d}"
        )
    if m.t < design.t:
        raise DegreeOutOfRange(
            f"design {design.name} needs moments up to t={design.t}"
        )


def prop2_bounds(
    design: QuantumDesign,
    rho: QuantumState,
    method: Method | str,
) -> RelationResult:
    """
    Two-sided bound on the average entropy of the design POVMs.

    Upsilon = min(M * Upsilon_K(beta_K^(t)), 1) bounds every outcome
    probability; the rescaled estimator then runs on l outcomes with the
    per-group averages beta_l^(s).
    """
    method = parse_method(method)
    if rho.d != design.d:
        raise DimensionError(
            f"design has d={design.d} but state has d={rho.d}"
        )
    m = MomentVector.from_state(rho, design.t)
    bound, clipped = _design_bounds(design, m, method)
    return RelationResult(
        method=method,
        lower=bound.lower,
        upper=bound.upper,
        upsilon=bound.upsilon,
        clipped=clipped,
        average_entropy=average_entropy(design, rho),
    )


def pure_state_lower_bounds(
    design: QuantumDesign, method: Method | str
) -> float:
    """Lower relation evaluated with all moments equal to one."""
    method = parse_method(method)
    m = MomentVector.pure(design.d, design.t)
    bound, _ = _design_bounds(design, m, method)
    return bound.lower


def _margin_chunk(
    design: QuantumDesign,
    floor: float,
    seed_seq: np.random.SeedSequence,
    count: int,
) -> float:
    rng = np.random.default_rng(seed_seq)
    worst = np.inf
    for _ in range(count):
        rho = QuantumState.random_mixed(rng)
        worst = min(worst, average_entropy(design, rho) - floor)
    return float(worst)


def state_independent_check(
    design: QuantumDesign,
    method: Method | str,
    samples: int = 10_000,
    seed: int = 20240521,
    *,
    workers: int = 4,
    chunks: int = 16,
    tolerance: float = SANDWICH_SLACK,
) -> IndependenceCheck:
    """
    Monte Carlo check that the pure-state lower bound holds for mixed states.

    Random qubit states come from the uniform Bloch ball. Each chunk gets
    its own SeedSequence child, so the result does not depend on workers.
    Passing pairs are recorded as certified for steering_bounds.
    """
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    method = parse_method(method)
    floor = pure_state_lower_bounds(design, method)
    chunks = max(1, min(chunks, samples))
    sizes = [len(c) for c in np.array_split(np.arange(samples), chunks)]
    children = np.random.SeedSequence(seed).spawn(chunks)

    logger.info(
        f"State-independence check: {design.name}/{method.value}, "
        f"{samples} samples"
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        worst_per_chunk = list(
            pool.map(
                lambda args: _margin_chunk(design, floor, *args),
                zip(children, sizes),
            )
        )
    worst = min(worst_per_chunk)
    holds = worst >= -tolerance
    if holds:
        with _certified_lock:
            _certified.add((design.name, method))
    else:
        logger.warning(
            f"Pure-state bound violated for {design.name}/{method.value}: "
            f"margin {worst:.3e}"
        )
    return IndependenceCheck(holds=holds, worst_margin=worst, samples=samples)


def is_certified(design: QuantumDesign, method: Method | str) -> bool:
    with _certified_lock:
        return (design.name, parse_method(method)) in _certified


def steering_bounds(
    design: QuantumDesign, method: Method | str
) -> SteeringBound:
    """State-independent bound; flagged if not yet certified numerically."""
    method = parse_method(method)
    value = pure_state_lower_bounds(design, method)
    certified = is_certified(design, method)
    if not certified:
        logger.warning(
            f"Steering bound for {design.name}/{method.value} is not "
            "certified; run state_independent_check first"
        )
    return SteeringBound(value=value, certified=certified)


def average_maxprob_bound(
    design: QuantumDesign,
    rho: QuantumState,
    slack: float = SANDWICH_SLACK,
) -> MaxProbBound:
    """
    Bound the average maximal probability by Upsilon_l(beta_l^(t)).

    Raises:
        BoundViolation: If the measured average exceeds the bound
    """
    if rho.d != design.d:
        raise DimensionError(
            f"design has d={design.d} but state has d={rho.d}"
        )
    m = MomentVector.from_state(rho, design.t)
    beta = beta_bar_from_moments(design, m, design.t, per_group=True)
    bound = upsilon_root(design.ell, design.t, beta)
    measured = float(
        np.mean([np.max(p.probs) for p in povm_probabilities(design, rho)])
    )
    if measured > bound + slack:
        raise BoundViolation(
            f"average max probability {measured!r} exceeds {bound!r} "
            f"for {design.name}"
        )
    return MaxProbBound(bound=bound, measured=measured)


def von_neumann_bounds(
    m: MomentVector,
    method: Method | str,
) -> TwoSidedBound:
    """
    Two-sided von Neumann entropy bound from tr(rho^s), s = 1..t.

    The eigenvalues form a distribution over d outcomes with power sums
    tr(rho^s), so the classical bound applies with L = d and
    Lambda = Upsilon_d(tr rho^t).
    """
    if m.t < 2:
        raise DegreeOutOfRange(f"need moments up to t >= 2, got {m.t}")
    if m.d < 2:
        raise DimensionError(f"dimension must be >= 2, got {m.d}")
    lam = upsilon_root(m.d, m.t, m.moment(m.t))
    return rescaled_bounds(m.sums, m.d, lam, method)


def von_neumann_entropy(rho: QuantumState) -> float:
    return shannon_entropy(rho.eigenvalues() / np.sum(rho.eigenvalues()))
