"""
Quantum t-designs and design-structured measurements.

A design is a set of K unit vectors |phi_k> in C^d. Assigned to it are
either one POVM with elements (d/K)|phi_k><phi_k| or, given a partition
into M groups of l vectors, M POVMs with elements (d/l)|phi_j><phi_j|.
Design strength is checked with the frame potential

    (1/K^2) sum_{j,k} |<phi_j|phi_k>|^(2t)  >=  t!(d-1)!/(d+t-1)!,

with equality exactly for t-designs.

All built-in designs are qubit designs given by Bloch vectors n_k, so
|<phi_j|phi_k>|^2 = (1 + n_j . n_k) / 2 and no complex phases are needed.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .bounds import ProbabilityVector
from .errors import (
    ConvergenceFailure,
    DegreeOutOfRange,
    DimensionError,
    DomainError,
    InsufficientMoments,
    UnknownDesign,
)

logger = logging.getLogger(__name__)

STATE_TOLERANCE = 1e-12
# frame potential tolerance for exact designs and for numerically found ones
DESIGN_TOLERANCE = 1e-9
FOUND_DESIGN_TOLERANCE = 1e-6
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
# real root of x^3 = x^2 + x + 1
TRIBONACCI = (
    1.0
    + (19.0 + 3.0 * math.sqrt(33.0)) ** (1.0 / 3.0)
    + (19.0 - 3.0 * math.sqrt(33.0)) ** (1.0 / 3.0)
) / 3.0

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


# ---------------------------------------------------------------------------
# States and moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density operator; qubits additionally keep their Bloch vector."""

    matrix: np.ndarray
    bloch: np.ndarray | None = None

    def __post_init__(self) -> None:
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError(
                f"density matrix must be square: {rho.shape}"
            )
        if abs(np.trace(rho) - 1.0) > STATE_TOLERANCE:
            raise DomainError("density matrix must have unit trace")
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOLERANCE:
            raise DomainError("density matrix must be Hermitian")
        if np.min(np.linalg.eigvalsh(rho)) < -STATE_TOLERANCE:
            raise DomainError("density matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", rho)

    @property
    def d(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def from_bloch(cls, r: Sequence[float]) -> "QuantumState":
        vec = np.asarray(r, dtype=float)
        if vec.shape != (3,):
            raise DimensionError("Bloch vector must have three components")
        if np.linalg.norm(vec) > 1.0 + STATE_TOLERANCE:
            raise DomainError("Bloch vector must have length <= 1")
        rho = 0.5 * (np.eye(2) + np.einsum("i,ijk->jk", vec, _PAULI))
        return cls(rho, bloch=vec)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "QuantumState":
        rho = np.asarray(matrix, dtype=complex)
        if rho.shape == (2, 2):
            r = np.real(np.einsum("ijk,kj->i", _PAULI, rho))
            return cls(rho, bloch=r)
        return cls(rho)

    @classmethod
    def maximally_mixed(cls, d: int = 2) -> "QuantumState":
        if d == 2:
            return cls.from_bloch([0.0, 0.0, 0.0])
        return cls(np.eye(d) / d)

    @classmethod
    def from_min_eigenvalue(cls, lam: float) -> "QuantumState":
        """Qubit with eigenvalues (1 - lam, lam), Bloch vector along +z."""
        if not 0.0 <= lam <= 0.5:
            raise DomainError(f"minimal eigenvalue {lam!r} outside [0, 1/2]")
        return cls.from_bloch([0.0, 0.0, 1.0 - 2.0 * lam])

    @classmethod
    def random_mixed(cls, rng: np.random.Generator) -> "QuantumState":
        """Qubit with Bloch vector uniform in the unit ball."""
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        radius = rng.random() ** (1.0 / 3.0)
        return cls.from_bloch(radius * direction)

    def eigenvalues(self) -> np.ndarray:
        eigs = np.linalg.eigvalsh(self.matrix)
        return np.clip(eigs, 0.0, None)

    @property
    def purity(self) -> float:
        if self.bloch is not None:
            return 0.5 * (1.0 + float(self.bloch @ self.bloch))
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, vectors: np.ndarray) -> np.ndarray:
        """<phi_k|rho|phi_k> for each row of vectors."""
        vals = np.einsum("ki,ij,kj->k", vectors.conj(), self.matrix, vectors)
        return np.real(vals)


@dataclass(frozen=True)
class MomentVector:
    """Power sums tr(rho^s) for s = 1..t of a d-dimensional state."""

    d: int
    sums: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DimensionError(f"dimension must be >= 1, got {self.d}")
        sums = tuple(float(v) for v in self.sums)
        if not sums or abs(sums[0] - 1.0) > STATE_TOLERANCE:
            raise DomainError("tr(rho) must equal 1")
        for s, v in enumerate(sums, start=1):
            lowest = float(self.d) ** (1 - s)
            if v < lowest - STATE_TOLERANCE or v > 1.0 + STATE_TOLERANCE:
                raise DomainError(f"tr(rho^{s}) = {v!r} is infeasible")
        object.__setattr__(self, "sums", sums)

    @property
    def t(self) -> int:
        return len(self.sums)

    def moment(self, s: int) -> float:
        return self.sums[s - 1]

    @classmethod
    def from_eigenvalues(
        cls, eigenvalues: Sequence[float], t: int
    ) -> "MomentVector":
        eigs = np.asarray(eigenvalues, dtype=float)
        sums = tuple(float(np.sum(eigs**s)) for s in range(1, t + 1))
        return cls(eigs.size, sums)

    @classmethod
    def from_state(cls, rho: QuantumState, t: int) -> "MomentVector":
        return cls.from_eigenvalues(rho.eigenvalues(), t)

    @classmethod
    def pure(cls, d: int, t: int) -> "MomentVector":
        return cls(d, (1.0,) * t)


def moments_to_hsym(m: MomentVector, s: int) -> float:
    """
    tr(rho^{(x)s} P_sym) from power sums via Newton's identities.

    h_0 = 1, h_s = (1/s) sum_{k=1..s} tr(rho^k) h_{s-k}.
    """
    if s > m.t:
        raise InsufficientMoments(
            f"need tr(rho^{s}) but only {m.t} moments are known"
        )
    h = [1.0]
    for order in range(1, s + 1):
        h.append(
            sum(m.moment(k) * h[order - k] for k in range(1, order + 1))
            / order
        )
    return h[s]


# ---------------------------------------------------------------------------
# Designs
# ---------------------------------------------------------------------------


def bloch_to_vectors(bloch: np.ndarray) -> np.ndarray:
    """State vectors (cos(theta/2), e^{i phi} sin(theta/2)) for Bloch rows."""
    theta = np.arccos(np.clip(bloch[:, 2], -1.0, 1.0))
    phi = np.arctan2(bloch[:, 1], bloch[:, 0])
    return np.stack(
        [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1
    )


@dataclass(frozen=True, eq=False)
class QuantumDesign:
    """K unit vectors in C^d of strength t, optionally partitioned."""

    name: str
    d: int
    t: int
    vectors: np.ndarray = field(repr=False)
    bloch: np.ndarray | None = field(default=None, repr=False)
    partition: tuple[tuple[int, ...], ...] | None = None
    tolerance: float = DESIGN_TOLERANCE

    def __post_init__(self) -> None:
        vecs = np.asarray(self.vectors, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[1] != self.d:
            raise DimensionError(
                f"design vectors must have shape (K, {self.d})"
            )
        norms = np.linalg.norm(vecs, axis=1)
        if np.max(np.abs(norms - 1.0)) > STATE_TOLERANCE:
            raise DomainError("design vectors must be unit vectors")
        object.__setattr__(self, "vectors", vecs)
        if self.partition is not None:
            sizes = {len(g) for g in self.partition}
            members = sorted(i for g in self.partition for i in g)
            if len(sizes) != 1 or members != list(range(len(vecs))):
                raise DomainError(
                    "partition must split all vectors into equal groups"
                )
            for group in self.partition:
                defect = _frame_defect(vecs[list(group)], self.d)
                if defect > self.tolerance:
                    raise DomainError(
                        f"partition group {group} does not resolve the "
                        f"identity (defect {defect:.2e})"
                    )

    @classmethod
    def from_bloch(
        cls,
        name: str,
        t: int,
        bloch: np.ndarray,
        partition: tuple[tuple[int, ...], ...] | None = None,
        tolerance: float = DESIGN_TOLERANCE,
    ) -> "QuantumDesign":
        unit = np.asarray(bloch, dtype=float)
        unit = unit / np.linalg.norm(unit, axis=1, keepdims=True)
        return cls(
            name=name,
            d=2,
            t=t,
            vectors=bloch_to_vectors(unit),
            bloch=unit,
            partition=partition,
            tolerance=tolerance,
        )

    @property
    def K(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        if self.partition is None:
            return (tuple(range(self.K)),)
        return self.partition

    @property
    def M(self) -> int:
        return len(self.groups)

    @property
    def ell(self) -> int:
        return len(self.groups[0])

    def overlaps(self) -> np.ndarray:
        """|<phi_j|phi_k>|^2 for all pairs."""
        if self.bloch is not None:
            return np.clip((1.0 + self.bloch @ self.bloch.T) / 2.0, 0.0, 1.0)
        gram = self.vectors.conj() @ self.vectors.T
        return np.abs(gram) ** 2

    def with_partition(
        self, name: str, partition: tuple[tuple[int, ...], ...]
    ) -> "QuantumDesign":
        return QuantumDesign(
            name=name,
            d=self.d,
            t=self.t,
            vectors=self.vectors,
            bloch=self.bloch,
            partition=partition,
            tolerance=self.tolerance,
        )


def dd(t: int, d: int) -> Fraction:
    """t!(d-1)!/(d+t-1)!, the inverse of binom(d+t-1, t)."""
    if t < 1 or d < 1:
        raise DomainError(f"need t >= 1 and d >= 1, got t={t}, d={d}")
    return Fraction(math.factorial(t) * math.factorial(d - 1),
                    math.factorial(d + t - 1))


def frame_potential(design: QuantumDesign, t: int) -> float:
    if t < 1:
        raise DegreeOutOfRange(f"frame potential order must be >= 1, got {t}")
    return float(np.mean(design.overlaps() ** t))


@dataclass(frozen=True)
class DesignCheck:
    is_design: bool
    defect: float
    t: int


def verify_design(
    design: QuantumDesign,
    t: int | None = None,
    tolerance: float | None = None,
) -> DesignCheck:
    """Compare the frame potential at t (default design.t) to Dd(t, d)."""
    t = design.t if t is None else t
    tolerance = design.tolerance if tolerance is None else tolerance
    defect = frame_potential(design, t) - float(dd(t, design.d))
    logger.debug(f"Design {design.name} at t={t}: defect {defect:.3e}")
    return DesignCheck(abs(defect) <= tolerance, defect, t)


def _frame_defect(vecs: np.ndarray, d: int) -> float:
    frame = d / len(vecs) * (vecs.T @ vecs.conj())
    return float(np.max(np.abs(frame - np.eye(d))))


def resolution_of_identity_defect(design: QuantumDesign) -> float:
    """Worst entry of (d/l) sum_group |phi_j><phi_j| - 1 over all groups."""
    return max(
        _frame_defect(design.vectors[list(group)], design.d)
        for group in design.groups
    )


# ---------------------------------------------------------------------------
# Built-in qubit designs
# ---------------------------------------------------------------------------


def octahedral_rotations() -> np.ndarray:
    """The 24 proper rotations of the cube as signed permutation matrices."""
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            m = np.zeros((3, 3))
            for row, (col, sign) in enumerate(zip(perm, signs)):
                m[row, col] = sign
            if np.linalg.det(m) > 0:
                mats.append(m)
    return np.array(mats)


def _orbit(seed: np.ndarray) -> np.ndarray:
    return np.einsum("rij,j->ri", octahedral_rotations(), seed)


def _cyclic(vectors: Sequence[Sequence[float]]) -> list[list[float]]:
    out = []
    for v in vectors:
        for shift in range(3):
            out.append([v[(i + shift) % 3] for i in range(3)])
    return out


def octahedron(tolerance: float = DESIGN_TOLERANCE) -> QuantumDesign:
    bloch = np.array(
        [
            [0, 0, 1],
            [0, 0, -1],
            [1, 0, 0],
            [-1, 0, 0],
            [0, 1, 0],
            [0, -1, 0],
        ],
        dtype=float,
    )
    return QuantumDesign.from_bloch(
        "octahedron", 3, bloch, tolerance=tolerance
    )


def mub3(tolerance: float = DESIGN_TOLERANCE) -> QuantumDesign:
    """Octahedron split into the three qubit mutually unbiased bases."""
    groups = ((0, 1), (2, 3), (4, 5))
    return octahedron(tolerance).with_partition("mub3", groups)


def icosahedron(tolerance: float = DESIGN_TOLERANCE) -> QuantumDesign:
    base = [
        (0.0, s1, s2 * GOLDEN)
        for s1 in (1.0, -1.0)
        for s2 in (1.0, -1.0)
    ]
    return QuantumDesign.from_bloch(
        "icosahedron", 5, np.array(_cyclic(base)), tolerance=tolerance
    )


def icosidodecahedron(
    tolerance: float = DESIGN_TOLERANCE,
) -> QuantumDesign:
    axes = [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0)]
    half = [
        (s1 * 0.5, s2 * GOLDEN / 2, s3 * GOLDEN**2 / 2)
        for s1 in (1.0, -1.0)
        for s2 in (1.0, -1.0)
        for s3 in (1.0, -1.0)
    ]
    bloch = np.array(_cyclic(axes) + _cyclic(half))
    return QuantumDesign.from_bloch(
        "icosidodecahedron", 5, bloch, tolerance=tolerance
    )


def regular_snub_cube() -> QuantumDesign:
    """Undeformed snub cube; a 3-design only."""
    seed = np.array([1.0, 1.0 / TRIBONACCI, TRIBONACCI])
    return QuantumDesign.from_bloch("snub_cube", 3, _orbit(seed))


def _spherical(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles
    return np.array(
        [
            np.sin(theta) * np.cos(phi),
            np.sin(theta) * np.sin(phi),
            np.cos(theta),
        ]
    )


def _orbit_defect(angles: np.ndarray, t: int, target: float) -> float:
    bloch = _orbit(_spherical(angles))
    overlaps = np.clip((1.0 + bloch @ bloch.T) / 2.0, 0.0, 1.0)
    return float(np.mean(overlaps**t)) - target


@lru_cache(maxsize=8)
def find_snub_cube_design(
    restarts: int = 64,
    seed: int = 20240521,
    tolerance: float = FOUND_DESIGN_TOLERANCE,
) -> QuantumDesign:
    """
    Deform the snub cube into a 7-design with 24 vertices.

    The vertex set is kept as the orbit of one Bloch direction under the
    chiral octahedral group; the direction's two angles are tuned by
    Nelder-Mead from random starts to minimise the order-7 frame potential.

    Raises:
        ConvergenceFailure: If no restart reaches the tolerance
    """
    t = 7
    target = float(dd(t, 2))
    rng = np.random.default_rng(seed)
    best_defect, best_angles = math.inf, None
    for attempt in range(restarts):
        start = np.array(
            [rng.uniform(0.0, np.pi), rng.uniform(0.0, 2 * np.pi)]
        )
        result = optimize.minimize(
            _orbit_defect,
            start,
            args=(t, target),
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000},
        )
        defect = float(result.fun)
        logger.debug(f"Snub cube restart {attempt}: defect {defect:.3e}")
        if defect < best_defect:
            best_defect, best_angles = defect, result.x

    logger.info(
        f"Snub cube search: best defect {best_defect:.3e} after "
        f"{restarts} restarts"
    )
    if best_angles is None or best_defect > tolerance:
        raise ConvergenceFailure(
            f"No 7-design found (best defect {best_defect:.3e})",
            best_defect=best_defect,
        )
    bloch = _orbit(_spherical(best_angles))
    return QuantumDesign.from_bloch(
        "mclaren_snub_cube", t, bloch, tolerance=tolerance
    )


def mclaren_snub_cube(
    tolerance: float = FOUND_DESIGN_TOLERANCE,
) -> QuantumDesign:
    return find_snub_cube_design(
        restarts=64, seed=20240521, tolerance=tolerance
    )


BUILTIN_DESIGNS: dict[str, Callable[..., QuantumDesign]] = {
    "octahedron": octahedron,
    "icosahedron": icosahedron,
    "icosidodecahedron": icosidodecahedron,
    "mclaren_snub_cube": mclaren_snub_cube,
    "mub3": mub3,
}

# located by numerical search rather than given in closed form
FOUND_DESIGNS = frozenset({"mclaren_snub_cube"})


def builtin_design(
    name: str,
    tolerance: float | None = None,
    found_tolerance: float | None = None,
) -> QuantumDesign:
    """
    Get a built-in qubit design by name.

    tolerance applies to the exact designs, found_tolerance to those
    located numerically; None keeps the module defaults.

    Raises:
        UnknownDesign: If name is not registered
    """
    factory = BUILTIN_DESIGNS.get(name)
    if factory is None:
        valid = ", ".join(BUILTIN_DESIGNS)
        raise UnknownDesign(f"Unknown design '{name}'. Valid: {valid}")
    chosen = found_tolerance if name in FOUND_DESIGNS else tolerance
    return factory() if chosen is None else factory(tolerance=chosen)


# ---------------------------------------------------------------------------
# Measurement statistics
# ---------------------------------------------------------------------------


def povm_probabilities(
    design: QuantumDesign, rho: QuantumState
) -> list[ProbabilityVector]:
    """p_j = (d/l) <phi_j|rho|phi_j> for each POVM group."""
    if design.d != rho.d:
        raise DimensionError(
            f"design has d={design.d} but state has d={rho.d}"
        )
    if design.bloch is not None and rho.bloch is not None:
        expect = (1.0 + design.bloch @ rho.bloch) / 2.0
    else:
        expect = rho.expectation(design.vectors)
    expect = np.clip(expect, 0.0, None)
    return [
        ProbabilityVector(design.d / len(group) * expect[list(group)])
        for group in design.groups
    ]


def beta_bar_from_moments(
    design: QuantumDesign, m: MomentVector, s: int, per_group: bool = True
) -> float:
    """l^(1-s) d^s Dd(s, d) tr(rho^{(x)s} P_sym); l -> K unless per_group."""
    if not 2 <= s <= design.t:
        raise DegreeOutOfRange(
            f"s must be in 2..{design.t} for design {design.name}, got {s}"
        )
    if m.d != design.d:
        raise DimensionError(
            f"design has d={design.d} but moments have d={m.d}"
        )
    outcomes = design.ell if per_group else design.K
    weight = outcomes ** (1 - s) * design.d**s * dd(s, design.d)
    return float(weight) * moments_to_hsym(m, s)


def beta_bar(
    design: QuantumDesign,
    rho: QuantumState,
    s: int,
    per_group: bool = True,
) -> float:
    if design.d != rho.d:
        raise DimensionError(
            f"design has d={design.d} but state has d={rho.d}"
        )
    return beta_bar_from_moments(
        design, MomentVector.from_state(rho, max(s, 1)), s, per_group
    )
