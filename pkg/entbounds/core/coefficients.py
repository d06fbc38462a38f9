"""
Exact coefficient tables for the polynomial entropy estimators.

Five families are generated as exact rationals (fractions.Fraction over
Python's arbitrary-precision int):

- c:  coefficients of the shifted Chebyshev polynomial T*_n(x) = T_n(2x-1)
- a:  Taylor lower polynomial f_n(x) = sum_s a_s x^s
- b:  Taylor upper polynomial h_n(x) = 1/n + sum_s b_s x^s
- wa: Chebyshev-derived lower polynomial (sign-flipped g_n)
- wb: its upper companion

Floats appear only at the evaluation boundary: CoefficientTable.as_array
for Horner, CoefficientTable.series for the Chebyshev-basis evaluator.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DegreeOutOfRange

logger = logging.getLogger(__name__)

CHEB_MAX_DEGREE = 15

# Published integers c_n^(s) for 2 <= s <= n <= 15, keyed by n.
TABLE1: dict[int, tuple[int, ...]] = {
    2: (8,),
    3: (-48, 32),
    4: (160, -256, 128),
    5: (-400, 1120, -1280, 512),
    6: (840, -3584, 6912, -6144, 2048),
    7: (-1568, 9408, -26880, 39424, -28672, 8192),
    8: (2688, -21504, 84480, -180224, 212992, -131072, 32768),
    9: (
        -4320,
        44352,
        -228096,
        658944,
        -1118208,
        1105920,
        -589824,
        131072,
    ),
    10: (
        6600,
        -84480,
        549120,
        -2050048,
        4659200,
        -6553600,
        5570560,
        -2621440,
        524288,
    ),
    11: (
        -9680,
        151008,
        -1208064,
        5637632,
        -16400384,
        30638080,
        -36765696,
        27394048,
        -11534336,
        2097152,
    ),
    12: (
        13728,
        -256256,
        2471040,
        -14057472,
        50692096,
        -120324096,
        190513152,
        -199229440,
        132120576,
        -50331648,
        8388608,
    ),
    13: (
        -18928,
        416416,
        -4759040,
        32361472,
        -141213696,
        412778496,
        -825556992,
        1133117440,
        -1049624576,
        627048448,
        -218103808,
        33554432,
    ),
    14: (
        25480,
        -652288,
        8712704,
        -69701632,
        361181184,
        -1270087680,
        3111714816,
        -5369233408,
        6499598336,
        -5402263552,
        2936012800,
        -939524096,
        134217728,
    ),
    15: (
        -33600,
        990080,
        -15275520,
        141892608,
        -859955200,
        3572121600,
        -10478223360,
        22052208640,
        -33426505728,
        36175872000,
        -27262976000,
        13589544960,
        -4026531840,
        536870912,
    ),
}


class Family(Enum):
    """Coefficient families, valued by their CLI short names."""

    CHEBYSHEV_C = "c"
    TAYLOR_LOWER = "a"
    TAYLOR_UPPER = "b"
    CHEB_LOWER = "wa"
    CHEB_UPPER = "wb"


@dataclass(frozen=True)
class CoefficientTable:
    """Exact coefficients of one estimator family at degree n.

    entries maps the power s to its rational coefficient. Families
    without a constant term (c excepted) omit s=0.
    """

    family: Family
    degree: int
    entries: Mapping[int, Fraction] = field(repr=False)

    @property
    def float_entries(self) -> dict[int, float]:
        return {s: float(v) for s, v in self.entries.items()}

    @property
    def has_constant(self) -> bool:
        return 0 in self.entries

    def as_array(self) -> np.ndarray:
        """Dense binary64 coefficient vector indexed by power 0..n."""
        coeffs = np.zeros(self.degree + 1)
        for s, value in self.entries.items():
            coeffs[s] = float(value)
        return coeffs

    def total(self) -> Fraction:
        """Exact value of the polynomial at x=1."""
        return sum(self.entries.values(), Fraction(0))

    def evaluate_exact(self, x: Fraction) -> Fraction:
        return sum(
            (v * x**s for s, v in self.entries.items()), Fraction(0)
        )

    def dense(self) -> list[Fraction]:
        """Exact coefficient list indexed by power 0..n."""
        coeffs = [Fraction(0)] * (self.degree + 1)
        for s, value in self.entries.items():
            coeffs[s] = value
        return coeffs

    @cached_property
    def series(self) -> np.polynomial.Chebyshev:
        """Float evaluator in the Chebyshev basis on [0, 1]."""
        return chebyshev_series(self.dense())


def monomial_to_chebyshev(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """
    Exact change of basis from powers of x to T_k(2x - 1).

    Monomial coefficients of the high-degree estimators reach 1e8 and
    alternate in sign; in the Chebyshev basis they stay of order one, so
    Clenshaw evaluation keeps binary64 rounding near machine epsilon.
    """
    # powers of x -> powers of xi, with x = (1 + xi) / 2
    in_xi = [Fraction(0)] * len(coeffs)
    for s, a in enumerate(coeffs):
        if a == 0:
            continue
        scale = a / 2**s
        for j in range(s + 1):
            in_xi[j] += scale * binomial(s, j)
    # powers of xi -> T_k(xi)
    out = [Fraction(0)] * len(coeffs)
    for m, q in enumerate(in_xi):
        if q == 0:
            continue
        if m == 0:
            out[0] += q
            continue
        for j in range(m // 2 + 1):
            k = m - 2 * j
            weight = Fraction(binomial(m, j), 2 ** (m - 1))
            if k == 0:
                weight /= 2
            out[k] += q * weight
    return out


def chebyshev_series(coeffs: Sequence[Fraction]) -> np.polynomial.Chebyshev:
    """Chebyshev series on the domain [0, 1] from exact monomial data."""
    cheb = [float(c) for c in monomial_to_chebyshev(coeffs)]
    return np.polynomial.Chebyshev(cheb, domain=[0.0, 1.0])


@lru_cache(maxsize=None)
def _pascal_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _pascal_row(n - 1)
    return (1, *(prev[k - 1] + prev[k] for k in range(1, n)), 1)


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient via Pascal rows; 0 outside 0<=k<=n."""
    if n < 0 or k < 0 or k > n:
        return 0
    return _pascal_row(n)[k]


def _check_cheb_degree(n: int, minimum: int) -> None:
    if not minimum <= n <= CHEB_MAX_DEGREE:
        raise DegreeOutOfRange(
            f"Chebyshev degree must be in {minimum}..{CHEB_MAX_DEGREE}, "
            f"got {n}"
        )


def _check_taylor_degree(n: int) -> None:
    if n < 2:
        raise DegreeOutOfRange(f"Taylor degree must be >= 2, got {n}")


def shifted_chebyshev_coefficient(n: int, s: int) -> int:
    """c_n^(s) in closed form; valid for any n >= 0 and 0 <= s <= n."""
    if s == 0:
        return (-1) ** n
    sign = (-1) ** (n + s)
    bracket = 2 * binomial(n + s, n - s) - binomial(n + s - 1, n - s)
    return sign * 2 ** (2 * s - 1) * bracket


@lru_cache(maxsize=None)
def cheb_shifted_coeffs(n: int) -> CoefficientTable:
    """Coefficients of T*_n(x) for s = 0..n (0 <= n <= 15)."""
    _check_cheb_degree(n, 0)
    entries = {
        s: Fraction(shifted_chebyshev_coefficient(n, s))
        for s in range(n + 1)
    }
    return CoefficientTable(Family.CHEBYSHEV_C, n, entries)


@lru_cache(maxsize=None)
def taylor_lower_coeffs(n: int) -> CoefficientTable:
    """Coefficients a_n^(s), s = 1..n, of f_n(x) = x sum (1-x)^r / r."""
    _check_taylor_degree(n)
    entries: dict[int, Fraction] = {
        1: sum((Fraction(1, r) for r in range(1, n)), Fraction(0))
    }
    for s in range(2, n + 1):
        acc = sum(
            (Fraction(binomial(r, s - 1), r) for r in range(s - 1, n)),
            Fraction(0),
        )
        entries[s] = (-1) ** (s - 1) * acc
    return CoefficientTable(Family.TAYLOR_LOWER, n, entries)


@lru_cache(maxsize=None)
def taylor_upper_coeffs(n: int) -> CoefficientTable:
    """Constant 1/n plus b_n^(s), s = 1..n, of the upper polynomial h_n."""
    _check_taylor_degree(n)
    entries: dict[int, Fraction] = {
        0: Fraction(1, n),
        1: sum((Fraction(1, r) for r in range(2, n)), Fraction(0)),
    }
    for s in range(2, n + 1):
        acc = sum(
            (Fraction(binomial(r, s - 1), r) for r in range(s - 1, n)),
            Fraction(0),
        )
        entries[s] = Fraction((-1) ** (s - 1), s) * acc
    return CoefficientTable(Family.TAYLOR_UPPER, n, entries)


@lru_cache(maxsize=None)
def cheb_lower_coeffs(n: int) -> CoefficientTable:
    """Lower coefficients built from c_n^(s); their sum is -g_n."""
    _check_cheb_degree(n, 2)
    c = cheb_shifted_coeffs(n).entries
    scale = Fraction((-1) ** (n + 1), 2 * n * n)
    entries: dict[int, Fraction] = {}
    for s in range(2, n + 1):
        entries[s] = scale * c[s] / (s - 1)
    entries[1] = -sum(entries.values(), Fraction(0))
    return CoefficientTable(
        Family.CHEB_LOWER, n, dict(sorted(entries.items()))
    )


@lru_cache(maxsize=None)
def cheb_upper_coeffs(n: int) -> CoefficientTable:
    """Upper companion of the Chebyshev-derived lower polynomial."""
    _check_cheb_degree(n, 2)
    wa = cheb_lower_coeffs(n).entries
    entries: dict[int, Fraction] = {
        0: 1 - sum((v / s for s, v in wa.items()), Fraction(0)),
        1: wa[1] - 1,
    }
    for s in range(2, n + 1):
        entries[s] = wa[s] / s
    return CoefficientTable(Family.CHEB_UPPER, n, entries)


FAMILY_BUILDERS: dict[Family, Callable[[int], CoefficientTable]] = {
    Family.CHEBYSHEV_C: cheb_shifted_coeffs,
    Family.TAYLOR_LOWER: taylor_lower_coeffs,
    Family.TAYLOR_UPPER: taylor_upper_coeffs,
    Family.CHEB_LOWER: cheb_lower_coeffs,
    Family.CHEB_UPPER: cheb_upper_coeffs,
}


def get_coefficients(family: Family | str, n: int) -> CoefficientTable:
    """
    Look up a coefficient table by family (enum or short name).

    Raises:
        ValueError: If the family name is unknown
        DegreeOutOfRange: If n is outside the family's range
    """
    if isinstance(family, str):
        try:
            family = Family(family)
        except ValueError:
            valid = ", ".join(f.value for f in Family)
            raise ValueError(
                f"Unknown coefficient family '{family}'. Valid: {valid}"
            ) from None
    return FAMILY_BUILDERS[family](n)


def table1_mismatches(
    reference: Mapping[int, tuple[int, ...]] | None = None,
) -> list[tuple[int, int, int, int]]:
    """
    Compare generated c_n^(s) against the published integer table.

    Returns (n, s, expected, generated) for each differing entry; an
    empty list means exact agreement.
    """
    reference = TABLE1 if reference is None else reference
    mismatches = []
    for n, row in sorted(reference.items()):
        generated = cheb_shifted_coeffs(n).entries
        for s in range(2, n + 1):
            expected = row[s - 2] if s - 2 < len(row) else 0
            value = generated[s]
            if value.denominator != 1 or value.numerator != expected:
                mismatches.append((n, s, expected, int(value)))
    if mismatches:
        logger.warning(f"Table mismatch at {len(mismatches)} entries")
    return mismatches
