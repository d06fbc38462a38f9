"""
Polynomial estimators of x ln x on [0, 1].

Four pointwise envelopes are provided, all vanishing at x = 0 and x = 1:

    f_n(x)  <= -x ln x <= h_n(x)        (truncated log series)
    x ln x  <= g_n(x)                   (Chebyshev tau-method polynomial)
    -x ln x <= wb_0 + sum wb_s x^s      (upper companion of g_n)

Besides evaluation, this module carries the exact derivative data of g_n
(endpoint slopes, second-derivative polynomial, its closed forms in
xi = 2x - 1 and the Gegenbauer representation) and the grid-based
envelope verifier.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import xlogy

from .coefficients import (
    CHEB_MAX_DEGREE,
    binomial,
    chebyshev_series,
    cheb_lower_coeffs,
    cheb_upper_coeffs,
    taylor_lower_coeffs,
    taylor_upper_coeffs,
)
from .errors import DegreeOutOfRange, DomainError, InvalidTag

logger = logging.getLogger(__name__)

ArrayLike = float | np.ndarray


def _unit_interval(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise DomainError("x must lie in [0, 1]")
    return arr


def _result(values: np.ndarray, x: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(x) == 0 else values


def _check_taylor(n: int) -> None:
    if n < 2:
        raise DegreeOutOfRange(f"Taylor degree must be >= 2, got {n}")


def _check_cheb(n: int) -> None:
    if not 2 <= n <= CHEB_MAX_DEGREE:
        raise DegreeOutOfRange(
            f"Chebyshev degree must be in 2..{CHEB_MAX_DEGREE}, got {n}"
        )


def xlogx(x: ArrayLike) -> ArrayLike:
    """x ln x with the value 0 at x = 0."""
    arr = _unit_interval(x)
    return _result(xlogy(arr, arr), x)


def eval_f(n: int, x: ArrayLike) -> ArrayLike:
    """Taylor lower estimator f_n(x) = x * sum_{r<n} (1-x)^r / r."""
    _check_taylor(n)
    arr = _unit_interval(x)
    u = 1.0 - arr
    total = np.zeros_like(arr)
    term = np.ones_like(arr)
    for r in range(1, n):
        term = term * u
        total = total + term / r
    return _result(arr * total, x)


def eval_h(n: int, x: ArrayLike) -> ArrayLike:
    """Taylor upper estimator h_n(x) = (1-x)(1 - sum (1-x)^r/(r(r+1)))."""
    _check_taylor(n)
    arr = _unit_interval(x)
    u = 1.0 - arr
    total = np.zeros_like(arr)
    term = np.ones_like(arr)
    for r in range(1, n):
        term = term * u
        total = total + term / (r * (r + 1))
    return _result(u * (1.0 - total), x)


def eval_taylor_lower_poly(n: int, x: ArrayLike) -> ArrayLike:
    """f_n in coefficient form (Horner)."""
    arr = _unit_interval(x)
    return _result(P.polyval(arr, taylor_lower_coeffs(n).as_array()), x)


def eval_taylor_upper_poly(n: int, x: ArrayLike) -> ArrayLike:
    """h_n in coefficient form (Horner)."""
    arr = _unit_interval(x)
    return _result(P.polyval(arr, taylor_upper_coeffs(n).as_array()), x)


def eval_g(n: int, x: ArrayLike) -> ArrayLike:
    """Chebyshev estimator g_n(x), an upper envelope of x ln x."""
    _check_cheb(n)
    arr = _unit_interval(x)
    return _result(-cheb_lower_coeffs(n).series(arr), x)


def eval_cheb_lower(n: int, x: ArrayLike) -> ArrayLike:
    """sum wa_s x^s = -g_n(x), a lower envelope of -x ln x."""
    _check_cheb(n)
    arr = _unit_interval(x)
    return _result(cheb_lower_coeffs(n).series(arr), x)


def eval_cheb_upper(n: int, x: ArrayLike) -> ArrayLike:
    """wb_0 + sum wb_s x^s, an upper envelope of -x ln x."""
    _check_cheb(n)
    arr = _unit_interval(x)
    return _result(cheb_upper_coeffs(n).series(arr), x)


def eval_lanczos(n: int, x: ArrayLike) -> ArrayLike:
    """
    Unmodified tau-method sum for x ln x.

    Differs from g_n by the linear term (-1)^n (1-x) / (2n^2), so it does
    not vanish at x = 0.
    """
    _check_cheb(n)
    arr = _unit_interval(x)
    correction = (-1) ** n * (1.0 - arr) / (2 * n * n)
    g = -cheb_lower_coeffs(n).series(arr)
    return _result(g - correction, x)


# one hundredth of max |x ln x| = 1/e; attained close to the origin
G15_MAX_ERROR = 1e-2 / math.e
G15_PEAK_REGION = 0.05


def approximation_error(n: int, x: np.ndarray) -> tuple[float, float]:
    """Largest |g_n(x) - x ln x| over the points x and where it occurs."""
    arr = _unit_interval(x)
    err = np.abs(np.asarray(eval_g(n, arr)) - xlogy(arr, arr))
    i = int(np.argmax(err))
    return float(err[i]), float(arr[i])


# ---------------------------------------------------------------------------
# Exact derivative data of g_n
# ---------------------------------------------------------------------------


def _g_exact(n: int) -> list[Fraction]:
    """Exact coefficient vector of g_n in x, ascending powers."""
    wa = cheb_lower_coeffs(n).entries
    coeffs = [Fraction(0)] * (n + 1)
    for s, value in wa.items():
        coeffs[s] = -value
    return coeffs


def _derivative(coeffs: list[Fraction], order: int = 1) -> list[Fraction]:
    for _ in range(order):
        coeffs = [k * c for k, c in enumerate(coeffs)][1:] or [Fraction(0)]
    return coeffs


def _evaluate(coeffs: list[Fraction], x: Fraction) -> Fraction:
    value = Fraction(0)
    for c in reversed(coeffs):
        value = value * x + c
    return value


def g_derivative_exact(n: int, order: int, x: Fraction | int) -> Fraction:
    """Termwise derivative of g_n of the given order, exact at rational x."""
    _check_cheb(n)
    return _evaluate(_derivative(_g_exact(n), order), Fraction(x))


def g_endpoint_derivatives(n: int) -> tuple[Fraction, Fraction]:
    """
    Closed-form slopes (g_n'(0), g_n'(1)).

    g_n'(1) is 1 for even n and 1 - 1/n^2 for odd n; g_n'(0) is a finite
    negative sum whose magnitude grows with n.
    """
    _check_cheb(n)
    half = n // 2
    if n % 2:
        at_one = 1 - Fraction(1, n * n)
        acc = sum(
            (Fraction(4 * r * r, n - 2 * r) for r in range(1, half + 1)),
            Fraction(0),
        )
    else:
        at_one = Fraction(1)
        acc = sum(
            (
                Fraction((2 * r - 1) ** 2, n - 2 * r + 1)
                for r in range(1, half + 1)
            ),
            Fraction(0),
        )
    at_zero = -Fraction(4, n * n) * acc
    return at_zero, at_one


def g_second_derivative_coeffs(n: int) -> tuple[Fraction, ...]:
    """Exact coefficients of g_n''(x) in x (ascending), by termwise rule."""
    _check_cheb(n)
    return tuple(_derivative(_g_exact(n), 2))


def eval_g_second_derivative(n: int, x: ArrayLike) -> ArrayLike:
    arr = _unit_interval(x)
    series = chebyshev_series(g_second_derivative_coeffs(n))
    return _result(series(arr), x)


def g_third_derivative_at_one(n: int) -> Fraction:
    """g_n'''(1) = (2n^2 - 8)/3, stated for even n only."""
    _check_cheb(n)
    if n % 2:
        raise DomainError("closed form of g'''(1) holds for even n only")
    return Fraction(2 * n * n - 8, 3)


# g_n''(x) written in xi = 2x - 1. Odd n: pref * (1 - xi) * P(xi);
# even n: pref * (base + (xi - 1) * Q(xi)). Polynomials ascending in xi.
_ODD_SECOND_DERIVATIVE: dict[int, tuple[Fraction, tuple[int, ...]]] = {
    3: (Fraction(8, 3), (1,)),
    5: (Fraction(8, 5), (1, 0, 4)),
    7: (Fraction(16, 7), (1, 0, -2, 0, 8)),
    9: (Fraction(16, 9), (1, 0, 6, 0, -24, 0, 32)),
    11: (Fraction(8, 11), (3, 0, -12, 0, 128, 0, -320, 0, 256)),
    13: (Fraction(8, 13), (3, 0, 24, 0, -256, 0, 1088, 0, -1792, 0, 1024)),
    15: (
        Fraction(32, 15),
        (1, 0, -6, 0, 120, 0, -720, 0, 1920, 0, -2304, 0, 1024),
    ),
}

_EVEN_SECOND_DERIVATIVE: dict[int, tuple[Fraction, int, tuple[int, ...]]] = {
    2: (Fraction(2), 1, ()),
    4: (Fraction(2), 1, (0, 2)),
    6: (Fraction(2, 3), 3, (0, 0, 0, 16)),
    8: (Fraction(2), 1, (0, 2, 0, -8, 0, 16)),
    # The printed prefactor 2/3 does not reproduce g''(1) = 2; 2/5 does.
    10: (Fraction(2, 5), 5, (0, 0, 0, 80, 0, -256, 0, 256)),
    12: (Fraction(2, 3), 3, (0, 6, 0, -64, 0, 384, 0, -768, 0, 512)),
    14: (
        Fraction(1, 7),
        14,
        (0, 0, 0, 448, 0, -3584, 0, 11776, 0, -16384, 0, 8192),
    ),
}


def _xi_to_x(coeffs_xi: list[Fraction]) -> list[Fraction]:
    """Re-expand a polynomial in xi = 2x - 1 as a polynomial in x."""
    out = [Fraction(0)] * max(len(coeffs_xi), 1)
    for k, q in enumerate(coeffs_xi):
        if q == 0:
            continue
        for j in range(k + 1):
            out[j] += q * binomial(k, j) * 2**j * (-1) ** (k - j)
    return out


def _mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _trim(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def closed_form_second_derivative(n: int) -> tuple[Fraction, ...]:
    """
    g_n''(x) from the tabulated closed forms in xi, expanded in x.

    Must agree exactly with g_second_derivative_coeffs(n).
    """
    _check_cheb(n)
    if n % 2:
        pref, p = _ODD_SECOND_DERIVATIVE[n]
        in_xi = _mul([Fraction(1), Fraction(-1)], [Fraction(c) for c in p])
    else:
        pref, base, q = _EVEN_SECOND_DERIVATIVE[n]
        in_xi = [Fraction(0)]
        if q:
            shift = [Fraction(-1), Fraction(1)]
            in_xi = _mul(shift, [Fraction(c) for c in q])
        in_xi[0] += base
    return _trim(_xi_to_x([pref * c for c in in_xi]))


def gegenbauer_c2(n: int, xi: ArrayLike) -> ArrayLike:
    """
    Gegenbauer polynomial C_n^(2)(xi) by three-term recurrence.

    C_0 = 1, C_1 = 4 xi, n C_n = 2 xi (n + 1) C_{n-1} - (n + 2) C_{n-2}.
    Negative degrees give 0.
    """
    arr = np.asarray(xi, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise DomainError("xi must lie in [-1, 1]")
    if n < 0:
        return _result(np.zeros_like(arr), xi)
    prev = np.ones_like(arr)
    if n == 0:
        return _result(prev, xi)
    curr = 4.0 * arr
    for k in range(2, n + 1):
        prev, curr = curr, (2.0 * arr * (k + 1) * curr - (k + 2) * prev) / k
    return _result(curr, xi)


def g_second_derivative_gegenbauer(n: int, x: ArrayLike) -> ArrayLike:
    """
    g_n''(x) via Gegenbauer polynomials of order 2.

    The expression has a removable singularity at x = 0 (xi = -1); there
    the polynomial form is used.
    """
    _check_cheb(n)
    arr = _unit_interval(x)
    xi = 2.0 * arr - 1.0
    sign = (-1) ** n
    numerator = (
        np.asarray(gegenbauer_c2(n - 1, xi))
        - np.asarray(gegenbauer_c2(n - 3, xi))
        + sign * n * n
    )
    denom = xi + 1.0
    at_zero = denom == 0.0
    safe = np.where(at_zero, 1.0, denom)
    values = 2.0 * sign / (n * n) * numerator / safe
    if np.any(at_zero):
        at_origin = float(g_second_derivative_coeffs(n)[0])
        values = np.where(at_zero, at_origin, values)
    return _result(values, x)


# ---------------------------------------------------------------------------
# Validity ranges and envelope verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidityRanges:
    """Intervals where x ln x <= g_n(x) follows analytically."""

    degree: int
    near_zero: tuple[float, float]
    near_one: tuple[float, float]


def validity_ranges(n: int) -> ValidityRanges:
    _check_cheb(n)
    slope_zero, _ = g_endpoint_derivatives(n)
    near_zero = (0.0, math.exp(float(slope_zero)))
    if n == 2:
        # g_2 = -f_2 is an envelope on the whole interval
        near_one = (0.0, 1.0)
    elif n % 2:
        near_one = (1.0 - 2.0 / (n * n + 2), 1.0)
    else:
        near_one = (1.0 - 9.0 / (2 * n * n), 1.0)
    return ValidityRanges(n, near_zero, near_one)


class EnvelopeTag(Enum):
    TAYLOR_LOWER = "taylor-lower"
    TAYLOR_UPPER = "taylor-upper"
    CHEB_LOWER = "cheb-lower"
    CHEB_UPPER = "cheb-upper"


def parse_tag(tag: "EnvelopeTag | str") -> EnvelopeTag:
    if isinstance(tag, EnvelopeTag):
        return tag
    try:
        return EnvelopeTag(tag)
    except ValueError:
        valid = ", ".join(t.value for t in EnvelopeTag)
        raise InvalidTag(
            f"Unknown inequality tag '{tag}'. Valid: {valid}"
        ) from None


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, 1] plus Chebyshev-clustered endpoint points."""

    uniform: int = 1_000_000
    endpoint: int = 10_000
    endpoint_width: float = 1e-2

    def points(self) -> np.ndarray:
        parts = [np.linspace(0.0, 1.0, self.uniform)]
        if self.endpoint > 1:
            theta = np.linspace(0.0, np.pi / 2, self.endpoint)
            cluster = self.endpoint_width * (1.0 - np.cos(theta))
            parts += [cluster, 1.0 - cluster]
        return np.unique(np.clip(np.concatenate(parts), 0.0, 1.0))


@dataclass(frozen=True)
class EnvelopeReport:
    degree: int
    tag: EnvelopeTag
    grid_size: int
    min_slack: float
    argmin_x: float
    max_slack: float
    # only for cheb-lower: worst slack on the analytic validity ranges
    range_min_slack: float | None = None

    def passed(self, tolerance: float = 1e-13) -> bool:
        ok = self.min_slack >= -tolerance
        if self.range_min_slack is not None:
            ok = ok and self.range_min_slack >= -tolerance
        return ok

    def as_row(self) -> dict[str, object]:
        return {
            "n": self.degree,
            "tag": self.tag.value,
            "grid": self.grid_size,
            "min_slack": self.min_slack,
            "argmin_x": self.argmin_x,
        }


def envelope_slack(
    n: int, tag: EnvelopeTag | str, x: np.ndarray
) -> np.ndarray:
    """Margin of the inequality at each x; nonnegative where it holds."""
    tag = parse_tag(tag)
    y = xlogy(x, x)
    if tag is EnvelopeTag.TAYLOR_LOWER:
        return -y - np.asarray(eval_f(n, x))
    if tag is EnvelopeTag.TAYLOR_UPPER:
        return np.asarray(eval_h(n, x)) + y
    if tag is EnvelopeTag.CHEB_LOWER:
        return np.asarray(eval_g(n, x)) - y
    return np.asarray(eval_cheb_upper(n, x)) + y


def _chunk_extremes(
    n: int, tag: EnvelopeTag, chunk: np.ndarray
) -> tuple[float, float, float]:
    slack = envelope_slack(n, tag, chunk)
    i = int(np.argmin(slack))
    return float(slack[i]), float(chunk[i]), float(np.max(slack))


def verify_envelope(
    n: int,
    tag: EnvelopeTag | str,
    grid: GridSpec | None = None,
    workers: int = 4,
) -> EnvelopeReport:
    """
    Evaluate an envelope inequality over a grid and report its worst margin.

    The grid is split into chunks evaluated on a thread pool and merged by
    min-reduction. For cheb-lower the analytic validity ranges are also
    sampled densely.
    """
    tag = parse_tag(tag)
    grid = grid or GridSpec()
    if tag in (EnvelopeTag.CHEB_LOWER, EnvelopeTag.CHEB_UPPER):
        _check_cheb(n)
    else:
        _check_taylor(n)

    x = grid.points()
    chunks = np.array_split(x, max(workers, 1) * 4)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(lambda c: _chunk_extremes(n, tag, c), chunks)
        )
    min_slack, argmin_x, _ = min(results, key=lambda r: r[0])
    max_slack = max(r[2] for r in results)

    range_min: float | None = None
    if tag is EnvelopeTag.CHEB_LOWER:
        ranges = validity_ranges(n)
        dense = np.concatenate(
            [
                np.linspace(*ranges.near_zero, 20_001),
                np.linspace(*ranges.near_one, 20_001),
            ]
        )
        range_min = float(np.min(envelope_slack(n, tag, dense)))

    logger.info(
        f"Envelope {tag.value} n={n}: {x.size} points, "
        f"min slack {min_slack:.3e} at x={argmin_x:.6g}"
    )
    return EnvelopeReport(
        degree=n,
        tag=tag,
        grid_size=int(x.size),
        min_slack=min_slack,
        argmin_x=argmin_x,
        max_slack=max_slack,
        range_min_slack=range_min,
    )
