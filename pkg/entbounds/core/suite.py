"""
Verification suite: every numerical claim of the package as a named check.

Each check returns a CheckResult with its worst margin (nonnegative when
the claim holds). run_suite executes them in order, catches per-check
errors so one failure does not hide the others, and renders a rich table.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from rich.console import Console
from rich.table import Table

from entbounds.config import Config

from .bounds import (
    Method,
    index_vector_from_distribution,
    prop1_bounds,
    random_distribution,
    shannon_entropy,
    tsan1_check,
    upsilon_closed_form_n2,
    upsilon_root,
)
from .coefficients import CHEB_MAX_DEGREE, table1_mismatches
from .designs import (
    BUILTIN_DESIGNS,
    MomentVector,
    QuantumDesign,
    QuantumState,
    builtin_design,
    find_snub_cube_design,
    resolution_of_identity_defect,
    verify_design,
)
from .errors import EntropyBoundsError, InvalidTag
from .figures import (
    FigureId,
    build_figure,
    figure_spec,
    pure_state_ratio,
)
from .poly_estimators import (
    G15_MAX_ERROR,
    G15_PEAK_REGION,
    EnvelopeTag,
    GridSpec,
    approximation_error,
    closed_form_second_derivative,
    eval_g_second_derivative,
    g_derivative_exact,
    g_endpoint_derivatives,
    g_second_derivative_coeffs,
    g_second_derivative_gegenbauer,
    g_third_derivative_at_one,
    verify_envelope,
)
from .relations import (
    average_maxprob_bound,
    prop2_bounds,
    state_independent_check,
    steering_bounds,
    von_neumann_bounds,
)

logger = logging.getLogger(__name__)

# distributions closer to uniform than this make Upsilon ill-conditioned
MIN_SPREAD = 0.02

# pure-state gap ratios with their accepted ranges
RATIO_CLAIMS: dict[FigureId, tuple[float, float]] = {
    FigureId.FIG2: (0.16, math.inf),
    FigureId.FIG3: (0.16, 0.24),
    FigureId.FIG4: (1.12, 1.68),
    FigureId.FIG6: (2.4, 3.6),
}


@dataclass(frozen=True)
class SuiteSizes:
    envelope_grid: int
    endpoint_points: int
    distributions: int
    states: int
    figure_points: int

    @classmethod
    def from_config(cls, config: Config, quick: bool = False) -> "SuiteSizes":
        if quick:
            return cls(
                envelope_grid=config.quick_grid,
                endpoint_points=1_000,
                distributions=2_000,
                states=500,
                figure_points=51,
            )
        return cls(
            envelope_grid=config.envelope_grid,
            endpoint_points=config.endpoint_points,
            distributions=config.monte_carlo_samples,
            states=config.state_samples,
            figure_points=config.figure_points,
        )


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_margin: float
    detail: str = ""
    seconds: float = 0.0


@dataclass
class SuiteReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def render(self, console: Console) -> None:
        table = Table(
            title="entbounds verification",
            show_header=True,
            header_style="bold magenta",
        )
        table.add_column("check", style="cyan")
        table.add_column("status")
        table.add_column("worst margin", justify="right")
        table.add_column("seconds", justify="right")
        table.add_column("detail")
        for r in self.results:
            status = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
            table.add_row(
                r.name,
                status,
                f"{r.worst_margin:.3e}",
                f"{r.seconds:.2f}",
                r.detail,
            )
        console.print(table)


@dataclass(frozen=True)
class SuiteContext:
    config: Config
    sizes: SuiteSizes
    seed: int

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    def design(self, name: str) -> QuantumDesign:
        return builtin_design(
            name,
            self.config.design_tolerance,
            self.config.found_design_tolerance,
        )


Check = Callable[[SuiteContext], CheckResult]


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_table1(ctx: SuiteContext) -> CheckResult:
    mismatches = table1_mismatches()
    detail = ""
    if mismatches:
        detail = f"first mismatch (n, s) = {mismatches[0][:2]}"
    return CheckResult(
        "table1_equality", not mismatches, -float(len(mismatches)), detail
    )


def check_envelopes(ctx: SuiteContext) -> CheckResult:
    grid = GridSpec(
        uniform=ctx.sizes.envelope_grid, endpoint=ctx.sizes.endpoint_points
    )
    worst, where = math.inf, ""
    for tag in EnvelopeTag:
        for n in range(2, CHEB_MAX_DEGREE + 1):
            report = verify_envelope(n, tag, grid, workers=ctx.config.workers)
            margin = report.min_slack
            if report.range_min_slack is not None:
                margin = min(margin, report.range_min_slack)
            if margin < worst:
                worst, where = margin, f"{tag.value} n={n}"
    return CheckResult(
        "envelopes",
        worst >= -ctx.config.slack_tolerance,
        worst,
        f"worst at {where}",
    )


def check_g15_accuracy(ctx: SuiteContext) -> CheckResult:
    x = np.linspace(0.0, 1.0, ctx.sizes.envelope_grid)
    err, where = approximation_error(15, x)
    return CheckResult(
        "g15_accuracy",
        err < G15_MAX_ERROR and where < G15_PEAK_REGION,
        G15_MAX_ERROR - err,
        f"max error {err:.3e} at x={where:.4g}",
    )


def check_derivative_identities(ctx: SuiteContext) -> CheckResult:
    x = np.linspace(0.0, 1.0, 1001)
    worst = 0.0
    failures = []
    for n in range(2, CHEB_MAX_DEGREE + 1):
        if closed_form_second_derivative(n) != g_second_derivative_coeffs(n):
            failures.append(f"closed form n={n}")
        poly = np.asarray(eval_g_second_derivative(n, x))
        gegenbauer = np.asarray(g_second_derivative_gegenbauer(n, x))
        gap = float(np.max(np.abs(gegenbauer - poly)))
        worst = max(worst, gap)
        if gap > 1e-9:
            failures.append(f"gegenbauer n={n}")
        at_zero, at_one = g_endpoint_derivatives(n)
        if (at_zero, at_one) != (
            g_derivative_exact(n, 1, 0),
            g_derivative_exact(n, 1, 1),
        ):
            failures.append(f"endpoint slopes n={n}")
        if n % 2 == 0 and g_third_derivative_at_one(n) != g_derivative_exact(
            n, 3, 1
        ):
            failures.append(f"third derivative n={n}")
    return CheckResult(
        "derivative_identities",
        not failures,
        1e-9 - worst,
        ", ".join(failures[:3]),
    )


def check_upsilon(ctx: SuiteContext) -> CheckResult:
    worst_gap = 0.0
    for L in range(2, 52):
        for index in np.linspace(1.0 / L, 1.0, 50):
            gap = abs(
                upsilon_root(L, 2, float(index))
                - upsilon_closed_form_n2(L, float(index))
            )
            worst_gap = max(worst_gap, gap)

    shape_ok = True
    for L in (3, 5, 10):
        for n in (2, 3, 5):
            grid = np.linspace(float(L) ** (1 - n), 1.0, 201)
            values = np.array([upsilon_root(L, n, float(i)) for i in grid])
            steps = np.diff(values)
            curvature = np.diff(values, 2)
            shape_ok &= bool(np.all(steps > 0.0))
            shape_ok &= bool(np.all(curvature <= 1e-9))
    passed = worst_gap <= 1e-12 and shape_ok
    detail = f"closed-form gap {worst_gap:.1e}"
    if not shape_ok:
        detail += "; not monotone concave"
    return CheckResult("upsilon_root", passed, 1e-12 - worst_gap, detail)


def _spread_distribution(rng: np.random.Generator, L: int):
    while True:
        p = random_distribution(rng, L)
        if L * float(np.sum(p.probs**2)) - 1.0 >= MIN_SPREAD:
            return p


def check_prop1_sandwich(ctx: SuiteContext) -> CheckResult:
    rng = ctx.rng(1)
    slack = ctx.config.sandwich_tolerance
    worst = math.inf
    for _ in range(ctx.sizes.distributions):
        L = int(rng.integers(2, 65))
        n = int(rng.integers(2, 8))
        p = _spread_distribution(rng, L)
        idx = index_vector_from_distribution(p, n)
        h = shannon_entropy(p)
        for method in Method:
            b = prop1_bounds(
                idx,
                L,
                method,
                xtol=ctx.config.bisection_xtol,
                maxiter=ctx.config.bisection_maxiter,
            )
            worst = min(worst, h - b.lower, b.upper - h)

    for L in (2, 3, 8, 64):
        uniform = np.full(L, 1.0 / L)
        for n in range(2, 8):
            idx = index_vector_from_distribution(uniform, n)
            for method in Method:
                b = prop1_bounds(idx, L, method)
                target = math.log(L)
                gap = max(abs(b.lower - target), abs(b.upper - target))
                worst = min(worst, slack - gap)
    return CheckResult("prop1_sandwich", worst >= -slack, worst)


def check_designs(ctx: SuiteContext) -> CheckResult:
    worst = math.inf
    failures = []
    for name in BUILTIN_DESIGNS:
        design = ctx.design(name)
        at_t = verify_design(design)
        above = verify_design(design, design.t + 1)
        worst = min(worst, design.tolerance - abs(at_t.defect))
        if not at_t.is_design:
            failures.append(f"{name} fails t={design.t}")
        if above.is_design:
            failures.append(f"{name} passes t={design.t + 1}")
        if resolution_of_identity_defect(design) > design.tolerance:
            failures.append(f"{name} resolution of identity")
    return CheckResult(
        "design_verification", not failures, worst, ", ".join(failures)
    )


def check_snub_cube(ctx: SuiteContext) -> CheckResult:
    design = find_snub_cube_design(
        restarts=ctx.config.snub_restarts,
        seed=ctx.config.seed,
        tolerance=ctx.config.found_design_tolerance,
    )
    check = verify_design(design, 7, ctx.config.found_design_tolerance)
    return CheckResult(
        "snub_cube_7_design",
        check.is_design and design.K == 24,
        ctx.config.found_design_tolerance - abs(check.defect),
        f"defect {check.defect:.2e}",
    )


def check_relations(ctx: SuiteContext) -> CheckResult:
    rng = ctx.rng(2)
    slack = ctx.config.sandwich_tolerance
    worst = math.inf
    per_design = max(1, ctx.sizes.states // 10)
    for name in BUILTIN_DESIGNS:
        design = ctx.design(name)
        for _ in range(per_design):
            rho = QuantumState.random_mixed(rng)
            for method in Method:
                r = prop2_bounds(design, rho, method)
                worst = min(
                    worst,
                    r.average_entropy - r.lower,
                    r.upper - r.average_entropy,
                )
            maxprob = average_maxprob_bound(design, rho, slack)
            worst = min(worst, maxprob.bound - maxprob.measured)
    return CheckResult("relations_sandwich", worst >= -slack, worst)


def check_state_independence(ctx: SuiteContext) -> CheckResult:
    worst = math.inf
    failures = []
    for name in BUILTIN_DESIGNS:
        design = ctx.design(name)
        for method in Method:
            result = state_independent_check(
                design,
                method,
                ctx.sizes.states,
                ctx.seed,
                workers=ctx.config.workers,
                tolerance=ctx.config.sandwich_tolerance,
            )
            worst = min(worst, result.worst_margin)
            if not result.holds:
                failures.append(f"{name}/{method.value}")
    steer = steering_bounds(ctx.design("mub3"), Method.TAYLOR)
    gap = abs(steer.value - 5.0 / 12.0)
    if gap > 1e-12:
        failures.append(f"mub3 steering off by {gap:.1e}")
    return CheckResult(
        "state_independence", not failures, worst, ", ".join(failures)
    )


def check_von_neumann(ctx: SuiteContext) -> CheckResult:
    failures = []
    pure = von_neumann_bounds(MomentVector.pure(2, 3), Method.TAYLOR)
    if abs(pure.lower) > 1e-12 or abs(pure.upper - 1.0 / 3.0) > 1e-12:
        failures.append("pure qubit interval")
    mixed = MomentVector.from_eigenvalues([0.5, 0.5], 3)
    for method in Method:
        b = von_neumann_bounds(mixed, method)
        off = max(abs(b.lower - math.log(2)), abs(b.upper - math.log(2)))
        if off > 1e-10:
            failures.append(f"maximally mixed ({method.value})")

    rng = ctx.rng(3)
    slack = ctx.config.sandwich_tolerance
    worst = math.inf
    for _ in range(ctx.sizes.states):
        d = int(rng.integers(2, 7))
        t = int(rng.integers(2, 8))
        eigs = _spread_distribution(rng, d).probs
        m = MomentVector.from_eigenvalues(eigs, t)
        entropy = shannon_entropy(eigs)
        for method in Method:
            b = von_neumann_bounds(m, method)
            worst = min(worst, entropy - b.lower, b.upper - entropy)
    if worst < -slack:
        failures.append("random eigenvalue sandwich")
    return CheckResult(
        "von_neumann", not failures, worst, ", ".join(failures)
    )


def check_conjecture(ctx: SuiteContext) -> CheckResult:
    rng = ctx.rng(4)
    tolerance = ctx.config.conjecture_tolerance
    worst = math.inf
    for _ in range(ctx.sizes.distributions):
        L = int(rng.integers(2, 65))
        p = random_distribution(rng, L)
        for n in range(2, CHEB_MAX_DEGREE + 1):
            worst = min(worst, tsan1_check(p, n, tolerance).margin)
    return CheckResult("tsallis_conjecture", worst >= -tolerance, worst)


def check_figures(ctx: SuiteContext) -> CheckResult:
    failures = []
    worst = math.inf
    for fig in FigureId:
        df = build_figure(
            figure_spec(fig, ctx.sizes.figure_points),
            ctx.config.sandwich_tolerance,
        )
        if fig is FigureId.FIG1:
            continue
        last = df.iloc[-1]
        design = ctx.design(figure_spec(fig).design_name or "")
        target = math.log(design.ell)
        gap = max(abs(float(last[c]) - target) for c in df.columns[1:])
        worst = min(worst, 1e-9 - gap)
        if gap > 1e-9:
            failures.append(f"{fig.value} does not converge to ln l")
        if fig in RATIO_CLAIMS:
            low, high = RATIO_CLAIMS[fig]
            ratio = pure_state_ratio(df, fig)
            if not low <= ratio <= high:
                failures.append(f"{fig.value} ratio {ratio:.3f}")
    return CheckResult("figures", not failures, worst, ", ".join(failures))


CHECKS: dict[str, Check] = {
    "table1_equality": check_table1,
    "envelopes": check_envelopes,
    "g15_accuracy": check_g15_accuracy,
    "derivative_identities": check_derivative_identities,
    "upsilon_root": check_upsilon,
    "prop1_sandwich": check_prop1_sandwich,
    "design_verification": check_designs,
    "snub_cube_7_design": check_snub_cube,
    "relations_sandwich": check_relations,
    "state_independence": check_state_independence,
    "von_neumann": check_von_neumann,
    "tsallis_conjecture": check_conjecture,
    "figures": check_figures,
}


def run_suite(
    config: Config,
    *,
    quick: bool = False,
    seed: int | None = None,
    only: list[str] | None = None,
) -> SuiteReport:
    """
    Run the named checks (all by default) and collect a report.

    A check that raises an EntropyBoundsError is recorded as failed.
    """
    ctx = SuiteContext(
        config=config,
        sizes=SuiteSizes.from_config(config, quick),
        seed=config.seed if seed is None else seed,
    )
    names = only or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise InvalidTag(
            f"Unknown check(s): {', '.join(unknown)}. "
            f"Valid: {', '.join(CHECKS)}"
        )
    report = SuiteReport()
    for name in names:
        check = CHECKS[name]
        start = time.perf_counter()
        try:
            result = check(ctx)
        except EntropyBoundsError as e:
            logger.error(f"Check {name} raised: {e}")
            result = CheckResult(name, False, -math.inf, str(e))
        result.seconds = time.perf_counter() - start
        logger.info(
            f"Check {name}: {'pass' if result.passed else 'FAIL'} "
            f"({result.seconds:.2f}s)"
        )
        report.results.append(result)
    return report
