"""
Figure data: estimator curves and entropy bounds as CSV tables.

fig1 compares x ln x with the Taylor curve -f_n and the Chebyshev curve
g_n on [0, 1]. fig2..fig6 sweep a qubit state with eigenvalues
(1 - lambda, lambda) over lambda in [0, 1/2] and tabulate the average
entropy of a design measurement against its Taylor, Chebyshev and
information-diagram (ID) estimates.

Every row is checked before the table is returned; a failed check
raises BoundViolation and nothing is written.
"""

import io
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np
import pandas as pd

from .bounds import Method, id_estimate, mub_bound
from .designs import (
    MomentVector,
    QuantumDesign,
    QuantumState,
    beta_bar_from_moments,
    builtin_design,
)
from .errors import BoundViolation, DegreeOutOfRange, InvalidTag
from .poly_estimators import eval_f, eval_g, xlogx
from .relations import prop2_bounds

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
FIG1_DEGREES = (3, 5, 7)
ENTROPY_COLUMNS = ("lambda", "H_exact", "LT", "UT", "LCh", "UCh", "ID")


class FigureId(Enum):
    FIG1 = "fig1"
    FIG2 = "fig2"
    FIG3 = "fig3"
    FIG4 = "fig4"
    FIG5 = "fig5"
    FIG6 = "fig6"


FIGURE_DESIGNS: dict[FigureId, str] = {
    FigureId.FIG2: "octahedron",
    FigureId.FIG3: "mub3",
    FigureId.FIG4: "icosahedron",
    FigureId.FIG5: "icosidodecahedron",
    FigureId.FIG6: "mclaren_snub_cube",
}


@dataclass(frozen=True)
class FigureSpec:
    """Which figure, how many abscissa points, and its design binding."""

    figure: FigureId
    points: int = 501

    def __post_init__(self) -> None:
        if self.points < 2:
            raise InvalidTag(f"need at least 2 points, got {self.points}")

    @property
    def design_name(self) -> str | None:
        return FIGURE_DESIGNS.get(self.figure)

    def grid(self) -> np.ndarray:
        """Uniform abscissa with both endpoints included."""
        stop = 1.0 if self.figure is FigureId.FIG1 else 0.5
        return np.linspace(0.0, stop, self.points)


def figure_spec(fig_id: FigureId | str, points: int = 501) -> FigureSpec:
    """
    Build a FigureSpec from a figure id such as 'fig3'.

    Raises:
        InvalidTag: If the id is not fig1..fig6
    """
    if isinstance(fig_id, str):
        try:
            fig_id = FigureId(fig_id)
        except ValueError:
            valid = ", ".join(f.value for f in FigureId)
            raise InvalidTag(
                f"Unknown figure '{fig_id}'. Valid: {valid}"
            ) from None
    return FigureSpec(fig_id, points)


def emit_fig1(
    n_list: Sequence[int] = FIG1_DEGREES,
    points: int = 501,
    tolerance: float = 1e-13,
) -> pd.DataFrame:
    """
    Columns x, y = x ln x, then f{n}neg = -f_n(x) and g{n} = g_n(x).

    Both -f_n and g_n lie above x ln x on [0, 1].
    """
    degrees = list(n_list)
    if not degrees:
        raise DegreeOutOfRange("fig1 needs at least one degree")
    for n in degrees:
        if n not in FIG1_DEGREES:
            raise DegreeOutOfRange(
                f"fig1 degrees must be among {FIG1_DEGREES}, got {n}"
            )
    x = FigureSpec(FigureId.FIG1, points).grid()
    y = np.asarray(xlogx(x))
    table: dict[str, np.ndarray] = {"x": x, "y": y}
    for n in degrees:
        table[f"f{n}neg"] = -np.asarray(eval_f(n, x))
    for n in degrees:
        table[f"g{n}"] = np.asarray(eval_g(n, x))

    df = pd.DataFrame(table)
    curves = [c for c in df.columns if c not in ("x", "y")]
    # every curve vanishes at both ends; drop rounding and signed zeros
    df.loc[(x == 0.0) | (x == 1.0), curves] = 0.0
    below = df[curves].sub(df["y"], axis=0).min(axis=1)
    if (below < -tolerance).any():
        row = int(below.idxmin())
        raise BoundViolation(
            f"fig1: x ln x exceeds an estimator curve at x={x[row]!r}"
        )
    return df


def _id_column(design: QuantumDesign, m: MomentVector) -> float:
    if design.partition is not None:
        return mub_bound(m.moment(2))
    index2 = beta_bar_from_moments(design, m, 2, per_group=False)
    return id_estimate(index2, design.K)


def entropy_row(design: QuantumDesign, lam: float) -> dict[str, float]:
    rho = QuantumState.from_min_eigenvalue(lam)
    taylor = prop2_bounds(design, rho, Method.TAYLOR)
    cheb = prop2_bounds(design, rho, Method.CHEBYSHEV)
    m = MomentVector.from_state(rho, max(design.t, 2))
    return {
        "lambda": lam,
        "H_exact": taylor.average_entropy,
        "LT": taylor.lower,
        "UT": taylor.upper,
        "LCh": cheb.lower,
        "UCh": cheb.upper,
        "ID": _id_column(design, m),
    }


def check_sandwich(df: pd.DataFrame, tolerance: float = 1e-10) -> None:
    """
    Raises:
        BoundViolation: If some row has H_exact outside [LT, UT] or [LCh, UCh]
    """
    h = df["H_exact"]
    bad = (
        (df["LT"] > h + tolerance)
        | (h > df["UT"] + tolerance)
        | (df["LCh"] > h + tolerance)
        | (h > df["UCh"] + tolerance)
    )
    if bad.any():
        lam = float(df.loc[bad, "lambda"].iloc[0])
        raise BoundViolation(
            f"entropy outside its bounds at lambda={lam!r} "
            f"({int(bad.sum())} rows)"
        )


def emit_entropy_figure(
    spec: FigureSpec,
    tolerance: float = 1e-10,
    design: QuantumDesign | None = None,
) -> pd.DataFrame:
    """Columns lambda, H_exact, LT, UT, LCh, UCh, ID for one design."""
    if spec.design_name is None:
        raise InvalidTag(f"{spec.figure.value} is not an entropy figure")
    design = builtin_design(spec.design_name) if design is None else design
    logger.info(
        f"Building {spec.figure.value} ({design.name}, "
        f"{spec.points} points)"
    )
    rows = [entropy_row(design, float(lam)) for lam in spec.grid()]
    df = pd.DataFrame(rows, columns=list(ENTROPY_COLUMNS))
    check_sandwich(df, tolerance)
    return df


def build_figure(spec: FigureSpec, tolerance: float = 1e-10) -> pd.DataFrame:
    if spec.figure is FigureId.FIG1:
        return emit_fig1(points=spec.points)
    return emit_entropy_figure(spec, tolerance)


def pure_state_ratio(df: pd.DataFrame, figure: FigureId) -> float:
    """
    Gap ratio at the pure-state row used to compare estimates.

    fig3 gives (ID - LCh)/(UCh - ID); fig6 gives (LCh - ID)/(UCh - LCh),
    as do fig2 and fig4. fig5 has no quoted ratio.
    """
    row = df.iloc[0]
    if figure is FigureId.FIG3:
        return float((row["ID"] - row["LCh"]) / (row["UCh"] - row["ID"]))
    if figure in (FigureId.FIG2, FigureId.FIG4, FigureId.FIG6):
        return float((row["LCh"] - row["ID"]) / (row["UCh"] - row["LCh"]))
    raise InvalidTag(f"no pure-state ratio for {figure.value}")


def to_csv_text(df: pd.DataFrame) -> str:
    buffer = io.StringIO()
    df.to_csv(
        buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return buffer.getvalue()


def write_csv(df: pd.DataFrame, out: Path | TextIO) -> None:
    """Write with 17 significant digits; output is byte-deterministic."""
    text = to_csv_text(df)
    if isinstance(out, Path):
        out.write_text(text, encoding="utf-8")
    else:
        out.write(text)


def render_svg(df: pd.DataFrame, spec: FigureSpec, path: Path) -> None:
    """Plot the CSV columns against the first column into an SVG file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    abscissa = df.columns[0]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for column in df.columns[1:]:
        ax.plot(df[abscissa], df[column], label=column, linewidth=1.2)
    ax.set_xlabel("x" if spec.figure is FigureId.FIG1 else "λ")
    ax.set_ylabel("nats")
    if spec.design_name is not None:
        ax.set_title(spec.design_name)
    ax.set_xlim(float(df[abscissa].iloc[0]), float(df[abscissa].iloc[-1]))
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote {path}")
