"""Integration tests for the entbounds command line."""

import io
import logging
import math

import pandas as pd
import pytest

from entbounds.core.cli import main

pytestmark = pytest.mark.integration


@pytest.fixture(autouse=True)
def restore_root_logging():
    """main() reconfigures the root logger; put it back afterwards."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "entbounds.conf"
    path.write_text("state_samples=200\nfigure_points=5\n")
    return path


def _csv(text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(text))


class TestCoefficientsAndChecks:
    def test_shifted_chebyshev_table(self, capsys):
        assert main(["coeffs", "--family", "c", "--n", "2"]) == 0
        assert capsys.readouterr().out == "s,value\n0,1\n1,-8\n2,8\n"

    def test_exact_fractions(self, capsys):
        assert main(["coeffs", "--family", "a", "--n", "3", "--exact"]) == 0
        assert capsys.readouterr().out == (
            "s,numerator,denominator\n1,3,2\n2,-2,1\n3,1,2\n"
        )

    def test_taylor_degree_cap(self, capsys):
        assert main(["coeffs", "--family", "b", "--n", "64"]) == 0
        capsys.readouterr()
        assert main(["coeffs", "--family", "b", "--n", "65"]) == 2
        assert "64" in capsys.readouterr().err

    def test_verify_envelope(self, capsys):
        code = main(
            ["verify", "--n", "5", "--ineq", "cheb-upper", "--grid", "2001"]
        )
        assert code == 0
        df = _csv(capsys.readouterr().out)
        assert list(df.columns) == [
            "n", "tag", "grid", "min_slack", "argmin_x",
        ]
        row = df.iloc[0]
        assert row["tag"] == "cheb-upper"
        assert row["min_slack"] >= -1e-13

    def test_conjecture_single_distribution(self, capsys):
        code = main(["conjecture", "--probs", "0.5,0.3,0.2", "--n", "5"])
        assert code == 0
        row = _csv(capsys.readouterr().out).iloc[0]
        assert bool(row["holds"])
        assert row["margin"] == pytest.approx(row["lhs"] - row["rhs"])
        assert row["lhs"] > row["rhs"]

    def test_conjecture_worst_margin(self, capsys):
        argv = ["conjecture", "--n", "7", "--samples", "200", "--seed", "1"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        row = _csv(first).iloc[0]
        assert list(_csv(first).columns) == [
            "n", "samples", "seed", "worst_margin", "worst_L", "holds",
        ]
        assert (row["n"], row["samples"], row["seed"]) == (7, 200, 1)
        assert row["worst_margin"] >= -1e-12
        assert 2 <= row["worst_L"] <= 64
        assert main(argv) == 0
        assert capsys.readouterr().out == first

    def test_conjecture_modes_are_exclusive(self):
        argv = ["conjecture", "--n", "3", "--probs", "1", "--samples", "5"]
        assert main(argv) == 2

    def test_conjecture_needs_samples(self, capsys):
        assert main(["conjecture", "--n", "3", "--samples", "0"]) == 2
        assert "samples" in capsys.readouterr().err


class TestBounds:
    def test_from_probabilities(self, capsys):
        assert main(["bounds", "--probs", "0.5,0.3,0.2", "--n", "4"]) == 0
        df = _csv(capsys.readouterr().out)
        assert list(df["method"]) == ["taylor", "cheb"]
        for _, row in df.iterrows():
            assert row["lower"] - 1e-10 <= row["H"] <= row["upper"] + 1e-10

    def test_from_indices(self, capsys):
        code = main(
            [
                "bounds", "--indices", "0.5,0.25", "--L", "2",
                "--method", "cheb",
            ]
        )
        assert code == 0
        df = _csv(capsys.readouterr().out)
        assert list(df.columns) == [
            "method", "n", "upsilon", "lower", "upper",
        ]
        row = df.iloc[0]
        assert row["lower"] == pytest.approx(math.log(2), abs=1e-10)

    def test_both_methods(self, capsys):
        argv = [
            "bounds", "--indices", "0.375,0.15625", "--L", "3",
            "--method", "both",
        ]
        assert main(argv) == 0
        both = capsys.readouterr().out
        assert list(_csv(both)["method"]) == ["taylor", "cheb"]
        assert main(argv[:-2]) == 0
        assert capsys.readouterr().out == both

    def test_indices_need_outcome_count(self, capsys):
        assert main(["bounds", "--indices", "0.5,0.25"]) == 2
        assert "--L" in capsys.readouterr().err

    @pytest.mark.parametrize("probs", ["0.5,0.6", "a,b"])
    def test_bad_probabilities(self, capsys, probs):
        assert main(["bounds", "--probs", probs]) == 2
        assert "error:" in capsys.readouterr().err


class TestQuantum:
    """Design, relation, von Neumann and steering subcommands."""

    def test_von_neumann_pure_qubit(self, capsys):
        code = main(
            ["vn", "--d", "2", "--moments", "1,1", "--method", "taylor"]
        )
        assert code == 0
        row = _csv(capsys.readouterr().out).iloc[0]
        assert row["t"] == 3
        assert row["lower"] == pytest.approx(0.0, abs=1e-15)
        assert row["upper"] == pytest.approx(1 / 3)
        assert row["lambda_max"] == 1.0

    def test_von_neumann_infeasible_moments(self):
        assert main(["vn", "--d", "2", "--moments", "0.2"]) == 2

    def test_relate_mub3(self, capsys):
        code = main(
            [
                "relate", "--design", "mub3", "--state", "lambda:0",
                "--method", "taylor",
            ]
        )
        assert code == 0
        row = _csv(capsys.readouterr().out).iloc[0]
        assert bool(row["clipped"])
        assert row["lower"] == pytest.approx(5 / 12)
        assert row["average_entropy"] == pytest.approx(math.log(4) / 3)

    def test_relate_bad_state(self):
        code = main(
            ["relate", "--design", "octahedron", "--state", "ket:0"]
        )
        assert code == 2

    def test_steer_uncertified(self, capsys):
        code = main(["steer", "--design", "mub3", "--method", "taylor"])
        assert code == 0
        captured = capsys.readouterr()
        row = _csv(captured.out).iloc[0]
        assert row["bound"] == pytest.approx(5 / 12)
        assert not bool(row["certified"])
        assert "not certified" in captured.err

    def test_steer_certified(self, capsys, small_config):
        code = main(
            [
                "--config", str(small_config), "steer", "--design",
                "octahedron", "--method", "cheb", "--certify",
            ]
        )
        assert code == 0
        row = _csv(capsys.readouterr().out).iloc[0]
        assert bool(row["certified"])

    def test_design_summary(self, capsys):
        assert main(["design", "--name", "mub3"]) == 0
        row = _csv(capsys.readouterr().out).iloc[0]
        assert (row["K"], row["M"], row["ell"], row["t"]) == (6, 3, 2, 3)

    def test_design_verify(self, capsys):
        assert main(["design", "--name", "icosahedron", "--verify"]) == 0
        assert "frame potential" in capsys.readouterr().out

    def test_design_export(self, tmp_path, capsys):
        path = tmp_path / "octahedron.csv"
        code = main(["design", "--name", "octahedron", "--export", str(path)])
        assert code == 0
        df = pd.read_csv(path)
        assert list(df.columns) == ["k", "nx", "ny", "nz"]
        assert len(df) == 6
        assert list(df.iloc[0]) == [0, 0, 0, 1]


class TestFiguresAndSuite:
    def test_figure_out_is_deterministic(self, tmp_path, capsys):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (first, second):
            code = main(
                [
                    "figure", "--id", "fig3", "--points", "5",
                    "--out", str(path),
                ]
            )
            assert code == 0
        assert first.read_bytes() == second.read_bytes()
        assert main(["figure", "--id", "fig3", "--points", "5"]) == 0
        assert capsys.readouterr().out == first.read_text()

    def test_figure_points_from_config(self, capsys, small_config):
        code = main(["--config", str(small_config), "figure", "--id", "fig1"])
        assert code == 0
        assert len(_csv(capsys.readouterr().out)) == 5

    def test_figure_svg(self, tmp_path):
        svg = tmp_path / "fig1.svg"
        code = main(
            [
                "figure", "--id", "fig1", "--points", "11",
                "--out", str(tmp_path / "fig1.csv"), "--svg", str(svg),
            ]
        )
        assert code == 0
        assert svg.exists()

    def test_suite_single_check(self, capsys):
        code = main(["suite", "--quick", "--check", "table1_equality"])
        assert code == 0
        assert "PASS" in capsys.readouterr().out


class TestUsageErrors:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == 2

    def test_unknown_check_name(self):
        assert main(["suite", "--check", "nope"]) == 2

    def test_unknown_config_key(self, tmp_path, capsys):
        path = tmp_path / "bad.conf"
        path.write_text("figure_pointz=5\n")
        code = main(["--config", str(path), "coeffs", "--family", "c",
                     "--n", "2"])
        assert code == 2
        assert "figure_pointz" in capsys.readouterr().err

    def test_help_exits_cleanly(self, capsys):
        assert main(["--help"]) == 0
        assert "entbounds" in capsys.readouterr().out
