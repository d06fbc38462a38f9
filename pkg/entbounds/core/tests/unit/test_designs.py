"""Unit tests for designs.py - qubit designs, states and moments."""

import math
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import pytest

from entbounds.core.designs import (
    BUILTIN_DESIGNS,
    DESIGN_TOLERANCE,
    FOUND_DESIGN_TOLERANCE,
    FOUND_DESIGNS,
    TRIBONACCI,
    MomentVector,
    QuantumState,
    beta_bar,
    beta_bar_from_moments,
    builtin_design,
    dd,
    find_snub_cube_design,
    frame_potential,
    moments_to_hsym,
    octahedral_rotations,
    povm_probabilities,
    regular_snub_cube,
    resolution_of_identity_defect,
    verify_design,
)
from entbounds.core.errors import (
    DegreeOutOfRange,
    DimensionError,
    DomainError,
    InsufficientMoments,
    UnknownDesign,
)


class TestStates:
    def test_bloch_round_trip(self):
        rho = QuantumState.from_bloch([0.3, -0.4, 0.5])
        again = QuantumState.from_matrix(rho.matrix)
        np.testing.assert_allclose(again.bloch, [0.3, -0.4, 0.5], atol=1e-14)

    def test_min_eigenvalue_family(self):
        rho = QuantumState.from_min_eigenvalue(0.2)
        np.testing.assert_allclose(rho.eigenvalues(), [0.2, 0.8])
        assert rho.purity == pytest.approx(0.68)

    def test_maximally_mixed(self):
        assert QuantumState.maximally_mixed().purity == pytest.approx(0.5)
        rho3 = QuantumState.maximally_mixed(3)
        assert rho3.d == 3 and rho3.bloch is None
        assert rho3.purity == pytest.approx(1.0 / 3.0)

    def test_random_mixed_inside_ball(self, rng):
        for _ in range(50):
            rho = QuantumState.random_mixed(rng)
            assert np.linalg.norm(rho.bloch) <= 1.0
            assert 0.5 <= rho.purity <= 1.0

    def test_invalid_states(self):
        with pytest.raises(DomainError, match="unit trace"):
            QuantumState(np.diag([0.6, 0.6]))
        with pytest.raises(DomainError, match="Hermitian"):
            QuantumState(np.array([[0.5, 0.1], [0.0, 0.5]]))
        with pytest.raises(DomainError, match="positive"):
            QuantumState(np.diag([1.5, -0.5]))
        with pytest.raises(DimensionError):
            QuantumState(np.ones((2, 3)) / 2)
        with pytest.raises(DomainError):
            QuantumState.from_bloch([0.0, 0.0, 2.0])
        with pytest.raises(DomainError):
            QuantumState.from_min_eigenvalue(0.7)


class TestMoments:
    """Power sums and the symmetric-projector trace."""

    def test_pure_hsym_is_one(self):
        m = MomentVector.pure(2, 5)
        for s in range(1, 6):
            assert moments_to_hsym(m, s) == pytest.approx(1.0)

    def test_maximally_mixed_hsym(self):
        m = MomentVector.from_state(QuantumState.maximally_mixed(), 3)
        assert moments_to_hsym(m, 2) == pytest.approx(0.75)
        assert moments_to_hsym(m, 3) == pytest.approx(0.5)

    def test_hsym_needs_enough_moments(self):
        with pytest.raises(InsufficientMoments):
            moments_to_hsym(MomentVector.pure(2, 2), 3)

    def test_infeasible_moments(self):
        with pytest.raises(DomainError):
            MomentVector(2, (1.0, 0.3))
        with pytest.raises(DomainError):
            MomentVector(2, (0.9, 0.6))

    def test_from_eigenvalues(self):
        m = MomentVector.from_eigenvalues([0.75, 0.25], 3)
        assert m.d == 2 and m.t == 3
        assert m.moment(2) == pytest.approx(0.625)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_hsym_matches_eigenvalue_polynomial(self, rng, d):
        """h_s(eigenvalues) summed over monomials of degree s"""
        for _ in range(5):
            eigs = rng.dirichlet(np.ones(d))
            m = MomentVector.from_eigenvalues(eigs, 7)
            for s in range(1, 8):
                expected = sum(
                    math.prod(eigs[list(idx)])
                    for idx in combinations_with_replacement(range(d), s)
                )
                assert moments_to_hsym(m, s) == pytest.approx(
                    expected, abs=1e-10
                )


class TestDesigns:
    """Frame potentials and the built-in designs."""

    def test_dd_values(self):
        assert dd(1, 2) == Fraction(1, 2)
        assert dd(3, 2) == Fraction(1, 4)
        assert dd(7, 2) == Fraction(1, 8)
        assert dd(2, 3) == Fraction(1, 6)
        with pytest.raises(DomainError):
            dd(0, 2)

    def test_octahedron_frame_potentials(self, octahedron):
        assert frame_potential(octahedron, 1) == pytest.approx(1 / 2)
        assert frame_potential(octahedron, 2) == pytest.approx(1 / 3)
        assert frame_potential(octahedron, 3) == pytest.approx(1 / 4)
        with pytest.raises(DegreeOutOfRange):
            frame_potential(octahedron, 0)

    @pytest.mark.parametrize(
        "name", ["octahedron", "icosahedron", "icosidodecahedron", "mub3"]
    )
    def test_builtins_reach_their_strength(self, name):
        design = builtin_design(name)
        for t in range(1, design.t + 1):
            assert verify_design(design, t).is_design, (name, t)

    @pytest.mark.parametrize(
        "name", ["octahedron", "icosahedron", "icosidodecahedron"]
    )
    def test_builtins_fail_one_degree_higher(self, name):
        design = builtin_design(name)
        check = verify_design(design, design.t + 1)
        assert not check.is_design
        assert check.defect > 0

    def test_sizes(self):
        sizes = {
            name: builtin_design(name).K
            for name in ("octahedron", "icosahedron", "icosidodecahedron")
        }
        assert sizes == {
            "octahedron": 6,
            "icosahedron": 12,
            "icosidodecahedron": 30,
        }

    def test_regular_snub_cube_is_only_a_3_design(self):
        snub = regular_snub_cube()
        assert snub.K == 24
        assert verify_design(snub, 3).is_design
        assert not verify_design(snub, 7).is_design
        assert TRIBONACCI**3 == pytest.approx(TRIBONACCI**2 + TRIBONACCI + 1)

    def test_rotation_group(self):
        rotations = octahedral_rotations()
        assert rotations.shape == (24, 3, 3)
        np.testing.assert_allclose(np.linalg.det(rotations), 1.0)
        for r in rotations:
            np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-15)

    def test_mub3_partition(self, mub3):
        assert (mub3.K, mub3.M, mub3.ell) == (6, 3, 2)
        assert resolution_of_identity_defect(mub3) < 1e-12

    def test_bad_partition(self, octahedron):
        with pytest.raises(DomainError, match="partition"):
            octahedron.with_partition("bad", ((0, 1), (2, 3, 4), (5,)))

    def test_partition_groups_resolve_identity(self, octahedron):
        """Each group must be a basis, not just the right size"""
        with pytest.raises(DomainError, match="identity"):
            octahedron.with_partition("bad", ((0, 2), (1, 3), (4, 5)))

    def test_tolerance_reaches_exact_designs(self):
        assert builtin_design("octahedron").tolerance == DESIGN_TOLERANCE
        loose = builtin_design("octahedron", tolerance=0.1)
        assert loose.tolerance == 0.1
        # frame potential at t=4 is 5/24 against 1/5
        assert not verify_design(builtin_design("octahedron"), 4).is_design
        assert verify_design(loose, 4).is_design
        assert builtin_design("mub3", tolerance=1e-4).M == 3

    def test_found_designs_take_their_own_tolerance(self, monkeypatch):
        seen = {}

        def fake(tolerance=FOUND_DESIGN_TOLERANCE):
            seen["tolerance"] = tolerance
            return builtin_design("octahedron")

        monkeypatch.setitem(BUILTIN_DESIGNS, "mclaren_snub_cube", fake)
        assert "mclaren_snub_cube" in FOUND_DESIGNS
        builtin_design("mclaren_snub_cube", 1e-12, 1e-5)
        assert seen["tolerance"] == 1e-5
        builtin_design("mclaren_snub_cube", 1e-12)
        assert seen["tolerance"] == FOUND_DESIGN_TOLERANCE

    def test_unknown_design(self):
        with pytest.raises(UnknownDesign, match="octahedron"):
            builtin_design("cube")

    def test_registry_names(self):
        assert set(BUILTIN_DESIGNS) == {
            "octahedron",
            "icosahedron",
            "icosidodecahedron",
            "mclaren_snub_cube",
            "mub3",
        }

    @pytest.mark.slow
    def test_snub_cube_search_finds_7_design(self):
        design = find_snub_cube_design(restarts=64, seed=20240521)
        assert design.K == 24 and design.t == 7
        assert frame_potential(design, 7) == pytest.approx(1 / 8, abs=1e-6)
        assert verify_design(design).is_design
        assert not verify_design(design, 8).is_design


class TestMeasurements:
    """POVM statistics and their design averages."""

    def test_octahedron_pure_state(self, octahedron):
        rho = QuantumState.from_bloch([0.0, 0.0, 1.0])
        (p,) = povm_probabilities(octahedron, rho)
        np.testing.assert_allclose(
            p.probs, [1 / 3, 0.0, 1 / 6, 1 / 6, 1 / 6, 1 / 6], atol=1e-15
        )

    def test_mub3_maximally_mixed(self, mub3):
        groups = povm_probabilities(mub3, QuantumState.maximally_mixed())
        assert len(groups) == 3
        for p in groups:
            np.testing.assert_allclose(p.probs, [0.5, 0.5])

    def test_beta_bar_pure_octahedron(self, octahedron):
        rho = QuantumState.from_bloch([0.0, 0.0, 1.0])
        assert beta_bar(octahedron, rho, 2) == pytest.approx(2 / 9)
        assert beta_bar(octahedron, rho, 3) == pytest.approx(1 / 18)

    @pytest.mark.parametrize("name", ["octahedron", "mub3", "icosahedron"])
    def test_beta_bar_matches_probabilities(self, rng, name):
        """Design average from moments equals the measured power sums"""
        design = builtin_design(name)
        for _ in range(20):
            rho = QuantumState.random_mixed(rng)
            groups = povm_probabilities(design, rho)
            for s in range(2, design.t + 1):
                measured = np.mean([np.sum(p.probs**s) for p in groups])
                assert beta_bar(design, rho, s) == pytest.approx(
                    measured, abs=1e-12
                )

    def test_beta_bar_over_all_outcomes(self, mub3):
        """per_group=False treats all six vectors as one POVM"""
        m = MomentVector.pure(2, 3)
        assert beta_bar_from_moments(mub3, m, 2, per_group=False) == (
            pytest.approx(2 / 9)
        )

    def test_beta_bar_degree_and_dimension(self, octahedron):
        with pytest.raises(DegreeOutOfRange):
            beta_bar(octahedron, QuantumState.maximally_mixed(), 4)
        with pytest.raises(DimensionError):
            beta_bar_from_moments(octahedron, MomentVector.pure(3, 3), 2)
        with pytest.raises(DimensionError):
            povm_probabilities(octahedron, QuantumState.maximally_mixed(3))
