# -*- coding: utf-8 -*-
"""
Unit Tests for the Quantum Boole / Frechet Calculator

These tests verify specific examples and edge cases.
"""

import numpy as np
import pytest

from numerics_config import InvalidInputError, PreconditionError
from hilbert_system import StateVector, SubspaceManager
from lattice_system import (
    QuantumBooleCalculator,
    chung_erdos_lower,
    classical_frechet_bound,
    classical_reference,
)


SQRT_HALF = 1.0 / np.sqrt(2.0)


@pytest.fixture
def sm():
    return SubspaceManager()


@pytest.fixture
def calc(sm):
    return QuantumBooleCalculator(subspaces=sm)


# ============================================================================
# CLASSICAL REFERENCE TESTS
# ============================================================================

class TestClassicalReference:
    """Unit tests for the Kolmogorov formulas"""

    def test_reference_values(self):
        ref = classical_reference(0.5, 0.3, 0.1)
        assert abs(ref['p_union'] - 0.7) < 1e-12, f"Expected 0.7, got {ref['p_union']}"
        assert abs(ref['boole_upper'] - 0.8) < 1e-12
        assert abs(ref['chung_erdos_lower'] - 0.64) < 1e-12, \
            f"Expected 0.64, got {ref['chung_erdos_lower']}"
        assert abs(ref['delta']) < 1e-12

    def test_chung_erdos_zero_denominator(self):
        assert chung_erdos_lower(0.0, 0.0, 1e-12) == 0.0

    def test_classical_frechet_bound(self):
        assert classical_frechet_bound([0.5, 0.5, 0.5]) == 2.0
        assert classical_frechet_bound([0.9, 0.9], 0.25) == 1.25


# ============================================================================
# CORRECTION OPERATOR TESTS
# ============================================================================

class TestCorrectionOperator:
    """Unit tests for D(h1, h2)"""

    def test_complement_pair_gives_zero(self, sm, calc):
        h = sm.random_subspace(4, 2, 1)
        d = calc.correction_operator(h, sm.complement(h))
        assert d.is_zero(1e-9), "D(h, h^perp) must vanish"

    def test_commuting_coordinate_subspaces_give_zero(self, sm, calc):
        h1 = sm.coordinate_subspace(3, [0, 1])
        h2 = sm.coordinate_subspace(3, [1, 2])
        assert calc.correction_operator(h1, h2).is_zero(1e-9)

    def test_skew_lines_both_signs(self, sm, calc):
        h1 = sm.span([1.0, 0.0])
        h2 = sm.span([1.0, 1.0])
        spectrum = calc.correction_spectrum(h1, h2)
        assert np.allclose(spectrum, [-SQRT_HALF, SQRT_HALF]), f"Got {spectrum}"
        assert abs(calc.correction_operator(h1, h2).trace) < 1e-12

    def test_commutator_identity(self, sm, calc):
        h1 = sm.random_subspace(6, 2, 11)
        h2 = sm.random_subspace(6, 3, 12)
        assert calc.commutator_residual(h1, h2) <= 1e-9
        assert calc.commutator_residual(h1, h1) <= 1e-12

    def test_complement_antisymmetry(self, sm, calc):
        h1 = sm.random_subspace(5, 2, 3)
        h2 = sm.random_subspace(5, 2, 4)
        assert calc.complement_antisymmetry_residual(h1, h2) <= 1e-9

    def test_dimension_mismatch(self, sm, calc):
        with pytest.raises(InvalidInputError):
            calc.correction_operator(sm.span([1.0, 0.0]), sm.span([1.0, 0.0, 0.0]))


# ============================================================================
# BOUNDS TESTS
# ============================================================================

class TestQuantumBounds:
    """Unit tests for quantum_bounds, flags and classical margins"""

    def test_tight_for_complement_pair(self, sm, calc):
        h = sm.random_subspace(4, 1, 5)
        s = sm.random_state(4, 6)
        report = calc.quantum_bounds(s, h, sm.complement(h))
        for name, value in (('b_lower', report.b_lower), ('p_join', report.p_join),
                            ('b_upper', report.b_upper)):
            assert abs(value - 1.0) < 1e-9, f"Expected {name} = 1, got {value}"

    def test_state_in_meet(self, sm, calc):
        e = np.eye(3)
        h1 = sm.span(e[0], e[1] + e[2])
        h2 = sm.span(e[0], e[1] - 2 * e[2])
        s = sm.make_state(e[0])
        flags = calc.sufficient_conditions(s, h1, h2)
        assert flags.state_in_meet, "State lies in h1 ^ h2"
        report = calc.quantum_bounds(s, h1, h2)
        assert abs(report.d_value) <= 1e-9
        margins = calc.classical_bounds_violation(s, h1, h2)
        assert not margins.violated(1e-9)

    def test_state_outside_join(self, sm, calc):
        e = np.eye(3)
        h1 = sm.span(e[0])
        h2 = sm.span(e[0] + e[1])
        s = sm.make_state(e[2])
        flags = calc.sufficient_conditions(s, h1, h2)
        assert flags.state_in_perp_join
        assert not calc.classical_bounds_violation(s, h1, h2).violated(1e-9)

    def test_commuting_flag(self, sm, calc):
        s = sm.random_state(2, 1)
        flags = calc.sufficient_conditions(s, sm.span([1.0, 0.0]), sm.span([0.0, 1.0]))
        assert flags.projectors_commute
        assert flags.any()

    def test_generic_triple_has_no_flags(self, sm, calc):
        rng = np.random.default_rng(8)
        flags = calc.sufficient_conditions(sm.random_state(4, rng), sm.random_subspace(4, 2, rng),
                                           sm.random_subspace(4, 2, rng))
        assert not flags.any(), f"Unexpected flags {flags.to_dict()}"

    def test_classical_boole_violation(self, sm, calc):
        h1 = sm.span([1.0, 0.0])
        h2 = sm.span([1.0, 1.0])
        s = sm.make_state([1.0, -1.0], normalize=True)
        margins = calc.classical_bounds_violation(s, h1, h2)
        assert abs(margins.upper + 0.5) < 1e-12, f"Expected -0.5, got {margins.upper}"
        report = calc.quantum_bounds(s, h1, h2)
        assert abs(report.d_value - 0.5) < 1e-12
        assert report.upper_slack >= -1e-9

    def test_unnormalised_state_rejected(self, sm, calc):
        s = StateVector(np.array([1.0, 1.0], dtype=complex))
        with pytest.raises(InvalidInputError):
            calc.quantum_bounds(s, sm.span([1.0, 0.0]), sm.span([0.0, 1.0]))


# ============================================================================
# FRECHET TESTS
# ============================================================================

class TestFrechet:
    """Unit tests for quantum_frechet and frechet_sum_check"""

    def test_complement_pair_margin_zero(self, sm, calc):
        h = sm.random_subspace(3, 1, 2)
        s = sm.random_state(3, 3)
        assert abs(calc.quantum_frechet(s, h, sm.complement(h))) < 1e-9

    def test_orthogonal_state_margin_one(self, sm, calc):
        e = np.eye(3)
        margin = calc.quantum_frechet(sm.make_state(e[2]), sm.span(e[0]), sm.span(e[0] + e[1]))
        assert abs(margin - 1.0) < 1e-12, f"Expected 1, got {margin}"

    def test_nonzero_meet_rejected(self, sm, calc):
        h = sm.span([1.0, 0.0, 0.0])
        with pytest.raises(PreconditionError):
            calc.quantum_frechet(sm.random_state(3, 0), h, h)

    def test_sum_check_complement_pair(self, sm, calc):
        h = sm.random_subspace(4, 2, 4)
        report = calc.frechet_sum_check(sm.random_state(4, 5), [h, sm.complement(h)])
        assert abs(report.total - 1.0) < 1e-9
        assert report.frechet_holds and report.boole_holds

    def test_sum_check_needs_two(self, sm, calc):
        with pytest.raises(InvalidInputError):
            calc.frechet_sum_check(sm.random_state(2, 0), [sm.span([1.0, 0.0])])

    def test_sum_check_nonzero_meet(self, sm, calc):
        h = sm.span([1.0, 0.0, 0.0])
        with pytest.raises(PreconditionError):
            calc.frechet_sum_check(sm.random_state(3, 0), [h, sm.span([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])])


# ============================================================================
# BIPARTITE BOOLE TESTS
# ============================================================================

class TestBipartiteBoole:
    """Unit tests for product-subspace Boole inequality"""

    def test_locally_commuting_factors(self, sm, calc):
        h1A = sm.coordinate_subspace(2, [0])
        h2A = sm.coordinate_subspace(2, [1])
        h1B = sm.coordinate_subspace(3, [0, 1])
        h2B = sm.coordinate_subspace(3, [1, 2])
        s = sm.random_state(6, 9)
        report = calc.bipartite_boole(s, h1A, h1B, h2A, h2B)
        assert report.locally_commuting
        assert report.classical_upper_margin >= -1e-9
        assert report.kronecker_form_residual <= 1e-9
        assert report.commutator_residual <= 1e-9

    def test_generic_factors(self, sm, calc):
        rng = np.random.default_rng(10)
        h1A, h2A = sm.random_subspace(2, 1, rng), sm.random_subspace(2, 1, rng)
        h1B, h2B = sm.random_subspace(3, 2, rng), sm.random_subspace(3, 1, rng)
        report = calc.bipartite_boole(sm.random_state(6, rng), h1A, h1B, h2A, h2B)
        assert not report.locally_commuting
        assert report.quantum_upper_margin >= -1e-9
        assert report.kronecker_form_residual <= 1e-9
