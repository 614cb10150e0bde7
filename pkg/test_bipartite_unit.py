# -*- coding: utf-8 -*-
"""
Unit Tests for the Bipartite Structure

These tests verify specific examples and edge cases.
"""

import numpy as np
import pytest

from numerics_config import InvalidInputError, PreconditionError
from hilbert_system import SubspaceManager
from bipartite_system import BipartiteSpace, EntanglementAnalyzer


def ket(d_a, d_b, i, j):
    """|i> (x) |j> as a flat amplitude vector"""
    v = np.zeros(d_a * d_b, dtype=complex)
    v[i * d_b + j] = 1.0
    return v


@pytest.fixture
def sm():
    return SubspaceManager()


@pytest.fixture
def analyzer(sm):
    return EntanglementAnalyzer(subspaces=sm)


# ============================================================================
# STATE TESTS
# ============================================================================

class TestBipartiteStates:
    """Unit tests for constructors and Schmidt data"""

    def test_space_needs_two_dims(self):
        with pytest.raises(InvalidInputError):
            BipartiteSpace(1, 3)

    def test_coefficients_are_normalised(self, analyzer):
        s = analyzer.state_from_coefficients([[1, 2, 0], [0, 1, 0], [0, 0, 3]])
        assert abs(np.linalg.norm(s.coeff) - 1.0) < 1e-12
        assert abs(s.coeff[2, 2] - 3 / np.sqrt(15)) < 1e-12

    def test_zero_coefficients_rejected(self, analyzer):
        with pytest.raises(InvalidInputError):
            analyzer.state_from_coefficients(np.zeros((2, 2)))

    def test_amplitude_dimension_mismatch(self, analyzer):
        with pytest.raises(InvalidInputError):
            analyzer.state_from_amplitudes(BipartiteSpace(2, 3), np.ones(4) / 2)

    def test_amplitudes_match_row_major_coefficients(self, analyzer):
        s = analyzer.state_from_amplitudes(BipartiteSpace(2, 3), ket(2, 3, 1, 2))
        assert s.coeff[1, 2] == 1.0, f"Expected mu_12 = 1, got {s.coeff}"

    def test_schmidt_ranks(self, analyzer):
        full = analyzer.state_from_coefficients([[1, 2, 0], [0, 1, 0], [0, 0, 3]])
        assert analyzer.schmidt_rank(full).rank == 3
        bell = analyzer.state_from_coefficients(np.eye(2))
        data = analyzer.schmidt_rank(bell)
        assert data.rank == 2
        assert np.allclose(data.singular_values, [1 / np.sqrt(2)] * 2)
        product = analyzer.product_state([1.0, 1.0], [1.0, 0.0, 1.0])
        assert analyzer.schmidt_rank(product).rank == 1

    def test_local_unitary_invariance(self, sm, analyzer):
        s = analyzer.random_state(BipartiteSpace(3, 4), 1)
        residual = analyzer.local_unitary_invariance(s, sm.random_unitary(3, 2), sm.random_unitary(4, 3))
        assert residual <= 1e-12, f"Singular values moved by {residual:.3e}"

    def test_local_unitary_shape_mismatch(self, analyzer):
        s = analyzer.random_state(BipartiteSpace(2, 2), 1)
        with pytest.raises(InvalidInputError):
            analyzer.local_unitary_invariance(s, np.eye(3), np.eye(2))

    def test_closest_product_state(self, analyzer):
        s = analyzer.state_from_coefficients([[0.9, 0.0], [0.0, 0.1]])
        p = analyzer.closest_product_state(s)
        assert analyzer.schmidt_rank(p).rank == 1
        assert abs(abs(p.coeff[0, 0]) - 1.0) < 1e-12

    def test_random_state_of_rank(self, analyzer):
        s = analyzer.random_state_of_rank(BipartiteSpace(4, 3), 2, 5)
        assert analyzer.schmidt_rank(s).rank == 2
        with pytest.raises(InvalidInputError):
            analyzer.random_state_of_rank(BipartiteSpace(4, 3), 4, 5)


# ============================================================================
# PRODUCT SUBSPACE TESTS
# ============================================================================

class TestProductSubspaces:
    """Unit tests for tensor subspaces and the lattice identities"""

    def test_tensor_subspace_dims(self, sm, analyzer):
        h = analyzer.tensor_subspace(sm.coordinate_subspace(2, [0]), sm.coordinate_subspace(3, [0, 2]))
        assert h.ambient_dim == 6 and h.dim == 2
        assert sm.equals(h, sm.span(ket(2, 3, 0, 0), ket(2, 3, 0, 2)))

    def test_tensor_with_zero_factor(self, sm, analyzer):
        h = analyzer.tensor_subspace(sm.zero_subspace(2), sm.full_subspace(3))
        assert h.is_zero() and h.ambient_dim == 6

    def test_tensor_space_mismatch(self, sm, analyzer):
        with pytest.raises(InvalidInputError):
            analyzer.tensor_subspace(sm.full_subspace(2), sm.full_subspace(3), BipartiteSpace(3, 3))

    def test_product_lattice_identities(self, sm, analyzer):
        h1A, h2A = sm.coordinate_subspace(3, [0, 1]), sm.span([1.0, 1.0, 1.0])
        h1B, h2B = sm.span([1.0, 0.0]), sm.span([1.0, 1.0])
        report = analyzer.verify_product_lattice(h1A, h2A, h1B, h2B)
        assert report.holds(1e-9), f"Residuals {report.residuals}"
        assert set(report.residuals) == {'meet_a', 'meet_b', 'meet_both',
                                         'join_a', 'join_b', 'join_both'}

    def test_complement_pair_inclusions(self, sm, analyzer):
        h1A = sm.coordinate_subspace(3, [0])
        h1B = sm.coordinate_subspace(2, [1])
        flags = analyzer.verify_inclusions(h1A, sm.complement(h1A), h1B, sm.complement(h1B))
        assert flags.meet_inclusion and flags.join_inclusion
        assert not flags.meet_strict, "Meet of orthogonal products is O on both sides"
        assert flags.join_strict, "Join has dim 1 + 2 < 6"

    def test_factor_dimension_mismatch(self, sm, analyzer):
        with pytest.raises(InvalidInputError):
            analyzer.verify_inclusions(sm.full_subspace(2), sm.full_subspace(3),
                                       sm.full_subspace(2), sm.full_subspace(2))

    def test_orthocomplement_split(self, sm, analyzer):
        result = analyzer.verify_orthocomplement_split(sm.span([1.0, 0.0]), sm.span([0.0, 1.0]))
        assert result['complement_dim'] == 3, f"Expected 3, got {result['complement_dim']}"
        assert result['split_dim'] == 1
        assert result['differs']


# ============================================================================
# MINIMUM RANK TESTS
# ============================================================================

class TestMinRank:
    """Unit tests for min_rank and rank_monotonicity_check"""

    def test_zero_subspace(self, sm, analyzer):
        result = analyzer.min_rank(sm.zero_subspace(9), BipartiteSpace(3, 3), rng=0)
        assert result.upper_bound == 0 and result.witness is None and result.converged

    def test_single_vector_is_exact(self, sm, analyzer):
        bell = ket(2, 2, 0, 0) + ket(2, 2, 1, 1)
        result = analyzer.min_rank(sm.span(bell), BipartiteSpace(2, 2), rng=0)
        assert result.upper_bound == 2 and result.converged

    def test_subspace_with_product_member(self, sm, analyzer):
        h = sm.span(ket(2, 2, 0, 0) + ket(2, 2, 1, 1), ket(2, 2, 0, 0) - ket(2, 2, 1, 1))
        result = analyzer.min_rank(h, BipartiteSpace(2, 2), restarts=8, rng=1)
        assert result.upper_bound == 1, f"Expected rank 1, got {result.upper_bound}"
        assert analyzer.schmidt_rank(result.witness).rank == 1

    def test_rank_two_example(self, sm, analyzer):
        h = sm.span(ket(3, 3, 0, 0) + ket(3, 3, 1, 1), ket(3, 3, 0, 1) + ket(3, 3, 1, 2))
        result = analyzer.min_rank(h, BipartiteSpace(3, 3), rng=2)
        assert result.upper_bound == 2, f"Expected 2, got {result.upper_bound}"
        assert result.converged, "All rank-1 restarts should stall"

    def test_bad_arguments(self, sm, analyzer):
        with pytest.raises(InvalidInputError):
            analyzer.min_rank(sm.full_subspace(4), BipartiteSpace(3, 3))
        with pytest.raises(InvalidInputError):
            analyzer.min_rank(sm.full_subspace(9), BipartiteSpace(3, 3), restarts=0)

    def test_rank_monotonicity(self, sm, analyzer):
        small = sm.span(ket(2, 2, 0, 0) + ket(2, 2, 1, 1))
        large = sm.join(small, sm.span(ket(2, 2, 0, 1)))
        assert analyzer.rank_monotonicity_check(small, large, BipartiteSpace(2, 2), restarts=8, rng=3)
        with pytest.raises(PreconditionError):
            analyzer.rank_monotonicity_check(large, small, BipartiteSpace(2, 2))
