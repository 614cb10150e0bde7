# -*- coding: utf-8 -*-
"""
Unit Tests for the Hilbert Space Kernel

These tests verify specific examples and edge cases of subspaces,
projectors, lattice operations and the shared numerics helpers.
"""

import numpy as np
import pytest

from numerics_config import (
    DEFAULT_TOLERANCES,
    InvalidInputError,
    Tolerances,
    child_rngs,
    matrix_from_json,
    matrix_to_json,
)
from hilbert_system import Subspace, SubspaceManager


E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


@pytest.fixture
def sm():
    return SubspaceManager()


# ============================================================================
# TOLERANCES AND HELPERS
# ============================================================================

class TestTolerances:
    """Unit tests for Tolerances and numerics helpers"""

    def test_defaults(self):
        tol = DEFAULT_TOLERANCES
        assert tol.rank == 1e-10, f"Expected 1e-10, got {tol.rank}"
        assert tol.eq == 1e-9, f"Expected 1e-9, got {tol.eq}"
        assert tol.norm == 1e-12
        assert tol.p == 1e-12
        assert tol.ineq == 1e-9

    def test_non_positive_rejected(self):
        with pytest.raises(InvalidInputError):
            Tolerances(eq=0.0)
        with pytest.raises(InvalidInputError):
            Tolerances(ineq=-1e-9)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            Tolerances(rank=float('nan'))

    def test_from_dict_fills_missing_keys(self):
        tol = Tolerances.from_dict({'eq': 1e-6})
        assert tol.eq == 1e-6
        assert tol.rank == DEFAULT_TOLERANCES.rank
        assert Tolerances.from_dict(tol.to_dict()) == tol

    def test_matrix_json_pairs(self):
        m = np.array([[1 + 2j, 0], [0, -1j]])
        data = matrix_to_json(m)
        assert data[0][0] == [1.0, 2.0], f"Expected [1.0, 2.0], got {data[0][0]}"
        assert data[1][1] == [0.0, -1.0]
        assert np.allclose(matrix_from_json(data), m)

    def test_matrix_from_json_bad_entry(self):
        with pytest.raises(InvalidInputError):
            matrix_from_json([[[1.0, 2.0, 3.0]]])

    def test_module_default_built_at_import(self):
        import importlib.util
        import numerics_config
        found = importlib.util.spec_from_file_location('numerics_config_copy', numerics_config.__file__)
        fresh = importlib.util.module_from_spec(found)
        found.loader.exec_module(fresh)
        assert fresh.DEFAULT_TOLERANCES.to_dict() == Tolerances().to_dict()

    def test_child_rngs_deterministic(self):
        first = [rng.random() for rng in child_rngs(42, 3)]
        second = [rng.random() for rng in child_rngs(42, 3)]
        assert first == second, "Child streams must depend only on the master seed"
        assert len(set(first)) == 3, "Child streams must differ from each other"


# ============================================================================
# CONSTRUCTION
# ============================================================================

class TestOrthonormalize:
    """Unit tests for orthonormalize and constructors"""

    def test_zero_matrix_gives_zero_subspace(self, sm):
        h = sm.orthonormalize(np.zeros((3, 2)))
        assert h.is_zero(), f"Expected zero subspace, got dim {h.dim}"
        assert h.ambient_dim == 3

    def test_identity_gives_full_space(self, sm):
        h = sm.orthonormalize(np.eye(3))
        assert h.is_full(), f"Expected full space, got dim {h.dim}"

    def test_dependent_columns(self, sm):
        h = sm.orthonormalize(np.array([[1.0, 2.0], [0.0, 0.0]]))
        assert h.dim == 1, f"Expected rank 1, got {h.dim}"
        assert sm.equals(h, sm.coordinate_subspace(2, [0]))

    def test_non_finite_rejected(self, sm):
        with pytest.raises(InvalidInputError):
            sm.orthonormalize(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_non_orthonormal_basis_rejected(self):
        with pytest.raises(InvalidInputError):
            Subspace(2, np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex))

    def test_from_basis_uses_manager_tolerance(self):
        nearly = np.array([[1.0, 1e-7], [0.0, 1.0]], dtype=complex)
        with pytest.raises(InvalidInputError):
            SubspaceManager().from_basis(nearly)
        loose = SubspaceManager(Tolerances(eq=1e-6))
        h = loose.from_basis(nearly)
        assert h.dim == 2 and h.eq_tol == 1e-6

    def test_make_state_rejects_unnormalised(self, sm):
        with pytest.raises(InvalidInputError):
            sm.make_state([1.0, 1.0])
        s = sm.make_state([1.0, 1.0], normalize=True)
        assert abs(np.linalg.norm(s.amplitudes) - 1.0) < 1e-12

    def test_make_state_rejects_zero(self, sm):
        with pytest.raises(InvalidInputError):
            sm.make_state([0.0, 0.0], normalize=True)

    def test_span_requires_vectors(self, sm):
        with pytest.raises(InvalidInputError):
            sm.span()


# ============================================================================
# PROJECTORS
# ============================================================================

class TestProjector:
    """Unit tests for projector construction"""

    def test_zero_subspace_projector(self, sm):
        p = sm.projector(sm.zero_subspace(3))
        assert np.allclose(p.matrix, 0.0)
        assert p.rank == 0

    def test_full_space_projector(self, sm):
        p = sm.projector(sm.full_subspace(3))
        assert np.allclose(p.matrix, np.eye(3))
        assert p.rank == 3

    def test_diagonal_line(self, sm):
        p = sm.projector(sm.span([1.0, 1.0]))
        assert np.allclose(p.matrix, 0.5), f"Expected all entries 1/2, got {p.matrix}"

    def test_projector_is_read_only(self, sm):
        p = sm.projector(sm.span(E1))
        with pytest.raises(ValueError):
            p.matrix[0, 0] = 2.0

    def test_projector_from_matrix_validates(self, sm):
        with pytest.raises(InvalidInputError):
            sm.projector_from_matrix([[1.0, 1.0], [0.0, 0.0]])
        with pytest.raises(InvalidInputError):
            sm.projector_from_matrix([[2.0, 0.0], [0.0, 0.0]])
        p = sm.projector_from_matrix([[0.5, 0.5], [0.5, 0.5]])
        assert p.rank == 1

    def test_range_of_round_trip(self, sm):
        h = sm.span(E1, E2)
        assert sm.equals(sm.range_of(sm.projector(h)), h)


# ============================================================================
# LATTICE OPERATIONS
# ============================================================================

class TestLatticeOperations:
    """Unit tests for complement, join, meet and inclusion"""

    def test_complement_of_full_space(self, sm):
        assert sm.complement(sm.full_subspace(3)).is_zero()

    def test_complement_of_coordinate_line(self, sm):
        c = sm.complement(sm.span(E1))
        assert sm.equals(c, sm.coordinate_subspace(3, [1, 2])), "Expected span{e2, e3}"

    def test_join_with_zero(self, sm):
        h = sm.span(E1, E2)
        assert sm.equals(sm.join(h, sm.zero_subspace(3)), h)

    def test_join_with_complement_is_full(self, sm):
        h = sm.span(E1 + E2)
        assert sm.join(h, sm.complement(h)).is_full()

    def test_join_of_skew_lines(self, sm):
        h = sm.join(sm.span([1.0, 0.0]), sm.span([1.0, 1.0]))
        assert h.is_full(), f"Expected full 2-dim space, got dim {h.dim}"

    def test_meet_with_self(self, sm):
        h = sm.span(E1, E2 + E3)
        assert sm.equals(sm.meet(h, h), h)

    def test_meet_with_complement_is_zero(self, sm):
        h = sm.span(E1, E2 + E3)
        assert sm.meet(h, sm.complement(h)).is_zero()

    def test_meet_of_planes(self, sm):
        m = sm.meet(sm.span(E1, E2), sm.span(E2, E3))
        assert sm.equals(m, sm.span(E2)), "Planes xy and yz meet in the y axis"
        assert sm.equals(sm.meet_via_null_space(sm.span(E1, E2), sm.span(E2, E3)), m)

    def test_null_space_meet_of_rotated_full_space(self, sm):
        hadamard = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
        h = sm.from_basis(hadamard)
        m = sm.meet_via_null_space(h, h)
        assert m.is_full(), f"Expected full 2-dim space, got dim {m.dim}"
        assert sm.equals(m, sm.meet(h, h))

    def test_null_space_meet_of_rotated_line(self, sm):
        line = sm.span([1.0, 1.0])
        m = sm.meet_via_null_space(line, line)
        assert m.dim == 1 and sm.equals(m, line)

    def test_dimension_mismatch(self, sm):
        with pytest.raises(InvalidInputError):
            sm.join(sm.span([1.0, 0.0]), sm.span(E1))
        with pytest.raises(InvalidInputError):
            sm.meet(sm.span([1.0, 0.0]), sm.span(E1))

    def test_is_subspace_of(self, sm):
        h = sm.span(E1, E2)
        assert sm.is_subspace_of(sm.zero_subspace(3), h)
        assert sm.is_subspace_of(h, h)
        assert not sm.is_subspace_of(sm.span([1.0, 0.0]), sm.span([0.0, 1.0]))

    def test_join_all_and_meet_all(self, sm):
        lines = [sm.span(E1), sm.span(E2), sm.span(E3)]
        assert sm.join_all(lines).is_full()
        assert sm.meet_all(lines).is_zero()
        with pytest.raises(InvalidInputError):
            sm.join_all([])


# ============================================================================
# PROBABILITIES AND SPECTRA
# ============================================================================

class TestProbabilities:
    """Unit tests for prob and hermitian_eigenvalues"""

    def test_identity_gives_one(self, sm):
        s = sm.random_state(4, 7)
        assert abs(sm.prob(s, sm.identity_projector(4)) - 1.0) < 1e-12

    def test_orthogonal_gives_zero(self, sm):
        s = sm.make_state(E1)
        assert sm.prob(s, sm.projector(sm.span(E2))) == 0.0

    def test_half(self, sm):
        s = sm.make_state([1.0, 1.0], normalize=True)
        p = sm.prob(s, sm.projector(sm.span([1.0, 0.0])))
        assert abs(p - 0.5) < 1e-12, f"Expected 0.5, got {p}"

    def test_dimension_mismatch(self, sm):
        with pytest.raises(InvalidInputError):
            sm.prob(sm.make_state(E1), sm.identity_projector(2))

    def test_eigenvalues(self, sm):
        assert np.allclose(sm.hermitian_eigenvalues(np.eye(4)), [1, 1, 1, 1])
        assert np.allclose(sm.hermitian_eigenvalues(np.diag([2.0, -1.0])), [-1.0, 2.0])

    def test_non_hermitian_rejected(self, sm):
        with pytest.raises(InvalidInputError):
            sm.hermitian_eigenvalues([[0.0, 1.0], [0.0, 0.0]])


# ============================================================================
# RANDOM DRAWS
# ============================================================================

class TestRandomDraws:
    """Unit tests for seeded random states, subspaces and unitaries"""

    def test_same_seed_same_state(self, sm):
        a = sm.random_state(5, 123)
        b = sm.random_state(5, 123)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_random_subspace_orthonormal(self, sm):
        h = sm.random_subspace(5, 2, 9)
        assert h.dim == 2
        assert np.allclose(h.basis.conj().T @ h.basis, np.eye(2))

    def test_random_subspace_bad_k(self, sm):
        with pytest.raises(InvalidInputError):
            sm.random_subspace(3, 4, 0)
        with pytest.raises(InvalidInputError):
            sm.random_subspace(3, 0, 0)

    def test_random_unitary(self, sm):
        u = sm.random_unitary(4, 5)
        assert np.allclose(u.conj().T @ u, np.eye(4))

    def test_mean_probability_matches_trace(self, sm):
        rng = np.random.default_rng(2024)
        p = sm.projector(sm.coordinate_subspace(4, [0, 1, 2]))
        n = 4000
        mean = np.mean([sm.prob(sm.random_state(4, rng), p) for _ in range(n)])
        assert abs(mean - 0.75) < 5 / np.sqrt(n), f"Expected about 0.75, got {mean}"
