# -*- coding: utf-8 -*-
"""
Hilbert Space Kernel

Dense complex linear algebra and the subspace / projector data model
with the lattice operations join, meet and orthocomplement.

Features:
- Subspaces stored as orthonormal bases, projectors derived on demand
- Join (concatenate + orthonormalize), meet via De Morgan, complement
- Independent null-space oracle for the meet
- Probabilities <s|P|s>, Hermitian spectra
- Seeded random states, subspaces and unitaries
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List
import logging

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from numerics_config import (
    COMPLEX_DTYPE,
    DEFAULT_TOLERANCES,
    InvalidInputError,
    Tolerances,
    as_complex_matrix,
    frozen,
    make_rng,
    matrix_to_json,
)

logger = logging.getLogger(__name__)


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True, eq=False)
class StateVector:
    """
    Normalised pure state |s>.

    Attributes:
        amplitudes: read-only complex vector of unit Euclidean norm
    """
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    def to_dict(self) -> Dict:
        return {'dim': self.dim, 'amplitudes': matrix_to_json(self.amplitudes)}


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Subspace h of C^ambient_dim stored by an orthonormal basis.

    Attributes:
        ambient_dim: dimension of the surrounding space
        basis: ambient_dim x k matrix with orthonormal columns
               (k = 0 is the zero subspace, k = ambient_dim the full space)
        eq_tol: Frobenius cutoff for the orthonormality check
    """
    ambient_dim: int
    basis: np.ndarray
    eq_tol: float = field(default=DEFAULT_TOLERANCES.eq, repr=False)

    def __post_init__(self):
        if self.basis.shape[0] != self.ambient_dim:
            raise InvalidInputError(
                f"Basis has {self.basis.shape[0]} rows, ambient dim is {self.ambient_dim}")
        k = self.basis.shape[1]
        if k > 0:
            gram = self.basis.conj().T @ self.basis
            if linalg.norm(gram - np.eye(k), 'fro') > self.eq_tol * max(1, k):
                raise InvalidInputError("Subspace basis columns are not orthonormal")

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def to_dict(self) -> Dict:
        return {
            'ambient_dim': self.ambient_dim,
            'dim': self.dim,
            'basis': matrix_to_json(self.basis),
        }


@dataclass(frozen=True, eq=False)
class Projector:
    """
    Hermitian idempotent matrix Pi(h).

    Attributes:
        matrix: read-only square matrix
        trace: real trace (equals the subspace dimension)
    """
    matrix: np.ndarray
    trace: float = field(default=0.0)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def rank(self) -> int:
        return int(round(self.trace))

    def to_dict(self) -> Dict:
        return {'dim': self.dim, 'trace': self.trace, 'matrix': matrix_to_json(self.matrix)}


# ============================================================================
# SUBSPACE MANAGER
# ============================================================================

class SubspaceManager:
    """
    Lattice operations on subspaces of a finite-dimensional Hilbert space.

    All returned values are immutable; one manager may be shared across
    threads.
    """

    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES):
        self.tol = tol

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    def make_state(self, amplitudes, normalize: bool = False) -> StateVector:
        """
        Builds a StateVector.

        Args:
            amplitudes: complex vector
            normalize: rescale to unit norm instead of rejecting

        Raises:
            InvalidInputError: non-finite, zero, or (normalize=False) norm != 1
        """
        vec = as_complex_matrix(amplitudes, "state").reshape(-1)
        norm = float(linalg.norm(vec))
        if norm == 0.0:
            raise InvalidInputError("State vector is zero")
        if normalize:
            vec = vec / norm
        elif abs(norm - 1.0) > self.tol.norm:
            raise InvalidInputError(f"State is not normalised: |s| = {norm!r}")
        return StateVector(frozen(vec))

    def orthonormalize(self, m) -> Subspace:
        """
        Column space of m as an orthonormal basis.

        Numerical rank is the count of singular values above
        tol.rank * sigma_max; the basis comes from a column-pivoted QR.
        """
        arr = as_complex_matrix(m)
        n, cols = arr.shape
        if cols == 0 or n == 0:
            return self.zero_subspace(n)

        sigma = linalg.svdvals(arr)
        if sigma[0] == 0.0:
            return self.zero_subspace(n)
        rank = int(np.count_nonzero(sigma > self.tol.rank * sigma[0]))

        q, _, _ = linalg.qr(arr, mode='economic', pivoting=True)
        return self.from_basis(q[:, :rank])

    def from_basis(self, basis) -> Subspace:
        """
        Wraps a caller-supplied orthonormal basis.

        Orthonormality is checked against this manager's tol.eq.

        Raises:
            InvalidInputError: columns are not orthonormal
        """
        arr = as_complex_matrix(basis, "basis")
        return Subspace(arr.shape[0], frozen(arr), self.tol.eq)

    def zero_subspace(self, dim: int) -> Subspace:
        return self.from_basis(np.zeros((dim, 0), dtype=COMPLEX_DTYPE))

    def full_subspace(self, dim: int) -> Subspace:
        return self.from_basis(np.eye(dim, dtype=COMPLEX_DTYPE))

    def span(self, *vectors) -> Subspace:
        """Subspace spanned by the given vectors"""
        if not vectors:
            raise InvalidInputError("span() needs at least one vector")
        cols = [np.asarray(v, dtype=COMPLEX_DTYPE).reshape(-1) for v in vectors]
        return self.orthonormalize(np.column_stack(cols))

    def coordinate_subspace(self, dim: int, indices: Iterable[int]) -> Subspace:
        """span{e_i : i in indices}"""
        idx = sorted(set(int(i) for i in indices))
        if any(i < 0 or i >= dim for i in idx):
            raise InvalidInputError(f"Indices {idx} out of range for dim {dim}")
        return self.from_basis(np.eye(dim, dtype=COMPLEX_DTYPE)[:, idx])

    # ------------------------------------------------------------------
    # projectors
    # ------------------------------------------------------------------

    def projector(self, h: Subspace) -> Projector:
        """Pi(h) = B B^dagger"""
        b = h.basis
        return Projector(frozen(b @ b.conj().T), float(h.dim))

    def projector_from_matrix(self, m) -> Projector:
        """
        Validates an explicit matrix as an orthogonal projector.

        Raises:
            InvalidInputError: not square, not Hermitian or not idempotent
        """
        arr = as_complex_matrix(m, "projector")
        if arr.shape[0] != arr.shape[1]:
            raise InvalidInputError(f"Projector must be square, got {arr.shape}")
        if linalg.norm(arr - arr.conj().T, 'fro') > self.tol.eq:
            raise InvalidInputError("Projector is not Hermitian")
        if linalg.norm(arr @ arr - arr, 'fro') > self.tol.eq:
            raise InvalidInputError("Projector is not idempotent")
        return Projector(frozen(arr), float(np.trace(arr).real))

    def identity_projector(self, dim: int) -> Projector:
        return Projector(frozen(np.eye(dim, dtype=COMPLEX_DTYPE)), float(dim))

    def range_of(self, p: Projector) -> Subspace:
        """Subspace a projector maps onto"""
        return self.orthonormalize(p.matrix)

    # ------------------------------------------------------------------
    # lattice operations
    # ------------------------------------------------------------------

    def complement(self, h: Subspace) -> Subspace:
        """Orthocomplement h^perp, dim(h) + dim(h^perp) = ambient_dim"""
        if h.is_zero():
            return self.full_subspace(h.ambient_dim)
        if h.is_full():
            return self.zero_subspace(h.ambient_dim)
        perp = linalg.null_space(h.basis.conj().T, rcond=self.tol.rank)
        return self.from_basis(perp)

    def join(self, h1: Subspace, h2: Subspace) -> Subspace:
        """h1 v h2 = span(h1 u h2)"""
        self._check_same_space(h1, h2)
        return self.orthonormalize(np.hstack([h1.basis, h2.basis]))

    def meet(self, h1: Subspace, h2: Subspace) -> Subspace:
        """h1 ^ h2 computed as (h1^perp v h2^perp)^perp"""
        self._check_same_space(h1, h2)
        return self.complement(self.join(self.complement(h1), self.complement(h2)))

    def join_all(self, hs: List[Subspace]) -> Subspace:
        if not hs:
            raise InvalidInputError("join_all() needs at least one subspace")
        for h in hs[1:]:
            self._check_same_space(hs[0], h)
        return self.orthonormalize(np.hstack([h.basis for h in hs]))

    def meet_all(self, hs: List[Subspace]) -> Subspace:
        if not hs:
            raise InvalidInputError("meet_all() needs at least one subspace")
        return self.complement(self.join_all([self.complement(h) for h in hs]))

    def meet_via_null_space(self, h1: Subspace, h2: Subspace) -> Subspace:
        """
        Intersection as the null space of [Pi(h1) - I; Pi(h2) - I].

        Independent of the De Morgan route; used as a cross-check.
        """
        self._check_same_space(h1, h2)
        eye = np.eye(h1.ambient_dim, dtype=COMPLEX_DTYPE)
        stacked = np.vstack([
            self.projector(h1).matrix - eye,
            self.projector(h2).matrix - eye,
        ])
        # Pi - I has singular values 0 or 1, so the cutoff is absolute
        _, sigma, vh = linalg.svd(stacked)
        rank = int(np.count_nonzero(sigma > self.tol.rank))
        return self.from_basis(vh[rank:].conj().T)

    def is_subspace_of(self, h1: Subspace, h2: Subspace) -> bool:
        """h1 < h2  iff  ||Pi(h2) Pi(h1) - Pi(h1)||_F <= tol.eq"""
        self._check_same_space(h1, h2)
        p1 = self.projector(h1).matrix
        p2 = self.projector(h2).matrix
        return bool(linalg.norm(p2 @ p1 - p1, 'fro') <= self.tol.eq)

    def projector_distance(self, h1: Subspace, h2: Subspace) -> float:
        self._check_same_space(h1, h2)
        return float(linalg.norm(self.projector(h1).matrix - self.projector(h2).matrix, 'fro'))

    def equals(self, h1: Subspace, h2: Subspace) -> bool:
        """Subspace equality: projector Frobenius distance <= tol.eq"""
        return self.projector_distance(h1, h2) <= self.tol.eq

    # ------------------------------------------------------------------
    # probabilities and spectra
    # ------------------------------------------------------------------

    def raw_prob(self, s: StateVector, p: Projector) -> float:
        """<s|P|s> without clamping (kept for diagnostics)"""
        if s.dim != p.dim:
            raise InvalidInputError(f"State dim {s.dim} != projector dim {p.dim}")
        return float(np.vdot(s.amplitudes, p.matrix @ s.amplitudes).real)

    def prob(self, s: StateVector, p: Projector) -> float:
        """<s|P|s> clamped to [0, 1]"""
        return float(np.clip(self.raw_prob(s, p), 0.0, 1.0))

    def expectation(self, s: StateVector, m: np.ndarray) -> float:
        """Real part of <s|M|s> for a Hermitian M"""
        if s.dim != m.shape[0]:
            raise InvalidInputError(f"State dim {s.dim} != operator dim {m.shape[0]}")
        return float(np.vdot(s.amplitudes, m @ s.amplitudes).real)

    def hermitian_eigenvalues(self, m) -> np.ndarray:
        """
        Full real spectrum of a Hermitian matrix, ascending.

        Raises:
            InvalidInputError: not square or ||m - m^dagger||_F > tol.eq
        """
        arr = as_complex_matrix(m)
        if arr.shape[0] != arr.shape[1]:
            raise InvalidInputError(f"Matrix must be square, got {arr.shape}")
        if linalg.norm(arr - arr.conj().T, 'fro') > self.tol.eq:
            raise InvalidInputError("Matrix is not Hermitian")
        return linalg.eigvalsh(arr)

    # ------------------------------------------------------------------
    # random draws
    # ------------------------------------------------------------------

    def random_state(self, dim: int, rng=None) -> StateVector:
        """Normalised standard complex Gaussian vector"""
        if dim < 1:
            raise InvalidInputError(f"dim must be >= 1, got {dim}")
        rng = make_rng(rng)
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return StateVector(frozen(vec / linalg.norm(vec)))

    def random_subspace(self, dim: int, k: int, rng=None) -> Subspace:
        """Orthonormalised dim x k complex Gaussian matrix"""
        if not 0 < k <= dim:
            raise InvalidInputError(f"Need 0 < k <= dim, got k={k}, dim={dim}")
        rng = make_rng(rng)
        g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
        h = self.orthonormalize(g)
        if h.dim != k:
            logger.warning(f"Random {dim}x{k} draw came out rank {h.dim}")
        return h

    def random_unitary(self, dim: int, rng=None) -> np.ndarray:
        """Haar-random unitary"""
        rng = make_rng(rng)
        if dim == 1:
            return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=COMPLEX_DTYPE)
        return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=COMPLEX_DTYPE)

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _check_same_space(self, h1: Subspace, h2: Subspace) -> None:
        if h1.ambient_dim != h2.ambient_dim:
            raise InvalidInputError(
                f"Ambient dimensions differ: {h1.ambient_dim} vs {h2.ambient_dim}")
