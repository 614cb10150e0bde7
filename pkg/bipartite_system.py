# -*- coding: utf-8 -*-
"""
Bipartite Structure

Tensor-product structure of H_A (x) H_B: coefficient matrices, Schmidt
rank of states, the minimum rank of a subspace and the lattice
identities obeyed by product subspaces.

Basis convention: product index (i, j) -> i * d_B + j, so the amplitude
vector is the row-major flattening of the d_A x d_B coefficient matrix
and every Kronecker product is np.kron(A-part, B-part).

Features:
- BipartiteState with coefficient matrix M(|s>)
- Schmidt data from the singular values of M(|s>)
- Minimum subspace rank via multi-start alternating projections
- Numerical checks of the product-subspace meet / join identities
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple
import logging

import numpy as np
from scipy import linalg

from numerics_config import (
    DEFAULT_TOLERANCES,
    InvalidInputError,
    PreconditionError,
    Tolerances,
    as_complex_matrix,
    frozen,
    make_rng,
    matrix_to_json,
)
from hilbert_system import StateVector, Subspace, SubspaceManager

logger = logging.getLogger(__name__)


# ============================================================================
# CONSTANTS
# ============================================================================

DEFAULT_RESTARTS = 64

# Alternating-projection iteration cap per restart
MAX_ITERATIONS = 5000

# A restart has stalled once the relative residual improvement drops below this
STALL_TOLERANCE = 1e-9


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True)
class BipartiteSpace:
    """H_A (x) H_B with dim(H_A) = d_A and dim(H_B) = d_B"""
    d_A: int
    d_B: int

    def __post_init__(self):
        if self.d_A < 2 or self.d_B < 2:
            raise InvalidInputError(f"Both factors need dim >= 2, got ({self.d_A}, {self.d_B})")

    @property
    def dim(self) -> int:
        return self.d_A * self.d_B

    def to_dict(self) -> Dict[str, int]:
        return {'d_A': self.d_A, 'd_B': self.d_B}


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """
    |s> = sum mu_ij |e_i> (x) |f_j>.

    Attributes:
        space: the bipartite space
        amplitudes: normalised state of dim d_A * d_B
        coeff: read-only d_A x d_B matrix of the mu_ij
    """
    space: BipartiteSpace
    amplitudes: StateVector
    coeff: np.ndarray

    def to_dict(self) -> Dict:
        return {
            'space': self.space.to_dict(),
            'coefficients': matrix_to_json(self.coeff),
        }


@dataclass(frozen=True)
class SchmidtData:
    """Descending singular values of M(|s>) and the resulting rank"""
    singular_values: Tuple[float, ...]
    rank: int

    def to_dict(self) -> Dict:
        return {'singular_values': list(self.singular_values), 'rank': self.rank}


@dataclass(frozen=True)
class MinRankResult:
    """
    Certified upper bound on the rank of a subspace.

    Attributes:
        upper_bound: Schmidt rank of the witness
        witness: member of h attaining upper_bound (None for the zero subspace)
        generic_rank: Schmidt rank of one random member
        restarts_used: restarts executed across all candidate ranks
        converged: every restart for rank upper_bound - 1 ended at a stationary point
    """
    upper_bound: int
    witness: Optional[BipartiteState]
    generic_rank: int
    restarts_used: int
    converged: bool

    def to_dict(self) -> Dict:
        return {
            'upper_bound': self.upper_bound,
            'generic_rank': self.generic_rank,
            'restarts_used': self.restarts_used,
            'converged': self.converged,
            'witness': self.witness.to_dict() if self.witness is not None else None,
        }


@dataclass(frozen=True)
class ProductLatticeReport:
    """Projector distances for the six product-subspace identities"""
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def holds(self, tol: float) -> bool:
        return self.max_residual <= tol

    def to_dict(self) -> Dict:
        return {'residuals': dict(self.residuals), 'max_residual': self.max_residual}


@dataclass(frozen=True)
class InclusionFlags:
    """
    meet_inclusion: (h1A ^ h2A) (x) (h1B ^ h2B) < h1 ^ h2
    join_inclusion: (h1A v h2A) (x) (h1B v h2B) > h1 v h2
    *_strict: the inclusion is proper (dimensions differ)
    """
    meet_inclusion: bool
    join_inclusion: bool
    meet_strict: bool
    join_strict: bool

    def to_dict(self) -> Dict[str, bool]:
        return {
            'meet_inclusion': self.meet_inclusion,
            'join_inclusion': self.join_inclusion,
            'meet_strict': self.meet_strict,
            'join_strict': self.join_strict,
        }


# ============================================================================
# ENTANGLEMENT ANALYZER
# ============================================================================

class EntanglementAnalyzer:
    """
    Schmidt rank, subspace rank and product-subspace lattice checks.
    """

    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES,
                 subspaces: SubspaceManager = None):
        self.tol = tol
        self.subspaces = subspaces or SubspaceManager(tol)

    # ------------------------------------------------------------------
    # states
    # ------------------------------------------------------------------

    def state_from_coefficients(self, coeff, normalize: bool = True) -> BipartiteState:
        """
        State from its d_A x d_B coefficient matrix.

        Raises:
            InvalidInputError: non-finite, zero, a factor of dim < 2,
                               or (normalize=False) Frobenius norm != 1
        """
        m = as_complex_matrix(coeff, "coefficient matrix")
        space = BipartiteSpace(*m.shape)
        vec = self.subspaces.make_state(m.reshape(-1), normalize=normalize)
        return BipartiteState(space, vec, frozen(vec.amplitudes.reshape(space.d_A, space.d_B)))

    def state_from_amplitudes(self, space: BipartiteSpace, amplitudes,
                              normalize: bool = False) -> BipartiteState:
        vec = self.subspaces.make_state(amplitudes, normalize=normalize)
        if vec.dim != space.dim:
            raise InvalidInputError(f"State dim {vec.dim} != d_A * d_B = {space.dim}")
        return BipartiteState(space, vec, frozen(vec.amplitudes.reshape(space.d_A, space.d_B)))

    def product_state(self, a, b) -> BipartiteState:
        """|a> (x) |b>, each factor normalised first"""
        va = self.subspaces.make_state(a, normalize=True).amplitudes
        vb = self.subspaces.make_state(b, normalize=True).amplitudes
        return self.state_from_coefficients(np.outer(va, vb))

    def random_state(self, space: BipartiteSpace, rng=None) -> BipartiteState:
        vec = self.subspaces.random_state(space.dim, rng)
        return BipartiteState(space, vec, frozen(vec.amplitudes.reshape(space.d_A, space.d_B)))

    def random_state_of_rank(self, space: BipartiteSpace, rank: int, rng=None) -> BipartiteState:
        """Coefficient matrix G_A G_B with Gaussian d_A x rank and rank x d_B factors"""
        if not 1 <= rank <= min(space.d_A, space.d_B):
            raise InvalidInputError(f"Rank {rank} impossible in ({space.d_A}, {space.d_B})")
        rng = make_rng(rng)
        g_a = rng.standard_normal((space.d_A, rank)) + 1j * rng.standard_normal((space.d_A, rank))
        g_b = rng.standard_normal((rank, space.d_B)) + 1j * rng.standard_normal((rank, space.d_B))
        return self.state_from_coefficients(g_a @ g_b)

    def random_product_state(self, space: BipartiteSpace, rng=None) -> BipartiteState:
        rng = make_rng(rng)
        a = self.subspaces.random_state(space.d_A, rng).amplitudes
        b = self.subspaces.random_state(space.d_B, rng).amplitudes
        return self.product_state(a, b)

    # ------------------------------------------------------------------
    # Schmidt rank
    # ------------------------------------------------------------------

    def schmidt_rank(self, s: BipartiteState) -> SchmidtData:
        """Singular values of M(|s>), rank by sigma_i > tol.rank * sigma_max"""
        return self._schmidt_of_matrix(s.coeff)

    def local_unitary_invariance(self, s: BipartiteState, u_a, u_b) -> float:
        """Max singular-value change between M and U_A M U_B^T"""
        u_a = as_complex_matrix(u_a, "U_A")
        u_b = as_complex_matrix(u_b, "U_B")
        if u_a.shape != (s.space.d_A, s.space.d_A) or u_b.shape != (s.space.d_B, s.space.d_B):
            raise InvalidInputError("Local unitaries do not match the bipartite space")
        before = linalg.svdvals(s.coeff)
        after = linalg.svdvals(u_a @ s.coeff @ u_b.T)
        return float(np.max(np.abs(before - after)))

    def closest_product_state(self, s: BipartiteState) -> BipartiteState:
        """Leading Schmidt term sigma_1 u_1 v_1^T, renormalised"""
        u, _, vh = linalg.svd(s.coeff)
        return self.state_from_coefficients(np.outer(u[:, 0], vh[0, :]))

    # ------------------------------------------------------------------
    # product subspaces
    # ------------------------------------------------------------------

    def tensor_subspace(self, hA: Subspace, hB: Subspace,
                        space: Optional[BipartiteSpace] = None) -> Subspace:
        """
        hA (x) hB with basis {e_i (x) f_j}.

        Raises:
            InvalidInputError: factor dims disagree with the declared space
        """
        if space is not None and (hA.ambient_dim, hB.ambient_dim) != (space.d_A, space.d_B):
            raise InvalidInputError(
                f"Factor dims ({hA.ambient_dim}, {hB.ambient_dim}) do not match "
                f"space ({space.d_A}, {space.d_B})")
        dim = hA.ambient_dim * hB.ambient_dim
        if hA.is_zero() or hB.is_zero():
            return self.subspaces.zero_subspace(dim)
        return self.subspaces.from_basis(np.kron(hA.basis, hB.basis))

    def verify_product_lattice(self, h1A: Subspace, h2A: Subspace,
                               h1B: Subspace, h2B: Subspace) -> ProductLatticeReport:
        """
        Residuals of the six identities with h1 = h1A(x)h1B, g12 = h1A(x)h2B,
        g21 = h2A(x)h1B, h2 = h2A(x)h2B:

            h1A (x) (h1B ^ h2B)          = h1 ^ g12
            (h1A ^ h2A) (x) h1B          = h1 ^ g21
            (h1A ^ h2A) (x) (h1B ^ h2B)  = h1 ^ g12 ^ g21 ^ h2
        and the same three with v in place of ^.
        """
        self._check_factor_pairs(h1A, h2A, h1B, h2B)
        sm = self.subspaces
        t = self.tensor_subspace
        h1, g12 = t(h1A, h1B), t(h1A, h2B)
        g21, h2 = t(h2A, h1B), t(h2A, h2B)

        residuals = {
            'meet_b': sm.projector_distance(t(h1A, sm.meet(h1B, h2B)), sm.meet(h1, g12)),
            'meet_a': sm.projector_distance(t(sm.meet(h1A, h2A), h1B), sm.meet(h1, g21)),
            'meet_both': sm.projector_distance(
                t(sm.meet(h1A, h2A), sm.meet(h1B, h2B)), sm.meet_all([h1, g12, g21, h2])),
            'join_b': sm.projector_distance(t(h1A, sm.join(h1B, h2B)), sm.join(h1, g12)),
            'join_a': sm.projector_distance(t(sm.join(h1A, h2A), h1B), sm.join(h1, g21)),
            'join_both': sm.projector_distance(
                t(sm.join(h1A, h2A), sm.join(h1B, h2B)), sm.join_all([h1, g12, g21, h2])),
        }
        report = ProductLatticeReport(residuals)
        if not report.holds(self.tol.eq):
            logger.warning(f"Product lattice identity residual {report.max_residual:.3e} "
                           f"exceeds {self.tol.eq:.1e}")
        return report

    def verify_inclusions(self, h1A: Subspace, h2A: Subspace,
                          h1B: Subspace, h2B: Subspace) -> InclusionFlags:
        """Meet and join inclusions between factor-wise and global lattice operations"""
        self._check_factor_pairs(h1A, h2A, h1B, h2B)
        sm = self.subspaces
        h1 = self.tensor_subspace(h1A, h1B)
        h2 = self.tensor_subspace(h2A, h2B)

        inner = self.tensor_subspace(sm.meet(h1A, h2A), sm.meet(h1B, h2B))
        meet = sm.meet(h1, h2)
        outer = self.tensor_subspace(sm.join(h1A, h2A), sm.join(h1B, h2B))
        join = sm.join(h1, h2)

        return InclusionFlags(
            meet_inclusion=sm.is_subspace_of(inner, meet),
            join_inclusion=sm.is_subspace_of(join, outer),
            meet_strict=inner.dim < meet.dim,
            join_strict=join.dim < outer.dim,
        )

    def verify_orthocomplement_split(self, h1A: Subspace, h1B: Subspace) -> Dict:
        """
        Compares (h1A (x) h1B)^perp with h1A^perp (x) h1B^perp.

        The dimensions are d_A d_B - k_A k_B and (d_A - k_A)(d_B - k_B),
        equal only when both factors are full or both are zero.
        """
        sm = self.subspaces
        whole = sm.complement(self.tensor_subspace(h1A, h1B))
        split = self.tensor_subspace(sm.complement(h1A), sm.complement(h1B))
        distance = sm.projector_distance(whole, split)
        return {
            'complement_dim': whole.dim,
            'split_dim': split.dim,
            'distance': distance,
            'differs': bool(distance > self.tol.eq),
        }

    # ------------------------------------------------------------------
    # subspace rank
    # ------------------------------------------------------------------

    def min_rank(self, h: Subspace, space: BipartiteSpace,
                 restarts: int = DEFAULT_RESTARTS, rng=None) -> MinRankResult:
        """
        Lowest Schmidt rank found among the non-zero members of h.

        Candidate ranks r = 1, 2, ... below the generic rank are tried in
        order; for each, `restarts` random unit starts run alternating
        projections between the rank-r matrices and h. The first r whose
        tail residual sum_{i>r} sigma_i^2 drops to tol.rank^2 is accepted.

        Only dim(h) <= 1 is exact; otherwise the result is an upper bound.
        """
        if h.ambient_dim != space.dim:
            raise InvalidInputError(f"Subspace ambient dim {h.ambient_dim} != {space.dim}")
        if restarts < 1:
            raise InvalidInputError(f"restarts must be >= 1, got {restarts}")
        k = h.dim
        if k == 0:
            return MinRankResult(0, None, 0, 0, True)

        rng = make_rng(rng)
        if k == 1:
            witness = self.state_from_amplitudes(space, h.basis[:, 0], normalize=True)
            rank = self.schmidt_rank(witness).rank
            return MinRankResult(rank, witness, rank, 0, True)

        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        best = self._member(h, space, c)
        generic_rank = self.schmidt_rank(best).rank

        restarts_used = 0
        converged = True
        upper_bound = generic_rank
        master = np.random.SeedSequence(int(rng.integers(2 ** 63)))

        for r in range(1, generic_rank):
            stalled_all = True
            found = None
            for index, child in enumerate(master.spawn(restarts)):
                restarts_used += 1
                outcome, candidate = self._alternating_projection(h, space, r, np.random.default_rng(child))
                if outcome == 'feasible':
                    found = candidate
                    logger.debug(f"min_rank: rank {r} reached on restart {index}")
                    break
                if outcome == 'exhausted':
                    stalled_all = False
            if found is not None:
                best = found
                upper_bound = self.schmidt_rank(found).rank
                break
            converged = stalled_all
            if not stalled_all:
                logger.warning(f"min_rank: some restarts for rank {r} hit the iteration cap")

        return MinRankResult(upper_bound, best, generic_rank, restarts_used, converged)

    def rank_monotonicity_check(self, h1: Subspace, h2: Subspace, space: BipartiteSpace,
                                restarts: int = DEFAULT_RESTARTS, rng=None) -> bool:
        """
        rank(h1) >= rank(h2) for h1 < h2, using min_rank upper bounds.

        Heuristic: a False result may come from min_rank missing the
        true minimum rather than from a counterexample.

        Raises:
            PreconditionError: h1 is not a subspace of h2
        """
        if not self.subspaces.is_subspace_of(h1, h2):
            raise PreconditionError("rank_monotonicity_check requires h1 < h2")
        rng = make_rng(rng)
        r1 = self.min_rank(h1, space, restarts, rng).upper_bound
        r2 = self.min_rank(h2, space, restarts, rng).upper_bound
        if r1 < r2:
            logger.warning(f"Rank monotonicity not observed: rank(h1)={r1} < rank(h2)={r2}")
        return r1 >= r2

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _schmidt_of_matrix(self, m: np.ndarray) -> SchmidtData:
        sigma = linalg.svdvals(m)
        rank = int(np.count_nonzero(sigma > self.tol.rank * sigma[0])) if sigma[0] > 0 else 0
        return SchmidtData(tuple(float(x) for x in sigma), rank)

    def _member(self, h: Subspace, space: BipartiteSpace, c: np.ndarray) -> BipartiteState:
        vec = h.basis @ c
        return self.state_from_amplitudes(space, vec, normalize=True)

    def _alternating_projection(self, h: Subspace, space: BipartiteSpace, r: int,
                                rng: np.random.Generator):
        """
        Returns ('feasible', state) when a rank-r member is reached,
        ('stalled', None) at a stationary point above the threshold,
        ('exhausted', None) when the iteration cap is hit first.
        """
        k = h.dim
        basis = h.basis
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        c = c / linalg.norm(c)
        previous = np.inf
        threshold = self.tol.rank ** 2

        for _ in range(MAX_ITERATIONS):
            m = (basis @ c).reshape(space.d_A, space.d_B)
            u, sigma, vh = linalg.svd(m, full_matrices=False)
            total = float(np.sum(sigma ** 2))
            residual = float(np.sum(sigma[r:] ** 2)) / total
            if residual <= threshold:
                state = self._member(h, space, c)
                if self.schmidt_rank(state).rank <= r:
                    return 'feasible', state
            elif previous - residual < STALL_TOLERANCE * residual:
                return 'stalled', None
            previous = residual

            truncated = (u[:, :r] * sigma[:r]) @ vh[:r, :]
            c = basis.conj().T @ truncated.reshape(-1)
            norm = linalg.norm(c)
            if norm == 0.0:
                return 'stalled', None
            c = c / norm

        return 'exhausted', None

    def _check_factor_pairs(self, h1A: Subspace, h2A: Subspace,
                            h1B: Subspace, h2B: Subspace) -> None:
        if h1A.ambient_dim != h2A.ambient_dim:
            raise InvalidInputError(
                f"A-side dims differ: {h1A.ambient_dim} vs {h2A.ambient_dim}")
        if h1B.ambient_dim != h2B.ambient_dim:
            raise InvalidInputError(
                f"B-side dims differ: {h1B.ambient_dim} vs {h2B.ambient_dim}")


def random_local_unitaries(subspaces: SubspaceManager, space: BipartiteSpace,
                           rng=None) -> Tuple[np.ndarray, np.ndarray]:
    """Haar-random (U_A, U_B)"""
    rng = make_rng(rng)
    return subspaces.random_unitary(space.d_A, rng), subspaces.random_unitary(space.d_B, rng)
