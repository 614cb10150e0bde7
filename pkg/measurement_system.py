# -*- coding: utf-8 -*-
"""
Measurement Simulator

Product measurements sum_ab m_ab Pi_Aa (x) Pi_Bb on bipartite pure
states: outcome probabilities, collapse, Sylvester / Frobenius rank
bounds and the average rank reduction with its upper bound.

Features:
- Orthogonal decompositions from index sets or explicit matrices
- JSON measurement documents
- Collapse evaluated two ways (Kronecker vs coefficient matrix)
- Per-outcome records, marginals, average reduction and bound
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import json
import logging

import numpy as np
from scipy import linalg

from numerics_config import (
    DEFAULT_TOLERANCES,
    InvalidInputError,
    PreconditionError,
    Tolerances,
    UndefinedRankError,
    frozen,
    make_rng,
    matrix_from_json,
)
from hilbert_system import Projector, SubspaceManager
from bipartite_system import BipartiteSpace, BipartiteState, EntanglementAnalyzer

logger = logging.getLogger(__name__)


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True, eq=False)
class OrthogonalDecomposition:
    """
    Pairwise orthogonal projectors on one subsystem summing to the identity.
    Build through from_index_sets / from_matrices, which validate.
    """
    projectors: Tuple[Projector, ...]

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    @property
    def traces(self) -> List[int]:
        return [p.rank for p in self.projectors]

    def __len__(self) -> int:
        return len(self.projectors)

    @staticmethod
    def from_index_sets(dim: int, index_sets: Sequence[Sequence[int]],
                        tol: Tolerances = DEFAULT_TOLERANCES) -> 'OrthogonalDecomposition':
        """Coordinate projectors sum_{i in set} |i><i|"""
        sm = SubspaceManager(tol)
        projectors = tuple(sm.projector(sm.coordinate_subspace(dim, idx)) for idx in index_sets)
        return validate_decomposition(projectors, tol)

    @staticmethod
    def from_matrices(matrices: Sequence, tol: Tolerances = DEFAULT_TOLERANCES) -> 'OrthogonalDecomposition':
        sm = SubspaceManager(tol)
        projectors = tuple(sm.projector_from_matrix(m) for m in matrices)
        return validate_decomposition(projectors, tol)

    @staticmethod
    def trivial(dim: int) -> 'OrthogonalDecomposition':
        return OrthogonalDecomposition.from_index_sets(dim, [range(dim)])


@dataclass(frozen=True, eq=False)
class ProductMeasurement:
    """
    Attributes:
        decomp_a, decomp_b: decompositions on H_A and H_B
        labels: len(decomp_a) x len(decomp_b) grid of outcome values m_ab
    """
    decomp_a: OrthogonalDecomposition
    decomp_b: OrthogonalDecomposition
    labels: np.ndarray

    def __post_init__(self):
        shape = (len(self.decomp_a), len(self.decomp_b))
        if self.labels.shape != shape:
            raise InvalidInputError(f"Label grid {self.labels.shape} does not match {shape}")

    @property
    def space(self) -> BipartiteSpace:
        return BipartiteSpace(self.decomp_a.dim, self.decomp_b.dim)

    @staticmethod
    def from_document(doc: Dict, tol: Tolerances = DEFAULT_TOLERANCES) -> 'ProductMeasurement':
        """
        Parses {"dims": [d_A, d_B], "side_a": [...], "side_b": [...], "labels": [[...]]}.

        Each side entry is either an index list or {"matrix": [[[re, im], ...], ...]}.
        Labels default to the outcome's row-major position.
        """
        try:
            d_a, d_b = (int(x) for x in doc['dims'])
            side_a, side_b = doc['side_a'], doc['side_b']
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"Malformed measurement document: {e}")

        decomp_a = _parse_side(d_a, side_a, tol)
        decomp_b = _parse_side(d_b, side_b, tol)
        if 'labels' in doc:
            labels = np.asarray(doc['labels'], dtype=float)
        else:
            labels = np.arange(len(decomp_a) * len(decomp_b), dtype=float)
            labels = labels.reshape(len(decomp_a), len(decomp_b))
        return ProductMeasurement(decomp_a, decomp_b, labels)


@dataclass(frozen=True)
class CollapseResult:
    """p = <s|Pi_A (x) Pi_B|s>; state is None when p <= tol.p"""
    p: float
    state: Optional[BipartiteState]
    path_residual: float


@dataclass(frozen=True)
class OutcomeRecord:
    a: int
    b: int
    label: float
    p_ab: float
    collapsed: Optional[BipartiteState]
    rank_before: int
    rank_after: Optional[int]
    reduction: Optional[int]

    def to_dict(self) -> Dict:
        return {
            'a': self.a,
            'b': self.b,
            'label': self.label,
            'p_ab': self.p_ab,
            'rank_before': self.rank_before,
            'rank_after': self.rank_after,
            'reduction': self.reduction,
        }


@dataclass(frozen=True)
class RankReductions:
    """Reductions under Pi_A (x) 1, 1 (x) Pi_B and Pi_A (x) Pi_B; None for empty branches"""
    r_a: Optional[int]
    r_b: Optional[int]
    r_ab: Optional[int]
    bound_a: int
    bound_b: int

    @property
    def complete(self) -> bool:
        return None not in (self.r_a, self.r_b, self.r_ab)

    def within_bounds(self) -> bool:
        checks = []
        if self.r_a is not None:
            checks.append(self.r_a <= self.bound_a)
        if self.r_b is not None:
            checks.append(self.r_b <= self.bound_b)
        if self.r_ab is not None:
            checks.append(self.r_ab <= self.bound_a + self.bound_b)
        return all(checks)

    def frobenius_chain_holds(self) -> bool:
        """R_A + R_B >= R_AB >= max(R_A, R_B); vacuous for partial results"""
        if not self.complete:
            return True
        return self.r_a + self.r_b >= self.r_ab >= max(self.r_a, self.r_b)

    def to_dict(self) -> Dict:
        return {'r_a': self.r_a, 'r_b': self.r_b, 'r_ab': self.r_ab,
                'bound_a': self.bound_a, 'bound_b': self.bound_b}


@dataclass(frozen=True)
class RankReductionReport:
    outcomes: List[OutcomeRecord] = field(default_factory=list)
    r_ave: float = 0.0
    upper_bound: float = 0.0
    marginals_a: List[float] = field(default_factory=list)
    marginals_b: List[float] = field(default_factory=list)

    @property
    def total_probability(self) -> float:
        return float(sum(o.p_ab for o in self.outcomes))

    def to_dict(self) -> Dict:
        return {
            'outcomes': [o.to_dict() for o in self.outcomes],
            'r_ave': self.r_ave,
            'upper_bound': self.upper_bound,
            'marginals_a': list(self.marginals_a),
            'marginals_b': list(self.marginals_b),
        }


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def validate_decomposition(projectors: Tuple[Projector, ...],
                           tol: Tolerances = DEFAULT_TOLERANCES) -> OrthogonalDecomposition:
    """
    Raises:
        PreconditionError: empty, mixed dims, not pairwise orthogonal or incomplete
    """
    if not projectors:
        raise PreconditionError("Decomposition needs at least one projector")
    dim = projectors[0].dim
    if any(p.dim != dim for p in projectors):
        raise PreconditionError("Decomposition projectors have different dims")
    for i, p in enumerate(projectors):
        for q in projectors[i + 1:]:
            if linalg.norm(p.matrix @ q.matrix, 'fro') > tol.eq:
                raise PreconditionError("Decomposition projectors are not orthogonal")
    total = sum(p.matrix for p in projectors)
    if linalg.norm(total - np.eye(dim), 'fro') > tol.eq:
        raise PreconditionError("Decomposition projectors do not sum to the identity")
    return OrthogonalDecomposition(tuple(projectors))


def load_measurement(path: str, tol: Tolerances = DEFAULT_TOLERANCES) -> ProductMeasurement:
    """Reads a UTF-8 JSON measurement document"""
    with open(path, 'r', encoding='utf-8') as f:
        doc = json.load(f)
    logger.info(f"Loaded measurement document from {path}")
    return ProductMeasurement.from_document(doc, tol)


def _parse_side(dim: int, entries: Sequence, tol: Tolerances) -> OrthogonalDecomposition:
    if all(isinstance(e, dict) for e in entries):
        try:
            matrices = [matrix_from_json(e['matrix']) for e in entries]
        except KeyError as e:
            raise InvalidInputError(f"Matrix entry without key {e}")
        for m in matrices:
            if m.shape != (dim, dim):
                raise InvalidInputError(f"Projector shape {m.shape} does not match declared dim {dim}")
        return OrthogonalDecomposition.from_matrices(matrices, tol)
    if any(isinstance(e, dict) for e in entries):
        raise InvalidInputError("A side mixes index sets and matrices")
    return OrthogonalDecomposition.from_index_sets(dim, entries, tol)


# ============================================================================
# MEASUREMENT SIMULATOR
# ============================================================================

class MeasurementSimulator:
    """
    Applies product projectors to bipartite states and tracks Schmidt rank.
    """

    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES,
                 subspaces: SubspaceManager = None):
        self.tol = tol
        self.subspaces = subspaces or SubspaceManager(tol)
        self.analyzer = EntanglementAnalyzer(tol, self.subspaces)

    # ------------------------------------------------------------------
    # single outcome
    # ------------------------------------------------------------------

    def collapse(self, s: BipartiteState, p_a: Projector, p_b: Projector) -> CollapseResult:
        """
        (Pi_A (x) Pi_B)|s>, renormalised when its probability exceeds tol.p.

        The Kronecker path and the coefficient path pi^A M (pi^B)^T are
        both evaluated; their Frobenius distance is returned.
        """
        self._check_projectors(s, p_a, p_b)
        kron_vec = np.kron(p_a.matrix, p_b.matrix) @ s.amplitudes.amplitudes
        coeff = p_a.matrix @ s.coeff @ p_b.matrix.T
        residual = float(linalg.norm(kron_vec - coeff.reshape(-1)))

        p = float(np.vdot(s.amplitudes.amplitudes, kron_vec).real)
        p = float(np.clip(p, 0.0, 1.0))
        if p <= self.tol.p:
            return CollapseResult(p, None, residual)
        return CollapseResult(p, self.analyzer.state_from_coefficients(coeff), residual)

    def sylvester_bounds(self, s: BipartiteState, p_a: Projector,
                         p_b: Projector) -> Tuple[int, int]:
        """
        rank(s) - (d_A - Tr Pi_A) - (d_B - Tr Pi_B) <= rank(collapsed)
            <= min(rank(s), Tr Pi_A, Tr Pi_B)

        Raises:
            UndefinedRankError: the outcome has probability <= tol.p
        """
        result = self.collapse(s, p_a, p_b)
        if result.state is None:
            raise UndefinedRankError(f"Outcome probability {result.p:.3e} is zero; rank undefined")
        rank = self.analyzer.schmidt_rank(s).rank
        d_a, d_b = s.space.d_A, s.space.d_B
        lo = rank - (d_a - p_a.rank) - (d_b - p_b.rank)
        hi = min(rank, p_a.rank, p_b.rank)
        return lo, hi

    def one_sided_window(self, s: BipartiteState, projector: Projector,
                         side: str) -> Tuple[int, int]:
        """Sylvester window for Pi_A (x) 1 (side='A') or 1 (x) Pi_B (side='B')"""
        p_a, p_b = self._one_sided(s, projector, side)
        return self.sylvester_bounds(s, p_a, p_b)

    def rank_reductions(self, s: BipartiteState, p_a: Projector, p_b: Projector) -> RankReductions:
        """
        Rank reductions for the three collapses; a zero-probability branch
        leaves its entry as None.
        """
        self._check_projectors(s, p_a, p_b)
        sm = self.subspaces
        rank = self.analyzer.schmidt_rank(s).rank
        eye_a = sm.identity_projector(s.space.d_A)
        eye_b = sm.identity_projector(s.space.d_B)

        def reduction(pa: Projector, pb: Projector) -> Optional[int]:
            result = self.collapse(s, pa, pb)
            if result.state is None:
                return None
            return rank - self.analyzer.schmidt_rank(result.state).rank

        return RankReductions(
            r_a=reduction(p_a, eye_b),
            r_b=reduction(eye_a, p_b),
            r_ab=reduction(p_a, p_b),
            bound_a=s.space.d_A - p_a.rank,
            bound_b=s.space.d_B - p_b.rank,
        )

    def branch(self, s: BipartiteState, p_a: Projector, p_b: Projector,
               a: int, b: int, label: float, rank_before: int,
               weight: float = 1.0) -> OutcomeRecord:
        """
        One outcome record. `weight` rescales the reported probability
        (POVM elements carry 1 / (d_A t_A d_B t_B)).
        """
        result = self.collapse(s, p_a, p_b)
        p_ab = weight * result.p
        if result.state is None or p_ab <= self.tol.p:
            return OutcomeRecord(a, b, label, p_ab, None, rank_before, None, None)
        rank_after = self.analyzer.schmidt_rank(result.state).rank
        return OutcomeRecord(a, b, label, p_ab, result.state, rank_before,
                             rank_after, rank_before - rank_after)

    # ------------------------------------------------------------------
    # full measurement
    # ------------------------------------------------------------------

    def measure_all(self, s: BipartiteState, m: ProductMeasurement) -> RankReductionReport:
        """
        All outcomes in (a, b) lexicographic order.

        r_ave = sum p_ab R_ab (empty branches contribute 0)
        bound = (d_A + d_B) - sum p_ab (Tr Pi_Aa + Tr Pi_Bb)
        """
        if (s.space.d_A, s.space.d_B) != (m.decomp_a.dim, m.decomp_b.dim):
            raise InvalidInputError("Measurement does not act on the state's space")
        rank = self.analyzer.schmidt_rank(s).rank
        traces_a, traces_b = m.decomp_a.traces, m.decomp_b.traces

        outcomes = []
        for a, p_a in enumerate(m.decomp_a.projectors):
            for b, p_b in enumerate(m.decomp_b.projectors):
                outcomes.append(self.branch(s, p_a, p_b, a, b, float(m.labels[a, b]), rank))

        report = self.assemble_report(outcomes, s.space, traces_a, traces_b, len(traces_a), len(traces_b))
        self.check_report(report)
        return report

    def outcome_expectation(self, s: BipartiteState, m: ProductMeasurement) -> float:
        """sum_ab m_ab p_ab"""
        sm = self.subspaces
        total = 0.0
        for a, p_a in enumerate(m.decomp_a.projectors):
            for b, p_b in enumerate(m.decomp_b.projectors):
                total += float(m.labels[a, b]) * sm.expectation(
                    s.amplitudes, np.kron(p_a.matrix, p_b.matrix))
        return total

    def assemble_report(self, outcomes: List[OutcomeRecord], space: BipartiteSpace,
                        traces_a: Sequence[float], traces_b: Sequence[float],
                        n_a: int, n_b: int) -> RankReductionReport:
        """Averages, bound and marginals for outcomes indexed row-major over (a, b)"""
        r_ave = sum(o.p_ab * o.reduction for o in outcomes if o.reduction is not None)
        weighted = sum(o.p_ab * (traces_a[o.a] + traces_b[o.b]) for o in outcomes)
        marginals_a = [0.0] * n_a
        marginals_b = [0.0] * n_b
        for o in outcomes:
            marginals_a[o.a] += o.p_ab
            marginals_b[o.b] += o.p_ab
        return RankReductionReport(
            outcomes=outcomes,
            r_ave=float(r_ave),
            upper_bound=float(space.d_A + space.d_B - weighted),
            marginals_a=marginals_a,
            marginals_b=marginals_b,
        )

    def check_report(self, report: RankReductionReport) -> None:
        total = report.total_probability
        if abs(total - 1.0) > self.tol.eq:
            logger.warning(f"Outcome probabilities sum to {total:.12f}")
        if report.r_ave > report.upper_bound + self.tol.ineq:
            logger.error(f"Average reduction {report.r_ave:.6f} exceeds bound {report.upper_bound:.6f}")

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _one_sided(self, s: BipartiteState, projector: Projector,
                   side: str) -> Tuple[Projector, Projector]:
        sm = self.subspaces
        if side == 'A':
            return projector, sm.identity_projector(s.space.d_B)
        if side == 'B':
            return sm.identity_projector(s.space.d_A), projector
        raise InvalidInputError(f"side must be 'A' or 'B', got {side!r}")

    def _check_projectors(self, s: BipartiteState, p_a: Projector, p_b: Projector) -> None:
        if p_a.dim != s.space.d_A or p_b.dim != s.space.d_B:
            raise InvalidInputError(
                f"Projector dims ({p_a.dim}, {p_b.dim}) do not match state "
                f"({s.space.d_A}, {s.space.d_B})")


def random_decomposition(subspaces: SubspaceManager, dim: int, parts: int,
                         rng=None) -> OrthogonalDecomposition:
    """
    Random orthogonal decomposition into `parts` blocks: a Haar unitary's
    columns split into contiguous groups of random non-zero sizes.
    """
    if not 1 <= parts <= dim:
        raise InvalidInputError(f"Need 1 <= parts <= dim, got parts={parts}, dim={dim}")
    rng = make_rng(rng)
    u = subspaces.random_unitary(dim, rng)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=parts - 1, replace=False)) if parts > 1 else []
    bounds = [0, *[int(c) for c in cuts], dim]
    projectors = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        block = u[:, lo:hi]
        projectors.append(Projector(frozen(block @ block.conj().T), float(hi - lo)))
    return validate_decomposition(tuple(projectors), subspaces.tol)
