# -*- coding: utf-8 -*-
"""
Quantum Boole / Chung-Erdos / Frechet Inequalities

Implements the quantum-correction operator
    D(h1, h2) = Pi(h1 v h2) - Pi(h1) - Pi(h2) + Pi(h1 ^ h2)
and the inequalities built on it, next to their classical
(Kolmogorov) reference formulas.

Features:
- Correction operator, its spectrum and the commutator identity
- Quantum upper/lower bounds for p[Pi(h1 v h2)] and classical margins
- Sufficient conditions under which the classical bounds hold
- Quantum Frechet margin and the n-subspace Frechet / Boole check
- Bipartite Boole inequality for product subspaces
"""

from dataclasses import dataclass, asdict
from typing import Dict, List, Sequence
import logging

import numpy as np
from scipy import linalg

from numerics_config import (
    DEFAULT_TOLERANCES,
    InvalidInputError,
    PreconditionError,
    Tolerances,
    frozen,
)
from hilbert_system import StateVector, Subspace, SubspaceManager

logger = logging.getLogger(__name__)


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True, eq=False)
class CorrectionOperator:
    """
    D(h1, h2): Hermitian, traceless.

    Attributes:
        matrix: read-only Hermitian matrix
        trace: real trace (zero up to rounding)
    """
    matrix: np.ndarray
    trace: float

    def is_zero(self, tol: float) -> bool:
        return bool(linalg.norm(self.matrix, 'fro') <= tol)


@dataclass(frozen=True)
class ConditionFlags:
    """Sufficient conditions for the classical bounds"""
    projectors_commute: bool
    state_in_meet: bool
    state_in_perp_join: bool

    def any(self) -> bool:
        return self.projectors_commute or self.state_in_meet or self.state_in_perp_join

    def to_dict(self) -> Dict[str, bool]:
        return asdict(self)


@dataclass(frozen=True)
class BoundsReport:
    """
    All scalars of the quantum Boole / Chung-Erdos bounds.

    Attributes:
        p1, p2, p_meet, p_join: clamped probabilities
        d_value: <s|D(h1,h2)|s>
        b_lower, b_upper: quantum lower / upper bounds for p_join
        classical_lower, classical_upper: classical Chung-Erdos / Boole sides
        conditions: sufficient-condition flags
    """
    p1: float
    p2: float
    p_meet: float
    p_join: float
    d_value: float
    b_lower: float
    b_upper: float
    classical_lower: float
    classical_upper: float
    conditions: ConditionFlags

    @property
    def lower_slack(self) -> float:
        return self.p_join - self.b_lower

    @property
    def upper_slack(self) -> float:
        return self.b_upper - self.p_join

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['conditions'] = self.conditions.to_dict()
        return data


@dataclass(frozen=True)
class ClassicalMargins:
    """Signed margins; negative means the classical inequality is violated"""
    upper: float
    lower: float

    def violated(self, tol: float) -> bool:
        return self.upper < -tol or self.lower < -tol


@dataclass(frozen=True)
class FrechetSumReport:
    """Result of the n-subspace Frechet / Boole check"""
    total: float
    n: int
    boole_holds: bool
    frechet_holds: bool
    boole_lhs: float
    boole_rhs: float

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class BipartiteBooleReport:
    """Boole inequality for two product subspaces h1A(x)h1B and h2A(x)h2B"""
    p1: float
    p2: float
    p_join: float
    d_value: float
    kronecker_form_residual: float
    commutator_residual: float
    locally_commuting: bool
    quantum_upper_margin: float
    classical_upper_margin: float

    def to_dict(self) -> Dict:
        return asdict(self)


# ============================================================================
# CLASSICAL REFERENCE FORMULAS
# ============================================================================

def chung_erdos_lower(p_sum: float, p_intersection: float, tau_p: float) -> float:
    """
    (pA + pB)^2 / (pA + pB + 2 pAB), defined as 0 when the denominator
    is at or below tau_p (all probabilities vanish).
    """
    denominator = p_sum + 2.0 * p_intersection
    if denominator <= tau_p:
        return 0.0
    return p_sum * p_sum / denominator


def classical_reference(p_a: float, p_b: float, p_ab: float,
                        tau_p: float = DEFAULT_TOLERANCES.p) -> Dict[str, float]:
    """
    Kolmogorov reference values for two events.

    Returns:
        {'p_union': pA + pB - pAB (inclusion-exclusion),
         'boole_upper': pA + pB,
         'chung_erdos_lower': (pA + pB)^2 / (pA + pB + 2 pAB),
         'delta': p_union - pA - pB + pAB}
    """
    p_union = p_a + p_b - p_ab
    return {
        'p_union': p_union,
        'boole_upper': p_a + p_b,
        'chung_erdos_lower': chung_erdos_lower(p_a + p_b, p_ab, tau_p),
        'delta': p_union - p_a - p_b + p_ab,
    }


def classical_frechet_bound(ps: Sequence[float], p_intersection: float = 0.0) -> float:
    """Upper bound (n - 1) + p(A1 n ... n An) for sum(p(Ai))"""
    return (len(ps) - 1) + p_intersection


# ============================================================================
# QUANTUM BOOLE CALCULATOR
# ============================================================================

class QuantumBooleCalculator:
    """
    Quantum corrections to the classical probabilistic inequalities.

    Responsibilities:
    - Build D(h1, h2) and verify its identities
    - Evaluate quantum and classical bounds for a state
    - Report the sufficient conditions for the classical limit
    - Frechet-type sums for families of subspaces
    """

    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES,
                 subspaces: SubspaceManager = None):
        self.tol = tol
        self.subspaces = subspaces or SubspaceManager(tol)

    # ------------------------------------------------------------------
    # correction operator
    # ------------------------------------------------------------------

    def correction_operator(self, h1: Subspace, h2: Subspace) -> CorrectionOperator:
        """D(h1, h2) = Pi(h1 v h2) - Pi(h1) - Pi(h2) + Pi(h1 ^ h2)"""
        sm = self.subspaces
        join = sm.join(h1, h2)
        meet = sm.meet(h1, h2)
        matrix = (sm.projector(join).matrix - sm.projector(h1).matrix
                  - sm.projector(h2).matrix + sm.projector(meet).matrix)
        trace = float(np.trace(matrix).real)
        if abs(trace) > self.tol.eq * h1.ambient_dim:
            # dim(h1 v h2) + dim(h1 ^ h2) = dim h1 + dim h2 failed: rank decision is off
            logger.warning(f"Correction operator trace {trace:.3e} is not zero "
                           f"(join {join.dim}, meet {meet.dim}, dims {h1.dim}, {h2.dim})")
        return CorrectionOperator(frozen(matrix), trace)

    def correction_spectrum(self, h1: Subspace, h2: Subspace) -> np.ndarray:
        """Ascending eigenvalues of D(h1, h2)"""
        return self.subspaces.hermitian_eigenvalues(self.correction_operator(h1, h2).matrix)

    def commutator_residual(self, h1: Subspace, h2: Subspace) -> float:
        """||[Pi1, Pi2] - D(h1, h2)(Pi1 - Pi2)||_F"""
        p1 = self.subspaces.projector(h1).matrix
        p2 = self.subspaces.projector(h2).matrix
        d = self.correction_operator(h1, h2).matrix
        return float(linalg.norm((p1 @ p2 - p2 @ p1) - d @ (p1 - p2), 'fro'))

    def complement_antisymmetry_residual(self, h1: Subspace, h2: Subspace) -> float:
        """||D(h1^perp, h2^perp) + D(h1, h2)||_F"""
        sm = self.subspaces
        d = self.correction_operator(h1, h2).matrix
        d_perp = self.correction_operator(sm.complement(h1), sm.complement(h2)).matrix
        return float(linalg.norm(d_perp + d, 'fro'))

    # ------------------------------------------------------------------
    # bounds
    # ------------------------------------------------------------------

    def sufficient_conditions(self, s: StateVector, h1: Subspace, h2: Subspace) -> ConditionFlags:
        """
        Flags for: commuting projectors, |s> in h1 ^ h2, |s> in (h1 v h2)^perp.
        """
        self._check_state(s, h1, h2)
        sm = self.subspaces
        p1 = sm.projector(h1).matrix
        p2 = sm.projector(h2).matrix
        vec = s.amplitudes
        commute = linalg.norm(p1 @ p2 - p2 @ p1, 'fro') <= self.tol.eq
        in_meet = linalg.norm(sm.projector(sm.meet(h1, h2)).matrix @ vec - vec) <= self.tol.eq
        in_perp_join = linalg.norm(sm.projector(sm.join(h1, h2)).matrix @ vec) <= self.tol.eq
        return ConditionFlags(bool(commute), bool(in_meet), bool(in_perp_join))

    def quantum_bounds(self, s: StateVector, h1: Subspace, h2: Subspace) -> BoundsReport:
        """
        Quantum Boole (upper) and Chung-Erdos (lower) bounds for p[Pi(h1 v h2)].

        B_U = p1 + p2 + <s|D|s>
        B_L = B_U^2 / (B_U + 2 p_meet), defined as 0 when the denominator <= tol.p
        """
        self._check_state(s, h1, h2)
        sm = self.subspaces
        p1 = sm.prob(s, sm.projector(h1))
        p2 = sm.prob(s, sm.projector(h2))
        p_meet = sm.prob(s, sm.projector(sm.meet(h1, h2)))
        p_join = sm.prob(s, sm.projector(sm.join(h1, h2)))
        d_value = sm.expectation(s, self.correction_operator(h1, h2).matrix)

        b_upper = p1 + p2 + d_value
        b_lower = chung_erdos_lower(b_upper, p_meet, self.tol.p)

        return BoundsReport(
            p1=p1, p2=p2, p_meet=p_meet, p_join=p_join, d_value=d_value,
            b_lower=b_lower, b_upper=b_upper,
            classical_lower=chung_erdos_lower(p1 + p2, p_meet, self.tol.p),
            classical_upper=p1 + p2,
            conditions=self.sufficient_conditions(s, h1, h2),
        )

    def classical_bounds_violation(self, s: StateVector, h1: Subspace,
                                   h2: Subspace) -> ClassicalMargins:
        """
        Signed margins of the classical Boole / Chung-Erdos inequalities.

        upper = p1 + p2 - p_join
        lower = p_join - (p1 + p2)^2 / (p1 + p2 + 2 p_meet)
        """
        report = self.quantum_bounds(s, h1, h2)
        return ClassicalMargins(
            upper=report.classical_upper - report.p_join,
            lower=report.p_join - report.classical_lower,
        )

    # ------------------------------------------------------------------
    # Frechet
    # ------------------------------------------------------------------

    def quantum_frechet(self, s: StateVector, h1: Subspace, h2: Subspace) -> float:
        """
        Margin of p1 + p2 <= 1 - <s|D(h1,h2)|s>, valid when h1 ^ h2 = O.

        Evaluated through the quantum Boole bound on the complements,
        whose join is the full space, with D(h1^perp, h2^perp) = -D(h1, h2).

        Raises:
            PreconditionError: h1 ^ h2 is not the zero subspace
        """
        self._check_state(s, h1, h2)
        sm = self.subspaces
        if not sm.meet(h1, h2).is_zero():
            raise PreconditionError("quantum_frechet requires h1 ^ h2 = O")
        c1, c2 = sm.complement(h1), sm.complement(h2)
        d_perp = sm.expectation(s, self.correction_operator(c1, c2).matrix)
        b_upper_perp = sm.prob(s, sm.projector(c1)) + sm.prob(s, sm.projector(c2)) + d_perp
        return b_upper_perp - 1.0

    def frechet_sum_check(self, s: StateVector, hs: List[Subspace]) -> FrechetSumReport:
        """
        Sum of p[Pi(h_i)] against n - 1, with the Boole hypothesis on the
        complements reported separately.

        Raises:
            PreconditionError: h1 ^ ... ^ hn is not the zero subspace
        """
        if len(hs) < 2:
            raise InvalidInputError("frechet_sum_check needs at least two subspaces")
        sm = self.subspaces
        for h in hs:
            self._check_state(s, h, hs[0])
        if not sm.meet_all(hs).is_zero():
            raise PreconditionError("frechet_sum_check requires h1 ^ ... ^ hn = O")

        complements = [sm.complement(h) for h in hs]
        total = sum(sm.prob(s, sm.projector(h)) for h in hs)
        boole_lhs = sum(sm.prob(s, sm.projector(c)) for c in complements)
        boole_rhs = sm.prob(s, sm.projector(sm.join_all(complements)))
        n = len(hs)
        report = FrechetSumReport(
            total=total,
            n=n,
            boole_holds=bool(boole_lhs >= boole_rhs - self.tol.ineq),
            frechet_holds=bool(total <= n - 1 + self.tol.ineq),
            boole_lhs=boole_lhs,
            boole_rhs=boole_rhs,
        )
        if report.boole_holds and not report.frechet_holds:
            logger.error(f"Boole hypothesis holds but Frechet sum {total:.12f} > {n - 1}")
        return report

    # ------------------------------------------------------------------
    # bipartite Boole
    # ------------------------------------------------------------------

    def bipartite_boole(self, s: StateVector, h1A: Subspace, h1B: Subspace,
                        h2A: Subspace, h2B: Subspace) -> BipartiteBooleReport:
        """
        Boole inequality for h1 = h1A (x) h1B and h2 = h2A (x) h2B.

        Checks the Kronecker form of D, the Kronecker form of the
        commutator identity, and the local commuting condition that makes
        the classical Boole inequality hold.
        """
        from bipartite_system import EntanglementAnalyzer

        sm = self.subspaces
        analyzer = EntanglementAnalyzer(self.tol, sm)
        h1 = analyzer.tensor_subspace(h1A, h1B)
        h2 = analyzer.tensor_subspace(h2A, h2B)
        self._check_state(s, h1, h2)

        k1 = np.kron(sm.projector(h1A).matrix, sm.projector(h1B).matrix)
        k2 = np.kron(sm.projector(h2A).matrix, sm.projector(h2B).matrix)
        join_p = sm.projector(sm.join(h1, h2)).matrix
        meet_p = sm.projector(sm.meet(h1, h2)).matrix
        d = self.correction_operator(h1, h2).matrix

        kron_form = join_p - k1 - k2 + meet_p
        commutator = k1 @ k2 - k2 @ k1

        pa1, pa2 = sm.projector(h1A).matrix, sm.projector(h2A).matrix
        pb1, pb2 = sm.projector(h1B).matrix, sm.projector(h2B).matrix
        locally_commuting = (linalg.norm(pa1 @ pa2 - pa2 @ pa1, 'fro') <= self.tol.eq
                             and linalg.norm(pb1 @ pb2 - pb2 @ pb1, 'fro') <= self.tol.eq)

        p1 = sm.expectation(s, k1)
        p2 = sm.expectation(s, k2)
        p_join = sm.expectation(s, join_p)
        d_value = sm.expectation(s, d)
        return BipartiteBooleReport(
            p1=p1, p2=p2, p_join=p_join, d_value=d_value,
            kronecker_form_residual=float(linalg.norm(kron_form - d, 'fro')),
            commutator_residual=float(linalg.norm(commutator - d @ (k1 - k2), 'fro')),
            locally_commuting=bool(locally_commuting),
            quantum_upper_margin=p1 + p2 + d_value - p_join,
            classical_upper_margin=p1 + p2 - p_join,
        )

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _check_state(self, s: StateVector, h1: Subspace, h2: Subspace) -> None:
        if h1.ambient_dim != h2.ambient_dim:
            raise InvalidInputError(
                f"Ambient dimensions differ: {h1.ambient_dim} vs {h2.ambient_dim}")
        if s.dim != h1.ambient_dim:
            raise InvalidInputError(f"State dim {s.dim} != ambient dim {h1.ambient_dim}")
        norm = float(linalg.norm(s.amplitudes))
        if abs(norm - 1.0) > self.tol.norm:
            raise InvalidInputError(f"State is not normalised: |s| = {norm!r}")
