# -*- coding: utf-8 -*-
"""
Finite Phase Space

Weyl-Heisenberg structure over Z(d) x Z(d) for odd d: finite Fourier
transform, position / momentum operators Z and X, displacement operators
D(alpha, beta) and coherent projector families D Pi(0,0) D^dagger, used
as a POVM on each side of a bipartite system.

Conventions:
    F_nm = d^(-1/2) omega(m n),  omega(k) = exp(2 pi i k / d)
    Z = diag(omega(m)),          X|m> = |m + 1>
    D(alpha, beta) = Z^alpha X^beta omega(-2^(-1) alpha beta)
    sum_{alpha, beta} Pi(alpha, beta) = d Tr[Pi(0,0)] 1

Features:
- WeylSystem with invariant checks
- Coherent families with a genericity audit of all d^2 members
- Coherent POVM measurement and its state-independent rank bound
- Trace trend of the average rank reduction
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
import logging

import numpy as np
from scipy import linalg

from numerics_config import (
    COMPLEX_DTYPE,
    DEFAULT_TOLERANCES,
    InvalidInputError,
    RejectedSeedError,
    Tolerances,
    UnsupportedDimensionError,
    frozen,
    make_rng,
)
from hilbert_system import Projector, SubspaceManager
from bipartite_system import BipartiteState
from measurement_system import MeasurementSimulator, RankReductionReport

logger = logging.getLogger(__name__)


# Members closer than this multiple of tol.eq count as equal
DISTINCTNESS_FACTOR = 10.0


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True, eq=False)
class WeylSystem:
    """
    Attributes:
        d: odd dimension >= 3
        fourier, z_op, x_op: read-only d x d unitaries
        inv2: modular inverse of 2 in Z(d), (d + 1) / 2
    """
    d: int
    fourier: np.ndarray
    z_op: np.ndarray
    x_op: np.ndarray
    inv2: int


@dataclass(frozen=True, eq=False)
class CoherentFamily:
    """
    Attributes:
        system: the Weyl system
        seed: Pi(0,0)
        members: d^2 projectors, row-major over (alpha, beta)
    """
    system: WeylSystem
    seed: Projector
    members: Tuple[Projector, ...]

    @property
    def trace(self) -> int:
        return self.seed.rank

    def member(self, alpha: int, beta: int) -> Projector:
        d = self.system.d
        return self.members[(alpha % d) * d + (beta % d)]


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def omega(d: int, k) -> complex:
    """exp(2 pi i k / d)"""
    return np.exp(2j * np.pi * np.mod(k, d) / d)


def validate_odd_dimension(d: int) -> None:
    """
    Raises:
        UnsupportedDimensionError: d even or below 3 (2 has no inverse mod d)
    """
    if d < 3 or d % 2 == 0:
        raise UnsupportedDimensionError(f"Phase space needs odd d >= 3, got {d}")


# ============================================================================
# PHASE SPACE MANAGER
# ============================================================================

class PhaseSpaceManager:
    """
    Weyl systems, displacement operators and coherent POVMs.
    """

    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES,
                 subspaces: SubspaceManager = None):
        self.tol = tol
        self.subspaces = subspaces or SubspaceManager(tol)
        self.simulator = MeasurementSimulator(tol, self.subspaces)

    # ------------------------------------------------------------------
    # Weyl system
    # ------------------------------------------------------------------

    def weyl_system(self, d: int) -> WeylSystem:
        """
        F, Z, X for odd d; invariants are checked before returning.

        Raises:
            UnsupportedDimensionError: d even or below 3
        """
        validate_odd_dimension(d)
        m = np.arange(d)
        fourier = np.exp(2j * np.pi * np.outer(m, m) / d) / np.sqrt(d)
        z_op = np.diag(np.exp(2j * np.pi * m / d))
        x_op = np.zeros((d, d), dtype=COMPLEX_DTYPE)
        x_op[(m + 1) % d, m] = 1.0

        system = WeylSystem(d, frozen(fourier), frozen(z_op), frozen(x_op), (d + 1) // 2)
        residuals = self.weyl_residuals(system)
        worst = max(residuals.values())
        if worst > self.tol.eq:
            raise InvalidInputError(f"Weyl system invariants fail for d={d}: {residuals}")
        return system

    def weyl_residuals(self, sys: WeylSystem) -> Dict[str, float]:
        """Frobenius residuals of the WeylSystem invariants"""
        d = sys.d
        eye = np.eye(d)
        f, z, x = sys.fourier, sys.z_op, sys.x_op
        return {
            'fourier_unitary': float(linalg.norm(f.conj().T @ f - eye, 'fro')),
            'fourier_fourth_power': float(linalg.norm(np.linalg.matrix_power(f, 4) - eye, 'fro')),
            'z_unitary': float(linalg.norm(z.conj().T @ z - eye, 'fro')),
            'x_unitary': float(linalg.norm(x.conj().T @ x - eye, 'fro')),
            'z_order': float(linalg.norm(np.linalg.matrix_power(z, d) - eye, 'fro')),
            'x_order': float(linalg.norm(np.linalg.matrix_power(x, d) - eye, 'fro')),
            'duality': float(linalg.norm(f.conj().T @ z @ f - x, 'fro')),
            'commutation': float(linalg.norm(x @ z - omega(d, -1) * (z @ x), 'fro')),
        }

    def displacement(self, sys: WeylSystem, alpha: int, beta: int) -> np.ndarray:
        """D(alpha, beta) = Z^alpha X^beta omega(-2^(-1) alpha beta), indices mod d"""
        d = sys.d
        alpha, beta = alpha % d, beta % d
        phase = omega(d, -sys.inv2 * alpha * beta)
        return (np.linalg.matrix_power(sys.z_op, alpha)
                @ np.linalg.matrix_power(sys.x_op, beta)) * phase

    def position_projector(self, sys: WeylSystem, n: int) -> Projector:
        """|X;n><X;n|"""
        return self.subspaces.projector(self.subspaces.coordinate_subspace(sys.d, [n % sys.d]))

    def momentum_projector(self, sys: WeylSystem, n: int) -> Projector:
        """|P;n><P;n| with |P;n> = F|X;n>"""
        vec = sys.fourier[:, n % sys.d]
        return Projector(frozen(np.outer(vec, vec.conj())), 1.0)

    # ------------------------------------------------------------------
    # coherent families
    # ------------------------------------------------------------------

    def generic_seed(self, sys: WeylSystem, trace: int, rng=None) -> Projector:
        """Projector onto the span of `trace` random vectors"""
        if not 1 <= trace <= sys.d - 1:
            raise InvalidInputError(f"Seed trace must lie in [1, {sys.d - 1}], got {trace}")
        h = self.subspaces.random_subspace(sys.d, trace, make_rng(rng))
        return self.subspaces.projector(h)

    def coherent_family(self, sys: WeylSystem, seed: Projector) -> CoherentFamily:
        """
        Pi(alpha, beta) = D(alpha, beta) Pi(0,0) D(alpha, beta)^dagger.

        Raises:
            InvalidInputError: seed is not a projector on C^d or its trace is outside [1, d-1]
            RejectedSeedError: seed is a position/momentum projector, or two
                               members coincide (names the pair)
        """
        d = sys.d
        seed = self.subspaces.projector_from_matrix(seed.matrix)
        if seed.dim != d:
            raise InvalidInputError(f"Seed dim {seed.dim} != {d}")
        if not 1 <= seed.rank <= d - 1:
            raise InvalidInputError(f"Seed trace must lie in [1, {d - 1}], got {seed.trace:.6f}")

        for n in range(d):
            for name, excluded in (('position', self.position_projector(sys, n)),
                                   ('momentum', self.momentum_projector(sys, n))):
                if linalg.norm(seed.matrix - excluded.matrix, 'fro') <= DISTINCTNESS_FACTOR * self.tol.eq:
                    raise RejectedSeedError(f"Seed equals the {name} projector for n={n}")

        members = []
        for alpha in range(d):
            for beta in range(d):
                disp = self.displacement(sys, alpha, beta)
                members.append(Projector(frozen(disp @ seed.matrix @ disp.conj().T), seed.trace))

        self._audit_distinct(members, d)
        family = CoherentFamily(sys, seed, tuple(members))
        residual = self.resolution_residual(family)
        if residual > self.tol.eq:
            raise InvalidInputError(f"Coherent family does not resolve the identity: {residual:.3e}")
        logger.info(f"Coherent family built: d={d}, trace={seed.rank}")
        return family

    def resolution_residual(self, family: CoherentFamily) -> float:
        """||(1 / (d t)) sum Pi(alpha, beta) - 1||_F"""
        d = family.system.d
        total = sum(m.matrix for m in family.members) / (d * family.seed.trace)
        return float(linalg.norm(total - np.eye(d), 'fro'))

    # ------------------------------------------------------------------
    # POVM
    # ------------------------------------------------------------------

    def povm_measure(self, s: BipartiteState, fam_a: CoherentFamily,
                     fam_b: CoherentFamily) -> RankReductionReport:
        """
        Coherent POVM with elements Pi_A(alpha, beta) (x) Pi_B(gamma, delta)
        weighted by 1 / (d_A t_A d_B t_B).

        Outcome a indexes (alpha, beta) row-major, b indexes (gamma, delta).
        The upper bound evaluates to (d_A - t_A) + (d_B - t_B).
        """
        d_a, d_b = fam_a.system.d, fam_b.system.d
        if (s.space.d_A, s.space.d_B) != (d_a, d_b):
            raise InvalidInputError(
                f"Families ({d_a}, {d_b}) do not match state ({s.space.d_A}, {s.space.d_B})")

        weight = 1.0 / (d_a * fam_a.seed.trace * d_b * fam_b.seed.trace)
        rank = self.simulator.analyzer.schmidt_rank(s).rank
        n_a, n_b = len(fam_a.members), len(fam_b.members)

        outcomes = []
        for a, p_a in enumerate(fam_a.members):
            for b, p_b in enumerate(fam_b.members):
                outcomes.append(self.simulator.branch(
                    s, p_a, p_b, a, b, float(a * n_b + b), rank, weight))

        report = self.simulator.assemble_report(
            outcomes, s.space, [fam_a.trace] * n_a, [fam_b.trace] * n_b, n_a, n_b)
        self.simulator.check_report(report)
        return report

    def povm_bound(self, fam_a: CoherentFamily, fam_b: CoherentFamily) -> int:
        """(d_A - t_A) + (d_B - t_B)"""
        return (fam_a.system.d - fam_a.trace) + (fam_b.system.d - fam_b.trace)

    def trace_trend(self, s: BipartiteState, traces: Sequence[int], rng=None) -> List[Dict]:
        """
        Average rank reduction of s for seeds of each trace on both sides.

        The rows only report the trend; no monotonicity is assumed.
        """
        rng = make_rng(rng)
        sys_a = self.weyl_system(s.space.d_A)
        sys_b = self.weyl_system(s.space.d_B)
        rows = []
        for t in traces:
            fam_a = self.coherent_family(sys_a, self.generic_seed(sys_a, t, rng))
            fam_b = self.coherent_family(sys_b, self.generic_seed(sys_b, t, rng))
            report = self.povm_measure(s, fam_a, fam_b)
            rows.append({'trace': int(t), 'r_ave': report.r_ave,
                         'bound': float(self.povm_bound(fam_a, fam_b))})
        return rows

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _audit_distinct(self, members: List[Projector], d: int) -> None:
        cutoff = DISTINCTNESS_FACTOR * self.tol.eq
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if linalg.norm(members[i].matrix - members[j].matrix, 'fro') <= cutoff:
                    raise RejectedSeedError(
                        f"Coherent members {divmod(i, d)} and {divmod(j, d)} coincide")
