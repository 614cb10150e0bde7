# -*- coding: utf-8 -*-
"""
CHSH Subspace Families

Two qubits, the bases {|0>, |1>} and {U|0>, U|1>} on each side, and the
sixteen one-dimensional product subspaces built from them. The family
feeds the rank-one Boole inequality, the Frechet-type CHSH bound and the
search for rank-two states that violate it.

Basis orientation: |0> = (0, 1)^T and |1> = (1, 0)^T.

Features:
- Family construction with orthogonality / complement checks
- Empty-meet check for the Frechet family and the full join of its complements
- Closed forms Omega and Omega' for product states
- Boole matrix M, CHSH sum, boole sum and their two evaluation paths
- Violation search through the lowest eigenvector of M
"""

from dataclasses import dataclass, asdict
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np
from scipy import linalg

from numerics_config import (
    COMPLEX_DTYPE,
    DEFAULT_TOLERANCES,
    InvalidInputError,
    Tolerances,
    frozen,
    matrix_to_json,
)
from hilbert_system import StateVector, Subspace, SubspaceManager
from bipartite_system import BipartiteState, EntanglementAnalyzer

logger = logging.getLogger(__name__)


# ============================================================================
# CONSTANTS
# ============================================================================

KET_0 = np.array([0.0, 1.0], dtype=COMPLEX_DTYPE)
KET_1 = np.array([1.0, 0.0], dtype=COMPLEX_DTYPE)

SETTINGS = ('W', 'X', 'Y', 'Z')

# Which side carries U in each setting: (A rotated, B rotated)
ROTATED_SIDES = {
    'W': (False, False),
    'X': (False, True),
    'Y': (True, False),
    'Z': (True, True),
}

# Atom label -> (A basis index, B basis index)
ATOM_INDICES = {
    1: (1, 1),
    2: (1, 0),
    3: (0, 1),
    4: (0, 0),
}

# Planes whose probabilities add up to the rank-one Boole sum
BOOLE_PLANES = ('23W', '23X', '23Y', '14Z')

# Frechet family; its complements are BOOLE_PLANES
FRECHET_PLANES = ('14W', '14X', '14Y', '23Z')

# Atoms summed on the left side of the CHSH inequality
CHSH_ATOMS = ('1W', '4W', '1X', '4X', '1Y', '4Y', '2Z', '3Z')

CHSH_CLASSICAL_BOUND = 3.0


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True)
class LocalUnitary:
    """
    U = [[a, b], [-b*, a*]] with |a|^2 + |b|^2 = 1 and a, b != 0.
    """
    a: complex
    b: complex

    def __post_init__(self):
        validate_unitary_params(self.a, self.b)

    @staticmethod
    def from_polar(modulus: float, phase: float = 0.0) -> 'LocalUnitary':
        """a = modulus * exp(i phase), b = sqrt(1 - modulus^2)"""
        if not 0.0 < modulus < 1.0:
            raise InvalidInputError(f"|a| must lie strictly between 0 and 1, got {modulus}")
        return LocalUnitary(complex(modulus * np.exp(1j * phase)),
                            complex(np.sqrt(1.0 - modulus ** 2)))

    @property
    def matrix(self) -> np.ndarray:
        a, b = complex(self.a), complex(self.b)
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=COMPLEX_DTYPE)

    def to_dict(self) -> Dict:
        return {'a': [self.a.real, self.a.imag], 'b': [self.b.real, self.b.imag]}


@dataclass(frozen=True, eq=False)
class ChshFamily:
    """
    Attributes:
        unitary: the local unitary shared by both sides
        atoms: '1W' ... '4Z' -> one-dimensional product subspaces
        planes: '14W', '23W', ... -> joins of atom pairs
    """
    unitary: LocalUnitary
    atoms: Dict[str, Subspace]
    planes: Dict[str, Subspace]


@dataclass(frozen=True)
class LocalProbabilities:
    """p_A = |<s_A|1>|^2, p_B = |<s_B|1>|^2, p'_A = |<s_A|U|1>|^2, p'_B = |<s_B|U|1>|^2"""
    p_A: float
    p_B: float
    p_A_prime: float
    p_B_prime: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class OmegaResult:
    probs: LocalProbabilities
    omega: float


@dataclass(frozen=True)
class Lemma1Result:
    """Dimension of the Frechet-family meet and of the join of its complements"""
    meet_dim: int
    join_dim: int

    def holds(self) -> bool:
        return self.meet_dim == 0 and self.join_dim == 4


@dataclass(frozen=True)
class ChshReport:
    """
    Attributes:
        omega: (boole_sum - 1) / 2, equal to the closed-form Omega on product states
        omega_prime: p[23W] + p[23X] - 1
        chsh_sum: sum of the eight CHSH atom probabilities
        boole_sum: p[23W] + p[23X] + p[23Y] + p[14Z]
        violated: chsh_sum > 3 + tol.ineq
        matrix_residual: |chsh_sum - (3 - <s|M|s>)|
    """
    omega: float
    omega_prime: float
    chsh_sum: float
    boole_sum: float
    violated: bool
    matrix_residual: float

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class ViolationResult:
    """Lowest eigenvector of M; found=False when lambda_min >= -tol.ineq"""
    found: bool
    lambda_min: float
    state: Optional[BipartiteState] = None
    chsh_sum: Optional[float] = None
    schmidt_rank: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            'found': self.found,
            'lambda_min': self.lambda_min,
            'chsh_sum': self.chsh_sum,
            'schmidt_rank': self.schmidt_rank,
            'state': matrix_to_json(self.state.coeff) if self.state is not None else None,
        }


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def validate_unitary_params(a: complex, b: complex,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    """
    Raises:
        InvalidInputError: a or b zero, non-finite, or |a|^2 + |b|^2 != 1
    """
    if not (np.isfinite(complex(a)) and np.isfinite(complex(b))):
        raise InvalidInputError("Unitary parameters must be finite")
    if abs(a) == 0.0 or abs(b) == 0.0:
        raise InvalidInputError(f"Both a and b must be non-zero, got a={a}, b={b}")
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > tol.norm:
        raise InvalidInputError(f"|a|^2 + |b|^2 must be 1, got {norm!r}")


def balanced_unitary() -> LocalUnitary:
    """a = b = 1/sqrt(2)"""
    r = 1.0 / np.sqrt(2.0)
    return LocalUnitary(complex(r), complex(r))


def atom_vector(u: LocalUnitary, label: str) -> np.ndarray:
    """Kronecker product vector spanning atom `label` (e.g. '2X')"""
    index, setting = int(label[0]), label[1]
    rot_a, rot_b = ROTATED_SIDES[setting]
    i_a, i_b = ATOM_INDICES[index]
    basis = (KET_0, KET_1)
    vec_a = u.matrix @ basis[i_a] if rot_a else basis[i_a]
    vec_b = u.matrix @ basis[i_b] if rot_b else basis[i_b]
    return np.kron(vec_a, vec_b)


# ============================================================================
# CHSH CALCULATOR
# ============================================================================

class ChshCalculator:
    """
    Builds the W/X/Y/Z families and evaluates the Boole and CHSH sums.
    """

    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES,
                 subspaces: SubspaceManager = None):
        self.tol = tol
        self.subspaces = subspaces or SubspaceManager(tol)
        self.analyzer = EntanglementAnalyzer(tol, self.subspaces)

    # ------------------------------------------------------------------
    # family
    # ------------------------------------------------------------------

    def build_family(self, u: LocalUnitary) -> ChshFamily:
        """
        Sixteen atoms and eight planes for the unitary u.

        Raises:
            InvalidInputError: a family invariant fails numerically
        """
        sm = self.subspaces
        atoms = {}
        for setting in SETTINGS:
            for index in ATOM_INDICES:
                label = f"{index}{setting}"
                atoms[label] = sm.span(atom_vector(u, label))

        planes = {}
        for setting in SETTINGS:
            planes[f"14{setting}"] = sm.join(atoms[f"1{setting}"], atoms[f"4{setting}"])
            planes[f"23{setting}"] = sm.join(atoms[f"2{setting}"], atoms[f"3{setting}"])

        family = ChshFamily(u, atoms, planes)
        self._check_family(family)
        logger.info(f"Built CHSH family for a={u.a:.6g}, b={u.b:.6g}")
        return family

    def lemma1_check(self, f: ChshFamily) -> Lemma1Result:
        """dim(14W ^ 14X ^ 14Y ^ 23Z) and dim(23W v 23X v 23Y v 14Z)"""
        sm = self.subspaces
        meet = sm.meet_all([f.planes[p] for p in FRECHET_PLANES])
        join = sm.join_all([f.planes[p] for p in BOOLE_PLANES])
        return Lemma1Result(meet.dim, join.dim)

    def frechet_family(self, f: ChshFamily) -> List[Subspace]:
        return [f.planes[p] for p in FRECHET_PLANES]

    # ------------------------------------------------------------------
    # product states
    # ------------------------------------------------------------------

    def local_probabilities(self, s_a: StateVector, s_b: StateVector,
                            u: LocalUnitary) -> LocalProbabilities:
        self._check_qubits(s_a, s_b)
        u1 = u.matrix @ KET_1
        return LocalProbabilities(
            p_A=float(abs(np.vdot(s_a.amplitudes, KET_1)) ** 2),
            p_B=float(abs(np.vdot(s_b.amplitudes, KET_1)) ** 2),
            p_A_prime=float(abs(np.vdot(s_a.amplitudes, u1)) ** 2),
            p_B_prime=float(abs(np.vdot(s_b.amplitudes, u1)) ** 2),
        )

    def omega(self, s_a: StateVector, s_b: StateVector, u: LocalUnitary) -> OmegaResult:
        """
        Omega = p_A + p_B + p'_A p'_B - p_A p_B - p'_A p_B - p_A p'_B
        """
        probs = self.local_probabilities(s_a, s_b, u)
        pa, pb, qa, qb = probs.p_A, probs.p_B, probs.p_A_prime, probs.p_B_prime
        value = pa + pb + qa * qb - pa * pb - qa * pb - pa * qb
        if value < -self.tol.ineq:
            logger.error(f"Omega {value:.3e} < 0 for a product state")
        return OmegaResult(probs, value)

    def omega_prime(self, s_a: StateVector, s_b: StateVector, u: LocalUnitary,
                    family: Optional[ChshFamily] = None) -> float:
        """
        p[23W] + p[23X] - 1 on |s_A> (x) |s_B>; equals (2 p_A - 1)(1 - p_B - p'_B).
        """
        probs = self.local_probabilities(s_a, s_b, u)
        family = family or self.build_family(u)
        state = self.analyzer.product_state(s_a.amplitudes, s_b.amplitudes)
        value = (self._plane_prob(state, family, '23W')
                 + self._plane_prob(state, family, '23X') - 1.0)
        closed = (2.0 * probs.p_A - 1.0) * (1.0 - probs.p_B - probs.p_B_prime)
        if abs(value - closed) > self.tol.ineq:
            logger.warning(f"Omega' paths disagree: {value:.12f} vs closed form {closed:.12f}")
        return value

    # ------------------------------------------------------------------
    # Boole matrix and sums
    # ------------------------------------------------------------------

    def boole_matrix(self, u: LocalUnitary, family: Optional[ChshFamily] = None) -> np.ndarray:
        """M = Pi(23W) + Pi(23X) + Pi(23Y) + Pi(14Z) - 1"""
        f = family or self.build_family(u)
        m = sum(self.subspaces.projector(f.planes[p]).matrix for p in BOOLE_PLANES)
        return frozen(m - np.eye(4, dtype=COMPLEX_DTYPE))

    def boole_sum(self, s: BipartiteState, f: ChshFamily) -> float:
        self._check_two_qubit(s)
        return sum(self._plane_prob(s, f, p) for p in BOOLE_PLANES)

    def chsh_sum(self, s: BipartiteState, f: ChshFamily) -> ChshReport:
        """
        Sum of the eight CHSH atom probabilities, cross-checked against
        3 - <s|M|s>.
        """
        self._check_two_qubit(s)
        sm = self.subspaces
        total = sum(sm.prob(s.amplitudes, sm.projector(f.atoms[a])) for a in CHSH_ATOMS)
        boole = self.boole_sum(s, f)
        via_matrix = CHSH_CLASSICAL_BOUND - sm.expectation(
            s.amplitudes, self.boole_matrix(f.unitary, f))
        residual = abs(total - via_matrix)
        if residual > self.tol.ineq:
            logger.warning(f"CHSH sum paths disagree by {residual:.3e}")
        return ChshReport(
            omega=(boole - 1.0) / 2.0,
            omega_prime=self._plane_prob(s, f, '23W') + self._plane_prob(s, f, '23X') - 1.0,
            chsh_sum=total,
            boole_sum=boole,
            violated=bool(total > CHSH_CLASSICAL_BOUND + self.tol.ineq),
            matrix_residual=residual,
        )

    def plane_consistency(self, s: BipartiteState, f: ChshFamily) -> float:
        """max over planes of |p[14S] - p[1S] - p[4S]| and |p[23S] - p[2S] - p[3S]|"""
        sm = self.subspaces
        worst = 0.0
        for setting in SETTINGS:
            for pair in ('14', '23'):
                plane = self._plane_prob(s, f, f"{pair}{setting}")
                parts = sum(sm.prob(s.amplitudes, sm.projector(f.atoms[f"{i}{setting}"]))
                            for i in pair)
                worst = max(worst, abs(plane - parts))
        return worst

    # ------------------------------------------------------------------
    # violation search
    # ------------------------------------------------------------------

    def find_violation(self, u: LocalUnitary) -> ViolationResult:
        """
        Eigenvector of M for its most negative eigenvalue.

        Not finding one is a result, not an error.
        """
        family = self.build_family(u)
        values, vectors = linalg.eigh(self.boole_matrix(u, family))
        lambda_min = float(values[0])
        if lambda_min >= -self.tol.ineq:
            logger.warning(f"No CHSH violation for a={u.a:.6g}: lambda_min = {lambda_min:.3e}")
            return ViolationResult(found=False, lambda_min=lambda_min)

        state = self.analyzer.state_from_coefficients(vectors[:, 0].reshape(2, 2))
        report = self.chsh_sum(state, family)
        rank = self.analyzer.schmidt_rank(state).rank
        logger.info(f"CHSH violation: chsh_sum={report.chsh_sum:.6f}, rank={rank}")
        return ViolationResult(True, lambda_min, state, report.chsh_sum, rank)

    def closest_product_state(self, s: BipartiteState) -> BipartiteState:
        self._check_two_qubit(s)
        return self.analyzer.closest_product_state(s)

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _plane_prob(self, s: BipartiteState, f: ChshFamily, plane: str) -> float:
        return self.subspaces.prob(s.amplitudes, self.subspaces.projector(f.planes[plane]))

    def _check_family(self, f: ChshFamily) -> None:
        sm = self.subspaces
        eye = np.eye(4)
        for setting in SETTINGS:
            labels = [f"{i}{setting}" for i in ATOM_INDICES]
            vectors = np.column_stack([f.atoms[label].basis[:, 0] for label in labels])
            gram = vectors.conj().T @ vectors
            if linalg.norm(gram - eye, 'fro') > self.tol.eq:
                raise InvalidInputError(f"Atoms of set {setting} are not orthonormal")
            p14 = sm.projector(f.planes[f"14{setting}"]).matrix
            p23 = sm.projector(f.planes[f"23{setting}"]).matrix
            if f.planes[f"14{setting}"].dim != 2 or f.planes[f"23{setting}"].dim != 2:
                raise InvalidInputError(f"Planes of set {setting} are not two-dimensional")
            if linalg.norm(p14 + p23 - eye, 'fro') > self.tol.eq:
                raise InvalidInputError(f"14{setting} and 23{setting} are not complements")

    def _check_qubits(self, s_a: StateVector, s_b: StateVector) -> None:
        if s_a.dim != 2 or s_b.dim != 2:
            raise InvalidInputError(f"Local states must be qubits, got dims ({s_a.dim}, {s_b.dim})")

    def _check_two_qubit(self, s: BipartiteState) -> None:
        if (s.space.d_A, s.space.d_B) != (2, 2):
            raise InvalidInputError(
                f"CHSH sums need a 2x2 state, got ({s.space.d_A}, {s.space.d_B})")


def printed_matrix_spectrum(matrices: Tuple[np.ndarray, ...]) -> np.ndarray:
    """Ascending eigenvalues of sum(matrices) - 1 for four given 4x4 projectors"""
    m = sum(np.asarray(x, dtype=COMPLEX_DTYPE) for x in matrices) - np.eye(4)
    return linalg.eigvalsh(m)
