# -*- coding: utf-8 -*-
"""
Numerics Configuration

Tolerances, error types and random-stream helpers shared by every
module of the quantum Boole toolkit.

Features:
- Tolerances dataclass with documented defaults
- Domain error hierarchy (all ValueError subclasses)
- Deterministic child-stream derivation for Monte Carlo suites
- Complex matrix <-> JSON helpers ([re, im] pairs, row-major)
"""

from dataclasses import dataclass, asdict
from typing import Dict, List, Sequence

import numpy as np


# ============================================================================
# TOLERANCE DEFAULTS
# ============================================================================

# Singular values below TAU_RANK * sigma_max count as zero
DEFAULT_TAU_RANK = 1e-10

# Frobenius cutoff for matrix / subspace equality
DEFAULT_TAU_EQ = 1e-9

# Allowed deviation of a state norm from 1
DEFAULT_TAU_NORM = 1e-12

# Probabilities at or below this are treated as zero
DEFAULT_TAU_P = 1e-12

# Slack allowed when checking inequalities
DEFAULT_TAU_INEQ = 1e-9

COMPLEX_DTYPE = np.complex128


# ============================================================================
# ERRORS
# ============================================================================

class InvalidInputError(ValueError):
    """Non-finite entries, dimension mismatch, unnormalised state, bad sizes"""


class PreconditionError(ValueError):
    """An operation's mathematical precondition does not hold"""


class UnsupportedDimensionError(ValueError):
    """Dimension outside what the construction supports (e.g. even d)"""


class RejectedSeedError(ValueError):
    """Coherent-family seed is not generic"""


class UndefinedRankError(ValueError):
    """Rank window requested for a zero-probability branch"""


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True)
class Tolerances:
    """
    Numerical cutoffs used across the toolkit.

    Attributes:
        rank: relative singular-value cutoff (sigma_i > rank * sigma_max)
        eq: Frobenius cutoff for matrix equality
        norm: allowed deviation of a state norm from 1
        p: probability-zero cutoff
        ineq: slack for inequality checks
    """
    rank: float = DEFAULT_TAU_RANK
    eq: float = DEFAULT_TAU_EQ
    norm: float = DEFAULT_TAU_NORM
    p: float = DEFAULT_TAU_P
    ineq: float = DEFAULT_TAU_INEQ

    def __post_init__(self):
        validate_tolerances(self)

    def to_dict(self) -> Dict[str, float]:
        """Serialize to dictionary for report embedding"""
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict) -> 'Tolerances':
        """Deserialize from dictionary, missing keys take defaults"""
        return Tolerances(
            rank=float(data.get('rank', DEFAULT_TAU_RANK)),
            eq=float(data.get('eq', DEFAULT_TAU_EQ)),
            norm=float(data.get('norm', DEFAULT_TAU_NORM)),
            p=float(data.get('p', DEFAULT_TAU_P)),
            ineq=float(data.get('ineq', DEFAULT_TAU_INEQ)),
        )


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def validate_tolerances(tol: Tolerances) -> None:
    """
    Validates that every cutoff is finite and strictly positive.

    Raises:
        InvalidInputError: naming the first offending field
    """
    for name, value in asdict(tol).items():
        if not np.isfinite(value) or value <= 0:
            raise InvalidInputError(f"Tolerance '{name}' must be finite and > 0, got {value}")


DEFAULT_TOLERANCES = Tolerances()


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """
    Converts input to a 2-D complex128 array and rejects NaN/Inf.

    1-D input is treated as a single column.
    """
    arr = np.asarray(m, dtype=COMPLEX_DTYPE)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    """Returns a read-only copy so value types stay immutable"""
    out = np.array(arr, dtype=COMPLEX_DTYPE, copy=True)
    out.setflags(write=False)
    return out


def make_rng(seed) -> np.random.Generator:
    """Generator from an int, a SeedSequence, or an existing Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_rngs(master_seed, count: int) -> List[np.random.Generator]:
    """
    Derives `count` independent generators from a master seed.

    The i-th generator depends only on (master_seed, i), so results are
    identical however the trials are later scheduled.
    """
    seq = master_seed if isinstance(master_seed, np.random.SeedSequence) \
        else np.random.SeedSequence(master_seed)
    return [np.random.default_rng(child) for child in seq.spawn(count)]


def matrix_to_json(m: np.ndarray) -> List[List[List[float]]]:
    """Row-major nested list with every entry as a [re, im] pair"""
    arr = np.asarray(m, dtype=COMPLEX_DTYPE)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def matrix_from_json(data: Sequence) -> np.ndarray:
    """Inverse of matrix_to_json; plain real numbers are also accepted"""
    def entry(z):
        if isinstance(z, (list, tuple)):
            if len(z) != 2:
                raise InvalidInputError(f"Complex entry must be [re, im], got {z}")
            return complex(float(z[0]), float(z[1]))
        return complex(float(z))

    rows = [[entry(z) for z in row] for row in data]
    return as_complex_matrix(rows)
