# -*- coding: utf-8 -*-
"""
Command-Line Configuration

Run configuration, environment defaults and the reference values the
reproduction commands compare against. All values can be modified here
without changing code.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple
import logging
import os

import numpy as np

from numerics_config import DEFAULT_TOLERANCES, InvalidInputError, Tolerances

# ============================================================================
# ENVIRONMENT
# ============================================================================

ENV_SEED = 'QBOOLE_SEED'
ENV_LOG_LEVEL = 'QBOOLE_LOG_LEVEL'

DEFAULT_MASTER_SEED = 20240607
DEFAULT_LOG_LEVEL = 'WARNING'

# ============================================================================
# RUN DEFAULTS
# ============================================================================

SCHEMA_VERSION = 1

DEFAULT_DIMS = (3, 3)
DEFAULT_WORKERS = 1
DEFAULT_SEED_TRACE = 1

MIN_BIPARTITE_DIM = 2
MAX_BIPARTITE_DIM = 16

# ============================================================================
# SUITE WORKLOADS
# ============================================================================
# Used when --trials is not given; --trials replaces the per-unit count

# Lattice suite: triples per ambient dimension
LATTICE_DIM_RANGE = (2, 12)
LATTICE_TRIALS_PER_DIM = 1000

# Product-lattice suite: quadruples per dimension pair
BIPARTITE_SUITE_DIMS = ((2, 2), (2, 3), (3, 3))
BIPARTITE_TRIALS_PER_PAIR = 200

# CHSH suite: random unitaries, product states per unitary
CHSH_UNITARIES = 10
CHSH_STATES_PER_UNITARY = 1000

# Rank-bound suite: draws cycled over every pair in the range per side
MEASUREMENT_DIM_RANGE = (2, 4)
MEASUREMENT_DRAWS = 500

# Phase-space suite dimensions and random states for the POVM bound
PHASESPACE_DIMS = (3, 5, 7)
POVM_DIMS = (3, 3)
POVM_STATES = 50

SEARCH_TRIALS = 100
POVM_DEMO_TRIALS = 100

# ============================================================================
# COMPARISON TOLERANCES
# ============================================================================

# Printed eigenvalues are two-decimal values; they deviate from the exact
# spectrum of the printed matrices by up to 0.0088
DEFAULT_EIG_TOL = 0.01

FRACTION_TOL = 1e-10
MATRIX_ENTRY_TOL = 1e-12
STATE_TOL = 1e-9
LATTICE_RESIDUAL_TOL = 1e-8
VIOLATION_MARGIN = 1e-6
CHSH_VIOLATION_TARGET = 3.25

# ============================================================================
# CHSH REFERENCE VALUES (a = b = 1/sqrt(2))
# ============================================================================

PRINTED_CHSH_PROJECTORS = {
    '23W': [[0, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 0]],
    '23X': [[0.5, 0.5, 0, 0],
            [0.5, 0.5, 0, 0],
            [0, 0, 0.5, -0.5],
            [0, 0, -0.5, 0.5]],
    '23Y': [[0, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 0],
            [0, 0, 0, 1]],
    '14Z': [[0.5, 0, 0, 0.5],
            [0, 0.5, 0.5, 0],
            [0, 0.5, 0.5, 0],
            [0.5, 0, 0, 0.5]],
}

# Printed 23Y disagrees with span{U|1>|0>, U|0>|1>}; this is the span's projector
DEFINED_23Y_PROJECTOR = [[0.5, 0, 0.5, 0],
                         [0, 0.5, 0, -0.5],
                         [0.5, 0, 0.5, 0],
                         [0, -0.5, 0, 0.5]]

PRINTED_CHSH_EIGENVALUES = (-0.30, 0.45, 1.55, 2.30)

EXACT_CHSH_SPECTRUM = (1.0 - np.sqrt(2.0), 1.0, 1.0, 1.0 + np.sqrt(2.0))

# ============================================================================
# MEASUREMENT EXAMPLE (3 x 3)
# ============================================================================

MEASUREMENT_COEFFICIENTS = [[1, 2, 0],
                            [0, 1, 0],
                            [0, 0, 3]]

MEASUREMENT_SIDE_A = [[0, 1], [2]]
MEASUREMENT_SIDE_B = [[0], [1, 2]]

MEASUREMENT_PROBABILITIES = {
    (0, 0): 1.0 / 15.0,
    (0, 1): 1.0 / 3.0,
    (1, 0): 0.0,
    (1, 1): 3.0 / 5.0,
}

# Expected collapsed coefficient matrices (unnormalised)
MEASUREMENT_COLLAPSED = {
    (0, 0): [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
    (0, 1): [[0, 2, 0], [0, 1, 0], [0, 0, 0]],
    (1, 1): [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
}

MEASUREMENT_REDUCTION = 2
MEASUREMENT_R_AVE = 2.0
MEASUREMENT_BOUND = 8.0 / 3.0
MEASUREMENT_STATE_RANK = 3


# ============================================================================
# ENUMS
# ============================================================================

class Command(Enum):
    REPRODUCE_CHSH = 'reproduce-chsh'
    REPRODUCE_MEASUREMENT = 'reproduce-measurement'
    VERIFY = 'verify'
    SEARCH_VIOLATIONS = 'search-violations'
    POVM_DEMO = 'povm-demo'


class OutputFormat(Enum):
    JSON = 'json'
    CSV = 'csv'
    TEXT = 'text'


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """
    Resolved settings of one CLI run.

    Attributes:
        command: subcommand
        dims: (d_A, d_B)
        trials: per-unit trial count for every suite (None keeps each
                suite's own workload)
        master_seed: root of every random stream
        tolerances: numerical cutoffs
        output_format: json, csv or text
        output_path: None writes to stdout
        workers: thread count for trial fan-out
        include_timing: embed wall-clock duration in the report
        log_level: logging level name
        eig_tol: tolerance for the printed CHSH eigenvalues
        trace: coherent seed trace for povm-demo
    """
    command: Command
    dims: Tuple[int, int] = DEFAULT_DIMS
    trials: Optional[int] = None
    master_seed: int = DEFAULT_MASTER_SEED
    tolerances: Tolerances = field(default_factory=lambda: DEFAULT_TOLERANCES)
    output_format: OutputFormat = OutputFormat.JSON
    output_path: Optional[str] = None
    workers: int = DEFAULT_WORKERS
    include_timing: bool = False
    log_level: str = DEFAULT_LOG_LEVEL
    eig_tol: float = DEFAULT_EIG_TOL
    trace: int = DEFAULT_SEED_TRACE

    def __post_init__(self):
        validate_run_config(self)

    def trials_or(self, default: int) -> int:
        return default if self.trials is None else self.trials

    def to_dict(self) -> Dict:
        """Echo embedded in every report; output routing and workers are left out"""
        return {
            'command': self.command.value,
            'dims': list(self.dims),
            'trials': self.trials,
            'master_seed': self.master_seed,
            'tolerances': self.tolerances.to_dict(),
            'eig_tol': self.eig_tol,
            'trace': self.trace,
        }


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def validate_run_config(config: RunConfig) -> None:
    """
    Raises:
        InvalidInputError: trials < 1, workers < 1, dims out of range,
                           bad seed, eig_tol <= 0 or trace < 1
    """
    if config.trials is not None and config.trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {config.trials}")
    if config.workers < 1:
        raise InvalidInputError(f"workers must be >= 1, got {config.workers}")
    if len(config.dims) != 2:
        raise InvalidInputError(f"dims must be two values, got {config.dims}")
    for d in config.dims:
        if not MIN_BIPARTITE_DIM <= d <= MAX_BIPARTITE_DIM:
            raise InvalidInputError(
                f"Each dim must lie in [{MIN_BIPARTITE_DIM}, {MAX_BIPARTITE_DIM}], got {d}")
    if not 0 <= config.master_seed < 2 ** 64:
        raise InvalidInputError(f"Seed must be a 64-bit unsigned integer, got {config.master_seed}")
    if not config.eig_tol > 0:
        raise InvalidInputError(f"eig_tol must be > 0, got {config.eig_tol}")
    if config.trace < 1:
        raise InvalidInputError(f"trace must be >= 1, got {config.trace}")


def resolve_seed(flag_value: Optional[int]) -> int:
    """--seed, then $QBOOLE_SEED, then the built-in default"""
    if flag_value is not None:
        return int(flag_value)
    env_value = os.getenv(ENV_SEED)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            raise InvalidInputError(f"{ENV_SEED} must be an integer, got {env_value!r}")
    return DEFAULT_MASTER_SEED


def resolve_log_level(flag_value: Optional[str]) -> str:
    """--log-level, then $QBOOLE_LOG_LEVEL, then WARNING"""
    name = (flag_value or os.getenv(ENV_LOG_LEVEL) or DEFAULT_LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(name), int):
        raise InvalidInputError(f"Unknown log level {name!r}")
    return name
