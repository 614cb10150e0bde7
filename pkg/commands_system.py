# -*- coding: utf-8 -*-
"""
CLI Commands

Reproduction runs, randomized invariant suites and violation searches,
each producing a Report of named checks.

Features:
- reproduce-chsh / reproduce-measurement against the reference values
- verify: lattice, bipartite, chsh, measurement and phase-space suites
- search-violations: CHSH unitary grid plus random classical-Boole search
- povm-demo: coherent POVM rank reductions and the trace trend

Every random draw comes from a child stream of the master seed indexed by
(suite, trial), so payloads do not depend on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, Tuple
import logging

import numpy as np
from scipy import linalg

from numerics_config import child_rngs
from hilbert_system import SubspaceManager
from lattice_system import QuantumBooleCalculator
from bipartite_system import BipartiteSpace, EntanglementAnalyzer, random_local_unitaries
from chsh_system import (
    BOOLE_PLANES,
    CHSH_CLASSICAL_BOUND,
    ChshCalculator,
    LocalUnitary,
    balanced_unitary,
    printed_matrix_spectrum,
)
from measurement_system import (
    MeasurementSimulator,
    OrthogonalDecomposition,
    ProductMeasurement,
    random_decomposition,
)
from phasespace_system import PhaseSpaceManager, validate_odd_dimension
from report_system import Report
import cli_config as cfg

logger = logging.getLogger(__name__)

# Independent random streams, one per suite
SUITE_STREAMS = ('lattice', 'bipartite', 'chsh', 'measurement', 'phasespace',
                 'violations', 'povm')

# Coefficient matrices spanning {[[a, b, 0], [0, a, b], [0, 0, 0]]}
MIN_RANK_EXAMPLE = (
    [[1, 0, 0], [0, 1, 0], [0, 0, 0]],
    [[0, 1, 0], [0, 0, 1], [0, 0, 0]],
)
MIN_RANK_EXAMPLE_RANK = 2

SEARCH_MODULI = tuple(sorted([0.1 * i for i in range(1, 10)] + [1.0 / np.sqrt(2.0)]))
SEARCH_PHASES = (0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4)


def phase_distance(x: np.ndarray, y: np.ndarray) -> float:
    """min over global phases phi of ||x - phi y|| for unit vectors"""
    overlap = np.vdot(y, x)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(linalg.norm(x - phase * y))


# ============================================================================
# COMMAND RUNNER
# ============================================================================

class CommandRunner:
    """
    Executes one subcommand for a resolved RunConfig.
    """

    def __init__(self, config: cfg.RunConfig):
        self.config = config
        self.tol = config.tolerances
        self.subspaces = SubspaceManager(self.tol)
        self.lattice = QuantumBooleCalculator(self.tol, self.subspaces)
        self.analyzer = EntanglementAnalyzer(self.tol, self.subspaces)
        self.chsh = ChshCalculator(self.tol, self.subspaces)
        self.simulator = MeasurementSimulator(self.tol, self.subspaces)
        self.phasespace = PhaseSpaceManager(self.tol, self.subspaces)

    def run(self) -> Report:
        handlers = {
            cfg.Command.REPRODUCE_CHSH: self.cmd_reproduce_chsh,
            cfg.Command.REPRODUCE_MEASUREMENT: self.cmd_reproduce_measurement,
            cfg.Command.VERIFY: self.cmd_verify,
            cfg.Command.SEARCH_VIOLATIONS: self.cmd_search_violations,
            cfg.Command.POVM_DEMO: self.cmd_povm_demo,
        }
        logger.info(f"Running {self.config.command.value} with seed {self.config.master_seed}")
        return handlers[self.config.command]()

    def _new_report(self) -> Report:
        return Report(command=self.config.command.value, config=self.config.to_dict())

    # ========================================================================
    # reproduce-chsh
    # ========================================================================

    def cmd_reproduce_chsh(self) -> Report:
        """
        Balanced-unitary family against the reference projectors, printed
        and exact spectra of M, empty Frechet meet, and the rank-two violator.
        """
        report = self._new_report()
        sm = self.subspaces
        u = balanced_unitary()
        family = self.chsh.build_family(u)

        expected = dict(cfg.PRINTED_CHSH_PROJECTORS)
        expected['23Y'] = cfg.DEFINED_23Y_PROJECTOR
        for plane in BOOLE_PLANES:
            matrix = sm.projector(family.planes[plane]).matrix
            deviation = float(np.max(np.abs(matrix - np.asarray(expected[plane]))))
            source = 'definition' if plane == '23Y' else 'printed'
            report.check_close(f"projector_{plane.lower()}_{source}", deviation, 0.0,
                               cfg.MATRIX_ENTRY_TOL)
        built_23y = sm.projector(family.planes['23Y']).matrix
        report.data['printed_23y_deviation'] = float(
            np.max(np.abs(built_23y - np.asarray(cfg.PRINTED_CHSH_PROJECTORS['23Y']))))

        printed = printed_matrix_spectrum(
            tuple(np.asarray(cfg.PRINTED_CHSH_PROJECTORS[p]) for p in BOOLE_PLANES))
        for i, (observed, reference) in enumerate(zip(printed, cfg.PRINTED_CHSH_EIGENVALUES)):
            report.check_close(f"printed_eigenvalue_{i}", observed, reference, self.config.eig_tol)

        m = self.chsh.boole_matrix(u, family)
        report.check_close('boole_matrix_trace', float(np.trace(m).real), 4.0, self.tol.eq)
        exact = sm.hermitian_eigenvalues(m)
        for i, (observed, reference) in enumerate(zip(exact, cfg.EXACT_CHSH_SPECTRUM)):
            report.check_close(f"exact_eigenvalue_{i}", observed, reference, self.tol.eq)

        lemma = self.chsh.lemma1_check(family)
        report.check_equal('frechet_meet_dim', lemma.meet_dim, 0)
        report.check_equal('complement_join_dim', lemma.join_dim, 4)

        violation = self.chsh.find_violation(u)
        report.data['violation'] = violation.to_dict()
        report.data['printed_spectrum'] = [float(x) for x in printed]
        report.data['exact_spectrum'] = [float(x) for x in exact]
        report.check_equal('violation_found', violation.found, True)
        if not violation.found:
            return report

        report.check_at_least('violation_chsh_sum', violation.chsh_sum,
                              cfg.CHSH_VIOLATION_TARGET)
        report.check_equal('violation_schmidt_rank', violation.schmidt_rank, 2)
        report.check_close('violation_chsh_from_eigenvalue', violation.chsh_sum,
                           CHSH_CLASSICAL_BOUND - violation.lambda_min, self.tol.ineq)

        product = self.chsh.closest_product_state(violation.state)
        report.check_at_most('product_projection_chsh_sum',
                             self.chsh.chsh_sum(product, family).chsh_sum,
                             CHSH_CLASSICAL_BOUND, self.tol.ineq)

        frechet = self.lattice.frechet_sum_check(violation.state.amplitudes,
                                                 self.chsh.frechet_family(family))
        report.check_close('frechet_total_matches_chsh', frechet.total, violation.chsh_sum,
                           self.tol.ineq)
        report.check_equal('frechet_bound_holds', frechet.frechet_holds, False)
        report.check_equal('complement_boole_holds', frechet.boole_holds, False)
        return report

    # ========================================================================
    # reproduce-measurement
    # ========================================================================

    def cmd_reproduce_measurement(self) -> Report:
        """Three-by-three rank-reduction example"""
        report = self._new_report()
        s = self.analyzer.state_from_coefficients(cfg.MEASUREMENT_COEFFICIENTS)
        report.check_equal('state_schmidt_rank', self.analyzer.schmidt_rank(s).rank,
                           cfg.MEASUREMENT_STATE_RANK)

        d_a, d_b = s.space.d_A, s.space.d_B
        decomp_a = OrthogonalDecomposition.from_index_sets(d_a, cfg.MEASUREMENT_SIDE_A, self.tol)
        decomp_b = OrthogonalDecomposition.from_index_sets(d_b, cfg.MEASUREMENT_SIDE_B, self.tol)
        labels = np.arange(len(decomp_a) * len(decomp_b), dtype=float).reshape(
            len(decomp_a), len(decomp_b))
        measurement = ProductMeasurement(decomp_a, decomp_b, labels)
        result = self.simulator.measure_all(s, measurement)

        for o in result.outcomes:
            tag = f"{o.a + 1}{o.b + 1}"
            report.check_close(f"p_{tag}", o.p_ab, cfg.MEASUREMENT_PROBABILITIES[(o.a, o.b)],
                               cfg.FRACTION_TOL)
            expected_coeff = cfg.MEASUREMENT_COLLAPSED.get((o.a, o.b))
            if expected_coeff is None:
                report.check_equal(f"collapsed_{tag}_empty", o.collapsed is None, True)
                continue
            if o.collapsed is None:
                report.check_equal(f"collapsed_{tag}_present", False, True)
                continue
            target = np.asarray(expected_coeff, dtype=complex).reshape(-1)
            target = target / linalg.norm(target)
            report.check_close(f"collapsed_{tag}",
                               phase_distance(o.collapsed.amplitudes.amplitudes, target),
                               0.0, cfg.STATE_TOL)
            report.check_equal(f"reduction_{tag}", o.reduction, cfg.MEASUREMENT_REDUCTION)
            lo, hi = self.simulator.sylvester_bounds(
                s, decomp_a.projectors[o.a], decomp_b.projectors[o.b])
            report.check_equal(f"sylvester_window_{tag}", lo <= o.rank_after <= hi, True)

        report.check_close('total_probability', result.total_probability, 1.0, cfg.FRACTION_TOL)
        report.check_close('r_ave', result.r_ave, cfg.MEASUREMENT_R_AVE, cfg.FRACTION_TOL)
        report.check_close('upper_bound', result.upper_bound, cfg.MEASUREMENT_BOUND,
                           cfg.FRACTION_TOL)

        report.data['measurement'] = result.to_dict()
        report.data['outcome_expectation'] = self.simulator.outcome_expectation(s, measurement)
        return report

    # ========================================================================
    # verify
    # ========================================================================

    def cmd_verify(self) -> Report:
        report = self._new_report()
        self._verify_lattice(report)
        self._verify_bipartite(report)
        self._verify_chsh(report)
        self._verify_measurement(report)
        self._verify_phasespace(report)
        return report

    # ------------------------------------------------------------------
    # lattice suite
    # ------------------------------------------------------------------

    def _verify_lattice(self, report: Report) -> None:
        lo, hi = cfg.LATTICE_DIM_RANGE
        per_dim = self.config.trials_or(cfg.LATTICE_TRIALS_PER_DIM)
        rows = self._fan_out(self._lattice_trial,
                             self._suite_rngs('lattice', per_dim * (hi - lo + 1)))
        report.check_at_most('lattice_trace_residual', _max(rows, 'trace_residual'),
                             0.0, cfg.LATTICE_RESIDUAL_TOL)
        report.check_at_most('lattice_commutator_residual', _max(rows, 'commutator_residual'),
                             0.0, cfg.LATTICE_RESIDUAL_TOL)
        report.check_at_most('lattice_antisymmetry_residual', _max(rows, 'antisymmetry_residual'),
                             0.0, cfg.LATTICE_RESIDUAL_TOL)
        report.check_at_least('lattice_lower_slack', _min(rows, 'lower_slack'),
                              0.0, self.tol.ineq)
        report.check_at_least('lattice_upper_slack', _min(rows, 'upper_slack'),
                              0.0, self.tol.ineq)
        report.check_equal('lattice_flagged_classical_violations',
                           sum(1 for r in rows if r['flagged'] and r['classical_violated']), 0)
        report.data['lattice'] = {
            'dims': [lo, hi],
            'trials_per_dim': per_dim,
            'trials': len(rows),
            'flagged_trials': sum(1 for r in rows if r['flagged']),
            'classical_violations': sum(1 for r in rows if r['classical_violated']),
        }

    def _lattice_trial(self, index: int, rng: np.random.Generator) -> Dict:
        """
        Consecutive blocks of trials share an ambient dimension; inside a
        block trials cycle four constructions: generic subspaces, commuting
        coordinate subspaces, a state orthogonal to the join, and a state
        inside the meet.
        """
        sm = self.subspaces
        dim = cfg.LATTICE_DIM_RANGE[0] + index // self.config.trials_or(cfg.LATTICE_TRIALS_PER_DIM)
        variant = index % 4

        if variant == 1:
            h1 = sm.coordinate_subspace(dim, rng.permutation(dim)[:rng.integers(1, dim + 1)])
            h2 = sm.coordinate_subspace(dim, rng.permutation(dim)[:rng.integers(1, dim + 1)])
            s = sm.random_state(dim, rng)
        elif variant == 2 and dim >= 3:
            h1 = sm.random_subspace(dim, 1, rng)
            h2 = sm.random_subspace(dim, 1, rng)
            outside = sm.complement(sm.join(h1, h2))
            c = rng.standard_normal(outside.dim) + 1j * rng.standard_normal(outside.dim)
            s = sm.make_state(outside.basis @ c, normalize=True)
        elif variant == 3 and dim >= 3:
            shared = sm.random_state(dim, rng).amplitudes
            h1 = sm.span(shared, sm.random_state(dim, rng).amplitudes)
            h2 = sm.span(shared, sm.random_state(dim, rng).amplitudes)
            s = sm.make_state(shared, normalize=True)
        else:
            h1 = sm.random_subspace(dim, int(rng.integers(1, dim + 1)), rng)
            h2 = sm.random_subspace(dim, int(rng.integers(1, dim + 1)), rng)
            s = sm.random_state(dim, rng)

        correction = self.lattice.correction_operator(h1, h2)
        bounds = self.lattice.quantum_bounds(s, h1, h2)
        upper_margin = bounds.classical_upper - bounds.p_join
        lower_margin = bounds.p_join - bounds.classical_lower
        return {
            'trace_residual': abs(correction.trace) / dim,
            'commutator_residual': self.lattice.commutator_residual(h1, h2),
            'antisymmetry_residual': self.lattice.complement_antisymmetry_residual(h1, h2),
            'lower_slack': bounds.lower_slack,
            'upper_slack': bounds.upper_slack,
            'flagged': bounds.conditions.any(),
            'classical_violated': min(upper_margin, lower_margin) < -self.tol.ineq,
        }

    # ------------------------------------------------------------------
    # bipartite suite
    # ------------------------------------------------------------------

    def _verify_bipartite(self, report: Report) -> None:
        pairs = self._bipartite_pairs()
        per_pair = self.config.trials_or(cfg.BIPARTITE_TRIALS_PER_PAIR)
        rngs = self._suite_rngs('bipartite', per_pair * len(pairs) + 1)
        rows = self._fan_out(self._bipartite_trial, rngs[1:])
        report.check_at_most('product_lattice_residual', _max(rows, 'lattice_residual'),
                             0.0, cfg.LATTICE_RESIDUAL_TOL)
        report.check_equal('product_inclusions_hold', all(r['inclusions'] for r in rows), True)
        report.check_equal('orthocomplement_split_mismatches',
                           sum(1 for r in rows if not r['split_consistent']), 0)
        report.check_at_most('schmidt_local_unitary_residual', _max(rows, 'invariance'),
                             0.0, self.tol.eq)
        report.check_at_most('bipartite_boole_kronecker_residual', _max(rows, 'kronecker_residual'),
                             0.0, cfg.LATTICE_RESIDUAL_TOL)
        report.check_at_most('bipartite_boole_commutator_residual',
                             _max(rows, 'boole_commutator_residual'), 0.0, cfg.LATTICE_RESIDUAL_TOL)
        report.check_at_least('bipartite_boole_quantum_margin', _min(rows, 'quantum_margin'),
                              0.0, self.tol.ineq)
        report.check_equal('bipartite_boole_local_violations',
                           sum(1 for r in rows if r['local_violation']), 0)

        space = BipartiteSpace(3, 3)
        h = self.subspaces.orthonormalize(
            np.column_stack([np.asarray(m, dtype=complex).reshape(-1) for m in MIN_RANK_EXAMPLE]))
        result = self.analyzer.min_rank(h, space, rng=rngs[0])
        report.check_equal('min_rank_example_upper_bound', result.upper_bound, MIN_RANK_EXAMPLE_RANK)
        report.check_equal('min_rank_example_converged', result.converged, True)
        report.data['min_rank_example'] = result.to_dict()
        report.data['bipartite'] = {
            'dim_pairs': [list(p) for p in pairs],
            'trials_per_pair': per_pair,
            'trials': len(rows),
        }

    def _bipartite_pairs(self) -> List[Tuple[int, int]]:
        """Fixed pairs plus --dims when it is not one of them"""
        pairs = list(cfg.BIPARTITE_SUITE_DIMS)
        if tuple(self.config.dims) not in pairs:
            pairs.append(tuple(self.config.dims))
        return pairs

    def _bipartite_trial(self, index: int, rng: np.random.Generator) -> Dict:
        sm = self.subspaces
        per_pair = self.config.trials_or(cfg.BIPARTITE_TRIALS_PER_PAIR)
        d_a, d_b = self._bipartite_pairs()[index // per_pair]
        space = BipartiteSpace(d_a, d_b)

        def draw(d):
            return sm.random_subspace(d, int(rng.integers(1, d + 1)), rng)

        h1A, h2A, h1B, h2B = draw(d_a), draw(d_a), draw(d_b), draw(d_b)
        lattice = self.analyzer.verify_product_lattice(h1A, h2A, h1B, h2B)
        inclusions = self.analyzer.verify_inclusions(h1A, h2A, h1B, h2B)
        split = self.analyzer.verify_orthocomplement_split(h1A, h1B)
        both_full = h1A.is_full() and h1B.is_full()

        s = self.analyzer.random_state(space, rng)
        u_a, u_b = random_local_unitaries(sm, space, rng)
        boole = self.lattice.bipartite_boole(s.amplitudes, h1A, h1B, h2A, h2B)
        return {
            'lattice_residual': lattice.max_residual,
            'inclusions': inclusions.meet_inclusion and inclusions.join_inclusion,
            'split_consistent': split['differs'] == (not both_full),
            'invariance': self.analyzer.local_unitary_invariance(s, u_a, u_b),
            'kronecker_residual': boole.kronecker_form_residual,
            'boole_commutator_residual': boole.commutator_residual,
            'quantum_margin': boole.quantum_upper_margin,
            'local_violation': boole.locally_commuting and boole.classical_upper_margin < -self.tol.ineq,
        }

    # ------------------------------------------------------------------
    # chsh suite
    # ------------------------------------------------------------------

    def _verify_chsh(self, report: Report) -> None:
        rows = self._fan_out(self._chsh_trial, self._suite_rngs('chsh', cfg.CHSH_UNITARIES))
        report.check_at_least('product_omega_min', _min(rows, 'omega_min'), 0.0, self.tol.ineq)
        report.check_at_most('product_chsh_sum_max', _max(rows, 'chsh_max'),
                             CHSH_CLASSICAL_BOUND, self.tol.ineq)
        report.check_at_most('omega_identity_residual', _max(rows, 'omega_residual'),
                             0.0, self.tol.ineq)
        report.check_at_most('chsh_matrix_residual', _max(rows, 'matrix_residual'),
                             0.0, self.tol.ineq)
        report.check_at_most('plane_consistency_residual', _max(rows, 'plane_residual'),
                             0.0, self.tol.ineq)
        # Omega' is sign-indefinite on product states: both signs must show up
        report.check_at_most('omega_prime_min', _min(rows, 'omega_prime_min'), -cfg.VIOLATION_MARGIN)
        report.check_at_least('omega_prime_max', _max(rows, 'omega_prime_max'), cfg.VIOLATION_MARGIN)
        report.data['chsh'] = {
            'unitaries': len(rows),
            'states': sum(r['states'] for r in rows),
            'omega_prime_min': _min(rows, 'omega_prime_min'),
            'omega_prime_max': _max(rows, 'omega_prime_max'),
        }

    def _chsh_trial(self, index: int, rng: np.random.Generator) -> Dict:
        sm = self.subspaces
        u = LocalUnitary.from_polar(float(rng.uniform(0.05, 0.95)),
                                    float(rng.uniform(0.0, 2 * np.pi)))
        family = self.chsh.build_family(u)
        stats = {'omega_min': np.inf, 'chsh_max': -np.inf, 'omega_residual': 0.0,
                 'matrix_residual': 0.0, 'plane_residual': 0.0,
                 'omega_prime_min': np.inf, 'omega_prime_max': -np.inf,
                 'states': self.config.trials_or(cfg.CHSH_STATES_PER_UNITARY)}
        for _ in range(stats['states']):
            s_a = sm.random_state(2, rng)
            s_b = sm.random_state(2, rng)
            state = self.analyzer.product_state(s_a.amplitudes, s_b.amplitudes)
            omega = self.chsh.omega(s_a, s_b, u).omega
            chsh = self.chsh.chsh_sum(state, family)
            omega_prime = self.chsh.omega_prime(s_a, s_b, u, family)
            stats['omega_min'] = min(stats['omega_min'], omega)
            stats['chsh_max'] = max(stats['chsh_max'], chsh.chsh_sum)
            stats['omega_residual'] = max(stats['omega_residual'], abs(chsh.omega - omega))
            stats['matrix_residual'] = max(stats['matrix_residual'], chsh.matrix_residual)
            stats['plane_residual'] = max(stats['plane_residual'],
                                          self.chsh.plane_consistency(state, family))
            stats['omega_prime_min'] = min(stats['omega_prime_min'], omega_prime)
            stats['omega_prime_max'] = max(stats['omega_prime_max'], omega_prime)
        return stats

    # ------------------------------------------------------------------
    # measurement suite
    # ------------------------------------------------------------------

    def _verify_measurement(self, report: Report) -> None:
        draws = self.config.trials_or(cfg.MEASUREMENT_DRAWS)
        rows = self._fan_out(self._measurement_trial, self._suite_rngs('measurement', draws))
        report.check_equal('sylvester_window_misses',
                           sum(1 for r in rows if not r['in_window']), 0)
        report.check_equal('one_sided_window_misses',
                           sum(1 for r in rows if not r['in_one_sided_window']), 0)
        report.check_equal('frobenius_chain_violations',
                           sum(1 for r in rows if not r['frobenius']), 0)
        report.check_equal('reduction_bound_violations',
                           sum(1 for r in rows if not r['within_bounds']), 0)
        report.check_at_least('average_reduction_margin', _min(rows, 'average_margin'),
                              0.0, self.tol.ineq)
        report.check_at_most('measurement_probability_residual',
                             _max(rows, 'probability_residual'), 0.0, self.tol.eq)
        report.data['measurement'] = {
            'dim_pairs': [list(p) for p in self._measurement_pairs()],
            'trials': len(rows),
            'empty_branches': sum(1 for r in rows if r['empty_branch']),
        }

    def _measurement_pairs(self) -> List[Tuple[int, int]]:
        """Every (d_A, d_B) in the suite range, plus --dims when outside it"""
        lo, hi = cfg.MEASUREMENT_DIM_RANGE
        pairs = [(a, b) for a in range(lo, hi + 1) for b in range(lo, hi + 1)]
        if tuple(self.config.dims) not in pairs:
            pairs.append(tuple(self.config.dims))
        return pairs

    def _measurement_trial(self, index: int, rng: np.random.Generator) -> Dict:
        sm = self.subspaces
        pairs = self._measurement_pairs()
        d_a, d_b = pairs[index % len(pairs)]
        space = BipartiteSpace(d_a, d_b)
        rank = int(rng.integers(1, min(d_a, d_b) + 1))
        s = self.analyzer.random_state_of_rank(space, rank, rng)
        p_a = sm.projector(sm.random_subspace(d_a, int(rng.integers(1, d_a + 1)), rng))
        p_b = sm.projector(sm.random_subspace(d_b, int(rng.integers(1, d_b + 1)), rng))

        collapse = self.simulator.collapse(s, p_a, p_b)
        empty = collapse.state is None
        in_window = True
        if not empty:
            lo, hi = self.simulator.sylvester_bounds(s, p_a, p_b)
            in_window = lo <= self.analyzer.schmidt_rank(collapse.state).rank <= hi

        in_one_sided = True
        one_sided = self.simulator.collapse(s, p_a, sm.identity_projector(d_b))
        if one_sided.state is not None:
            lo, hi = self.simulator.one_sided_window(s, p_a, 'A')
            in_one_sided = lo <= self.analyzer.schmidt_rank(one_sided.state).rank <= hi

        reductions = self.simulator.rank_reductions(s, p_a, p_b)

        decomp_a = random_decomposition(sm, d_a, int(rng.integers(1, d_a + 1)), rng)
        decomp_b = random_decomposition(sm, d_b, int(rng.integers(1, d_b + 1)), rng)
        labels = np.arange(len(decomp_a) * len(decomp_b), dtype=float).reshape(
            len(decomp_a), len(decomp_b))
        result = self.simulator.measure_all(s, ProductMeasurement(decomp_a, decomp_b, labels))
        return {
            'empty_branch': empty,
            'in_window': in_window,
            'in_one_sided_window': in_one_sided,
            'frobenius': reductions.frobenius_chain_holds(),
            'within_bounds': reductions.within_bounds(),
            'average_margin': result.upper_bound - result.r_ave,
            'probability_residual': abs(result.total_probability - 1.0),
        }

    # ------------------------------------------------------------------
    # phase-space suite
    # ------------------------------------------------------------------

    def _verify_phasespace(self, report: Report) -> None:
        ps = self.phasespace
        n_states = self.config.trials_or(cfg.POVM_STATES)
        rngs = self._suite_rngs('phasespace', len(cfg.PHASESPACE_DIMS) + 1 + n_states)

        for d, rng in zip(cfg.PHASESPACE_DIMS, rngs):
            system = ps.weyl_system(d)
            report.check_at_most(f"weyl_residual_d{d}", max(ps.weyl_residuals(system).values()),
                                 0.0, self.tol.eq)
            family = ps.coherent_family(system, ps.generic_seed(system, 1, rng))
            report.check_at_most(f"coherent_resolution_d{d}", ps.resolution_residual(family),
                                 0.0, self.tol.eq)
            report.check_equal(f"coherent_member_count_d{d}", len(family.members), d * d)

        fam_a, fam_b = self._povm_families(cfg.POVM_DIMS, 1, rngs[len(cfg.PHASESPACE_DIMS)])
        bound = ps.povm_bound(fam_a, fam_b)
        space = BipartiteSpace(*cfg.POVM_DIMS)

        def trial(index: int, rng: np.random.Generator) -> Dict:
            result = ps.povm_measure(self.analyzer.random_state(space, rng), fam_a, fam_b)
            return {'margin': bound - result.r_ave,
                    'probability_residual': abs(result.total_probability - 1.0)}

        rows = self._fan_out(trial, rngs[len(cfg.PHASESPACE_DIMS) + 1:])
        report.check_at_least('povm_bound_margin', _min(rows, 'margin'), 0.0, self.tol.ineq)
        report.check_at_most('povm_probability_residual', _max(rows, 'probability_residual'),
                             0.0, self.tol.eq)

    # ========================================================================
    # search-violations
    # ========================================================================

    def cmd_search_violations(self) -> Report:
        """
        Sweeps the local unitary over (|a|, phase) and random-searches
        line pairs for negative classical Boole margins.
        """
        report = self._new_report()
        grid = []
        balanced = None
        for modulus in SEARCH_MODULI:
            for phase in SEARCH_PHASES:
                u = LocalUnitary.from_polar(modulus, phase)
                result = self.chsh.find_violation(u)
                entry = {'modulus': modulus, 'phase': phase, 'violation': result.to_dict()}
                if result.found:
                    product = self.chsh.closest_product_state(result.state)
                    family = self.chsh.build_family(u)
                    entry['product_chsh_sum'] = self.chsh.chsh_sum(product, family).chsh_sum
                    entry['eigenvalue_residual'] = abs(
                        result.chsh_sum - (CHSH_CLASSICAL_BOUND - result.lambda_min))
                if phase == 0.0 and abs(modulus - 1.0 / np.sqrt(2.0)) < 1e-12:
                    balanced = result
                grid.append(entry)

        found = [e for e in grid if e['violation']['found']]
        report.check_at_least('chsh_violations_found', len(found), 1)
        report.check_equal('balanced_violation_found', balanced.found, True)
        if balanced.found:
            report.check_at_least('balanced_chsh_sum', balanced.chsh_sum, cfg.CHSH_VIOLATION_TARGET)
            report.check_equal('balanced_schmidt_rank', balanced.schmidt_rank, 2)
        if found:
            report.check_at_most('product_projection_chsh_sum_max',
                                 max(e['product_chsh_sum'] for e in found),
                                 CHSH_CLASSICAL_BOUND, self.tol.ineq)
            report.check_at_most('chsh_eigenvalue_residual',
                                 max(e['eigenvalue_residual'] for e in found), 0.0, self.tol.ineq)

        rows = self._fan_out(self._boole_search_trial,
                             self._suite_rngs('violations', self.config.trials_or(cfg.SEARCH_TRIALS)))
        violations = [r for r in rows if r['upper_margin'] < -cfg.VIOLATION_MARGIN]
        report.check_at_least('classical_boole_violations', len(violations), 1)
        report.check_at_least('quantum_upper_slack_min', _min(rows, 'upper_slack'),
                              0.0, self.tol.ineq)

        report.data['grid'] = grid
        report.data['boole_search'] = {
            'trials': len(rows),
            'violations': len(violations),
            'best_margin': _min(rows, 'upper_margin'),
        }
        logger.info(f"Search finished: {len(found)} CHSH violations, "
                    f"{len(violations)} classical Boole violations")
        return report

    def _boole_search_trial(self, index: int, rng: np.random.Generator) -> Dict:
        sm = self.subspaces
        dim = self.config.dims[0]
        h1 = sm.random_subspace(dim, 1, rng)
        h2 = sm.random_subspace(dim, 1, rng)
        s = sm.random_state(dim, rng)
        bounds = self.lattice.quantum_bounds(s, h1, h2)
        return {'upper_margin': bounds.classical_upper - bounds.p_join,
                'upper_slack': bounds.upper_slack}

    # ========================================================================
    # povm-demo
    # ========================================================================

    def cmd_povm_demo(self) -> Report:
        """
        Raises:
            UnsupportedDimensionError: a dimension is even
            InvalidInputError: trace outside [1, d - 1]
        """
        report = self._new_report()
        ps = self.phasespace
        for d in self.config.dims:
            validate_odd_dimension(d)
        rngs = self._suite_rngs('povm', self.config.trials_or(cfg.POVM_DEMO_TRIALS) + 2)
        fam_a, fam_b = self._povm_families(self.config.dims, self.config.trace, rngs[0])
        report.check_at_most('resolution_residual_a', ps.resolution_residual(fam_a), 0.0, self.tol.eq)
        report.check_at_most('resolution_residual_b', ps.resolution_residual(fam_b), 0.0, self.tol.eq)

        bound = ps.povm_bound(fam_a, fam_b)
        space = BipartiteSpace(*self.config.dims)

        def trial(index: int, rng: np.random.Generator) -> Dict:
            result = ps.povm_measure(self.analyzer.random_state(space, rng), fam_a, fam_b)
            return {'r_ave': result.r_ave,
                    'report_bound': result.upper_bound,
                    'probability_residual': abs(result.total_probability - 1.0)}

        rows = self._fan_out(trial, rngs[2:])
        report.check_at_most('r_ave_max', _max(rows, 'r_ave'), float(bound), self.tol.ineq)
        report.check_at_most('bound_residual',
                             max(abs(r['report_bound'] - bound) for r in rows), 0.0, self.tol.eq)
        report.check_at_most('probability_residual', _max(rows, 'probability_residual'),
                             0.0, self.tol.eq)

        trend_rng = rngs[1]
        state = self.analyzer.random_state(space, trend_rng)
        traces = range(1, min(self.config.dims))
        report.data['bound'] = bound
        report.data['r_ave'] = [r['r_ave'] for r in rows]
        report.data['trace_trend'] = ps.trace_trend(state, traces, trend_rng)
        return report

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def _povm_families(self, dims: Sequence[int], trace: int, rng: np.random.Generator):
        ps = self.phasespace
        sys_a, sys_b = ps.weyl_system(dims[0]), ps.weyl_system(dims[1])
        fam_a = ps.coherent_family(sys_a, ps.generic_seed(sys_a, trace, rng))
        fam_b = ps.coherent_family(sys_b, ps.generic_seed(sys_b, trace, rng))
        return fam_a, fam_b

    def _suite_rngs(self, suite: str, count: int) -> List[np.random.Generator]:
        """`count` generators on the suite's own branch of the master seed"""
        branches = np.random.SeedSequence(self.config.master_seed).spawn(len(SUITE_STREAMS))
        return child_rngs(branches[SUITE_STREAMS.index(suite)], count)

    def _fan_out(self, fn: Callable[[int, np.random.Generator], Dict],
                 rngs: List[np.random.Generator]) -> List[Dict]:
        """Ordered results of fn(i, rng_i); threads only change scheduling"""
        if self.config.workers == 1:
            return [fn(i, rng) for i, rng in enumerate(rngs)]
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            return list(pool.map(fn, range(len(rngs)), rngs))


def _max(rows: List[Dict], key: str) -> float:
    return float(max(r[key] for r in rows))


def _min(rows: List[Dict], key: str) -> float:
    return float(min(r[key] for r in rows))
