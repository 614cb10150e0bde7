# -*- coding: utf-8 -*-
"""
Property-Based Tests for the Finite Phase Space

These tests use hypothesis to verify the displacement group relations and
the coherent POVM over random seeds and states.
"""

import numpy as np
from hypothesis import given, settings, strategies as st

from hilbert_system import SubspaceManager
from bipartite_system import BipartiteSpace
from phasespace_system import PhaseSpaceManager, omega

SM = SubspaceManager()
PSM = PhaseSpaceManager(subspaces=SM)
TOL = SM.tol
SYSTEMS = {d: PSM.weyl_system(d) for d in (3, 5, 7)}


# ============================================================================
# HYPOTHESIS STRATEGIES
# ============================================================================

odd_dims = st.sampled_from([3, 5, 7])
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
indices = st.integers(min_value=-10, max_value=10)


# ============================================================================
# PROPERTY 1: Displacements are unitary and compose up to a phase
# Feature: phase-space, Property 1
# ============================================================================

@given(odd_dims, indices, indices, indices, indices)
@settings(max_examples=80, deadline=None)
def test_property_1_displacement_composition(d, a1, b1, a2, b2):
    """
    Property 1: D(a1,b1) D(a2,b2) = omega(2^(-1)(a1 b2 - a2 b1)) D(a1+a2, b1+b2)
    """
    system = SYSTEMS[d]
    d1 = PSM.displacement(system, a1, b1)
    d2 = PSM.displacement(system, a2, b2)
    assert np.allclose(d1 @ d1.conj().T, np.eye(d), atol=TOL.eq)
    phase = omega(d, system.inv2 * (a1 * b2 - a2 * b1))
    combined = PSM.displacement(system, a1 + a2, b1 + b2)
    assert np.allclose(d1 @ d2, phase * combined, atol=TOL.eq)


# ============================================================================
# PROPERTY 2: Coherent families resolve the identity
# Feature: phase-space, Property 2
# ============================================================================

@given(odd_dims, seeds)
@settings(max_examples=30, deadline=None)
def test_property_2_resolution(d, seed):
    """
    Property 2: (1 / (d t)) sum Pi(alpha, beta) = 1 for any generic seed
    """
    rng = np.random.default_rng(seed)
    system = SYSTEMS[d]
    trace = int(rng.integers(1, d))
    family = PSM.coherent_family(system, PSM.generic_seed(system, trace, rng))
    assert PSM.resolution_residual(family) <= TOL.eq
    assert all(abs(np.trace(m.matrix).real - trace) <= TOL.eq for m in family.members)


# ============================================================================
# PROPERTY 3: Coherent POVM is a distribution within its bound
# Feature: phase-space, Property 3
# ============================================================================

@given(st.sampled_from([3, 5]), seeds)
@settings(max_examples=15, deadline=None)
def test_property_3_povm_bound(d, seed):
    """
    Property 3: sum p = 1 and r_ave <= (d_A - t_A) + (d_B - t_B)
    """
    rng = np.random.default_rng(seed)
    system = SYSTEMS[d]
    t_a, t_b = int(rng.integers(1, d)), int(rng.integers(1, d))
    fam_a = PSM.coherent_family(system, PSM.generic_seed(system, t_a, rng))
    fam_b = PSM.coherent_family(system, PSM.generic_seed(system, t_b, rng))
    state = PSM.simulator.analyzer.random_state(BipartiteSpace(d, d), rng)
    report = PSM.povm_measure(state, fam_a, fam_b)
    assert abs(report.total_probability - 1.0) <= TOL.eq
    bound = PSM.povm_bound(fam_a, fam_b)
    assert abs(report.upper_bound - bound) <= TOL.eq
    assert report.r_ave <= bound + TOL.ineq, f"r_ave {report.r_ave} > {bound}"
