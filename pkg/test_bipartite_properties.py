# -*- coding: utf-8 -*-
"""
Property-Based Tests for the Bipartite Structure

These tests use hypothesis to verify Schmidt-rank invariants and the
product-subspace lattice identities over random factor subspaces.
"""

import numpy as np
from hypothesis import given, settings, strategies as st

from hilbert_system import SubspaceManager
from bipartite_system import BipartiteSpace, EntanglementAnalyzer, random_local_unitaries

SM = SubspaceManager()
ANALYZER = EntanglementAnalyzer(subspaces=SM)
TOL = SM.tol

RESIDUAL_TOL = 1e-8


# ============================================================================
# HYPOTHESIS STRATEGIES
# ============================================================================

dims = st.tuples(st.integers(min_value=2, max_value=4), st.integers(min_value=2, max_value=4))
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@st.composite
def factor_quadruples(draw):
    d_a, d_b = draw(dims)
    rng = np.random.default_rng(draw(seeds))

    def sub(d):
        return SM.random_subspace(d, int(rng.integers(1, d + 1)), rng)

    return sub(d_a), sub(d_a), sub(d_b), sub(d_b)


# ============================================================================
# PROPERTY 1: Product lattice identities
# Feature: bipartite-structure, Property 1
# ============================================================================

@given(factor_quadruples())
@settings(max_examples=50, deadline=None)
def test_property_1_product_lattice_identities(quad):
    """
    Property 1: the six meet / join identities hold for product subspaces
    """
    report = ANALYZER.verify_product_lattice(*quad)
    assert report.holds(RESIDUAL_TOL), f"Residuals {report.residuals}"


# ============================================================================
# PROPERTY 2: Factor-wise inclusions
# Feature: bipartite-structure, Property 2
# ============================================================================

@given(factor_quadruples())
@settings(max_examples=50, deadline=None)
def test_property_2_inclusions(quad):
    """
    Property 2: factor-wise meet < global meet and global join < factor-wise join
    """
    flags = ANALYZER.verify_inclusions(*quad)
    assert flags.meet_inclusion, "Meet inclusion failed"
    assert flags.join_inclusion, "Join inclusion failed"


# ============================================================================
# PROPERTY 3: Schmidt rank under local unitaries
# Feature: bipartite-structure, Property 3
# ============================================================================

@given(dims, seeds)
@settings(max_examples=50, deadline=None)
def test_property_3_local_unitary_invariance(d, seed):
    """
    Property 3: singular values of M are unchanged by U_A M U_B^T
    """
    rng = np.random.default_rng(seed)
    space = BipartiteSpace(*d)
    rank = int(rng.integers(1, min(d) + 1))
    s = ANALYZER.random_state_of_rank(space, rank, rng)
    u_a, u_b = random_local_unitaries(SM, space, rng)
    assert ANALYZER.local_unitary_invariance(s, u_a, u_b) <= TOL.eq
    assert ANALYZER.schmidt_rank(s).rank == rank, "Rank of the construction is off"


# ============================================================================
# PROPERTY 4: Product states and their projection
# Feature: bipartite-structure, Property 4
# ============================================================================

@given(dims, seeds)
@settings(max_examples=50, deadline=None)
def test_property_4_product_states(d, seed):
    """
    Property 4: product states have rank 1 and are their own closest product state
    """
    rng = np.random.default_rng(seed)
    s = ANALYZER.random_product_state(BipartiteSpace(*d), rng)
    assert ANALYZER.schmidt_rank(s).rank == 1
    closest = ANALYZER.closest_product_state(s)
    overlap = abs(np.vdot(closest.amplitudes.amplitudes, s.amplitudes.amplitudes))
    assert abs(overlap - 1.0) <= TOL.eq, f"Overlap {overlap}"


# ============================================================================
# PROPERTY 5: Orthocomplement of a product subspace
# Feature: bipartite-structure, Property 5
# ============================================================================

@given(factor_quadruples())
@settings(max_examples=50, deadline=None)
def test_property_5_orthocomplement_split(quad):
    """
    Property 5: dim (hA (x) hB)^perp = dA dB - kA kB, split dim = (dA - kA)(dB - kB)
    """
    h_a, _, h_b, _ = quad
    d_a, d_b = h_a.ambient_dim, h_b.ambient_dim
    result = ANALYZER.verify_orthocomplement_split(h_a, h_b)
    assert result['complement_dim'] == d_a * d_b - h_a.dim * h_b.dim
    assert result['split_dim'] == (d_a - h_a.dim) * (d_b - h_b.dim)
    assert result['differs'] == (not (h_a.is_full() and h_b.is_full()))
