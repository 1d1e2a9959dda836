import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech.entanglement import pairwise_matrix
from optomech.errors import BadIndices, DimensionMismatch
from optomech.lyapunov import CovarianceMatrix, is_physical
from optomech.model import SystemParams, detuning_for_ratio
from optomech.network import (
    BeamSplitterSpec,
    ChainScheme,
    IOMode,
    bs_symplectic,
    build_chain,
    compose,
    make_chain,
)

import oracles

FIG7 = detuning_for_ratio(SystemParams(gamma_m=(1e4,)), 1.0)


def _symplectic_eigs(V):
    n = V.shape[0] // 2
    return np.sort(np.abs(np.linalg.eigvals(1j * oracles.omega(n) @ V)))


def test_zero_angle_is_identity():
    S = bs_symplectic(BeamSplitterSpec(0.0, 0.0, 0, 1), 3)
    assert np.array_equal(S, np.eye(6))


@settings(max_examples=60, deadline=None)
@given(st.floats(-7, 7), st.floats(-7, 7), st.integers(2, 6), st.data())
def test_beam_splitter_is_symplectic(theta, phi, n, data):
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1).filter(lambda k: k != a))
    S = bs_symplectic(BeamSplitterSpec(theta, phi, a, b), n)
    om = oracles.omega(n)
    assert np.abs(S.T @ om @ S - om).max() <= 1e-12
    untouched = [k for k in range(n) if k not in (a, b)]
    for k in untouched:
        sl = slice(2 * k, 2 * k + 2)
        assert np.array_equal(S[sl, sl], np.eye(2))


def test_balanced_mixing_of_identical_states():
    single = np.diag([1.7, 0.4])
    V = compose([single, single], [BeamSplitterSpec(np.pi / 4, 0.0, 0, 1)]).V
    assert np.allclose(V, np.kron(np.eye(2), single), rtol=0, atol=1e-15)


def test_single_block_passes_through():
    V = oracles.random_physical_cm(3, np.random.default_rng(1))
    assert np.array_equal(compose([V]).V, V)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_composition_preserves_symplectic_spectrum(seed, theta, phi):
    rng = np.random.default_rng(seed)
    blocks = [oracles.random_physical_cm(3, rng) for _ in range(3)]
    chain = make_chain(3, ChainScheme.TWO_MODE, theta, phi)
    V = compose(blocks, chain.bs_list).V
    before = _symplectic_eigs(compose(blocks).V)
    assert _symplectic_eigs(V) == pytest.approx(before, rel=1e-9)
    assert np.linalg.eigvalsh(V + 0.5j * oracles.omega(9))[0] >= -1e-9


def test_zero_angle_leaves_report_unchanged():
    rng = np.random.default_rng(5)
    blocks = [oracles.random_physical_cm(3, rng) for _ in range(2)]
    before = pairwise_matrix(compose(blocks).V)
    for phi in (0.0, 1.0, np.pi / 2):
        after = pairwise_matrix(compose(blocks, [BeamSplitterSpec(0.0, phi, 1, 4)]).V)
        assert np.allclose(after.EN, before.EN, rtol=0, atol=1e-9)
        assert after.edges == before.edges


def test_phase_does_not_change_pairwise_entanglement():
    """R(phi) is a local rotation on one output port, so no pair can see it."""
    blocks = [oracles.tmsv(0.4), oracles.tmsv(0.4)]
    reports = [pairwise_matrix(compose(blocks, [BeamSplitterSpec(np.pi / 4, phi, 0, 2)]).V)
               for phi in np.linspace(0, np.pi, 5)]
    for r in reports[1:]:
        assert np.allclose(r.EN, reports[0].EN, rtol=0, atol=1e-12)
    # both halves of each pair now share entanglement with both outputs
    assert reports[0].shape_label == "square"


def test_chain_wiring():
    chain = make_chain(4, ChainScheme.TWO_MODE)
    assert [(b.mode_a, b.mode_b) for b in chain.bs_list] == [(1, 4), (4, 7), (7, 10)]
    four = make_chain(2, ChainScheme.FOUR_MODE)
    assert [(b.mode_a, b.mode_b) for b in four.bs_list] == [(1, 6)]
    per = make_chain(3, theta=[0.1, 0.2], phi=0.0)
    assert [b.theta for b in per.bs_list] == [0.1, 0.2]
    assert make_chain(1).bs_list == ()


def test_bad_wiring_is_rejected():
    with pytest.raises(BadIndices):
        bs_symplectic(BeamSplitterSpec(0.1, 0.0, 2, 2), 3)
    with pytest.raises(BadIndices):
        bs_symplectic(BeamSplitterSpec(0.1, 0.0, 0, 3), 3)
    with pytest.raises(DimensionMismatch):
        compose([np.eye(4)], [BeamSplitterSpec(0.1, 0.0, 0, 5)])
    with pytest.raises(DimensionMismatch):
        compose([np.eye(3)])


def test_cavities_before_splitting_are_uncorrelated():
    _, report = build_chain(FIG7, make_chain(2, theta=0.0, phi=0.0))
    for a, b in [("a1", "a3"), ("a1", "a4"), ("a2", "a3"), ("a2", "a4")]:
        assert report.value(a, b) == 0.0


@pytest.mark.parametrize("io_mode", list(IOMode))
def test_composed_chain_is_physical(io_mode):
    for scheme in ChainScheme:
        cm, report = build_chain(FIG7, make_chain(3, scheme), io_mode)
        assert isinstance(cm, CovarianceMatrix)
        assert is_physical(cm.V)
        assert report.groups is not None


def test_phase_independence_of_edges_at_fig7_parameters():
    edges = [build_chain(FIG7, make_chain(2, theta=np.pi / 4, phi=phi))[1].edges
             for phi in (0, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi)]
    assert all(e == edges[0] for e in edges)


def test_single_cavity_chain_is_bipartite():
    _, report = build_chain(FIG7, make_chain(1))
    assert report.labels == ("a1", "a2")
    assert report.edge_labels() == [("a1", "a2")]
