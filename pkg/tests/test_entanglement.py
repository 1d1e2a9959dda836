import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech.dynamics import build_dual_polarization, build_single
from optomech.entanglement import (
    EntanglementReport,
    classify_graph,
    classify_structure,
    double_ladder_template,
    edge_classes,
    log_negativity,
    pairwise_matrix,
    pt_symplectic_spectrum,
    reclassify,
    reduce_cm,
)
from optomech.errors import IndexOutOfRange, UnphysicalCM
from optomech.lyapunov import is_physical, solve_lyapunov
from optomech.model import Scheme, SystemParams, derive_constants, detuning_for_ratio
from optomech.network import rotation
from optomech.steadystate import solve_self_consistent, solve_single_cavity

import oracles

FIG2 = detuning_for_ratio(SystemParams(), 1.0)


def test_vacuum_and_thermal_products_are_separable():
    assert log_negativity(0.5 * np.eye(4)) == 0.0
    V = np.diag([3.5, 3.5, 1.2, 1.2])
    assert log_negativity(V) == 0.0


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0])
def test_two_mode_squeezed_vacuum(r):
    V = oracles.tmsv(r)
    assert log_negativity(V) == pytest.approx(2 * r, abs=1e-9)
    nu = np.min(np.abs(pt_symplectic_spectrum(V)))
    assert nu == pytest.approx(np.exp(-2 * r) / 2, rel=1e-12)


def test_tmsv_strictly_increasing():
    values = [log_negativity(oracles.tmsv(r)) for r in np.arange(0.0, 2.01, 0.1)]
    assert all(b > a for a, b in zip(values, values[1:]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_invariant_formula(seed):
    V = oracles.random_physical_cm(2, np.random.default_rng(seed))
    assert log_negativity(V) == pytest.approx(oracles.log_neg_invariant(V), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi), st.booleans())
def test_invariant_under_local_rotation(seed, phi, first):
    V = oracles.random_physical_cm(2, np.random.default_rng(seed))
    R = np.eye(4)
    sl = slice(0, 2) if first else slice(2, 4)
    R[sl, sl] = rotation(phi)
    assert abs(log_negativity(R @ V @ R.T) - log_negativity(V)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pt_spectrum_comes_in_pairs(seed):
    V = oracles.random_physical_cm(2, np.random.default_rng(seed))
    ev = pt_symplectic_spectrum(V)
    pos = np.sort(ev.real[ev.real > 0])
    neg = np.sort(-ev.real[ev.real < 0])
    assert len(pos) == len(neg) == 2
    assert pos == pytest.approx(neg, rel=1e-9)
    assert np.all(np.abs(ev.imag) <= 1e-9 * np.abs(ev).max())


def test_unphysical_matrix_is_rejected():
    with pytest.raises(UnphysicalCM):
        log_negativity(0.3 * np.eye(4))


def test_reduce_block_diagonal_and_indices():
    blocks = [np.diag([k + 1.0, k + 2.0]) for k in range(3)]
    V = np.zeros((6, 6))
    for k, b in enumerate(blocks):
        V[2 * k:2 * k + 2, 2 * k:2 * k + 2] = b
    r = reduce_cm(V, (2, 0))
    assert np.array_equal(r[:2, :2], blocks[2]) and np.array_equal(r[2:, 2:], blocks[0])
    assert np.all(r[:2, 2:] == 0)
    for bad in [(0, 0), (0, 3), (-1, 1)]:
        with pytest.raises(IndexOutOfRange):
            reduce_cm(V, bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations(range(4)))
def test_reduce_commutes_with_permutation(seed, perm):
    V = oracles.random_physical_cm(4, np.random.default_rng(seed))
    idx = np.ravel([[2 * p, 2 * p + 1] for p in perm])
    Vp = V[np.ix_(idx, idx)]
    # mode k of the permuted matrix is mode perm[k] of the original
    assert np.array_equal(reduce_cm(Vp, (0, 1)), reduce_cm(V, (perm[0], perm[1])))


def test_uncoupled_system_has_no_entanglement():
    dc = derive_constants(FIG2.replace(g0_override=0.0))
    V = solve_lyapunov(build_single(dc, solve_single_cavity(dc)))
    report = pairwise_matrix(V)
    # nu_min sits exactly at 1/2, so only rounding survives
    assert np.all(report.EN <= 1e-9)
    assert report.labels == ("m", "a1", "a2")
    assert report.shape_label == "disconnected"


def test_fig11_reduced_cm_physical():
    dc = derive_constants(FIG2, n_optical=4)
    V = solve_lyapunov(build_dual_polarization(dc, solve_self_consistent(
        dc, Scheme.DUAL_POLARIZATION))).V
    assert is_physical(reduce_cm(V, (1, 2)))


def test_report_observables_and_names():
    EN = np.zeros((3, 3))
    EN[0, 1] = EN[1, 0] = 0.3
    rep = reclassify(EntanglementReport(labels=("m", "a1", "a2"), EN=EN), 1e-5)
    assert rep.observables() == {"E_01": 0.3, "E_02": 0.0, "E_12": 0.0}
    assert rep.edge_labels() == [("m", "a1")]
    assert rep.value("a1", "m") == 0.3


def _graph(n, edges):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


def test_catalog_examples():
    assert classify_graph(_graph(4, [])) == "disconnected"
    # 1-based edges {12, 23, 34}
    assert classify_graph(_graph(4, [(0, 1), (1, 2), (2, 3)])) == "linear"
    # {13, 14, 23, 24}
    assert classify_graph(_graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])) == "square"
    assert classify_graph(nx.complete_graph(4)) == "ghz_complete"
    assert classify_graph(double_ladder_template(3)) == "double_ladder"
    assert classify_graph(double_ladder_template(4)) == "double_ladder"
    assert classify_graph(_graph(4, [(0, 1), (2, 3)])) == "other"


def test_shape_stable_across_threshold_band():
    EN = np.zeros((4, 4))
    for i, j in [(0, 2), (0, 3), (1, 2), (1, 3)]:
        EN[i, j] = EN[j, i] = 0.05
    rep = EntanglementReport(labels=("a1", "a2", "a3", "a4"), EN=EN)
    for eps in np.geomspace(1e-6, 1e-4, 7):
        assert classify_structure(rep, eps) == "square"


def test_edge_classes_by_cavity_distance():
    labels = tuple(f"a{k + 1}" for k in range(6))
    groups = (0, 0, 1, 1, 2, 2)
    g = double_ladder_template(3)
    EN = np.zeros((6, 6))
    for i, j in g.edges:
        EN[i, j] = EN[j, i] = 0.1
    rep = reclassify(EntanglementReport(labels=labels, EN=EN, groups=groups), 1e-5)
    classes = edge_classes(rep)
    assert len(classes["red"]) == 3 and len(classes["blue"]) == 4
    assert len(classes["green"]) == 1 and classes["far"] == []


def test_pairwise_matrix_symmetric_nonnegative():
    rng = np.random.default_rng(3)
    V = oracles.random_physical_cm(4, rng)
    rep = pairwise_matrix(V)
    assert np.array_equal(rep.EN, rep.EN.T) and np.all(rep.EN >= 0)
    for i, j in itertools.combinations(range(4), 2):
        assert rep.EN[i, j] == log_negativity(reduce_cm(V, (i, j)))
