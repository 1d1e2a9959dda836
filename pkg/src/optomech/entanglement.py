"""Pairwise logarithmic negativity and entanglement-structure classification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import IndexOutOfRange, UnphysicalCM
from .lyapunov import CovarianceMatrix, symplectic_form

DEFAULT_THRESHOLD = 1e-5
UNPHYSICAL_RTOL = 1e-6

SHAPES = ("disconnected", "linear", "square", "double_ladder", "ghz_complete", "other")

_PT = np.diag([1.0, 1.0, 1.0, -1.0])
_OMEGA2 = symplectic_form(2)


def reduce_cm(V, modes) -> np.ndarray:
    """4x4 covariance matrix of the two modes ``modes = (i, j)``, order kept."""
    V = V.V if isinstance(V, CovarianceMatrix) else np.asarray(V)
    i, j = modes
    n = V.shape[0] // 2
    if i == j:
        raise IndexOutOfRange(f"modes must be distinct, got ({i}, {j})")
    for k in (i, j):
        if not 0 <= k < n:
            raise IndexOutOfRange(f"mode index {k} outside 0..{n - 1}")
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    return V[np.ix_(idx, idx)]


def pt_symplectic_spectrum(V4) -> np.ndarray:
    """Eigenvalues of ``i Omega (P V P)``; they come in +/- pairs."""
    Vpt = _PT @ np.asarray(V4) @ _PT
    return np.linalg.eigvals(1j * _OMEGA2 @ Vpt)


def log_negativity(V4) -> float:
    """``max(0, -ln 2 nu_min)`` of a two-mode covariance matrix (vacuum = 1/2)."""
    V4 = np.asarray(V4, dtype=float)
    if V4.shape != (4, 4):
        raise ValueError("expected a 4x4 covariance matrix")
    lam = np.linalg.eigvalsh(V4 + 0.5j * _OMEGA2)[0]
    if lam < -UNPHYSICAL_RTOL * np.linalg.norm(V4):
        raise UnphysicalCM(f"V + i Omega/2 has eigenvalue {lam:.3e}")
    nu_min = float(np.min(np.abs(pt_symplectic_spectrum(V4))))
    return max(0.0, -np.log(2.0 * nu_min))


def pair_name(labels, i, j) -> str:
    a, b = _mode_number(labels[i]), _mode_number(labels[j])
    if a < 10 and b < 10:
        return f"E_{a}{b}"
    return f"E_{a}_{b}"


def _mode_number(label) -> int:
    """``m`` -> 0, ``aK`` -> K. Mechanical modes of chained cavities stay 0."""
    if label.startswith("a"):
        return int(label[1:])
    return 0


@dataclass
class EntanglementReport:
    labels: tuple
    EN: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    edges: list = field(default_factory=list)
    shape_label: str = "other"
    groups: tuple | None = None  # cavity index of every mode, for chains

    def value(self, a, b) -> float:
        i, j = self.labels.index(a), self.labels.index(b)
        return float(self.EN[i, j])

    def observables(self) -> dict:
        return {
            pair_name(self.labels, i, j): float(self.EN[i, j])
            for i, j in itertools.combinations(range(len(self.labels)), 2)
        }

    def edge_labels(self) -> list:
        return [(self.labels[i], self.labels[j]) for i, j in self.edges]

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.labels)))
        g.add_edges_from(self.edges)
        return g


def pairwise_matrix(V, labels=None, threshold: float = DEFAULT_THRESHOLD, groups=None,
                    modes=None) -> EntanglementReport:
    """Logarithmic negativity between every pair of the selected modes.

    ``modes`` restricts the report to a subset of mode indices of ``V``.
    """
    if isinstance(V, CovarianceMatrix):
        labels = labels if labels is not None else V.modes
        V = V.V
    n = V.shape[0] // 2
    if modes is None:
        modes = list(range(n))
    if labels is None:
        labels = tuple(f"a{k + 1}" for k in range(n))
    labels = tuple(labels[k] for k in modes) if len(labels) == n else tuple(labels)
    if groups is not None and len(groups) == n and len(modes) != n:
        groups = tuple(groups[k] for k in modes)
    k = len(modes)
    EN = np.zeros((k, k))
    for a, b in itertools.combinations(range(k), 2):
        EN[a, b] = EN[b, a] = log_negativity(reduce_cm(V, (modes[a], modes[b])))
    report = EntanglementReport(labels=labels, EN=EN, threshold=threshold,
                                groups=tuple(groups) if groups is not None else None)
    return reclassify(report, threshold)


def reclassify(report: EntanglementReport, threshold: float) -> EntanglementReport:
    """Recompute edges and shape for a new threshold (in place)."""
    n = len(report.labels)
    report.threshold = threshold
    report.edges = [(i, j) for i, j in itertools.combinations(range(n), 2)
                    if report.EN[i, j] > threshold]
    report.shape_label = classify_structure(report, threshold)
    return report


# -- structure catalog ---------------------------------------------------------

def double_ladder_template(n_cavities: int) -> nx.Graph:
    """Cascade double ladder on ``2 n_cavities`` nodes.

    Node ``2k`` is the mixed line of cavity ``k`` and ``2k + 1`` its partner.
    Rungs join the two modes of a cavity; adjacent cavities are cross-linked
    both ways and each partner reaches forward to the cavity two steps down
    the cascade.
    """
    g = nx.Graph()
    g.add_nodes_from(range(2 * n_cavities))
    mixed = lambda k: 2 * k  # noqa: E731
    partner = lambda k: 2 * k + 1  # noqa: E731
    for k in range(n_cavities):
        g.add_edge(mixed(k), partner(k))
        if k + 1 < n_cavities:
            g.add_edge(partner(k), mixed(k + 1))
            g.add_edge(partner(k + 1), mixed(k))
        if k + 2 < n_cavities:
            g.add_edge(partner(k), mixed(k + 2))
    return g


def _catalog(n: int):
    if n >= 3:
        yield "ghz_complete", nx.complete_graph(n)
    if n == 4:
        yield "square", nx.cycle_graph(4)
    if n >= 2:
        yield "linear", nx.path_graph(n)
    if n >= 6 and n % 2 == 0:
        yield "double_ladder", double_ladder_template(n // 2)


def classify_graph(g: nx.Graph) -> str:
    if g.number_of_edges() == 0:
        return "disconnected"
    n = g.number_of_nodes()
    for name, template in _catalog(n):
        if template.number_of_edges() == g.number_of_edges() and nx.is_isomorphic(g, template):
            return name
    return "other"


def classify_structure(report, threshold: float | None = None) -> str:
    """Shape label of the thresholded entanglement graph.

    Accepts an ``EntanglementReport`` or a ``networkx`` graph.
    """
    if isinstance(report, nx.Graph):
        return classify_graph(report)
    eps = report.threshold if threshold is None else threshold
    n = len(report.labels)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i, j in itertools.combinations(range(n), 2)
                     if report.EN[i, j] > eps)
    return classify_graph(g)


def edge_classes(report: EntanglementReport) -> dict:
    """Split edges by cavity distance: red (same), blue (adjacent), green (next), far."""
    if report.groups is None:
        raise ValueError("report has no cavity grouping")
    out = {"red": [], "blue": [], "green": [], "far": []}
    names = {0: "red", 1: "blue", 2: "green"}
    for i, j in report.edges:
        d = abs(report.groups[i] - report.groups[j])
        out[names.get(d, "far")].append((report.labels[i], report.labels[j]))
    return out
