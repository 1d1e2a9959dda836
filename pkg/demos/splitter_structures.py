"""Beam-splitter networks acting on synthetic two-mode squeezed pairs.

Each "cavity" here is a mechanical vacuum plus a squeezed optical pair, so
the structures are visible without any optomechanics.  Mixing angle theta
decides which links survive; phase phi does not matter.
"""

import math

import numpy as np

from optomech.entanglement import edge_classes
from optomech.network import ChainScheme, chain_report_from_blocks, make_chain


def squeezed_cavity(r):
    """Covariance of mechanical vacuum followed by a two-mode squeezed pair."""
    c, s = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    V = np.eye(6) / 2
    V[2:, 2:] = [[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]]
    return V


blocks = [squeezed_cavity(0.5)] * 4
for n in (2, 3, 4):
    for theta in (math.pi / 8, math.pi / 4, 3 * math.pi / 8):
        chain = make_chain(n, ChainScheme.TWO_MODE, theta, math.pi / 2)
        rep = chain_report_from_blocks(blocks[:n], chain)
        sizes = {k: len(v) for k, v in edge_classes(rep).items()}
        print(f"N={n} theta={theta:.3f}: {rep.shape_label:13} {sizes}")

# phase independence
chain0 = make_chain(3, theta=math.pi / 4, phi=0.0)
chain1 = make_chain(3, theta=math.pi / 4, phi=2.0)
a = chain_report_from_blocks(blocks[:3], chain0).EN
b = chain_report_from_blocks(blocks[:3], chain1).EN
print("max change with phi:", np.abs(a - b).max())
