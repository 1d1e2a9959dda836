"""Same pipeline with the single-photon coupling forced upward.

E_01 grows roughly in proportion to ``g0_override``, and its maximum over
the scan still sits at the top of the detuning grid.  Moving the blue
drive far enough down (negative ratio) tips the system into instability.
"""

import numpy as np

from optomech.sweep import FIG2, Axis, SweepSpec, run_sweep

for g0 in (1e4, 1e5, 1e6):
    spec = SweepSpec(base=FIG2.replace(g0_override=g0),
                     axes=(Axis("detuning_ratio", 0.9, 1.5, 61),),
                     observables=("E_01", "E_02", "E_12", "stability"))
    res = run_sweep(spec)
    ratio = res.column("detuning_ratio")
    e01 = res.column("E_01")
    best = int(np.nanargmax(e01))
    n_unstable = int(np.sum(res.column("stable") == 0))
    print(f"g0={g0:.0e}: E_01 max {e01[best]:.3e} at ratio {ratio[best]:.2f}, "
          f"{n_unstable} unstable points")

# pushing the red drive onto the blue side makes both lines amplify
res = run_sweep(SweepSpec(base=FIG2.replace(g0_override=1e5),
                          axes=(Axis("detuning_ratio", -1.0, 1.0, 5),),
                          observables=("E_01", "stability")))
for row in res.rows:
    print(row["detuning_ratio"], row["stable"], row["error"] or row["E_01"])
