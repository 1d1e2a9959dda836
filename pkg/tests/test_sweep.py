import math

import numpy as np
import pytest

from optomech import export
from optomech.errors import ConfigError, UnknownPreset
from optomech.model import Scheme, SystemParams
from optomech.sweep import (
    FIG2,
    PRESETS,
    Axis,
    ChainPreset,
    SweepSpec,
    point_params,
    preset,
    run_sweep,
)


def _det_sweep(n=5, **base):
    return SweepSpec(base=FIG2.replace(**base), axes=(Axis("detuning_ratio", 0.9, 1.3, n),),
                     observables=("E_01", "E_02", "E_12", "stability"))


def test_axis_validation():
    for bad in [Axis("detuning_ratio", 1, 2, 1), Axis("kappa", 2, 1), Axis("kappa", 0, 1, 3, "log"),
                Axis("mass", 0, 1), Axis("kappa", 1, 2, 3, "cubic")]:
        with pytest.raises(ConfigError):
            bad.validate()
    assert Axis("kappa", 1, 100, 3, "log").values() == pytest.approx([1, 10, 100])


def test_row_count_and_row_major_order():
    spec = SweepSpec(base=FIG2, axes=(Axis("detuning_ratio", 1.0, 1.2, 3),
                                      Axis("kappa", 1e5, 1e7, 2, "log")),
                     observables=("E_12",))
    res = run_sweep(spec)
    assert len(res.rows) == 6
    got = [(r["detuning_ratio"], r["kappa"]) for r in res.rows]
    assert got == [(a, b) for a in (1.0, 1.1, 1.2) for b in (1e5, 1e7)]
    assert res.columns[:3] == ["detuning_ratio", "kappa", "E_12"]


def test_point_params_resolves_axes():
    spec = SweepSpec(base=FIG2, axes=(Axis("temperature", 1, 2, 2),),
                     fixed={"detuning_ratio": 1.2})
    p, knobs = point_params(spec, (2.0,))
    assert p.temperature == 2.0
    assert p.detuning_2 == pytest.approx(1.2 * math.pi * 299792458.0 / 0.02)
    assert knobs["theta"] == pytest.approx(math.pi / 4)


def test_uncoupled_sweep_is_all_zero():
    res = run_sweep(_det_sweep(g0_override=0.0))
    for c in ("E_01", "E_02", "E_12"):
        assert np.all(res.column(c) <= 1e-9)


def test_unstable_points_are_flagged_not_zeroed():
    spec = SweepSpec(base=FIG2.replace(g0_override=1e5),
                     axes=(Axis("detuning_ratio", -1.0, 1.0, 3),), observables=("all_pairs",))
    res = run_sweep(spec)
    first = res.rows[0]
    assert first["stable"] == 0 and first["error"] == "unstable"
    assert math.isnan(first["E_01"])
    assert res.rows[2]["stable"] == 1 and res.rows[2]["E_01"] > 0
    text = export.sweep_csv(res)
    _, rows = export.read_sweep_csv(text)
    assert rows[0]["E_01"] == "" and rows[0]["stable"] == "0"


def test_unknown_observable_is_rejected_up_front():
    with pytest.raises(ConfigError):
        run_sweep(SweepSpec(base=FIG2, axes=(Axis("phi", 0, 1, 2),), observables=("E_99",)))


def test_per_point_failures_do_not_abort(monkeypatch):
    from optomech import sweep
    from optomech.errors import NoConvergence

    real = sweep._pipeline

    def flaky(spec, p, knobs):
        if knobs["detuning_ratio"] > 1.25:
            raise NoConvergence("synthetic", residual=1.0)
        return real(spec, p, knobs)

    monkeypatch.setattr(sweep, "_pipeline", flaky)
    res = run_sweep(_det_sweep(n=5))
    assert len(res.rows) == 5
    assert res.rows[-1]["error"].startswith("NoConvergence")
    assert res.rows[0]["error"] == "" and res.rows[0]["stable"] == 1


def test_worker_count_does_not_change_output():
    spec = _det_sweep(n=9)
    one = export.sweep_csv(run_sweep(spec, jobs=1))
    assert export.sweep_csv(run_sweep(spec, jobs=3)) == one
    assert export.sweep_csv(run_sweep(spec, jobs=1)) == one


def test_two_cavity_and_dual_schemes():
    res = run_sweep(SweepSpec(base=FIG2, axes=(Axis("phi", 0, math.pi, 3),),
                              scheme=Scheme.TWO_CAVITY_BS,
                              observables=("all_pairs", "shape_label")))
    assert {"E_12", "E_34", "E_14", "shape_label", "edges"} <= set(res.columns)
    assert all(r["shape_label"] for r in res.rows)
    res = run_sweep(SweepSpec(base=FIG2, axes=(Axis("detuning_ratio", 1, 1.1, 2),),
                              scheme=Scheme.DUAL_POLARIZATION, observables=("E_12", "E_34")))
    assert res.columns[1:3] == ["E_12", "E_34"]


def test_preset_catalog():
    names = {"fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig4a", "fig4b",
             "fig5a", "fig5b", "fig7a", "fig7b", "fig7c", "fig9", "fig11", "fig13"}
    assert names <= set(PRESETS)
    for name in PRESETS:
        spec = preset(name)
        if isinstance(spec, SweepSpec):
            spec.validate()
    with pytest.raises(UnknownPreset):
        preset("fig99")


def test_fig2_preset_base_values():
    spec = preset("fig2")
    b = spec.base
    assert b.gamma_m == (1e5,) and b.kappa == (1e6,) and b.input_power == 20e-3
    assert (b.cavity_length, b.temperature, b.wavelength) == (0.01, 0.01, 1.33e-6)
    assert spec.axes[0].name == "detuning_ratio" and spec.axes[0].n_points == 201


def test_fig7b_and_fig5a_presets():
    s = preset("fig7b")
    assert s.fixed["theta"] == pytest.approx(math.pi / 4)
    assert (s.axes[0].name, s.axes[0].min, s.axes[0].max) == ("phi", 0.0, math.pi)
    assert s.base.gamma_m == (1e4,) and s.base.kappa == (1e6,)
    assert s.scheme is Scheme.TWO_CAVITY_BS
    p, _ = point_params(s, (0.0,))
    from optomech.model import derive_constants

    dc = derive_constants(p)
    assert dc.delta[0] == pytest.approx(-dc.omega_m) and dc.delta[1] == pytest.approx(dc.omega_m)
    f5 = preset("fig5a")
    assert f5.axes[0].name == "temperature" and set(f5.observables) == {"E_01", "E_02"}
    assert f5.fixed["detuning_ratio"] == 1.0


def test_chain_presets():
    for name, n in [("fig9", 3), ("fig13", 3)]:
        p = preset(name)
        assert isinstance(p, ChainPreset) and p.chain.n_cavities == n


def test_default_grid_sizes():
    assert preset("fig3a").axes[0].n_points == 101 and len(preset("fig3a").axes) == 2
    assert preset("fig4a").axes[0].n_points == 201


def test_metadata_snapshot():
    res = run_sweep(_det_sweep(n=2))
    md = res.metadata
    assert md["params"] == FIG2.to_dict() and md["frequency_unit"] == "rad_per_s"
    assert "code_version" in md and md["preset"] == "custom"
    assert SystemParams.from_dict({k: v for k, v in md["params"].items()}) == FIG2
