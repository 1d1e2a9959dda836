"""Command-line front end.

Parameters come from the built-in defaults, then an optional YAML config,
then command-line flags; later sources win. Exit codes: 0 ok, 2 config
error, 3 no convergence, 4 unstable, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

import yaml

from . import __version__, export
from .dynamics import build_dual_polarization, build_single
from .entanglement import DEFAULT_THRESHOLD, pairwise_matrix
from .errors import ConfigError, OptomechError
from .lyapunov import solve_lyapunov
from .model import Scheme, SystemParams, derive_constants, detuning_for_ratio
from .network import ChainScheme, IOMode, build_chain, cavity_models, make_chain
from .steadystate import solve_self_consistent, solve_single_cavity
from .sweep import PRESETS, Axis, ChainPreset, SweepSpec, preset, run_chain_preset, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_UNSTABLE, EXIT_IO = 0, 2, 3, 4, 5

# config keys that are run settings rather than SystemParams fields
RUN_KEYS = ("detuning_ratio", "scheme", "io_mode", "threshold", "chain", "sweep")

_PARAM_FLAGS = {
    "cavity_length": float, "effective_mass": float, "wavelength": float,
    "input_power": float, "temperature": float, "detuning_2": float, "g0_override": float,
}


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def flag_changes(args) -> dict:
    changes = {k: getattr(args, k) for k in _PARAM_FLAGS if getattr(args, k) is not None}
    for name in ("kappa", "gamma_m"):
        if getattr(args, name) is not None:
            changes[name] = tuple(getattr(args, name))
    if args.frequency_unit is not None:
        changes["frequency_unit"] = args.frequency_unit
    return changes


def resolve(args) -> tuple:
    """Resolved ``(SystemParams, run settings)`` from config and flags."""
    cfg = load_config(args.config) if args.config else {}
    run = {k: cfg.pop(k) for k in RUN_KEYS if k in cfg}
    params = SystemParams.from_dict(cfg).replace(**flag_changes(args))
    for key in ("detuning_ratio", "io_mode", "threshold"):
        if getattr(args, key, None) is not None:
            run[key] = getattr(args, key)
    if "detuning_ratio" in run and args.detuning_2 is None:
        params = detuning_for_ratio(params, float(run["detuning_ratio"]))
    elif params.detuning_2 is None:
        params = detuning_for_ratio(params, 1.0)
    params.validate()
    run.setdefault("io_mode", IOMode.FOLDED.value)
    run.setdefault("threshold", DEFAULT_THRESHOLD)
    return params, run


def snapshot(args, params, run, **extra) -> dict:
    out = {
        "command": args.command,
        "code_version": __version__,
        "params": params.to_dict(),
        "frequency_unit": params.frequency_unit.value,
        "io_mode": str(run["io_mode"]),
        "threshold": float(run["threshold"]),
    }
    out.update(extra)
    return out


def _write(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(args.out, "w") as fh:
        fh.write(text)


def _scheme(args, run):
    return Scheme(getattr(args, "scheme", None) or run.get("scheme", Scheme.SINGLE.value))


def _single_pipeline(params, scheme, run, theta=math.pi / 4, phi=math.pi / 2):
    """Steady state, models and report for one ``entangle`` evaluation."""
    if scheme is Scheme.TWO_CAVITY_BS:
        chain = make_chain(2, ChainScheme.TWO_MODE, theta, phi)
        ss_list, models = cavity_models(params, chain, run["io_mode"])
        _, report = build_chain(params, chain, run["io_mode"], float(run["threshold"]))
        return ss_list[0], models, None, report
    if scheme is Scheme.DUAL_POLARIZATION:
        dc = derive_constants(params, n_optical=4)
        ss = solve_self_consistent(dc, scheme)
        model = build_dual_polarization(dc, ss)
    else:
        dc = derive_constants(params)
        ss = solve_single_cavity(dc)
        model = build_single(dc, ss)
    cm = solve_lyapunov(model)
    report = pairwise_matrix(cm.V, labels=model.modes, threshold=float(run["threshold"]))
    return ss, [model], cm, report


def _report_text(fmt, report, snap):
    if fmt == "dot":
        return export.report_dot(report, snap)
    if fmt == "csv":
        return export.report_csv(report, snap)
    return export.report_json(report, snap)


# -- subcommands -----------------------------------------------------------------

def cmd_entangle(args):
    params, run = resolve(args)
    scheme = _scheme(args, run)
    ss, _, _, report = _single_pipeline(params, scheme, run, args.theta, args.phi)
    snap = snapshot(args, params, run, scheme=scheme.value)
    if args.dump_steady_state:
        with open(args.dump_steady_state, "w") as fh:
            fh.write(export.steady_state_json(ss, snap))
    _write(args, _report_text(args.format, report, snap))


def cmd_steady_state(args):
    params, run = resolve(args)
    scheme = _scheme(args, run)
    if scheme is Scheme.DUAL_POLARIZATION:
        ss = solve_self_consistent(derive_constants(params, n_optical=4), scheme)
    else:
        ss = solve_single_cavity(derive_constants(params))
    _write(args, export.steady_state_json(ss, snapshot(args, params, run, scheme=scheme.value)))


def cmd_dump_matrices(args):
    params, run = resolve(args)
    scheme = _scheme(args, run)
    if scheme is Scheme.TWO_CAVITY_BS:
        raise ConfigError("dump-matrices works on a single cavity; use single or dual-polarization")
    _, models, cm, _ = _single_pipeline(params, scheme, run)
    model = models[0]
    snap = snapshot(args, params, run, scheme=scheme.value, matrix=args.matrix)
    if args.format == "json":
        text = export.dumps_json({"ordering": model.ordering, "A": model.A, "D": model.D,
                                  "V": cm.V, "metadata": snap})
    elif args.matrix == "V":
        text = export.cm_csv(cm, model.ordering, snap)
    else:
        text = export.model_csv(model, args.matrix, snap)
    _write(args, text)


def _sweep_from_config(block, params, run) -> SweepSpec:
    block = dict(block)
    axes = tuple(Axis(**ax) for ax in block.pop("axes", ()))
    known = {"observables", "scheme", "fixed", "name", "notes"}
    unknown = sorted(set(block) - known)
    if unknown:
        raise ConfigError(f"unknown sweep key(s): {', '.join(unknown)}")
    return SweepSpec(base=params, axes=axes, io_mode=run["io_mode"],
                     threshold=float(run["threshold"]), **block)


def cmd_sweep(args):
    if args.preset:
        spec = preset(args.preset)
        changes = flag_changes(args)
        if changes:
            spec = dataclasses.replace(spec, base=spec.base.replace(**changes))
    else:
        params, run = resolve(args)
        if "sweep" not in run:
            raise ConfigError("sweep needs --preset or a 'sweep' block in --config")
        spec = _sweep_from_config(run["sweep"], params, run)
    if isinstance(spec, ChainPreset):
        cm, report = run_chain_preset(spec)
        snap = {"command": "sweep", "preset": spec.name, "code_version": __version__,
                "params": spec.base.to_dict(), "chain": spec.chain.to_dict(),
                "io_mode": spec.io_mode.value, "threshold": spec.threshold}
        _write(args, _report_text(args.format if args.format != "csv" else "json",
                                  report, snap))
        return
    jobs = args.jobs if args.jobs is not None else int(os.environ.get("OPTOMECH_JOBS", "1"))
    result = run_sweep(spec, jobs=jobs)
    _write(args, export.sweep_json(result) if args.format == "json" else export.sweep_csv(result))


def cmd_chain(args):
    if args.preset:
        spec = preset(args.preset)
        if not isinstance(spec, ChainPreset):
            raise ConfigError(f"preset {args.preset!r} is not a chain preset")
        params, chain, io_mode, threshold = spec.base, spec.chain, spec.io_mode, spec.threshold
        run = {"io_mode": io_mode.value, "threshold": threshold}
    else:
        params, run = resolve(args)
        cfg = dict(run.get("chain", {}))
        unknown = sorted(set(cfg) - {"n_cavities", "scheme", "theta", "phi"})
        if unknown:
            raise ConfigError(f"unknown chain key(s): {', '.join(unknown)}")
        n = args.cavities if args.cavities is not None else cfg.get("n_cavities", 2)
        scheme = args.chain_scheme or cfg.get("scheme", ChainScheme.TWO_MODE.value)
        theta = args.theta if args.theta is not None else cfg.get("theta", math.pi / 4)
        phi = args.phi if args.phi is not None else cfg.get("phi", math.pi / 2)
        chain = make_chain(int(n), ChainScheme(scheme), theta, phi)
        io_mode, threshold = run["io_mode"], float(run["threshold"])
    cm, report = build_chain(params, chain, io_mode, threshold)
    snap = snapshot(args, params, run, chain=chain.to_dict())
    _write(args, _report_text(args.format, report, snap))
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(export.report_dot(report, snap))


# -- parser ----------------------------------------------------------------------

def _common(with_scheme=True):
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("parameters (override --config)")
    g.add_argument("--config", help="YAML file; keys are SystemParams fields plus run settings")
    g.add_argument("--cavity-length", dest="cavity_length", type=float, help="m")
    g.add_argument("--effective-mass", dest="effective_mass", type=float, help="kg")
    g.add_argument("--wavelength", type=float, help="m")
    g.add_argument("--power", dest="input_power", type=float, help="W")
    g.add_argument("--temperature", type=float, help="K")
    g.add_argument("--kappa", type=float, nargs="+", help="cavity decay rate(s)")
    g.add_argument("--gamma-m", dest="gamma_m", type=float, nargs="+", help="mechanical damping")
    g.add_argument("--detuning-2", dest="detuning_2", type=float,
                   help="detuning of the upper mode, in the chosen frequency unit")
    g.add_argument("--detuning-ratio", dest="detuning_ratio", type=float,
                   help="detuning of the upper mode in units of omega_m (default 1)")
    g.add_argument("--g0", dest="g0_override", type=float, help="override single-photon coupling")
    g.add_argument("--frequency-unit", choices=["rad_per_s", "hz"],
                   help="how rate values are read (default rad_per_s)")
    g.add_argument("--io-mode", dest="io_mode", choices=[m.value for m in IOMode])
    g.add_argument("--threshold", type=float, help=f"edge threshold (default {DEFAULT_THRESHOLD})")
    if with_scheme:
        g.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--out", "-o", help="output file (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optomech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entangle", parents=[_common()], help="pairwise entanglement report")
    p.add_argument("--format", choices=["json", "csv", "dot"], default="json")
    p.add_argument("--theta", type=float, default=math.pi / 4, help="splitter angle (two-cavity-bs)")
    p.add_argument("--phi", type=float, default=math.pi / 2, help="splitter phase (two-cavity-bs)")
    p.add_argument("--dump-steady-state", metavar="PATH", help="also write the working point")
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("steady-state", parents=[_common()], help="classical working point")
    p.set_defaults(func=cmd_steady_state)

    p = sub.add_parser("dump-matrices", parents=[_common()], help="drift, diffusion and CM")
    p.add_argument("--matrix", choices=["A", "D", "V"], default="V", help="matrix for CSV output")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_dump_matrices)

    p = sub.add_parser("sweep", parents=[_common()], help="parameter sweep or figure preset",
                       epilog="presets: " + ", ".join(PRESETS))
    p.add_argument("--preset", choices=list(PRESETS), metavar="NAME",
                   help="one of: " + ", ".join(PRESETS))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", "-j", type=int, help="worker processes (default $OPTOMECH_JOBS or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("chain", parents=[_common(with_scheme=False)],
                       help="beam-splitter chain of identical cavities")
    p.add_argument("--cavities", type=int)
    p.add_argument("--scheme", dest="chain_scheme", choices=[s.value for s in ChainScheme])
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--preset", choices=[k for k, f in PRESETS.items()
                                        if isinstance(f(), ChainPreset)], metavar="NAME")
    p.add_argument("--format", choices=["json", "csv", "dot"], default="json")
    p.add_argument("--dot", metavar="PATH", help="also write the entanglement graph as DOT")
    p.set_defaults(func=cmd_chain)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except OptomechError as exc:
        print(f"optomech: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code if exc.exit_code != 1 else EXIT_CONVERGENCE
    except (OSError, yaml.YAMLError) as exc:
        print(f"optomech: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TypeError, ValueError) as exc:
        # malformed config values surface here
        print(f"optomech: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
