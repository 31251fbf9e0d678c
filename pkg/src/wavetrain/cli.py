"""Command-line front end.

Subcommands: analyze (fixed points, characteristic coefficients,
stability tests, critical speeds), simulate (trajectory integration and
classification), diagnose (spectrum, autocorrelation, fractal
dimension), sweep (stability table over a speed grid), presets.

Exit codes are stable API: 0 success, 1 configuration error, 2 no
physical fixed point, 3 integrator failure, 4 diagnostics precondition
not met.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

import numpy as np

from . import _svg, diagnostics, model, stability
# the package re-exports the integrate() function under the module's
# name, so pull what the CLI needs straight from the submodule
from .integrate import (IntegrationOptions, PeakCountError, StiffnessError,
                        integrate, summarize_oscillation,
                        trajectory_metadata, write_metadata,
                        write_trajectory_csv)

FORMATS = ("text", "structured", "csv", "svg")
_RUN_KEYS = ("v", "v_range", "span", "ic", "rel_tol", "abs_tol",
             "sample_interval", "embed_dim")

_PRESET_NOTES = {
    "A": "constant per-capita responses for both species, no prey "
         "self-limitation",
    "B": "constant per-capita responses with quadratic prey "
         "self-limitation",
    "C": "constant prey response, predator response linear in P, prey "
         "self-limitation",
    "D": "prey response growing linearly in N, predator response linear "
         "in P, prey self-limitation",
    "E": "rational prey response that peaks and decays in N, predator "
         "response quadratic in P",
}


class _NoPhysicalRoot(Exception):
    def __init__(self, roots):
        super().__init__("no fixed point with both populations positive")
        self.roots = roots


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which collides with the
    # no-physical-fixed-point code; route usage errors to exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _argtype(fn):
    # argparse turns only ValueError/ArgumentTypeError into usage
    # errors; translate config errors when a parser runs these
    def wrap(text):
        try:
            return fn(text)
        except model.ConfigError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return wrap


def _parse_span(text: str):
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise model.ConfigError(f"bad span {text!r}, expected START:END")
    if not b > a:
        raise model.ConfigError(f"empty span {text!r}")
    return (a, b)


def _parse_ic(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise model.ConfigError(f"bad initial state {text!r}, expected "
                                "N,M,P,Q")
    try:
        return tuple(float(x) for x in parts)
    except ValueError:
        raise model.ConfigError(f"bad initial state {text!r}")


def _parse_vrange(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise model.ConfigError(f"bad range {text!r}, expected "
                                "MIN:MAX:COUNT")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise model.ConfigError(f"bad range {text!r}")
    if count < 2:
        raise model.ConfigError("a sweep needs at least 2 points")
    return lo, hi, count


def _read_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise model.ConfigError(f"cannot read config file: {exc}")
    vals = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise model.ConfigError(f"{path}:{lineno}: expected key=value")
        vals[key.strip()] = val.strip()
    return vals


def _resolve_model(args):
    """Model spec from --preset or --config, plus run options the file
    carried. CLI flags override file values."""
    cfg = {}
    if getattr(args, "config", None):
        if getattr(args, "preset", None):
            raise model.ConfigError("give either --preset or --config, "
                                    "not both")
        cfg = _read_config(args.config)
    run = {k: cfg.pop(k) for k in _RUN_KEYS if k in cfg}
    system = getattr(args, "preset", None) or cfg.pop("system", None)
    if system is None:
        raise model.ConfigError("no model source: pass --preset or a "
                                "--config file with a 'system' key")
    overrides = {}
    for key, sval in cfg.items():
        try:
            overrides[key] = float(sval)
        except ValueError:
            raise model.ConfigError(f"config value {key}={sval!r} is not "
                                    "a number")
    return model.make_preset(system, overrides), run


def _run_value(args, run, key, parse, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in run:
        return parse(run[key])
    return default


def _need_v(args, run) -> float:
    v = _run_value(args, run, "v", float)
    if v is None:
        raise model.ConfigError("this command needs a wave speed: --v")
    return float(v)


def _select_root(spec, root_index):
    roots = model.fixed_points(spec)
    if root_index is not None:
        if not 0 <= root_index < len(roots):
            raise model.ConfigError(
                f"--root-index {root_index} out of range, the model has "
                f"{len(roots)} real fixed point(s)")
        return roots[root_index], roots
    for fp in roots:
        if fp.physical:
            return fp, roots
    raise _NoPhysicalRoot(roots)


def _integration_options(args, run, default_span):
    span = _run_value(args, run, "span", _parse_span, default_span)
    if isinstance(span, str):
        span = _parse_span(span)
    ic = _run_value(args, run, "ic", _parse_ic)
    if isinstance(ic, str):
        ic = _parse_ic(ic)
    kwargs = {}
    for key in ("rel_tol", "abs_tol", "sample_interval"):
        val = _run_value(args, run, key, float)
        if val is not None:
            kwargs[key] = float(val)
    opts = IntegrationOptions(zeta_span=span, initial_state=ic,
                                        **kwargs)
    opts.validate()
    return opts


def _jsonsafe(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonsafe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonsafe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return "%.10g" % v
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def _print_report(report: dict, prefix=""):
    for key, val in report.items():
        if isinstance(val, dict):
            _print_report(val, prefix + key + ".")
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            for i, item in enumerate(val):
                _print_report(item, f"{prefix}{key}.{i}.")
        else:
            print(f"{prefix}{key} = {_fmt_value(val)}")


def _out_dir(args) -> str:
    out = getattr(args, "out", None) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _formats(args):
    raw = getattr(args, "format", None) or "text,structured,csv"
    picked = tuple(x.strip() for x in raw.split(",") if x.strip())
    for f in picked:
        if f not in FORMATS:
            raise model.ConfigError(
                f"unknown format {f!r}, choose from {', '.join(FORMATS)}")
    return picked


def _fp_dict(fp: model.FixedPoint) -> dict:
    return {"N0": fp.N0, "M0": fp.M0, "P0": fp.P0, "Q0": fp.Q0,
            "residual": fp.residual, "physical": fp.physical}


def _analysis_report(spec, fp, roots, v) -> dict:
    b = stability.coeffs_at(spec, fp, v)
    rh = stability.routh_hurwitz(b)
    eig = stability.quartic_roots(b)
    hopf = stability.hopf_analysis(spec, fp)
    vol = stability.volume_rate(b.b1)
    speeds = hopf.speeds
    return {
        "command": "analyze",
        "system": spec.system,
        "v": float(v),
        "params": spec.params.as_dict(),
        "eps_tilde": spec.eps_tilde,
        "fixed_point": _fp_dict(fp),
        "all_roots": [_fp_dict(f) for f in roots],
        "char_coeffs": {"b1": b.b1, "b2": b.b2, "b3": b.b3, "b4": b.b4},
        "routh_hurwitz": rh.as_dict(),
        "eigenvalues": [[float(r.real), float(r.imag)] for r in eig.roots],
        "discriminant": float(eig.discriminant),
        "volume_rate": {"rate": vol.rate, "label": vol.label},
        "hopf": {
            "A": hopf.A,
            "B": hopf.B,
            "regime": hopf.regime,
            "v_minus": speeds.v_minus if speeds else None,
            "v_plus": speeds.v_plus if speeds else None,
            "degenerate": speeds.degenerate if speeds else None,
            "omega": hopf.omega,
            "omega_quartic_root": hopf.omega_quartic_root,
            "transversality_rate": hopf.transversality_rate,
            "transversality_sign": hopf.transversality_sign,
            "notes": list(hopf.notes),
        },
    }


def cmd_analyze(args) -> int:
    spec, run = _resolve_model(args)
    v = _need_v(args, run)
    fp, roots = _select_root(spec, args.root_index)
    report = _jsonsafe(_analysis_report(spec, fp, roots, v))
    formats = _formats(args)
    rh = report["routh_hurwitz"]
    hopf = report["hopf"]
    print(f"{spec.system} at v = {v:g}: stable = {rh['stable']}, "
          f"regime {hopf['regime']}, critical speeds "
          f"({_fmt_value(hopf['v_minus'])}, {_fmt_value(hopf['v_plus'])})"
          + (" [degenerate]" if hopf["degenerate"] else ""))
    if "text" in formats:
        _print_report(report)
    if "structured" in formats:
        _write_json(report, os.path.join(_out_dir(args), "report.json"))
    return 0


def _summary_dict(summary) -> dict:
    return {
        "classification": summary.classification,
        "final_state": [float(x) for x in summary.final_state],
        "zeta_star": summary.zeta_star,
        "d_initial": summary.d_initial,
        "d_final": summary.d_final,
        "n_peaks": summary.n_peaks,
        "amplitude_trend": [float(x) for x in summary.amplitude_trend],
        "peak_spread": summary.peak_spread,
        "period_estimate": summary.period_estimate,
    }


def cmd_simulate(args) -> int:
    spec, run = _resolve_model(args)
    v = _need_v(args, run)
    fp, _ = _select_root(spec, args.root_index)
    opts = _integration_options(args, run, default_span=(0.0, 300.0))
    traj = integrate(spec, v, opts)
    summary = summarize_oscillation(traj, fp)
    formats = _formats(args)
    out = _out_dir(args)
    line = f"classification: {summary.classification}"
    if summary.zeta_star is not None:
        line += f" (zeta* = {summary.zeta_star:.6g})"
    print(line)
    report = _jsonsafe({
        "command": "simulate",
        "system": spec.system,
        "v": float(v),
        "summary": _summary_dict(summary),
        "run": trajectory_metadata(traj, spec),
    })
    if "text" in formats:
        _print_report(report)
    if "structured" in formats:
        _write_json(report, os.path.join(out, "report.json"))
    if "csv" in formats:
        write_trajectory_csv(traj, os.path.join(out,
                                                          "trajectory.csv"))
        write_metadata(traj, spec,
                                 os.path.join(out, "trajectory_meta.json"))
    if "svg" in formats:
        svg = _svg.line_plot(traj.zetas,
                             [traj.component("N"), traj.component("P")],
                             ["N", "P"],
                             f"{spec.system} wave profile, v = {v:g}",
                             "zeta", "population")
        with open(os.path.join(out, "wave_profile.svg"), "w") as fh:
            fh.write(svg)
    return 0


def cmd_diagnose(args) -> int:
    spec, run = _resolve_model(args)
    v = _need_v(args, run)
    fp, _ = _select_root(spec, args.root_index)
    opts = _integration_options(args, run, default_span=(0.0, 600.0))
    embed_dim = int(_run_value(args, run, "embed_dim", int, 3))
    traj = integrate(spec, v, opts)
    if traj.termination != "completed":
        raise diagnostics.DiagnosticsError(
            "diagnostics require bounded dynamics; trajectory blows up at "
            f"zeta = {traj.zeta_star:.6g}")
    start = int(len(traj.zetas) * 0.2)
    series = traj.component("N")[start:]
    if len(series) < 2000:
        raise diagnostics.DiagnosticsError(
            f"only {len(series)} post-transient samples, need at least "
            "2000; widen --span")
    spectrum = diagnostics.power_spectral_density(series,
                                                  traj.options.sample_interval)
    flatness = diagnostics.spectral_flatness(spectrum)
    acf = diagnostics.autocorrelation(series)
    points = diagnostics.attractor_points(traj, embed_dim=embed_dim)
    est = diagnostics.cluster_fractal_dimension(points)
    try:
        classification = summarize_oscillation(traj, fp)\
            .classification
    except PeakCountError:
        classification = None
    headline = f"flatness = {flatness:.3e}, cluster dimension = " + (
        "no plateau" if est.D is None else f"{est.D:.3f}")
    print(headline)
    report = _jsonsafe({
        "command": "diagnose",
        "system": spec.system,
        "v": float(v),
        "classification": classification,
        "spectral_flatness": flatness,
        "dominant_frequency": spectrum.dominant_frequency(),
        "segment_length": spectrum.segment_length,
        "cluster_dimension": est.D,
        "plateau_range": list(est.plateau_range) if est.plateau_range
        else None,
        "cluster_prefactor": est.cluster_prefactor,
        "embed_dim": embed_dim,
        "n_points": int(len(points)),
        "acf_first_lags": [float(x) for x in acf[:5]],
    })
    formats = _formats(args)
    out = _out_dir(args)
    if "text" in formats:
        _print_report(report)
    if "structured" in formats:
        _write_json(report, os.path.join(out, "report.json"))
    if "csv" in formats:
        diagnostics.write_spectrum_csv(spectrum,
                                       os.path.join(out, "spectrum.csv"))
        diagnostics.write_scaling_csv(est, os.path.join(out, "scaling.csv"))
        dz = traj.options.sample_interval
        with open(os.path.join(out, "acf.csv"), "w") as fh:
            fh.write("lag,acf\n")
            for i, val in enumerate(acf):
                fh.write("%.17g,%.17g\n" % (i * dz, val))
    if "svg" in formats:
        svg = _svg.line_plot(spectrum.frequencies, [spectrum.power],
                             ["PSD"],
                             f"{spec.system} power spectrum, v = {v:g}",
                             "frequency", "power density", log_y=True)
        with open(os.path.join(out, "spectrum.svg"), "w") as fh:
            fh.write(svg)
        svg = _svg.line_plot(est.log_n / np.log(10.0), [est.local_slopes],
                             ["local slope"],
                             f"{spec.system} neighbor-count scaling, "
                             f"v = {v:g}",
                             "log10 n", "d log n / d log R")
        with open(os.path.join(out, "scaling.svg"), "w") as fh:
            fh.write(svg)
    return 0


def _sweep_row(spec, fp, v, do_simulate, opts):
    b = stability.coeffs_at(spec, fp, v)
    rh = stability.routh_hurwitz(b)
    row = {"v": float(v), "b1": b.b1, "b2": b.b2, "b3": b.b3, "b4": b.b4,
           "c1": rh.c1, "c2": rh.c2, "c3": rh.c3, "c4": rh.c4,
           "stable": rh.stable}
    if do_simulate:
        try:
            traj = integrate(spec, v, opts)
            summary = summarize_oscillation(traj, fp)
            row["classification"] = summary.classification
            row["zeta_star"] = summary.zeta_star
        except StiffnessError:
            row["classification"] = "integration_failed"
            row["zeta_star"] = None
        except PeakCountError:
            row["classification"] = "unclassified"
            row["zeta_star"] = None
    return row


def cmd_sweep(args) -> int:
    spec, run = _resolve_model(args)
    vr = _run_value(args, run, "v_range", _parse_vrange)
    if vr is None:
        raise model.ConfigError("sweep needs --v-range MIN:MAX:COUNT")
    if isinstance(vr, str):
        vr = _parse_vrange(vr)
    lo, hi, count = vr
    fp, _ = _select_root(spec, args.root_index)
    opts = _integration_options(args, run, default_span=(0.0, 300.0))
    grid = np.linspace(lo, hi, count)
    with concurrent.futures.ThreadPoolExecutor(
            max_workers=max(1, args.workers)) as pool:
        rows = list(pool.map(
            lambda v: _sweep_row(spec, fp, v, args.simulate, opts), grid))
    for i, row in enumerate(rows):
        nxt = rows[i + 1] if i + 1 < len(rows) else None
        row["c4_sign_change"] = bool(nxt is not None
                                     and np.sign(row["c4"]) != 0
                                     and np.sign(nxt["c4"]) != 0
                                     and np.sign(row["c4"])
                                     != np.sign(nxt["c4"]))
    rows = [_jsonsafe(r) for r in rows]
    formats = _formats(args)
    out = _out_dir(args)
    cols = list(rows[0].keys())
    if "text" in formats:
        print("  ".join("%12s" % c for c in cols))
        for row in rows:
            print("  ".join("%12s" % _fmt_value(row[c]) for c in cols))
    for i, row in enumerate(rows[:-1]):
        if row["c4_sign_change"]:
            print(f"critical speed bracketed between v = {row['v']:g} and "
                  f"v = {rows[i + 1]['v']:g} (c4 changes sign)")
    if "csv" in formats:
        with open(os.path.join(out, "sweep.csv"), "w") as fh:
            fh.write(",".join(cols) + "\n")
            for row in rows:
                cells = []
                for c in cols:
                    val = row[c]
                    if isinstance(val, bool):
                        cells.append("true" if val else "false")
                    elif isinstance(val, float):
                        cells.append("%.17g" % val)
                    else:
                        cells.append("" if val is None else str(val))
                fh.write(",".join(cells) + "\n")
    if "structured" in formats:
        _write_json({"command": "sweep", "system": spec.system,
                     "rows": rows}, os.path.join(out, "sweep.json"))
    return 0


def cmd_presets(args) -> int:
    for sysid in model.SYSTEM_IDS:
        spec = model.make_preset(sysid)
        params = spec.params.as_dict()
        pairs = " ".join(f"{k}={params[k]:g}" for k in sorted(params))
        print(f"{sysid}: {_PRESET_NOTES[sysid]}")
        print(f"   {pairs}")
        print(f"   prey self-limitation coefficient: {spec.eps_tilde:g}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="wavetrain",
                     description="Traveling-wave stability analysis and "
                                 "chaos diagnostics for two-species "
                                 "reaction-diffusion models.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    par_model = _Parser(add_help=False)
    par_model.add_argument("--preset", choices=model.SYSTEM_IDS,
                           help="stock system id")
    par_model.add_argument("--config", metavar="PATH",
                           help="flat key=value model file; flags override "
                                "file values")
    par_model.add_argument("--root-index", type=int, default=None,
                           help="pick the n-th real fixed point (sorted by "
                                "N0) instead of the physical one")

    par_integ = _Parser(add_help=False)
    par_integ.add_argument("--span", metavar="A:B",
                           type=_argtype(_parse_span), default=None,
                           help="integration interval in zeta")
    par_integ.add_argument("--ic", metavar="N,M,P,Q",
                           type=_argtype(_parse_ic), default=None,
                           help="initial state")
    par_integ.add_argument("--rel-tol", type=float, default=None)
    par_integ.add_argument("--abs-tol", type=float, default=None)
    par_integ.add_argument("--sample-interval", type=float, default=None)

    par_out = _Parser(add_help=False)
    par_out.add_argument("--out", metavar="DIR", default=None,
                         help="output directory (default: current)")
    par_out.add_argument("--format", metavar="LIST", default=None,
                         help="comma list from text, structured, csv, svg "
                              "(default: text,structured,csv)")

    p = sub.add_parser("analyze", parents=[par_model, par_out],
                       help="stability report at one wave speed")
    p.add_argument("--v", type=float, default=None, help="wave speed")

    p = sub.add_parser("simulate", parents=[par_model, par_integ, par_out],
                       help="integrate a trajectory and classify it")
    p.add_argument("--v", type=float, default=None, help="wave speed")

    p = sub.add_parser("diagnose", parents=[par_model, par_integ, par_out],
                       help="spectrum, autocorrelation and fractal "
                            "dimension of a bounded run")
    p.add_argument("--v", type=float, default=None, help="wave speed")
    p.add_argument("--embed-dim", type=int, choices=(2, 3, 4), default=None,
                   help="phase-space embedding dimension (default 3)")

    p = sub.add_parser("sweep", parents=[par_model, par_integ, par_out],
                       help="stability table over a grid of wave speeds")
    p.add_argument("--v-range", metavar="MIN:MAX:COUNT", default=None)
    p.add_argument("--workers", type=int, default=4,
                   help="concurrent sweep points (default 4)")
    p.add_argument("--simulate", action="store_true",
                   help="also integrate and classify each point")

    sub.add_parser("presets", help="list the stock systems")
    return parser


_DISPATCH = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "sweep": cmd_sweep,
    "presets": cmd_presets,
}

# flags whose values can legitimately start with a minus sign; argparse
# only special-cases bare negative numbers, so "--v-range -6:-4.5:7"
# would otherwise be read as a missing argument
_DASH_VALUE_FLAGS = ("--v-range", "--span", "--ic")


def _merge_dash_values(argv):
    merged = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok in _DASH_VALUE_FLAGS and i + 1 < len(argv)
                and argv[i + 1].startswith("-")
                and any(ch.isdigit() for ch in argv[i + 1])):
            merged.append(tok + "=" + argv[i + 1])
            i += 2
        else:
            merged.append(tok)
            i += 1
    return merged


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_dash_values(list(argv)))
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return 0
        return code if isinstance(code, int) else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _DISPATCH[args.command](args)
    except model.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NoPhysicalRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.roots:
            for i, fp in enumerate(exc.roots):
                print(f"  root {i}: N0 = {fp.N0:.10g}, P0 = {fp.P0:.10g}, "
                      f"physical = {fp.physical}", file=sys.stderr)
        else:
            print("  no real fixed point at all", file=sys.stderr)
        print("use --root-index to analyze a non-physical root",
              file=sys.stderr)
        return 2
    except PeakCountError as exc:
        print(f"error: {exc} (widen --span to collect more oscillations)",
              file=sys.stderr)
        return 1
    except StiffnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except diagnostics.DiagnosticsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except model.ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # bad numeric option that passed flag parsing, e.g. --rel-tol -1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
