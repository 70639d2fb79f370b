"""Command-line front end.

Each subcommand writes its data files plus ``manifest.json`` to the output
directory (``--out``, else $EWMIRROR_OUT, else ./ewmirror_out). Errors
exit with status 2 and a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import budget as bd
from . import io
from . import mirror as md
from . import montecarlo as mc
from . import optics as op
from .config import ConfigError, parse_config
from .core import KinematicState, impact_momentum

OUT_ENV = "EWMIRROR_OUT"


def _common(parser):
    parser.add_argument("--config", type=Path, help="INI-style run configuration (default: reference)")
    parser.add_argument("--seed", type=int, help="master seed (overrides run.seed)")
    parser.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./ewmirror_out)")
    parser.add_argument("--threads", type=int, help="worker threads, 0 = all cores; output does not depend on it")
    parser.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a configuration entry (repeatable)")


def build_parser():
    parser = argparse.ArgumentParser(prog="ewmirror", description=__doc__.splitlines()[0],
                                     epilog=f"Environment: {OUT_ENV} sets the default output directory.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [("field", "two-beam evanescent polarization map (CSV) and single-beam summary"),
                       ("bounce", "one trajectory: t, z, v, accumulated Raman exposure (CSV)"),
                       ("mc", "ensemble histogram of pump coordinates (CSV) and compression report"),
                       ("budget", "dark-state scattering budget (JSON) and detuning scan (CSV)")]:
        _common(sub.add_parser(name, help=text))
    sw = sub.add_parser("sweep", help="scan one configuration entry, one CSV row per point")
    _common(sw)
    sw.add_argument("param", help="SECTION.KEY to scan, e.g. mirror.detuning_gamma")
    sw.add_argument("start", type=float)
    sw.add_argument("stop", type=float)
    sw.add_argument("steps", type=int)
    sw.add_argument("--outputs", default="peak_final,pumped_fraction",
                    help="comma-separated report or budget fields")
    opt = sub.add_parser("optimize", help="golden-section search for the largest peak density")
    _common(opt)
    opt.add_argument("--free", action="append", required=True, metavar="NAME:LO:HI",
                     help="kappa (units of k_L), ratio (units of m v_i / 2 kappa) or delta1 (units of Gamma)")
    return parser


def _overrides(args):
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    if args.seed is not None:
        out["run.seed"] = str(args.seed)
    if args.threads is not None:
        out["run.threads"] = str(args.threads)
    return out


def _nominal_momentum(cfg):
    return impact_momentum(cfg.species(), cfg["molasses"]["drop_height"])


def cmd_field(cfg, out):
    geom = cfg.geometry()
    angle, extent, points, pols = cfg.field_settings()
    span = extent * geom.lambda0
    grid = np.linspace(-span / 2, span / 2, points)
    fmap = op.field_map(geom, angle, grid, grid, pols)
    ellipse = op.required_input_polarization(geom)
    evan = op.evanescent_field(geom, op.incident_field(geom, ellipse))
    summary = {
        "kappa_per_m": op.decay_constant(geom),
        "kappa_over_k": geom.q,
        "input_ellipticity": ellipse.ellipticity,
        "input_orientation_rad": ellipse.orientation,
        "poynting_tilt_rad": op.poynting_tilt(geom),
        "evanescent_circularity": evan.degree_of_circularity,
        "sigma_line_spacing_m": op.sigma_line_spacing(geom, angle),
    }
    return [io.write_csv(out / "field.csv", fmap), io.write_json(out / "field_summary.json", summary)]


def cmd_bounce(cfg, out):
    mirror = cfg.mirror()
    mol = cfg.molasses()
    edge = md.entry_edge(mirror, cfg["mirror"]["edge_level"])
    entry = mc.free_fall_to_mirror(KinematicState(mol.drop_height, 0.0), edge)
    rng = mc.block_rng(cfg.seed, 0)
    opts = md.BounceOptions(gravity=cfg["mirror"]["gravity"], record=True)
    res = md.integrate_bounce(mirror, entry, rng, opts)
    path = res.path
    outcome = {
        "status": md.STATUS_NAMES[res.status],
        "z_p": res.z_p, "v_p": res.v_p,
        "photons_scattered": res.photons_scattered,
        "raman_exposure": res.raman_exposure,
        "t_exit": res.t_exit,
        "entry": {"z": entry.z, "v": entry.v, "t": entry.t},
    }
    return [io.write_csv(out / "bounce.csv", {"t": path[:, 0], "z": path[:, 1], "v": path[:, 2],
                                              "exposure": path[:, 3]}),
            io.write_json(out / "bounce.json", outcome)]


def cmd_mc(cfg, out):
    hist, report = mc.run_ensemble(cfg.molasses(), cfg.mirror(), cfg.binning(), threads=cfg.threads,
                                   edge_level=cfg["mirror"]["edge_level"])
    return [io.write_histogram_csv(out / "histogram.csv", hist), io.write_json(out / "report.json", report.as_dict())]


def cmd_budget(cfg, out):
    inp = cfg.budget_input()
    b = cfg["budget"]
    budget = bd.assemble_budget(inp)
    doc = {"inputs": {k: b[k] for k in ("delta1_ghz", "u1_ref_mhz", "impurity_eps",
                                        "line_strength_d2_over_d1", "crosstalk_delta1_ghz")},
           **budget.as_dict(),
           "trap_frequency_hz": budget.trap_frequency / (2 * math.pi)}
    scan = bd.detuning_scan(inp, 2 * math.pi * 1e9 * np.linspace(b["scan_min_ghz"], b["scan_max_ghz"],
                                                                  b["scan_points"]))
    return [io.write_json(out / "budget.json", doc), io.write_csv(out / "budget_scan.csv", scan)]


def _scalars(cfg, names):
    values = {}
    report_fields = set(mc.CompressionReport.__dataclass_fields__)
    budget_fields = set(bd.ScatteringBudget.__dataclass_fields__)
    if any(n in report_fields for n in names):
        _, rep = mc.run_ensemble(cfg.molasses(), cfg.mirror(), cfg.binning(), threads=cfg.threads,
                                 edge_level=cfg["mirror"]["edge_level"])
        values.update(rep.as_dict())
    if any(n in budget_fields for n in names):
        values.update(bd.assemble_budget(cfg.budget_input()).as_dict())
    return {n: float(values[n]) for n in names}


def cmd_sweep(cfg, out, args, overrides):
    names = [n.strip() for n in args.outputs.split(",") if n.strip()]
    known = set(mc.CompressionReport.__dataclass_fields__) | set(bd.ScatteringBudget.__dataclass_fields__)
    unknown = [n for n in names if n not in known]
    if unknown:
        raise ConfigError(f"unknown sweep outputs: {', '.join(unknown)}")
    if args.steps < 1:
        raise ConfigError("sweep needs steps >= 1")
    columns = {args.param: [], **{n: [] for n in names}}
    for value in np.linspace(args.start, args.stop, args.steps):
        point = parse_config(args.config, {**overrides, args.param: repr(float(value))})
        columns[args.param].append(float(value))
        for n, x in _scalars(point, names).items():
            columns[n].append(x)
    return [io.write_csv(out / "sweep.csv", columns)]


def cmd_optimize(cfg, out, args):
    mirror = cfg.mirror()
    mol = cfg.molasses()
    p_i = _nominal_momentum(cfg)
    scale = {"kappa": mirror.geom.k0, "ratio": md.optimal_ratio(mirror.species, p_i, mirror.kappa),
             "delta1": mirror.species.gamma}
    bounds = {}
    for item in args.free:
        try:
            name, lo, hi = item.split(":")
            bounds[name] = (float(lo) * scale[name], float(hi) * scale[name])
        except (ValueError, KeyError):
            raise ConfigError(f"--free expects NAME:LO:HI with NAME in kappa/ratio/delta1, got {item!r}") from None
    res = mc.optimize_peak(mol, mirror, bounds, bins=cfg.binning(), threads=cfg.threads)
    doc = {"params": res.params,
           "params_scaled": {k: v / scale[k] for k, v in res.params.items()},
           "units_scaled": {"kappa": "k_L", "ratio": "m v_i / 2 kappa", "delta1": "Gamma"},
           "at_boundary": res.at_boundary,
           "evaluations": res.evaluations,
           "report": res.report.as_dict()}
    return [io.write_json(out / "optimize.json", doc)]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = datetime.now(timezone.utc).isoformat()
    try:
        overrides = _overrides(args)
        cfg = parse_config(args.config, overrides)
        out = args.out or Path(os.environ.get(OUT_ENV, "ewmirror_out"))
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "sweep":
            files = cmd_sweep(cfg, out, args, overrides)
        elif args.command == "optimize":
            files = cmd_optimize(cfg, out, args)
        else:
            files = {"field": cmd_field, "bounce": cmd_bounce, "mc": cmd_mc, "budget": cmd_budget}[args.command](cfg, out)
        manifest = {
            "command": args.command,
            "config_hash": cfg.config_hash(),
            "config": cfg.values,
            "seed": cfg.seed,
            "version": __version__,
            "started": started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": [p.name for p in files],
        }
        io.write_json(out / "manifest.json", manifest)
    except (ValueError, RuntimeError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
