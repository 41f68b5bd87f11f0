"""Command-line front end.

Subcommands
-----------
times-sweep         stationary times over a k or L sweep
resonances          full-transparency wavenumbers in a k range
packet-run          Gaussian packet: CM tracks, norms and extracted times
demo-superposition  current audit of the naive two-piece split

Options can come from a JSON config file (keys are the long flag names with
dashes turned into underscores); explicit flags win over the file.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
import argparse
import csv
import io
import json
import re
import sys as _sys

import numpy as np
from scipy import constants

from . import __version__
from .chartimes import times as stationary_times
from .scatter import BarrierSystem, NumericalFailure, compose_two_barrier, find_resonances
from .superposition import current_audit, naive_split, pair_for_transmission, split_for_system
from .wavepacket import (acceleration_factor, asymptotic_group_times_packet, build_spectrum, cm_track,
                         default_window, local_group_times, norm_trace, PacketModel, spectrum_for_window)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

# SI working units: nm, eV, ps; mass flag in electron masses
HBAR_SI = constants.hbar / constants.e * 1e12                       # eV ps
ELECTRON_MASS_SI = constants.m_e / constants.e * 1e24 / 1e18        # eV ps^2 / nm^2

DEFAULTS = {
    "units": "reduced", "v0": 1.0, "d": 1.0, "gap": 0.0, "a1": None, "mass": None,
    "sweep": "k", "range": None, "k": None, "format": "csv", "out": None,
    "l0": None, "kbar": None, "ebar": None, "tau_free": None, "t_range": None,
    "min_lk": 5.0, "nk": None, "q": None, "p": None, "T": None, "summary": None,
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# -- configuration --------------------------------------------------------------

def _parse_range(text, name, need_n=True):
    """``lo:hi:n`` (or ``lo:hi`` when ``need_n`` is False)."""
    parts = str(text).split(":")
    if len(parts) not in ((3,) if need_n else (2, 3)):
        raise ConfigError(f"--{name} expects lo:hi{':n' if need_n else ''}, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) == 3 else None
    except ValueError as exc:
        raise ConfigError(f"--{name}: cannot parse {text!r}") from exc
    if n is not None and n < 1:
        raise ConfigError(f"--{name}: point count must be >= 1")
    if hi < lo or (hi == lo and n != 1):
        raise ConfigError(f"--{name}: need lo < hi, got {text!r}")
    return lo, hi, n


def _key_line(text, key):
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def load_config(path):
    """Read a JSON config; errors carry the file name and line."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: top level must be an object")
    out = {}
    for key, value in data.items():
        norm = key.replace("-", "_")
        if norm not in DEFAULTS and norm != "command":
            raise ConfigError(f"{path}:{_key_line(text, key)}: unknown option {key!r}")
        if isinstance(value, (dict, list)):
            raise ConfigError(f"{path}:{_key_line(text, key)}: option {key!r} must be a scalar")
        out[norm] = value
    return out


def merge_config(args):
    """Defaults < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        filecfg = load_config(args.config)
        cmd = filecfg.pop("command", None)
        if cmd is not None and cmd != args.command:
            raise ConfigError(f"{args.config}: config is for {cmd!r}, invoked {args.command!r}")
        cfg.update(filecfg)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["units"] not in ("reduced", "si"):
        raise ConfigError(f"--units must be 'reduced' or 'si', got {cfg['units']!r}")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"--format must be 'csv' or 'json', got {cfg['format']!r}")
    return cfg


def _float(cfg, key):
    try:
        return float(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--{key.replace('_', '-')}: expected a number, got {cfg[key]!r}") from exc


def build_system(cfg):
    """BarrierSystem in the declared unit system."""
    if cfg["units"] == "si":
        hbar = HBAR_SI
        mass = ELECTRON_MASS_SI * (1.0 if cfg["mass"] is None else _float(cfg, "mass"))
    else:
        hbar = 1.0
        mass = 0.5 if cfg["mass"] is None else _float(cfg, "mass")
    v0, d, gap = _float(cfg, "v0"), _float(cfg, "d"), _float(cfg, "gap")
    a1 = _float(cfg, "a1") if cfg["a1"] is not None else max(1.0, d)
    try:
        return BarrierSystem(V0=v0, d=d, L=gap, a1=a1, mass=mass, hbar=hbar)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# -- output -----------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, str):
        return v
    v = float(v)
    return v if np.isfinite(v) else None


def render(columns, rows, fmt, metadata):
    """CSV (with '#' preamble) or JSON array of row objects."""
    if fmt == "json":
        data = [{c: _jsonable(r[c]) for c in columns} for r in rows]
        return json.dumps(data, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    for key, val in metadata.items():
        buf.write(f"# {key}: {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _metadata(cfg, command, sysm=None):
    keys = sorted(k for k, v in cfg.items() if v is not None and k not in ("out", "format", "summary"))
    meta = {"command": command, "version": f"tunneltime {__version__}", "units": cfg["units"],
            "config": json.dumps({k: cfg[k] for k in keys}, sort_keys=True)}
    if sysm is not None:
        meta["hbar"] = _fmt(sysm.hbar)
        meta["mass"] = _fmt(sysm.mass)
    return meta


# -- commands ---------------------------------------------------------------------

TIME_COLUMNS = ["tau_dwell_tr", "tau_dwell", "tau_ph", "tau_as", "t_dep", "tau_dwell_ref", "tau_free"]


def times_table(sysm, sweep, values, k_fixed=None):
    """Rows of scaled times for a k sweep (vector) or an L sweep (per system)."""
    rows = []
    if sweep == "k":
        rep = stationary_times(sysm, np.asarray(values, float))
        reports = [(float(k), rep, i) for i, k in enumerate(values)]
    else:
        reports = [(float(L), stationary_times(sysm.with_(L=float(L)), np.asarray([k_fixed], float)), 0)
                   for L in values]
    for value, rep, i in reports:
        tau0 = rep.tau0
        row = {sweep: value, "tau0": tau0}
        fields = {"tau_dwell_tr": rep.dwell_tr.total, "tau_dwell": rep.dwell_tot.total,
                  "tau_ph": rep.tau_ph, "tau_as": rep.tau_as, "t_dep": rep.t_dep,
                  "tau_dwell_ref": rep.dwell_ref.total, "tau_free": rep.tau_free}
        for name, arr in fields.items():
            row[f"{name}_over_tau0"] = float(np.asarray(arr)[i]) / tau0
        row["T_two"] = float(rep.T_two[i])
        row["near_resonance"] = bool(rep.near_resonance[i])
        row["reflection_empty"] = bool(rep.dwell_ref.empty[i])
        rows.append(row)
    columns = [sweep, "tau0"] + [f"{c}_over_tau0" for c in TIME_COLUMNS] + \
              ["T_two", "near_resonance", "reflection_empty"]
    return columns, rows


def cmd_times_sweep(cfg):
    sysm = build_system(cfg)
    if cfg["range"] is None:
        raise ConfigError("--range lo:hi:n is required for times-sweep")
    lo, hi, n = _parse_range(cfg["range"], "range")
    values = np.linspace(lo, hi, n) if n > 1 else np.array([lo])
    if cfg["sweep"] not in ("k", "L"):
        raise ConfigError(f"--sweep must be 'k' or 'L', got {cfg['sweep']!r}")
    if cfg["sweep"] == "k":
        if lo <= 0:
            raise ConfigError("--range: wavenumbers must be positive")
        columns, rows = times_table(sysm, "k", values)
    else:
        if cfg["k"] is None:
            raise ConfigError("--k is required for an L sweep")
        if lo < 0:
            raise ConfigError("--range: gaps must be non-negative")
        columns, rows = times_table(sysm, "L", values, k_fixed=_float(cfg, "k"))
    emit(render(columns, rows, cfg["format"], _metadata(cfg, "times-sweep", sysm)), cfg["out"])


def cmd_resonances(cfg):
    sysm = build_system(cfg)
    if cfg["range"] is None:
        raise ConfigError("--range lo:hi is required for resonances")
    lo, hi, _ = _parse_range(cfg["range"], "range", need_n=False)
    if lo <= 0:
        raise ConfigError("--range: wavenumbers must be positive")
    ks = find_resonances(sysm, lo, hi)
    kappa0 = np.sqrt(abs(sysm.kappa0_sq))
    rows = []
    for i, k in enumerate(ks, 1):
        two = compose_two_barrier(sysm, k)
        rows.append({"index": i, "k": k, "k_over_kappa0": k / kappa0, "T_two": float(two.T_two),
                     "single_barrier_transparent": bool(abs(float(two.one.s)) < 1e-8)})
    columns = ["index", "k", "k_over_kappa0", "T_two", "single_barrier_transparent"]
    emit(render(columns, rows, cfg["format"], _metadata(cfg, "resonances", sysm)), cfg["out"])


def _packet_setup(cfg):
    if cfg["tau_free"] is not None:
        # calibrate the mass so that m D/(hbar kbar) equals the given free time
        if cfg["ebar"] is None:
            raise ConfigError("--tau-free calibration needs --ebar")
        if cfg["mass"] is not None:
            raise ConfigError("--tau-free and --mass are mutually exclusive")
        probe = build_system(cfg)
        e, tf = _float(cfg, "ebar"), _float(cfg, "tau_free")
        mass = 2 * e * (tf / probe.D) ** 2
        sysm = probe.with_(mass=mass)
    else:
        sysm = build_system(cfg)
    if cfg["l0"] is None:
        raise ConfigError("--l0 is required for packet-run")
    l0 = _float(cfg, "l0")
    if cfg["kbar"] is not None and cfg["ebar"] is not None:
        raise ConfigError("give either --kbar or --ebar, not both")
    if cfg["kbar"] is not None:
        kbar = _float(cfg, "kbar")
    elif cfg["ebar"] is not None:
        kbar = np.sqrt(2 * sysm.mass * _float(cfg, "ebar")) / sysm.hbar
    else:
        raise ConfigError("--kbar or --ebar is required for packet-run")
    if cfg["t_range"] is None:
        raise ConfigError("--t-range lo:hi:n is required for packet-run")
    t_lo, t_hi, n = _parse_range(cfg["t_range"], "t-range")
    if t_hi <= t_lo:
        raise ConfigError("--t-range needs lo < hi")
    return sysm, l0, kbar, t_lo, t_hi, n


def run_packet(sysm, l0, kbar, t_lo, t_hi, n, min_lk=5.0, nk=None):
    """Full packet analysis; returns (columns, rows, summary dict)."""
    win = default_window(sysm, l0, kbar, t_lo, t_hi)
    try:
        if nk is None:
            sp = spectrum_for_window(l0, kbar, win.length, min_lk=min_lk)
        else:
            sp = build_spectrum(l0, kbar, n=int(nk), min_lk=min_lk)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    model = PacketModel(sp, sysm, win)
    traj = cm_track(model, (t_lo, t_hi), n=n)
    loc = local_group_times(traj)
    asym = asymptotic_group_times_packet(sp, sysm)
    trace = norm_trace(model, traj.times)
    free_ref = asym.free_reference(traj.times)
    acc = acceleration_factor(traj, asym.v_tr) if loc.reached else None

    rows = [{"t": t, "xbar_tot": a, "xbar_tr": b, "xbar_ref": c, "x_free_reference": f,
             "norm_T": nt, "norm_R": nr, "norm_total": ntot, "imbalance_xc": im}
            for t, a, b, c, f, nt, nr, ntot, im in zip(
                traj.times, traj.xbar_tot, traj.xbar_tr, traj.xbar_ref, free_ref,
                trace.T, trace.R, trace.total, trace.imbalance)]
    columns = list(rows[0]) if rows else []
    summary = {
        "tau_loc_tr": loc.tau_loc_tr, "tau_loc_ref": loc.tau_loc_ref,
        "t_entry_tr": loc.entry_tr, "t_exit_tr": loc.exit_tr,
        "tau_as_tr": asym.tau_as_tr, "tau_as_ref": asym.tau_as_ref,
        "t_dep_tr": asym.t_dep_tr, "t_arr_tr": asym.t_arr_tr,
        "tau_free": sysm.mass * sysm.D / (sysm.hbar * kbar),
        "T_as": asym.averages.T_as, "R_as": asym.averages.R_as,
        "kbar": kbar, "kbar_tr": asym.averages.kbar_tr, "mass": sysm.mass,
        "acceleration_before": acc.before if acc else float("nan"),
        "acceleration_after": acc.after if acc else float("nan"),
        "clipped_mass": sp.clipped_mass, "nk": sp.k.size, "nx": model.x.size,
        "R_drift": float(np.ptp(trace.R)), "T_net_change": float(trace.T[-1] - trace.T[0]),
    }
    return columns, rows, summary


def cmd_packet_run(cfg):
    sysm, l0, kbar, t_lo, t_hi, n = _packet_setup(cfg)
    nk = None if cfg["nk"] is None else int(cfg["nk"])
    columns, rows, summary = run_packet(sysm, l0, kbar, t_lo, t_hi, n, _float(cfg, "min_lk"), nk)
    meta = _metadata(cfg, "packet-run", sysm)
    if cfg["tau_free"] is not None:
        meta["note"] = "mass calibrated from --tau-free (reconstruction; not a measured mass)"
    for key, val in summary.items():
        meta[f"summary.{key}"] = _fmt(val)
    emit(render(columns, rows, cfg["format"], meta), cfg["out"])
    srow = [summary]
    stext = render(list(summary), srow, cfg["format"], _metadata(cfg, "packet-run summary", sysm))
    if cfg["summary"]:
        emit(stext, cfg["summary"])


def _complex(cfg, key):
    try:
        return complex(str(cfg[key]).replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"--{key}: cannot parse complex number {cfg[key]!r}") from exc


def cmd_demo_superposition(cfg):
    try:
        if cfg["q"] is not None or cfg["p"] is not None:
            if cfg["q"] is None or cfg["p"] is None:
                raise ConfigError("--q and --p go together")
            split = naive_split(_complex(cfg, "q"), _complex(cfg, "p"))
            source = "pair"
        elif cfg["T"] is not None:
            split = naive_split(*pair_for_transmission(_float(cfg, "T")))
            source = "transmission"
        else:
            if cfg["k"] is None:
                raise ConfigError("give --q/--p, --T, or a system with --k")
            sysm = build_system(cfg)
            k = _float(cfg, "k")
            if k <= 0:
                raise ConfigError("--k must be positive")
            split = split_for_system(sysm, k)
            source = "two-barrier system"
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    audit = current_audit(split)
    row = audit.as_dict()
    row["source"] = source
    # keep stdout clean for the table unless it goes to a file
    (_sys.stdout if cfg["out"] else _sys.stderr).write(audit.summary + "\n")
    columns = ["source"] + [c for c in row if c != "source"]
    emit(render(columns, [row], cfg["format"], _metadata(cfg, "demo-superposition")), cfg["out"])


COMMANDS = {
    "times-sweep": cmd_times_sweep,
    "resonances": cmd_resonances,
    "packet-run": cmd_packet_run,
    "demo-superposition": cmd_demo_superposition,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("system")
    g.add_argument("--config", help="JSON file with option values")
    g.add_argument("--units", choices=["reduced", "si"])
    g.add_argument("--v0", type=float, help="barrier height (energy)")
    g.add_argument("--d", type=float, help="barrier width")
    g.add_argument("--gap", type=float, help="gap L between the barriers")
    g.add_argument("--a1", type=float, help="left edge of the system")
    g.add_argument("--mass", type=float, help="particle mass (electron masses with --units si)")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=["csv", "json"])
    o.add_argument("--out", help="output path (default stdout)")

    parser = argparse.ArgumentParser(prog="tunneltime", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"tunneltime {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("times-sweep", parents=[common], help="stationary times over k or L")
    p.add_argument("--sweep", choices=["k", "L"])
    p.add_argument("--range", help="lo:hi:n")
    p.add_argument("--k", type=float, help="fixed wavenumber for an L sweep")

    p = sub.add_parser("resonances", parents=[common], help="full-transparency wavenumbers")
    p.add_argument("--range", help="lo:hi")

    p = sub.add_parser("packet-run", parents=[common], help="Gaussian packet dynamics")
    p.add_argument("--l0", type=float, help="packet width parameter")
    p.add_argument("--kbar", type=float, help="mean wavenumber")
    p.add_argument("--ebar", type=float, help="mean energy (alternative to --kbar)")
    p.add_argument("--tau-free", dest="tau_free", type=float,
                   help="calibrate the mass so that m D/(hbar kbar) equals this time")
    p.add_argument("--t-range", dest="t_range", help="lo:hi:n")
    p.add_argument("--min-lk", dest="min_lk", type=float, help="smallest accepted l0*kbar (default 5)")
    p.add_argument("--nk", type=int, help="number of k points (default: sized from the window)")
    p.add_argument("--summary", help="path for the one-row summary table")

    p = sub.add_parser("demo-superposition", parents=[common], help="current audit of the naive split")
    p.add_argument("--q", help="transfer-matrix element q, e.g. 1.2+0.3j")
    p.add_argument("--p", help="transfer-matrix element p")
    p.add_argument("--T", type=float, help="transmission of a synthetic (q, p) pair")
    p.add_argument("--k", type=float, help="wavenumber for the two-barrier system")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_config(args)
        COMMANDS[args.command](cfg)
    except ConfigError as exc:
        _sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except NumericalFailure as exc:
        _sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
