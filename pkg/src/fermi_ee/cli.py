"""Command-line front end: ``fermi-ee <command> --config <path> [--out DIR] [--tol X] [--threads N]``.

Every command writes ``<out>/<command>.csv`` (``#`` comment lines, then a
header row) and ``<out>/<command>.json`` (schema 1: config echo, version,
error estimates, summaries).  Exit codes: 0 success, 1 computation failure or
failed acceptance check, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import boundary as B
from .acceptance import Context, run_acceptance
from .analysis import SampleSeries, fit_log_law, fit_power_law
from .config import RunConfig, load_config
from .crossover import crossover_consistency_report, crossover_entropy
from .errors import ConfigError, FermiEEError, NoFermiSurfaceError, UnsupportedConfigurationError
from .oracle import scaling_study
from .thermodynamics import density, entropy_density, entropy_density_from_pressure, low_temperature_report

log = logging.getLogger("fermi_ee")

COMMANDS = ("entropy-density", "eta", "oracle", "low-t-report", "high-t-report", "crossover-report", "verify")

UNITS = "units: k_B = 1; energies, T and mu in units fixed by hbar and mass from the config"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows, comments=()):
    buf = io.StringIO()
    for c in (UNITS, f"fermi-ee {__version__}", *comments):
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    path.write_text(buf.getvalue())


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path: Path, command: str, cfg: RunConfig, payload: dict):
    doc = {"schema": 1, "command": command, "version": __version__, "config": cfg.to_dict(), **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _points(cfg, disp):
    pts = {T: cfg.thermo.point(disp, T) for T in cfg.temperatures}
    return [(a, T, pts[T]) for a in cfg.alpha for T in cfg.temperatures]


def _rho(disp, pt):
    return pt.rho if pt.rho is not None else density(disp, pt.T, pt.mu)


def cmd_entropy_density(cfg, threads):
    disp = cfg.build_dispersion()

    def job(item):
        a, T, pt = item
        s = entropy_density(disp, a, pt, cfg.tol)
        if a != 1.0:
            err = abs(s - entropy_density_from_pressure(disp, a, pt, cfg.tol))
        else:
            err = abs(s - entropy_density(disp, a, pt, cfg.tol * 1e-2))
        return (a, T, pt.mu, _rho(disp, pt), s, err)

    rows = _pmap(job, _points(cfg, disp), threads)
    header = ["alpha", "T", "mu", "rho", "s_alpha", "error_estimate"]
    return header, rows, {"max_error_estimate": max(r[-1] for r in rows)}


def cmd_eta(cfg, threads):
    disp = cfg.build_dispersion()
    dom = cfg.build_domain()

    def job(item):
        a, T, pt = item
        val, err = B.eta_coefficient_with_error(disp, dom, a, pt, cfg.tol)
        pred = None
        if pt.mu > 0:
            pred = B.eta_low_T_prediction(disp, dom, a, pt.mu, T)
        return (a, T, pt.mu, _rho(disp, pt), val, err, pred)

    rows = _pmap(job, _points(cfg, disp), threads)
    header = ["alpha", "T", "mu", "rho", "eta", "error_estimate", "low_T_prediction"]
    return header, rows, {"max_error_estimate": max(r[5] for r in rows)}


def cmd_oracle(cfg, threads):
    disp = cfg.build_dispersion()
    dom = cfg.build_domain()
    if disp.d != 1:
        raise UnsupportedConfigurationError("unsupported-configuration: the spectral oracle needs d = 1")

    def job(item):
        a, T, pt = item
        fit = scaling_study(disp, pt, dom, a, cfg.L_grid)
        eta = B.eta_coefficient(disp, dom, a, pt, min(cfg.tol, 1e-8))
        return a, T, pt, fit, eta

    rows, fits = [], []
    for a, T, pt, fit, eta in _pmap(job, _points(cfg, disp), threads):
        ex = fit.extra
        for L, S, tr in zip(ex["L"], ex["S"], ex["regularized_trace"]):
            rows.append((a, T, pt.mu, L, S, tr, eta))
        fits.append({"alpha": a, "T": T, "mu": pt.mu, "eta_formula": eta,
                     "eta_fit_rel_dev": abs(ex["eta_measured"] - eta) / abs(eta) if eta else None,
                     **fit.as_dict()})
    header = ["alpha", "T", "mu", "L", "S_alpha", "regularized_trace", "eta_formula"]
    return header, rows, {"fits": fits}


def cmd_low_t_report(cfg, threads):
    disp = cfg.build_dispersion()
    dom = cfg.build_domain()
    mode, val = cfg.thermo.mode, cfg.thermo.value
    rows, details = [], []
    for a in cfg.alpha:
        rep = low_temperature_report(disp, a, mu=val if mode == "mu" else None,
                                     rho=val if mode == "rho" else None, tol=max(cfg.tol, 1e-12))
        rows.append(("s_alpha/T", a, rep.extrapolated, rep.predicted, rep.relative_deviation))
        details.append({"alpha": a, "temperatures": rep.temperatures, "slopes": rep.slopes,
                        "activated": rep.activated})
        if mode == "mu" and val > 0 and len(cfg.temperatures) >= 3:
            Ts = sorted(cfg.temperatures)
            etas = _pmap(lambda T: B.eta_coefficient(disp, dom, a, cfg.thermo.point(disp, T), cfg.tol), Ts, threads)
            slope, icpt, se = fit_log_law(SampleSeries(tuple(Ts), tuple(etas)), val)
            want = B.fermi_surface_factor_J(disp, dom, val) / 12 * (1 + a) / (2 * a)
            rows.append(("eta_log_slope", a, slope, want, abs(slope - want) / want))
            details.append({"alpha": a, "eta_T": Ts, "eta": etas, "intercept": icpt, "stderr": se})
    header = ["quantity", "alpha", "measured", "predicted", "relative_deviation"]
    return header, rows, {"details": details}


def _expected_exponent(quantity, mode, a, d):
    if quantity == "s_alpha":
        if mode == "mu":
            return d / 2
        return None if a == 1.0 else d / 2 * max(0.0, 1 - a)
    if mode == "mu":
        return (d - 1) / 2
    return (d - 1) / 2 - d / 2 * min(a, 2.0)


def cmd_high_t_report(cfg, threads):
    disp = cfg.build_dispersion()
    dom = cfg.build_domain()
    Ts = tuple(sorted(cfg.temperatures))
    if len(Ts) < 3:
        raise ConfigError("high-t-report needs at least 3 temperatures")
    rows = []
    for a in cfg.alpha:
        pts = [cfg.thermo.point(disp, T) for T in Ts]
        s = _pmap(lambda p: entropy_density(disp, a, p, max(cfg.tol, 1e-12)), pts, threads)
        eta = _pmap(lambda p: B.eta_coefficient(disp, dom, a, p, cfg.tol), pts, threads)
        for name, ys in (("s_alpha", s), ("eta", eta)):
            if min(ys) > 0:
                k, c, se = fit_power_law(SampleSeries(Ts, tuple(ys)))
            else:
                k = c = se = math.nan
            rows.append((name, a, cfg.thermo.mode, k, se, c, _expected_exponent(name, cfg.thermo.mode, a, disp.d)))
        if a == 1.0 and cfg.thermo.mode == "rho":
            incs = [s[i + 1] - s[i] for i in range(len(s) - 1)]
            rows.append(("s_1_increment", a, "rho", float(np.mean(incs)), float(np.std(incs)), None, None))
    header = ["quantity", "alpha", "mode", "exponent", "stderr", "prefactor", "expected"]
    return header, rows, {}


def cmd_crossover_report(cfg, threads):
    disp = cfg.build_dispersion()
    dom = cfg.build_domain()
    if cfg.thermo.mode != "mu":
        raise ConfigError("crossover-report needs thermo.mode = mu")
    mu = cfg.thermo.value
    reps = _pmap(lambda a: crossover_consistency_report(disp, dom, a, mu, tol=max(cfg.tol, 1e-12)), cfg.alpha, threads)
    rows = []
    for rep in reps:
        for L in cfg.L_grid:
            for T in cfg.temperatures:
                rows.append((rep.alpha, L, T, crossover_entropy(rep.params, L, T)))
    header = ["alpha", "L", "T", "S_crossover"]
    return header, rows, {"reports": [r.as_dict() for r in reps]}


def cmd_verify(cfg, threads):
    results = run_acceptance(Context(), progress=lambda r: log.info(r.line()))
    rows = [(r.criterion, r.name, r.passed, "; ".join(r.failures)) for r in results]
    header = ["criterion", "name", "passed", "failures"]
    return header, rows, {"checks": [r.as_dict() for r in results],
                          "all_passed": all(r.passed for r in results)}


HANDLERS = {
    "entropy-density": cmd_entropy_density,
    "eta": cmd_eta,
    "oracle": cmd_oracle,
    "low-t-report": cmd_low_t_report,
    "high-t-report": cmd_high_t_report,
    "crossover-report": cmd_crossover_report,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermi-ee", description="Thermal Renyi entanglement entropy of the free Fermi gas")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--out", help="output directory (overrides config 'out')")
    p.add_argument("--tol", type=float, help="quadrature tolerance (overrides config 'tol')")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"fermi-ee {__version__}")
    return p


def run_command(cfg: RunConfig, command: str, out: Path, threads: int = 1) -> int:
    header, rows, payload = HANDLERS[command](cfg, max(1, threads))
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"{command}.csv", header, rows, (f"command: {command}",))
    write_json(out / f"{command}.json", command, cfg, payload)
    if command == "verify" and not payload["all_passed"]:
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        if args.tol is not None:
            cfg = replace(cfg, tol=args.tol).validate()
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
    except (ConfigError, UnsupportedConfigurationError) as exc:
        print(f"fermi-ee: invalid config: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out if args.out is not None else cfg.out)
    try:
        return run_command(cfg, args.command, out, args.threads)
    except (ConfigError, UnsupportedConfigurationError) as exc:
        print(f"fermi-ee: invalid config: {exc}", file=sys.stderr)
        return 2
    except (FermiEEError, ArithmeticError, ValueError, RuntimeError) as exc:
        mod = getattr(exc, "__module__", None) or type(exc).__module__
        tb = exc.__traceback__
        while tb is not None and tb.tb_next is not None:
            tb = tb.tb_next
        where = tb.tb_frame.f_globals.get("__name__", mod) if tb else mod
        print(f"fermi-ee: computation failed in {where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
