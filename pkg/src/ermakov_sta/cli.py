"""``sta design|simulate|scan|verify [--config FILE] [--key value ...]``

Exit status: 0 on success (or verify PASS), 1 on verify FAIL, 2 on a
configuration error or unreadable input file, 3 on a numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

from . import __version__
from . import io as sio
from .config import COMMANDS, KEYS, RunConfig, build_config, load_config_file, parse_overrides
from .core import ErmakovState, integrate_ermakov
from .design import design, verify_protocol
from .errors import ConfigError, NumericalError
from .metrics import (
    GpeSettings, fit_log_slope, protocol_energy, scan_energy, scan_fidelity, scan_min_time,
    simulate_protocol, unattainability_curve,
)

log = logging.getLogger("ermakov_sta")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _settings(cfg: RunConfig) -> GpeSettings:
    return GpeSettings(cfg.half_width, cfg.n_points, cfg.dt, cfg.dt_imag, cfg.tol_imag)


def _lab_units(cfg: RunConfig, t_f: float) -> dict:
    if cfg.omega0_hz is None:
        return {}
    return {"omega0_hz": cfg.omega0_hz, "t_f_seconds": t_f / (2 * math.pi * cfg.omega0_hz)}


def _summary(report) -> str:
    lines = [f"scheme      {report.scheme.value}",
             f"t_f         {report.t_f:.6f}",
             f"a_i, a_f    {report.a_i:.6f}, {report.a_f:.6f}"]
    for k, v in report.aux.items():
        lines.append(f"{k:<11s} {v:.6g}")
    return "\n".join(lines)


def cmd_design(cfg: RunConfig) -> int:
    out = cfg.output_dir
    report = design(cfg.scheme, cfg.params, t_f=cfg.tf)
    traj = integrate_ermakov(report.protocol, ErmakovState(report.a_i, 0.0), report.params)
    sio.write_report(out / "report.json", report, _lab_units(cfg, report.t_f))
    sio.write_protocol_csv(out / "protocol.csv", report.protocol)
    sio.write_trajectory_csv(out / "trajectory.csv", traj)
    print(_summary(report))
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    out = cfg.output_dir
    report = design(cfg.scheme, cfg.params, t_f=cfg.tf)
    snaps = cfg.snapshots or tuple(report.t_f * q for q in (0.0, 0.25, 0.5, 0.75, 1.0))
    res = simulate_protocol(report, _settings(cfg), stride=cfg.stride, snapshot_times=snaps)
    extra = {"fidelity": res.fidelity, "e_bar": protocol_energy(report),
             "gpe": {"half_width": cfg.half_width, "n_points": cfg.n_points,
                     "dt": cfg.dt, "dt_imag": cfg.dt_imag, "steps": res.evolution.steps}}
    extra.update(_lab_units(cfg, report.t_f))
    sio.write_report(out / "report.json", report, extra)
    sio.write_protocol_csv(out / "protocol.csv", report.protocol)
    traj = integrate_ermakov(report.protocol, ErmakovState(report.a_i, 0.0), report.params)
    sio.write_trajectory_csv(out / "trajectory.csv", traj)
    sio.write_observables_csv(out / "observables.csv", res.evolution)
    sio.write_density_csv(out / "density.csv", res.evolution.field.grid, res.evolution.snapshots)
    print(_summary(report))
    print(f"fidelity    {res.fidelity:.10f}")
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    out = cfg.output_dir
    kind = cfg.scan
    manifest = {
        "version": __version__, "scan": kind, "gamma": list(cfg.scan_gamma),
        "g_n": list(cfg.scan_gn), "delta": list(cfg.scan_delta),
        "tolerances": {"ode_rtol": 1e-10, "ode_atol": 1e-12, "quad_rtol": 1e-10},
    }
    if kind == "min-time":
        rows = []
        for gamma in cfg.scan_gamma:
            rows += scan_min_time(gamma, cfg.scan_gn, cfg.scan_delta, workers=cfg.workers)
    elif kind == "energy":
        rows = []
        for gamma in cfg.scan_gamma:
            rows += scan_energy(cfg.schemes, cfg.scan_gn, gamma, cfg.delta, cfg.tf, cfg.workers)
        manifest.update(schemes=list(cfg.schemes), t_f_inverse_engineering=cfg.tf)
    elif kind == "fidelity":
        rows = []
        s = _settings(cfg)
        for gamma in cfg.scan_gamma:
            rows += scan_fidelity(cfg.schemes, cfg.scan_gn, gamma, s, cfg.delta, cfg.tf,
                                  cfg.workers)
        manifest.update(schemes=list(cfg.schemes), t_f_inverse_engineering=cfg.tf,
                        gpe={"half_width": s.half_width, "n_points": s.n_points, "dt": s.dt,
                             "dt_imag": s.dt_imag, "tol_imag": s.tol_imag})
    else:
        rows = unattainability_curve(cfg.gn, cfg.delta, cfg.scan_gamma)
        manifest.update(g_n=cfg.gn, delta=cfg.delta)
        ok = [r for r in rows if r.status == "OK"]
        if len(ok) >= 2:
            slope, icpt = fit_log_slope([r.gamma for r in ok], [r.t_f for r in ok])
            slope_tf, _ = fit_log_slope([r.gamma for r in ok], [r.t_f_tf for r in ok])
            manifest["fit"] = {"slope": slope, "intercept": icpt, "slope_tf": slope_tf}
    sio.write_scan_csv(out / "scan.csv", kind, rows)
    sio.write_json(out / "manifest.json", manifest)
    bad = sum(1 for r in rows if r.status != "OK")
    print(f"{kind} scan: {len(rows)} rows, {bad} failed points -> {out / 'scan.csv'}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.report:
        report = sio.read_report(cfg.report)
        params = report.params
    else:
        report = design(cfg.scheme, cfg.params, t_f=cfg.tf)
        params = cfg.params
        if cfg.protocol:
            proto = sio.read_protocol_csv(cfg.protocol, params.u_initial, params.u_final)
            report = type(report)(report.scheme, params, proto, proto.t_f, report.a_i,
                                  report.a_f, report.boundary_residuals, report.aux)
    res = verify_protocol(report, params)
    print(f"scheme          {report.scheme.value}")
    print(f"t_f             {report.protocol.t_f:.10f}")
    print(f"|a(t_f) - a_f|  {res.a_tf_error:.3e}")
    print(f"|a_dot(t_f)|    {res.a_dot_tf_error:.3e}")
    for i, d in enumerate(res.invariant_drift):
        if d is not None:
            print(f"segment {i} first-integral drift {d:.3e}")
    print("PASS" if res.passed else "FAIL")
    return EXIT_OK if res.passed else EXIT_FAIL


HANDLERS = {"design": cmd_design, "simulate": cmd_simulate, "scan": cmd_scan,
            "verify": cmd_verify}


def run(cfg: RunConfig) -> int:
    try:
        return HANDLERS[cfg.command](cfg)
    except NumericalError as exc:
        log.debug("numerical failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sta", description="Design and check shortcut-to-adiabaticity trap protocols.",
        epilog="Keys: " + ", ".join("--" + k.replace("_", "-") for k in KEYS))
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--version", action="version", version=__version__)
    ns, rest = parser.parse_known_args(argv)
    try:
        file_values = load_config_file(ns.config) if ns.config else {}
        cfg = build_config(ns.command, file_values, parse_overrides(rest))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
