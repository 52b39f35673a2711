"""File formats: report JSON, protocol/trajectory/observable CSVs, scan tables."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .core import Model, PhysicalParams
from .design import DesignReport, Scheme
from .protocol import ConstantU, SampledU, Segment, TrapProtocol


def fmt(x) -> str:
    """Twelve significant digits, fixed layout, so identical runs give identical files."""
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.11e}"


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    return rows[0], rows[1:]


# --- protocol --------------------------------------------------------------

PROTOCOL_HEADER = ("segment", "kind", "t", "u")


def protocol_rows(protocol: TrapProtocol):
    t0 = 0.0
    for i, seg in enumerate(protocol.segments):
        if isinstance(seg.control, ConstantU):
            yield (str(i), "constant", t0, seg.control.value)
            yield (str(i), "constant", t0 + seg.duration, seg.control.value)
        else:
            for tau, u in zip(seg.control.times, seg.control.values):
                yield (str(i), "sampled", t0 + tau, u)
        t0 += seg.duration


def write_protocol_csv(path, protocol: TrapProtocol) -> Path:
    return write_csv(path, PROTOCOL_HEADER, protocol_rows(protocol))


def read_protocol_csv(path, u_before: float = 1.0, u_after: float | None = None) -> TrapProtocol:
    header, rows = read_csv(path)
    if tuple(header) != PROTOCOL_HEADER:
        raise ValueError(f"unexpected protocol header {header}")
    groups: dict[int, list] = {}
    for seg, kind, t, u in rows:
        groups.setdefault(int(seg), []).append((kind, float(t), float(u)))
    segments = []
    for i in sorted(groups):
        pts = groups[i]
        kind = pts[0][0]
        ts = np.array([p[1] for p in pts])
        us = np.array([p[2] for p in pts])
        duration = float(ts[-1] - ts[0])
        if kind == "constant":
            segments.append(Segment(duration, ConstantU(float(us[0]))))
        elif kind == "sampled":
            tau = ts - ts[0]
            tau[-1] = duration
            segments.append(Segment(duration, SampledU(tau, us)))
        else:
            raise ValueError(f"unknown segment kind {kind!r}")
    return TrapProtocol(tuple(segments), u_before, u_after)


def protocol_to_dict(protocol: TrapProtocol) -> dict:
    segs = []
    for seg in protocol.segments:
        if isinstance(seg.control, ConstantU):
            segs.append({"kind": "constant", "duration": seg.duration, "u": seg.control.value})
        else:
            segs.append({"kind": "sampled", "duration": seg.duration,
                         "times": seg.control.times.tolist(),
                         "values": seg.control.values.tolist()})
    return {"u_before": protocol.u_before, "u_after": protocol.u_after, "segments": segs}


def protocol_from_dict(d: dict) -> TrapProtocol:
    segs = []
    for s in d["segments"]:
        if s["kind"] == "constant":
            segs.append(Segment(float(s["duration"]), ConstantU(float(s["u"]))))
        else:
            segs.append(Segment(float(s["duration"]),
                                SampledU(np.array(s["times"]), np.array(s["values"]))))
    return TrapProtocol(tuple(segs), float(d.get("u_before", 1.0)), d.get("u_after"))


# --- report ----------------------------------------------------------------

def params_to_dict(p: PhysicalParams) -> dict:
    return {"g_n": p.g_n, "gamma": p.gamma, "delta": p.delta, "model": p.model.value}


def params_from_dict(d: dict) -> PhysicalParams:
    return PhysicalParams(float(d["g_n"]), float(d["gamma"]), float(d["delta"]),
                          Model.parse(d["model"]))


def report_to_dict(report: DesignReport, extra: dict | None = None) -> dict:
    out = {
        "version": __version__,
        "scheme": report.scheme.value,
        "params": params_to_dict(report.params),
        "t_f": report.t_f,
        "a_i": report.a_i,
        "a_f": report.a_f,
        "boundary_residuals": dict(report.boundary_residuals),
        "aux": dict(report.aux),
        "extrapolated": report.extrapolated,
        "protocol": protocol_to_dict(report.protocol),
    }
    if extra:
        out.update(extra)
    return out


def report_from_dict(d: dict) -> DesignReport:
    return DesignReport(
        Scheme.parse(d["scheme"]), params_from_dict(d["params"]),
        protocol_from_dict(d["protocol"]), float(d["t_f"]), float(d["a_i"]), float(d["a_f"]),
        dict(d.get("boundary_residuals", {})), dict(d.get("aux", {})),
        bool(d.get("extrapolated", False)))


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def write_report(path, report: DesignReport, extra: dict | None = None) -> Path:
    return write_json(path, report_to_dict(report, extra))


def read_report(path) -> DesignReport:
    return report_from_dict(json.loads(Path(path).read_text()))


# --- trajectories and observables -------------------------------------------

def write_trajectory_csv(path, traj) -> Path:
    rows = zip(traj.times, traj.a, traj.a_dot, traj.a_ddot, traj.b, traj.u)
    return write_csv(path, ("t", "a", "a_dot", "a_ddot", "b", "u"), rows)


def write_observables_csv(path, evolution) -> Path:
    rows = zip(evolution.t, evolution.norm, evolution.width, evolution.energy)
    return write_csv(path, ("t", "norm", "width", "energy"), rows)


def write_density_csv(path, grid, snapshots) -> Path:
    header = ["x"] + [f"rho_t={t:.6g}" for t, _ in snapshots]
    cols = [grid.x] + [rho for _, rho in snapshots]
    return write_csv(path, header, zip(*cols))


SCAN_HEADERS = {
    "min-time": ("gamma", "g_n", "delta", "t_f", "x1_b", "t1", "t2", "status"),
    "energy": ("scheme", "gamma", "g_n", "delta", "t_f", "e_bar", "status"),
    "fidelity": ("scheme", "gamma", "g_n", "delta", "t_f", "fidelity", "status"),
    "unattainability": ("gamma", "log_ratio", "a_f", "t_f", "model_curve", "t_f_tf", "status"),
}


def scan_table(kind: str, rows):
    if kind == "min-time":
        return [(r.gamma, r.g_n, r.delta, r.t_f, r.extra.get("x1_b"), r.extra.get("t1"),
                 r.extra.get("t2"), r.status) for r in rows]
    if kind == "energy":
        return [(r.scheme, r.gamma, r.g_n, r.delta, r.t_f, r.e_bar, r.status) for r in rows]
    if kind == "fidelity":
        return [(r.scheme, r.gamma, r.g_n, r.delta, r.t_f, r.fidelity, r.status) for r in rows]
    if kind == "unattainability":
        return [(r.gamma, r.log_ratio, r.a_f, r.t_f, r.model_curve, r.t_f_tf, r.status)
                for r in rows]
    raise ValueError(f"unknown scan type {kind!r}")


def write_scan_csv(path, kind: str, rows) -> Path:
    return write_csv(path, SCAN_HEADERS[kind], scan_table(kind, rows))
