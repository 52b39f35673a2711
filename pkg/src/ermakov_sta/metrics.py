"""Derived quantities and parameter scans.

Scans never abort on a bad point: failures become rows with a status
string, and rows come back in grid order whatever the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .core import SQRT_2PI, ErmakovState, ErmakovTrajectory, Model, PhysicalParams, \
    integrate_ermakov, solve_boundary_widths
from .design import DEFAULT_IE_TF, Scheme, design, design_bang_bang, design_bang_bang_tf
from .errors import StaError
from .gpe import DEFAULT_DT_IMAG, Grid, evolve_split_step, fidelity, ground_state_imaginary_time

STATUS_OK = "OK"


def status_of(exc: Exception) -> str:
    """Status label for a failed scan point (the exception class name)."""
    return type(exc).__name__


def time_averaged_energy(trajectory: ErmakovTrajectory, g_n: float) -> float:
    """Mean effective energy over the protocol.

    Uses the virial-reduced integrand a_dot^2 + 1/a^2 + 3 gN / (2 sqrt(2 pi) a),
    integrated with Simpson's rule segment by segment.
    """
    a = trajectory.a
    if np.any(a <= 0):
        raise ValueError("trajectory has non-positive widths")
    t_f = trajectory.t_f - float(trajectory.times[0])
    if t_f <= 0:
        return float(1.0 / a[0] ** 2 + 1.5 * g_n / (SQRT_2PI * a[0]))
    integrand = trajectory.a_dot ** 2 + 1.0 / a ** 2 + 1.5 * g_n / (SQRT_2PI * a)
    total = 0.0
    for _, sl in trajectory.segment_slices():
        total += simpson(integrand[sl], x=trajectory.times[sl])
    return float(total / t_f)


def protocol_energy(report, tol: float = 1e-10) -> float:
    traj = integrate_ermakov(report.protocol, ErmakovState(report.a_i, 0.0), report.params, tol=tol)
    return time_averaged_energy(traj, report.params.g_n)


@dataclass
class ScanRow:
    scheme: str
    g_n: float
    gamma: float
    delta: float
    t_f: float = math.nan
    e_bar: float = math.nan
    fidelity: float = math.nan
    status: str = STATUS_OK
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GpeSettings:
    half_width: float = 128.0
    n_points: int = 4096
    dt: float | None = None
    dt_imag: float = DEFAULT_DT_IMAG
    tol_imag: float = 1e-12

    @property
    def grid(self) -> Grid:
        return Grid(self.half_width, self.n_points)


def _parallel_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _min_time_point(args):
    gamma, g_n, delta = args
    row = ScanRow(Scheme.BANG_BANG.value, g_n, gamma, delta)
    try:
        rep = design_bang_bang(PhysicalParams(g_n, gamma, delta))
        row.t_f = rep.t_f
        row.extra = {"x1_b": rep.aux["x1_b"], "t1": rep.aux["t1"], "t2": rep.aux["t2"]}
    except (StaError, ValueError) as exc:
        row.status = status_of(exc)
    return row


def scan_min_time(gamma: float, gn_grid, delta_grid, workers: int = 1) -> list[ScanRow]:
    """Bang-bang minimal time over a (gN, delta) grid, gN-major order."""
    pts = [(gamma, float(g), float(d)) for g in gn_grid for d in delta_grid]
    return _parallel_map(_min_time_point, pts, workers)


def _energy_point(args):
    scheme, g_n, gamma, delta, t_f_ie = args
    row = ScanRow(Scheme.parse(scheme).value, g_n, gamma, delta)
    try:
        rep = design(scheme, PhysicalParams(g_n, gamma, delta), t_f=t_f_ie)
        row.t_f = rep.t_f
        row.e_bar = protocol_energy(rep)
    except (StaError, ValueError) as exc:
        row.status = status_of(exc)
    return row


def scan_energy(schemes, gn_grid, gamma: float = 10.0, delta: float = 1.0,
                t_f_ie: float = DEFAULT_IE_TF, workers: int = 1) -> list[ScanRow]:
    pts = [(s, float(g), gamma, delta, t_f_ie) for s in schemes for g in gn_grid]
    return _parallel_map(_energy_point, pts, workers)


class FidelityResult(NamedTuple):
    fidelity: float
    report: object
    evolution: object
    initial: object
    target: object


def simulate_protocol(report, settings: GpeSettings = GpeSettings(), stride: int = 10,
                      snapshot_times=()) -> FidelityResult:
    """Run the GPE along a designed protocol between imaginary-time ground states."""
    p = report.params
    grid = settings.grid
    grid.check_hosts(report.a_i, report.a_f)
    psi0 = ground_state_imaginary_time(p.u_initial, p.g_n, grid, settings.dt_imag, settings.tol_imag)
    target = ground_state_imaginary_time(p.u_final, p.g_n, grid, settings.dt_imag, settings.tol_imag)
    ev = evolve_split_step(psi0, report.protocol, p.g_n, settings.dt, stride=stride,
                           snapshot_times=snapshot_times)
    return FidelityResult(fidelity(target, ev.field), report, ev, psi0, target)


def _fidelity_point(args):
    scheme, g_n, gamma, delta, t_f_ie, settings = args
    row = ScanRow(Scheme.parse(scheme).value, g_n, gamma, delta)
    try:
        rep = design(scheme, PhysicalParams(g_n, gamma, delta), t_f=t_f_ie)
        row.t_f = rep.t_f
        row.fidelity = simulate_protocol(rep, settings).fidelity
    except (StaError, ValueError) as exc:
        row.status = status_of(exc)
    return row


def scan_fidelity(schemes, gn_grid, gamma: float = 10.0, settings: GpeSettings = GpeSettings(),
                  delta: float = 1.0, t_f_ie: float = DEFAULT_IE_TF,
                  workers: int = 1) -> list[ScanRow]:
    pts = [(s, float(g), gamma, delta, t_f_ie, settings) for s in schemes for g in gn_grid]
    return _parallel_map(_fidelity_point, pts, workers)


@dataclass
class UnattainabilityRow:
    gamma: float
    log_ratio: float
    a_f: float
    t_f: float
    model_curve: float
    t_f_tf: float
    status: str = STATUS_OK


def unattainability_curve(g_n: float, delta: float, gamma_grid,
                          include_tf: bool = True) -> list[UnattainabilityRow]:
    """Minimal bang-bang time versus log(omega_f/omega_0) = -2 log(gamma)."""
    rows = []
    for gamma in gamma_grid:
        gamma = float(gamma)
        row = UnattainabilityRow(gamma, -2.0 * math.log(gamma), math.nan, math.nan,
                                 math.nan, math.nan)
        try:
            params = PhysicalParams(g_n, gamma, delta)
            row.a_f = solve_boundary_widths(params)[1]
            row.model_curve = math.log(row.a_f) + math.pi / 4
            row.t_f = design_bang_bang(params).t_f
            if include_tf:
                row.t_f_tf = design_bang_bang_tf(gamma, delta).t_f
        except (StaError, ValueError) as exc:
            row.status = status_of(exc)
        rows.append(row)
    return rows


def fit_log_slope(gammas, times) -> tuple[float, float]:
    """Least-squares slope and intercept of t_f against log(gamma)."""
    slope, intercept = np.polyfit(np.log(np.asarray(gammas, float)), np.asarray(times, float), 1)
    return float(slope), float(intercept)


class TaylorEstimate(NamedTuple):
    value: float
    cubic_variant: float
    exact: float


def taylor_width_estimate(g_n: float, gamma: float) -> TaylorEstimate:
    """First-order expansion of the final width in gN.

    ``value`` is gamma + gN gamma^2 / (4 sqrt(2 pi)), the coefficient the
    exact root actually has. ``cubic_variant`` uses a gamma^3 second term
    and is kept only for comparison; it overshoots the root badly.
    """
    value = gamma + g_n * gamma ** 2 / (4 * SQRT_2PI)
    cubic = gamma + g_n * gamma ** 3 / (4 * SQRT_2PI)
    exact = solve_boundary_widths(PhysicalParams(g_n, gamma, 1.0, Model.GENERALIZED))[1]
    return TaylorEstimate(value, cubic, exact)


__all__ = [
    "ScanRow", "GpeSettings", "UnattainabilityRow", "TaylorEstimate", "FidelityResult",
    "time_averaged_energy", "protocol_energy", "scan_min_time", "scan_energy",
    "scan_fidelity", "simulate_protocol", "unattainability_curve", "fit_log_slope",
    "taylor_width_estimate", "status_of",
]
