"""Shortcut protocols for expanding (or compressing) the trap.

Three families are built here: a smooth polynomial width trajectory
inverted for u(t), a single constant plateau between two jumps, and the
time-optimal bang-bang sequence -delta / +delta with one switch.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ErmakovState, Model, PhysicalParams, acceleration, barrier, first_integral,
    integrate_ermakov, omega_squared_from_width, solve_boundary_widths,
)
from .errors import InvalidSwitch, QuadratureFailure
from .protocol import ConstantU, SampledU, Segment, TrapProtocol
from .quadrature import singular_time_quadrature

DEFAULT_IE_TF = 5.45
PASS_TOL = 1e-5


class Scheme(str, enum.Enum):
    INVERSE_ENGINEERING = "inverse-engineering"
    TWO_JUMP = "two-jump"
    BANG_BANG = "bang-bang"
    BANG_BANG_TF = "bang-bang-tf"
    BANG_BANG_LINEAR = "bang-bang-linear"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"ie": cls.INVERSE_ENGINEERING, "inverse": cls.INVERSE_ENGINEERING,
                   "bang": cls.TWO_JUMP, "tf": cls.BANG_BANG_TF,
                   "linear": cls.BANG_BANG_LINEAR}
        return aliases.get(key) or cls(key)


RESIDUAL_KEYS = ("a0", "a_dot0", "a_ddot0", "a_tf", "a_dot_tf", "a_ddot_tf")


@dataclass(frozen=True, eq=False)
class DesignReport:
    scheme: Scheme
    params: PhysicalParams
    protocol: TrapProtocol
    t_f: float
    a_i: float
    a_f: float
    boundary_residuals: dict
    aux: dict = field(default_factory=dict)
    extrapolated: bool = False


@dataclass(frozen=True)
class VerificationResult:
    passed: bool
    a_tf_error: float
    a_dot_tf_error: float
    invariant_drift: tuple
    a_final: float
    a_dot_final: float

    @property
    def max_invariant_drift(self) -> float:
        return max((d for d in self.invariant_drift if d is not None), default=0.0)


def _residuals(protocol, params, a_i, a_f, traj=None):
    """Boundary residuals from a forward integration of ``protocol``.

    The acceleration residuals use the control just inside the interval,
    so jump schemes report their deliberate edge violation.
    """
    if traj is None:
        traj = integrate_ermakov(protocol, ErmakovState(a_i, 0.0), params)
    return {
        "a0": abs(traj.a[0] - a_i),
        "a_dot0": abs(traj.a_dot[0]),
        "a_ddot0": abs(float(traj.a_ddot[0])),
        "a_tf": abs(traj.a[-1] - a_f),
        "a_dot_tf": abs(traj.a_dot[-1]),
        "a_ddot_tf": abs(float(traj.a_ddot[-1])),
    }


def polynomial_width(a_i: float, a_f: float, t_f: float, t):
    """Quintic interpolant a(t) with its first two derivatives."""
    d = a_i - a_f
    s = np.asarray(t, dtype=float) / t_f
    a = a_i - 6 * d * s ** 5 + 15 * d * s ** 4 - 10 * d * s ** 3
    a_dot = (-30 * d * s ** 4 + 60 * d * s ** 3 - 30 * d * s ** 2) / t_f
    a_ddot = (-120 * d * s ** 3 + 180 * d * s ** 2 - 60 * d * s) / t_f ** 2
    return a, a_dot, a_ddot


def design_inverse_engineering(params: PhysicalParams, t_f: float = DEFAULT_IE_TF,
                               n_samples: int = 2001) -> DesignReport:
    if not t_f > 0:
        raise ValueError("t_f must be positive")
    a_i, a_f = solve_boundary_widths(params)
    t = np.linspace(0.0, t_f, max(int(n_samples), 1001))
    a, a_dot, a_ddot = polynomial_width(a_i, a_f, t_f, t)
    u = omega_squared_from_width(a, a_ddot, params)
    protocol = TrapProtocol((Segment(t_f, SampledU(t, u)),), params.u_initial, params.u_final)
    residuals = {
        "a0": abs(a[0] - a_i), "a_dot0": abs(a_dot[0]),
        "a_ddot0": abs(float(acceleration(a_i, u[0], params))),
        "a_tf": abs(a[-1] - a_f), "a_dot_tf": abs(a_dot[-1]),
        "a_ddot_tf": abs(float(acceleration(a_f, u[-1], params))),
    }
    aux = {"u_min": float(u.min()), "u_max": float(u.max()),
           "u_start": float(u[0]), "u_end": float(u[-1])}
    return DesignReport(Scheme.INVERSE_ENGINEERING, params, protocol, t_f, a_i, a_f,
                        residuals, aux, extrapolated=params.gamma < 1)


def plateau_frequency_squared(a_i: float, a_f: float, g_n: float) -> float:
    """Constant u for which U(a_i) = U(a_f)."""
    return 1.0 / (a_i * a_f) ** 2 + math.sqrt(2.0 / math.pi) * g_n / (a_i * a_f * (a_i + a_f))


def _segment_radicand(c, u, params):
    def rad(x):
        return c - u * x * x - float(barrier(x, params))
    return rad


def design_two_jump(params: PhysicalParams) -> DesignReport:
    a_i, a_f = solve_boundary_widths(params)
    if params.model is Model.THOMAS_FERMI:
        # U(a) = u a^2/2 + 1/a, equal at both edges
        wc2 = 2.0 / (a_i * a_f * (a_i + a_f))
    else:
        wc2 = plateau_frequency_squared(a_i, a_f, params.g_eff * math.sqrt(2 * math.pi))
    if a_i == a_f:
        protocol = TrapProtocol((), params.u_initial, params.u_final)
        return DesignReport(Scheme.TWO_JUMP, params, protocol, 0.0, a_i, a_f,
                            {k: 0.0 for k in RESIDUAL_KEYS}, {"omega_c": math.sqrt(wc2)})
    if wc2 <= 0:
        raise QuadratureFailure(f"plateau u={wc2:.6g} is not confining; no turning point")
    c = wc2 * a_i ** 2 + float(barrier(a_i, params))
    t_f = singular_time_quadrature(_segment_radicand(c, wc2, params), a_i, a_f)
    protocol = TrapProtocol((Segment(t_f, ConstantU(wc2)),), params.u_initial, params.u_final)
    residuals = _residuals(protocol, params, a_i, a_f)
    aux = {"omega_c": math.sqrt(wc2), "omega_c_squared": wc2, "c": c}
    return DesignReport(Scheme.TWO_JUMP, params, protocol, t_f, a_i, a_f, residuals, aux,
                        extrapolated=params.gamma < 1)


def switching_width(a_i: float, a_f: float, delta: float, g_n: float) -> float:
    """Closed-form switch width for the -delta/+delta expansion sequence."""
    rad = (0.5 * (a_f ** 2 + a_i ** 2)
           + (a_i ** 2 - a_f ** 2) / (2 * delta * a_f ** 2 * a_i ** 2)
           + g_n * (a_i - a_f) / (math.sqrt(2 * math.pi) * delta * a_i * a_f))
    if rad < 0:
        raise InvalidSwitch(f"negative radicand {rad:.6g} for the switching width")
    return math.sqrt(rad)


def _bang_bang(params: PhysicalParams, a_i: float, a_f: float, scheme: Scheme) -> DesignReport:
    delta = params.delta
    if delta < max(1.0, params.u_final):
        raise ValueError(f"delta={delta} cannot hold the edge values 1 and {params.u_final:.3g}")
    if a_i == a_f:
        protocol = TrapProtocol((), params.u_initial, params.u_final)
        return DesignReport(scheme, params, protocol, 0.0, a_i, a_f,
                            {k: 0.0 for k in RESIDUAL_KEYS},
                            {"x1_b": a_i, "t1": 0.0, "t2": 0.0})
    expanding = a_f > a_i
    u1, u2 = (-delta, delta) if expanding else (delta, -delta)
    c1 = u1 * a_i ** 2 + float(barrier(a_i, params))
    c2 = u2 * a_f ** 2 + float(barrier(a_f, params))
    xb2 = (c2 - c1) / (u2 - u1)
    if not xb2 > 0:
        raise InvalidSwitch(f"switch radicand {xb2:.6g} is not positive")
    x_b = math.sqrt(xb2)
    if not (min(a_i, a_f) < x_b < max(a_i, a_f)):
        raise InvalidSwitch(f"switch width {x_b:.6g} outside ({a_i:.6g}, {a_f:.6g})")
    t1 = singular_time_quadrature(_segment_radicand(c1, u1, params), a_i, x_b)
    t2 = singular_time_quadrature(_segment_radicand(c2, u2, params), x_b, a_f)
    protocol = TrapProtocol((Segment(t1, ConstantU(u1)), Segment(t2, ConstantU(u2))),
                            params.u_initial, params.u_final)
    residuals = _residuals(protocol, params, a_i, a_f)
    aux = {"x1_b": x_b, "x2_b": math.sqrt(max(c1 - u1 * xb2 - float(barrier(x_b, params)), 0.0)),
           "t1": t1, "t2": t2, "c1": c1, "c2": c2}
    return DesignReport(scheme, params, protocol, t1 + t2, a_i, a_f, residuals, aux,
                        extrapolated=not expanding)


def design_bang_bang(params: PhysicalParams) -> DesignReport:
    a_i, a_f = solve_boundary_widths(params)
    scheme = Scheme.BANG_BANG_TF if params.model is Model.THOMAS_FERMI else Scheme.BANG_BANG
    return _bang_bang(params, a_i, a_f, scheme)


def design_bang_bang_tf(gamma: float, delta: float) -> DesignReport:
    params = PhysicalParams(0.0, gamma, delta, Model.THOMAS_FERMI)
    return _bang_bang(params, 1.0, gamma ** (4.0 / 3.0), Scheme.BANG_BANG_TF)


def bang_bang_linear_closed_form(gamma: float, delta: float) -> tuple[float, float]:
    """Switching times of the -delta/+delta sequence for the ordinary equation."""
    if gamma < 1 or delta < 1:
        raise ValueError("closed form needs gamma >= 1 and delta >= 1")
    g2 = gamma * gamma
    arg1 = (g2 - 1) * (g2 * delta - 1) / (2 * g2 * (1 + delta))
    arg2 = (g2 - 1) * (g2 * delta + 1) / (2 * (g2 * g2 * delta - 1)) if gamma > 1 else 0.0
    if arg1 < 0 or not 0 <= arg2 <= 1:
        raise ValueError(f"arcsin argument {arg2:.6g} outside [0, 1]")
    sd = math.sqrt(delta)
    return math.asinh(math.sqrt(arg1)) / sd, math.asin(math.sqrt(arg2)) / sd


def design_bang_bang_linear(gamma: float, delta: float) -> DesignReport:
    """Bang-bang protocol for gN = 0 timed from the closed-form switching times."""
    params = PhysicalParams(0.0, gamma, delta, Model.ORDINARY)
    t1, t2 = bang_bang_linear_closed_form(gamma, delta)
    if t1 == 0 and t2 == 0:
        protocol = TrapProtocol((), 1.0, params.u_final)
        return DesignReport(Scheme.BANG_BANG_LINEAR, params, protocol, 0.0, 1.0, gamma,
                            {k: 0.0 for k in RESIDUAL_KEYS}, {"t1": 0.0, "t2": 0.0})
    protocol = TrapProtocol((Segment(t1, ConstantU(-delta)), Segment(t2, ConstantU(delta))),
                            1.0, params.u_final)
    residuals = _residuals(protocol, params, 1.0, gamma)
    x_b = switching_width(1.0, gamma, delta, 0.0)
    return DesignReport(Scheme.BANG_BANG_LINEAR, params, protocol, t1 + t2, 1.0, gamma,
                        residuals, {"t1": t1, "t2": t2, "x1_b": x_b})


def design(scheme, params: PhysicalParams, t_f: float | None = None) -> DesignReport:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.INVERSE_ENGINEERING:
        return design_inverse_engineering(params, DEFAULT_IE_TF if t_f is None else t_f)
    if scheme is Scheme.TWO_JUMP:
        return design_two_jump(params)
    if scheme is Scheme.BANG_BANG:
        return design_bang_bang(params)
    if scheme is Scheme.BANG_BANG_TF:
        return design_bang_bang_tf(params.gamma, params.delta)
    return design_bang_bang_linear(params.gamma, params.delta)


def verify_protocol(report: DesignReport, params: PhysicalParams | None = None,
                    tol: float = 1e-10) -> VerificationResult:
    """Forward-integrate a designed protocol and check the end point.

    Passes when the final width and velocity match the stationary target
    within 1e-5. Also reports, for every constant segment, the drift of
    the conserved first integral relative to the size of its terms.
    """
    params = report.params if params is None else params
    a_i, a_f = solve_boundary_widths(params)
    traj = integrate_ermakov(report.protocol, ErmakovState(a_i, 0.0), params, tol=tol)
    drifts = []
    for idx, sl in traj.segment_slices():
        if not report.protocol.segments or not isinstance(report.protocol.segments[idx].control,
                                                          ConstantU):
            drifts.append(None)
            continue
        u = report.protocol.segments[idx].control.value
        a, ad = traj.a[sl], traj.a_dot[sl]
        inv = first_integral(a, ad, u, params)
        # c itself can vanish (gN = 0, u = -1); measure against the term sizes
        scale = float(np.max(ad ** 2 + abs(u) * a ** 2 + np.abs(barrier(a, params))))
        drifts.append(float(np.max(np.abs(inv - inv[0]))) / scale)
    a_err = abs(float(traj.a[-1]) - a_f)
    ad_err = abs(float(traj.a_dot[-1]))
    return VerificationResult(a_err < PASS_TOL and ad_err < PASS_TOL, a_err, ad_err,
                              tuple(drifts), float(traj.a[-1]), float(traj.a_dot[-1]))


__all__ = [
    "Scheme", "DesignReport", "VerificationResult", "DEFAULT_IE_TF",
    "design", "design_inverse_engineering", "design_two_jump", "design_bang_bang",
    "design_bang_bang_tf", "design_bang_bang_linear", "bang_bang_linear_closed_form",
    "switching_width", "plateau_frequency_squared", "polynomial_width", "verify_protocol",
]
