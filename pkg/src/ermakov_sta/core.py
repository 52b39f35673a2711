"""Width dynamics of a trapped 1D condensate in the Gaussian variational picture.

All quantities are dimensionless: time in units of 1/omega_0, lengths in
units of the initial oscillator length, and the initial squared trap
frequency is 1. The final trap has u = 1/gamma**4.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CollapseError, IntegrationError, NoPositiveRoot
from .protocol import ConstantU, SampledU, TrapProtocol

SQRT_2PI = math.sqrt(2.0 * math.pi)
COLLAPSE_FLOOR = 1e-6
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class Model(str, enum.Enum):
    GENERALIZED = "generalized"
    ORDINARY = "ordinary"
    THOMAS_FERMI = "thomas-fermi"

    @classmethod
    def parse(cls, value) -> "Model":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"tf": cls.THOMAS_FERMI, "thomasfermi": cls.THOMAS_FERMI,
                   "linear": cls.ORDINARY}
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class PhysicalParams:
    g_n: float = 0.0
    gamma: float = 10.0
    delta: float = 1.0
    model: Model = Model.GENERALIZED

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        for name in ("g_n", "gamma", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def g_eff(self) -> float:
        """Nonlinear coupling as it enters the width equation, gN/sqrt(2 pi)."""
        return self.g_n / SQRT_2PI if self.model is Model.GENERALIZED else 0.0

    @property
    def u_initial(self) -> float:
        return 1.0

    @property
    def u_final(self) -> float:
        return self.gamma ** -4


@dataclass(frozen=True)
class ErmakovState:
    x1: float
    x2: float = 0.0

    def __post_init__(self):
        if not self.x1 > 0:
            raise ValueError(f"width must be positive, got {self.x1}")


def _quartic_root(scale: float, g_eff: float) -> float:
    """Positive root of a**4 / scale**4 - g_eff * a - 1 = 0.

    Bisection narrows the bracket to 1e-3 relative, then Newton polishes
    to machine precision; any Newton iterate leaving the bracket falls
    back to bisection.
    """
    s4 = scale ** 4

    def f(a):
        return a ** 4 / s4 - g_eff * a - 1.0

    lo = COLLAPSE_FLOOR
    hi = scale * (2.0 + abs(g_eff) * SQRT_2PI)
    if f(lo) >= 0:
        raise NoPositiveRoot(f"quartic positive at the floor {lo}", bracket=(lo, hi))
    for _ in range(200):
        if f(hi) > 0:
            break
        hi *= 2.0
    else:
        raise NoPositiveRoot("no sign change found", bracket=(lo, hi))

    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    a = 0.5 * (lo + hi)
    for _ in range(50):
        step = f(a) / (4.0 * a ** 3 / s4 - g_eff)
        a_new = a - step
        newton = lo <= a_new <= hi
        if not newton:
            a_new = 0.5 * (lo + hi)
        if f(a_new) > 0:
            hi = min(hi, a_new)
        else:
            lo = max(lo, a_new)
        if newton and abs(a_new - a) <= 2 * np.finfo(float).eps * a_new:
            return a_new
        a = a_new
    return a


def stationary_width(u: float, g_n: float, model: Model = Model.GENERALIZED) -> float:
    """Width of the stationary state in a trap with squared frequency ``u > 0``."""
    if u <= 0:
        raise ValueError("stationary width requires a confining trap")
    model = Model.parse(model)
    if model is Model.THOMAS_FERMI:
        return u ** (-1.0 / 3.0)
    g = g_n / SQRT_2PI if model is Model.GENERALIZED else 0.0
    # u a^4 - g a = 1  <=>  (a / u^-1/4)^4 - g a = 1
    return _quartic_root(u ** -0.25, g)


def solve_boundary_widths(params: PhysicalParams) -> tuple[float, float]:
    """Initial and final stationary widths (a_i, a_f)."""
    if params.model is Model.ORDINARY:
        return 1.0, float(params.gamma)
    if params.model is Model.THOMAS_FERMI:
        return 1.0, float(params.gamma ** (4.0 / 3.0))
    g = params.g_eff
    return _quartic_root(1.0, g), _quartic_root(params.gamma, g)


def _check_width(a):
    if np.any(np.asarray(a) <= 0):
        raise ValueError("width must be positive")


def effective_potential(a, u, g_n):
    """U(a) = u a^2/2 + 1/(2 a^2) + gN/(sqrt(2 pi) a)."""
    _check_width(a)
    a = np.asarray(a, dtype=float)
    out = 0.5 * u * a * a + 0.5 / (a * a) + g_n / (SQRT_2PI * a)
    return float(out) if out.ndim == 0 else out


def effective_energy(state: ErmakovState, u: float, g_n: float) -> float:
    return 0.5 * state.x2 ** 2 + effective_potential(state.x1, u, g_n)


def _restoring(a, params: PhysicalParams):
    """Model-dependent a-only part of the acceleration (without the trap term)."""
    if params.model is Model.THOMAS_FERMI:
        return 1.0 / (a * a)
    out = 1.0 / a ** 3
    if params.model is Model.GENERALIZED:
        out = out + params.g_eff / (a * a)
    return out


def acceleration(a, u, params: PhysicalParams):
    return -u * a + _restoring(a, params)


def ermakov_rhs(state: ErmakovState, u: float, params: PhysicalParams) -> tuple[float, float]:
    if state.x1 < COLLAPSE_FLOOR:
        raise CollapseError(f"width {state.x1} below collapse floor {COLLAPSE_FLOOR}")
    return state.x2, float(acceleration(state.x1, u, params))


def barrier(a, params: PhysicalParams):
    """The u-independent part of the first integral, V(a).

    On a constant-u stretch ``x2**2 + u*x1**2 + V(x1)`` is conserved.
    """
    a = np.asarray(a, dtype=float)
    if params.model is Model.THOMAS_FERMI:
        return 2.0 / a
    out = 1.0 / (a * a)
    if params.model is Model.GENERALIZED:
        out = out + 2.0 * params.g_eff / a
    return out


def first_integral(a, a_dot, u, params: PhysicalParams):
    return np.asarray(a_dot) ** 2 + u * np.asarray(a) ** 2 + barrier(a, params)


def omega_squared_from_width(a, a_ddot, params: PhysicalParams):
    """Invert the width equation for the squared trap frequency."""
    _check_width(a)
    a = np.asarray(a, dtype=float)
    out = (-np.asarray(a_ddot, dtype=float) + _restoring(a, params)) / a
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ErmakovTrajectory:
    """Sampled width history.

    ``times`` is non-decreasing: each interior segment edge appears twice,
    once as the last sample of a segment and once as the first sample of
    the next, since ``a_ddot`` jumps there. ``segment`` labels each sample.
    """

    times: np.ndarray
    a: np.ndarray
    a_dot: np.ndarray
    a_ddot: np.ndarray
    u: np.ndarray
    segment: np.ndarray
    params: PhysicalParams = field(repr=False, default=None)

    @property
    def b(self) -> np.ndarray:
        return -self.a_dot / (2.0 * self.a)

    @property
    def amplitude(self) -> np.ndarray:
        return (math.pi * self.a ** 2) ** -0.25

    @property
    def t_f(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> ErmakovState:
        return ErmakovState(float(self.a[-1]), float(self.a_dot[-1]))

    def segment_slices(self):
        """Yield (index, slice) pairs covering each segment's samples."""
        if self.segment.size == 0:
            return
        change = np.flatnonzero(np.diff(self.segment)) + 1
        starts = np.concatenate([[0], change])
        stops = np.concatenate([change, [self.segment.size]])
        for s, e in zip(starts, stops):
            yield int(self.segment[s]), slice(int(s), int(e))


def integrate_ermakov(protocol: TrapProtocol, initial: ErmakovState, params: PhysicalParams,
                      tol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                      samples_per_segment: int = 2001) -> ErmakovTrajectory:
    """Integrate the width equation segment by segment.

    Uses the DOP853 embedded pair with a fresh start at every segment edge,
    so jumps in u never sit inside a step.
    """
    if initial.x1 <= 0:
        raise ValueError("initial width must be positive")
    y = np.array([initial.x1, initial.x2], dtype=float)
    chunks = {k: [] for k in ("t", "a", "ad", "add", "u", "seg")}

    def fun_for(control, t0):
        if isinstance(control, ConstantU):
            uc = control.value

            def fun(t, yy):
                return (yy[1], -uc * yy[0] + _restoring(yy[0], params))
        else:
            def fun(t, yy):
                return (yy[1], -float(control(t - t0)) * yy[0] + _restoring(yy[0], params))
        return fun

    def collapse(t, yy):
        return yy[0] - COLLAPSE_FLOOR
    collapse.terminal = True
    collapse.direction = -1

    if not protocol.segments:
        u0 = protocol.u_before
        return ErmakovTrajectory(
            np.array([0.0]), np.array([y[0]]), np.array([y[1]]),
            np.array([float(acceleration(y[0], u0, params))]), np.array([u0]),
            np.array([0]), params)

    t0 = 0.0
    for i, seg in enumerate(protocol.segments):
        t1 = t0 + seg.duration
        max_step = np.inf
        if isinstance(seg.control, SampledU):
            max_step = float(np.min(np.diff(seg.control.times))) * 4
        sol = solve_ivp(fun_for(seg.control, t0), (t0, t1), y, method="DOP853",
                        rtol=tol, atol=atol, dense_output=True, events=collapse,
                        max_step=max_step)
        if sol.status == 1:
            tc = float(sol.t_events[0][0])
            raise CollapseError(f"width fell below {COLLAPSE_FLOOR} at t={tc:.6g}", time=tc)
        if sol.status != 0:
            raise IntegrationError(f"segment {i}: {sol.message}")
        n = max(int(samples_per_segment), 2)
        tt = np.linspace(t0, t1, n)
        yy = sol.sol(tt)
        yy[:, 0] = y
        yy[:, -1] = sol.y[:, -1]
        uu = seg.control(tt - t0)
        chunks["t"].append(tt)
        chunks["a"].append(yy[0])
        chunks["ad"].append(yy[1])
        chunks["add"].append(acceleration(yy[0], uu, params))
        chunks["u"].append(np.asarray(uu, dtype=float))
        chunks["seg"].append(np.full(n, i))
        y = sol.y[:, -1].copy()
        t0 = t1

    cat = {k: np.concatenate(v) for k, v in chunks.items()}
    return ErmakovTrajectory(cat["t"], cat["a"], cat["ad"], cat["add"], cat["u"],
                             cat["seg"].astype(int), params)


__all__ = [
    "SQRT_2PI", "COLLAPSE_FLOOR", "Model", "PhysicalParams", "ErmakovState",
    "ErmakovTrajectory", "solve_boundary_widths", "stationary_width",
    "effective_potential", "effective_energy", "ermakov_rhs", "acceleration", "barrier",
    "first_integral", "integrate_ermakov", "omega_squared_from_width",
]
