"""Travel-time integrals with inverse-square-root endpoint singularities."""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import QuadratureFailure

_PROBE_POINTS = 513


def _sin2_integrand(radicand, lo, hi):
    span = hi - lo

    def f(theta):
        s, c = math.sin(theta), math.cos(theta)
        r = radicand(lo + span * s * s)
        if not r > 0:
            raise QuadratureFailure(
                f"radicand {r:.3e} <= 0 at x={lo + span * s * s:.12g}",
                location=lo + span * s * s)
        return 2.0 * span * s * c / math.sqrt(r)
    return f


def _probe(radicand, lo, hi):
    theta = np.linspace(0.0, 0.5 * np.pi, _PROBE_POINTS)[1:-1]
    xs = lo + (hi - lo) * np.sin(theta) ** 2
    vals = np.array([radicand(x) for x in xs])
    bad = np.flatnonzero(~(vals > 0))
    if bad.size:
        x = float(xs[bad[0]])
        raise QuadratureFailure(
            f"radicand changes sign inside ({lo:.12g}, {hi:.12g}) near x={x:.12g}", location=x)


def _tanh_sinh(f, a, b, levels=12):
    """Double-exponential rule on (a, b); used only as a fallback.

    Nodes crowd the endpoints and some round onto them in double precision.
    Their weights are negligible, so a failed evaluation there counts as 0.
    The radicand loses digits that close to its zeros, which limits this
    rule to about 1e-8 relative accuracy.
    """
    import mpmath

    def g(t):
        try:
            v = f(float(t))
        except (ZeroDivisionError, QuadratureFailure):
            return 0.0
        return v if math.isfinite(v) else 0.0
    with mpmath.workdps(20):
        val = mpmath.quad(g, [a, b], method="tanh-sinh", maxdegree=levels)
    return float(val)


def singular_time_quadrature(radicand, lo: float, hi: float, rtol: float = 1e-10) -> float:
    """Return the integral of dx / sqrt(radicand(x)) over (lo, hi).

    The radicand must be positive inside the interval and may vanish
    like a simple zero at either endpoint. The substitution
    ``x = lo + (hi - lo) sin^2(theta)`` removes simple-zero singularities
    before adaptive Gauss-Kronrod; if that fails to converge, a
    tanh-sinh rule is applied to the same transformed integrand.
    """
    if hi == lo:
        return 0.0
    if hi < lo:
        return singular_time_quadrature(radicand, hi, lo, rtol)
    _probe(radicand, lo, hi)
    f = _sin2_integrand(radicand, lo, hi)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(f, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=rtol, limit=400)
            if err <= max(1e-8 * abs(val), 1e-14):
                return val
        except IntegrationWarning:
            pass
    val = _tanh_sinh(f, 0.0, 0.5 * math.pi)
    if not math.isfinite(val):
        raise QuadratureFailure("quadrature did not converge", location=None)
    return val


__all__ = ["singular_time_quadrature"]
