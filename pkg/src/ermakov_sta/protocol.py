"""Piecewise trap protocols u(t) = omega^2(t).

A protocol is an ordered list of segments. Each segment holds either a
constant squared frequency or a sampled smooth curve; jumps are only
allowed at segment edges. The stationary trap values before ``t = 0`` and
after ``t_f`` are carried alongside so the edge jumps stay explicit.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.interpolate import CubicSpline


@dataclass(frozen=True)
class ConstantU:
    value: float

    def __call__(self, tau):
        return np.full_like(np.asarray(tau, dtype=float), self.value)

    def extrema(self):
        return self.value, self.value


@dataclass(frozen=True, eq=False)
class SampledU:
    """Smooth control given by samples on a local time grid starting at 0.

    Evaluated with a cubic spline so forward integration of a protocol
    designed from an analytic width keeps fourth-order accuracy.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("sampled control needs matching 1D arrays with >= 2 points")
        if not np.all(np.diff(t) > 0):
            raise ValueError("sample grid must be strictly increasing")
        if abs(t[0]) > 1e-12:
            raise ValueError("sample grid must start at the segment start (0)")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("sampled control contains non-finite values")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @cached_property
    def _spline(self):
        return CubicSpline(self.times, self.values)

    def __call__(self, tau):
        return self._spline(np.clip(tau, self.times[0], self.times[-1]))

    def extrema(self):
        return float(self.values.min()), float(self.values.max())


Control = Union[ConstantU, SampledU]


@dataclass(frozen=True)
class Segment:
    duration: float
    control: Control

    def __post_init__(self):
        if not (self.duration > 0 and np.isfinite(self.duration)):
            raise ValueError(f"segment duration must be positive, got {self.duration}")
        if isinstance(self.control, SampledU):
            span = self.control.times[-1]
            if abs(span - self.duration) > 1e-9 * max(1.0, self.duration):
                raise ValueError(
                    f"sampled control spans {span}, segment lasts {self.duration}")


@dataclass(frozen=True)
class TrapProtocol:
    segments: tuple[Segment, ...] = ()
    u_before: float = 1.0
    u_after: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def t_f(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Segment edge times, including 0 and t_f."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def segment_index(self, t: float) -> int:
        """Index of the segment containing ``t`` (right-continuous)."""
        edges = self.boundaries
        i = int(np.searchsorted(edges, t, side="right")) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def u(self, t):
        """Evaluate u(t); at an interior edge the later segment wins."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        edges = self.boundaries
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(self.segments) - 1)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                out[mask] = seg.control(t[mask] - edges[i])
        return float(out[0]) if scalar else out

    def max_abs_u(self) -> float:
        vals = [abs(self.u_before)]
        if self.u_after is not None:
            vals.append(abs(self.u_after))
        for seg in self.segments:
            lo, hi = seg.control.extrema()
            vals += [abs(lo), abs(hi)]
        return max(vals)

    def with_durations(self, durations) -> "TrapProtocol":
        """Copy with constant segments rescaled to new durations.

        Only meaningful for constant-control protocols; used for
        sensitivity checks.
        """
        segs = []
        for seg, d in zip(self.segments, durations):
            if not isinstance(seg.control, ConstantU):
                raise ValueError("only constant segments can be retimed")
            segs.append(Segment(float(d), seg.control))
        return TrapProtocol(tuple(segs), self.u_before, self.u_after)


def constant_protocol(values, durations, u_before=1.0, u_after=None) -> TrapProtocol:
    segs = tuple(Segment(float(d), ConstantU(float(v))) for v, d in zip(values, durations))
    return TrapProtocol(segs, u_before, u_after)


__all__ = ["ConstantU", "SampledU", "Segment", "TrapProtocol", "Control", "constant_protocol"]
