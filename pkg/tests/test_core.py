import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ermakov_sta.core import (
    SQRT_2PI, ErmakovState, Model, PhysicalParams, effective_energy, effective_potential,
    ermakov_rhs, first_integral, integrate_ermakov, omega_squared_from_width,
    solve_boundary_widths, stationary_width,
)
from ermakov_sta.errors import CollapseError
from ermakov_sta.protocol import ConstantU, SampledU, Segment, TrapProtocol, constant_protocol


def quartic_roots_oracle(g_n, gamma):
    """Positive real roots from numpy's companion-matrix eigenvalues."""
    g = g_n / SQRT_2PI
    out = []
    for scale in (1.0, gamma):
        r = np.roots([1 / scale ** 4, 0, 0, -g, -1])
        pos = [z.real for z in r if abs(z.imag) < 1e-9 and z.real > 0]
        assert len(pos) == 1
        out.append(pos[0])
    return tuple(out)


def test_boundary_widths_linear_limit():
    assert solve_boundary_widths(PhysicalParams(0.0, 10.0)) == pytest.approx((1.0, 10.0), abs=1e-13)


def test_boundary_widths_weak_repulsion():
    a_i, a_f = solve_boundary_widths(PhysicalParams(0.01, 10.0))
    assert round(a_i, 3) == 1.001
    assert round(a_f, 3) == 10.099


def test_boundary_widths_attractive():
    # frozen from the eigenvalue oracle
    a_i, a_f = solve_boundary_widths(PhysicalParams(-0.01, 10.0))
    assert a_i == pytest.approx(0.9990021469406541, abs=1e-12)
    assert a_f == pytest.approx(9.899767159278262, abs=1e-11)


@pytest.mark.parametrize("g_n", [-0.5, -0.05, -0.01, 0.0, 0.01, 0.05, 1.0, 10.0])
@pytest.mark.parametrize("gamma", [0.5, 2.0, 10.0, 100.0])
def test_boundary_widths_match_oracle_and_residual(g_n, gamma):
    a_i, a_f = solve_boundary_widths(PhysicalParams(g_n, gamma))
    o_i, o_f = quartic_roots_oracle(g_n, gamma)
    assert a_i == pytest.approx(o_i, rel=1e-10)
    assert a_f == pytest.approx(o_f, rel=1e-10)
    g = g_n / SQRT_2PI
    assert abs(a_i ** 4 - g * a_i - 1) < 1e-12
    assert abs(a_f ** 4 / gamma ** 4 - g * a_f - 1) < 1e-12


def test_boundary_widths_other_models():
    assert solve_boundary_widths(PhysicalParams(0.3, 10, model=Model.ORDINARY)) == (1.0, 10.0)
    a_i, a_f = solve_boundary_widths(PhysicalParams(0.0, 10, model="tf"))
    assert (a_i, a_f) == (1.0, pytest.approx(10 ** (4 / 3)))


@settings(max_examples=50, deadline=None)
@given(g=st.floats(-0.5, 0.5), gamma=st.floats(1.0, 50.0))
def test_boundary_widths_increase_with_gn(g, gamma):
    h = 1e-4
    lo = solve_boundary_widths(PhysicalParams(g - h, gamma))
    hi = solve_boundary_widths(PhysicalParams(g + h, gamma))
    assert hi[0] > lo[0] and hi[1] > lo[1]


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(0.0, -1.0)
    with pytest.raises(ValueError):
        PhysicalParams(0.0, 10.0, 0.0)
    with pytest.raises(ValueError):
        PhysicalParams(float("nan"), 10.0)


def test_effective_potential_examples():
    assert effective_potential(1.0, 1.0, 0.0) == 1.0
    assert effective_potential(1.0, 1.0, 0.01) == pytest.approx(1.0039894228, abs=1e-9)
    assert effective_potential(10.0, 1e-4, 0.0) == pytest.approx(0.01, abs=1e-15)
    with pytest.raises(ValueError):
        effective_potential(0.0, 1.0, 0.0)


def test_effective_energy_examples():
    assert effective_energy(ErmakovState(1.0, 0.0), 1.0, 0.0) == 1.0
    assert effective_energy(ErmakovState(1.0, 1.0), 0.0, 0.0) == 1.0
    expected = 0.125 - 2.0 + 0.125 + 0.01 / (2 * math.sqrt(2 * math.pi))
    assert effective_energy(ErmakovState(2.0, 0.5), -1.0, 0.01) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(-1.7480053, abs=1e-7)


def test_rhs_examples():
    assert ermakov_rhs(ErmakovState(1.0, 0.0), 1.0, PhysicalParams(0.0)) == (0.0, 0.0)
    a_i = solve_boundary_widths(PhysicalParams(0.01))[0]
    _, acc = ermakov_rhs(ErmakovState(a_i, 0.0), 1.0, PhysicalParams(0.01))
    assert abs(acc) < 1e-10
    assert ermakov_rhs(ErmakovState(1.0), 1.0, PhysicalParams(model="tf")) == (0.0, 0.0)
    # the three models differ away from equilibrium
    s = ErmakovState(2.0, 0.3)
    assert ermakov_rhs(s, 0.5, PhysicalParams(0.2))[1] == pytest.approx(
        -1.0 + 1 / 8 + 0.2 / (SQRT_2PI * 4))
    assert ermakov_rhs(s, 0.5, PhysicalParams(0.2, model="ordinary"))[1] == pytest.approx(-1 + 1 / 8)
    assert ermakov_rhs(s, 0.5, PhysicalParams(0.2, model="tf"))[1] == pytest.approx(-1 + 1 / 4)


@pytest.mark.parametrize("g_n", [-0.05, 0.0, 0.01, 0.05])
@pytest.mark.parametrize("gamma", [2.0, 10.0])
def test_stationarity_at_boundary_widths(g_n, gamma):
    p = PhysicalParams(g_n, gamma)
    a_i, a_f = solve_boundary_widths(p)
    assert abs(ermakov_rhs(ErmakovState(a_i), 1.0, p)[1]) < 1e-10
    assert abs(ermakov_rhs(ErmakovState(a_f), gamma ** -4, p)[1]) < 1e-10


def test_rhs_collapse_floor():
    with pytest.raises(CollapseError):
        ermakov_rhs(ErmakovState(1e-7, 0.0), 1.0, PhysicalParams())


def test_omega_squared_from_width_examples():
    p0 = PhysicalParams(0.0)
    assert omega_squared_from_width(1.0, 0.0, p0) == 1.0
    assert omega_squared_from_width(10.0, 0.0, p0) == pytest.approx(1e-4, rel=1e-14)
    p = PhysicalParams(0.01)
    a_i = solve_boundary_widths(p)[0]
    assert omega_squared_from_width(a_i, 0.0, p) == pytest.approx(1.0, abs=1e-9)
    # the width rounded to 1.001 still gives u = 1 to within the rounding error
    assert omega_squared_from_width(1.001, 0.0, p) == pytest.approx(1.0, abs=2e-5)
    with pytest.raises(ValueError):
        omega_squared_from_width(-1.0, 0.0, p)


def test_stationary_width():
    assert stationary_width(1.0, 0.0) == pytest.approx(1.0)
    assert stationary_width(1e-4, 0.0) == pytest.approx(10.0)
    assert stationary_width(1e-4, 0.01) == pytest.approx(solve_boundary_widths(PhysicalParams(0.01))[1])


def test_integrate_quarter_period_ordinary():
    # u = 1/gamma^2 for a quarter period takes a = 1 to a = gamma exactly
    p = PhysicalParams(0.0, 10.0, model=Model.ORDINARY)
    proto = constant_protocol([0.01], [math.pi / (2 * 0.1)])
    traj = integrate_ermakov(proto, ErmakovState(1.0, 0.0), p)
    assert traj.a[-1] == pytest.approx(10.0, abs=1e-8)
    assert abs(traj.a_dot[-1]) < 1e-8
    # closed form a(t)^2 = 1 + (1 - w^2)/w^2 sin^2(w t)
    t = traj.times
    exact = np.sqrt(1 + 99 * np.sin(0.1 * t) ** 2)
    assert np.max(np.abs(traj.a - exact)) < 1e-8


def test_integrate_zero_duration():
    traj = integrate_ermakov(TrapProtocol(), ErmakovState(1.3, 0.2), PhysicalParams())
    assert traj.a.tolist() == [1.3] and traj.a_dot.tolist() == [0.2]
    assert traj.t_f == 0.0


def test_integrate_collapse_detected():
    # the 1/a^3 barrier only stops the width below the floor if the inward speed is huge
    proto = constant_protocol([1.0], [1.0])
    with pytest.raises(CollapseError) as info:
        integrate_ermakov(proto, ErmakovState(1e-5, -1e7), PhysicalParams(0.0, model="ordinary"))
    # free flight from 1e-5 to 1e-6 at speed 1e7, barely slowed
    assert info.value.time == pytest.approx(9e-13, rel=1e-2)


def test_integrate_output_grid_contains_boundaries():
    proto = constant_protocol([-1.0, 1.0], [0.7, 0.4])
    traj = integrate_ermakov(proto, ErmakovState(1.0), PhysicalParams(0.01))
    for edge in (0.0, 0.7, 1.1):
        assert np.any(np.isclose(traj.times, edge, atol=1e-14))
    # state continuous across the jump, acceleration not
    first, second = [sl for _, sl in traj.segment_slices()]
    assert traj.a[first][-1] == traj.a[second][0]
    assert traj.a_dot[first][-1] == traj.a_dot[second][0]
    assert traj.a_ddot[first][-1] != pytest.approx(traj.a_ddot[second][0])
    assert np.allclose(traj.b, -traj.a_dot / (2 * traj.a))


@pytest.mark.parametrize("model", list(Model))
def test_first_integral_conserved_on_constant_segments(model):
    tol = 1e-10
    p = PhysicalParams(0.03, 10.0, model=model)
    proto = constant_protocol([-1.0, 1.0, 0.2], [0.8, 1.0, 2.0])
    traj = integrate_ermakov(proto, ErmakovState(1.0, 0.1), p, tol=tol)
    for idx, sl in traj.segment_slices():
        u = proto.segments[idx].control.value
        inv = first_integral(traj.a[sl], traj.a_dot[sl], u, p)
        scale = np.max(np.abs(inv)) + np.max(traj.a_dot[sl] ** 2)
        assert np.max(np.abs(inv - inv[0])) / scale < 10 * tol
        e = [effective_energy(ErmakovState(a, ad), u, p.g_n) for a, ad in
             zip(traj.a[sl][::200], traj.a_dot[sl][::200])]
        if model is Model.GENERALIZED:
            assert np.allclose(e, inv[0] / 2, rtol=1e-8)


def test_inversion_round_trip_on_sampled_protocol():
    tol = 1e-10
    t = np.linspace(0, 3.0, 601)
    u = 1.0 - 1.5 * np.sin(np.pi * t / 3.0) ** 2
    proto = TrapProtocol((Segment(3.0, SampledU(t, u)),))
    p = PhysicalParams(0.02)
    traj = integrate_ermakov(proto, ErmakovState(1.0), p, tol=tol)
    back = omega_squared_from_width(traj.a, traj.a_ddot, p)
    assert np.max(np.abs(back - proto.u(traj.times))) < 100 * tol


def test_trajectory_amplitude():
    traj = integrate_ermakov(TrapProtocol(), ErmakovState(2.0), PhysicalParams())
    assert traj.amplitude[0] == pytest.approx((math.pi * 4) ** -0.25)
