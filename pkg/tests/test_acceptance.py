"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py``; the lines are written
with output capture disabled so they appear in the normal report.
"""
import math
import time
import timeit

import numpy as np
import pytest

from ermakov_sta.core import SQRT_2PI, ErmakovState, Model, PhysicalParams, integrate_ermakov, \
    solve_boundary_widths
from ermakov_sta.design import (
    Scheme, bang_bang_linear_closed_form, design, design_bang_bang, design_bang_bang_tf,
    design_two_jump, verify_protocol,
)
from ermakov_sta.gpe import Grid, evolve_split_step, fidelity, gaussian, ground_state_imaginary_time
from ermakov_sta.metrics import (
    GpeSettings, fit_log_slope, protocol_energy, scan_fidelity, simulate_protocol,
    unattainability_curve,
)
from ermakov_sta.protocol import constant_protocol


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}")
        assert ok, f"criterion {n}: {detail}"
    return emit


def best_time(fn, number=20, repeat=5):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def test_01_boundary_widths(verdict):
    p = PhysicalParams(0.01, 10.0)
    a_i, a_f = solve_boundary_widths(p)
    g = p.g_eff
    res_i = abs(a_i ** 4 - g * a_i - 1)
    res_f = abs(a_f ** 4 / 1e4 - g * a_f - 1)
    runtime = best_time(lambda: solve_boundary_widths(p))
    ok = (abs(a_i - 1.001) <= 5e-4 and abs(a_f - 10.099) <= 5e-3 and max(res_i, res_f) < 1e-12
          and runtime < 1e-3)
    verdict(1, ok, f"a_i={a_i:.6f} a_f={a_f:.6f} residuals={res_i:.1e},{res_f:.1e} "
                   f"runtime={runtime * 1e6:.1f}us")


def test_02_two_jump(verdict):
    start = time.perf_counter()
    r = design_two_jump(PhysicalParams(0.01, 10.0))
    runtime = time.perf_counter() - start
    r0 = design_two_jump(PhysicalParams(0.0, 10.0))
    ok = (abs(r.aux["omega_c"] - 0.0993) <= 5e-4 and abs(r.t_f - 15.83) <= 0.01
          and abs(r0.aux["omega_c"] - 0.1) < 1e-14 and abs(r0.t_f - 5 * math.pi) < 1e-10
          and runtime < 0.1)
    verdict(2, ok, f"omega_c={r.aux['omega_c']:.6f} t_f={r.t_f:.5f}; gN=0: "
                   f"omega_c={r0.aux['omega_c']:.15f} t_f-5pi={r0.t_f - 5 * math.pi:.1e} "
                   f"runtime={runtime * 1e3:.1f}ms")


def test_03_bang_bang_minimal_times(verdict):
    start = time.perf_counter()
    t = {g: design_bang_bang(PhysicalParams(g, 10.0, 1.0)).t_f for g in (-0.01, 0.0, 0.01)}
    runtime = time.perf_counter() - start
    expected = {0.0: 3.088, 0.01: 3.097, -0.01: 3.079}
    ok = (all(abs(t[g] - v) <= 2e-3 for g, v in expected.items())
          and t[-0.01] < t[0.0] < t[0.01] and runtime < 1.0)
    verdict(3, ok, "t_f " + " ".join(f"gN={g:+.2f}:{t[g]:.5f}" for g in sorted(t))
            + f" runtime={runtime * 1e3:.1f}ms")


def test_04_thomas_fermi_bang_bang(verdict):
    start = time.perf_counter()
    r = design_bang_bang_tf(10.0, 1.0)
    runtime = time.perf_counter() - start
    ok = abs(r.t_f - 3.809) <= 5e-3 and runtime < 0.1
    verdict(4, ok, f"t_f={r.t_f:.5f} runtime={runtime * 1e3:.1f}ms")


def test_05_closed_form_cross_check(verdict):
    t1, t2 = bang_bang_linear_closed_form(10.0, 1.0)
    exact = abs(t1 - math.log(10)) < 1e-12 and abs(t2 - math.pi / 4) < 1e-12
    worst = 0.0
    for gamma in (2.0, 5.0, 10.0):
        for delta in (1.0, 2.0, 4.0):
            c1, c2 = bang_bang_linear_closed_form(gamma, delta)
            q = design_bang_bang(PhysicalParams(0.0, gamma, delta, Model.ORDINARY)).aux
            worst = max(worst, abs(q["t1"] - c1), abs(q["t2"] - c2))
    verdict(5, exact and worst < 1e-8,
            f"(t1-ln10, t2-pi/4)=({t1 - math.log(10):.1e}, {t2 - math.pi / 4:.1e}) "
            f"max |quadrature - closed form|={worst:.1e}")


def test_06_round_trip_verification(verdict):
    cases = []
    for scheme in Scheme:
        for g_n in (-0.05, -0.01, 0.0, 0.01, 0.05):
            for delta in ((1.0, 2.0, 4.0) if "bang-bang" in scheme.value else (1.0,)):
                cases.append((scheme, PhysicalParams(g_n, 10.0, delta)))
    worst_a = worst_ad = worst_drift = 0.0
    failed = []
    for scheme, p in cases:
        res = verify_protocol(design(scheme, p), tol=1e-10)
        worst_a = max(worst_a, res.a_tf_error)
        worst_ad = max(worst_ad, res.a_dot_tf_error)
        worst_drift = max(worst_drift, res.max_invariant_drift)
        if not (res.passed and res.max_invariant_drift < 1e-8):
            failed.append((scheme.value, p.g_n, p.delta))
    verdict(6, not failed, f"{len(cases)} protocols, max |a(t_f)-a_f|={worst_a:.1e} "
                           f"max |a_dot(t_f)|={worst_ad:.1e} max drift={worst_drift:.1e}"
                           + (f" failed={failed}" if failed else ""))


@pytest.mark.slow
def test_07_linear_limit_fidelity(verdict):
    out = {}
    for scheme in ("two-jump", "bang-bang"):
        start = time.perf_counter()
        res = simulate_protocol(design(scheme, PhysicalParams(0.0, 10.0, 1.0)), GpeSettings())
        out[scheme] = (res.fidelity, time.perf_counter() - start)
    ok = all(f >= 0.999 and rt < 60 for f, rt in out.values())
    verdict(7, ok, " ".join(f"{s}: F={f:.8f} ({rt:.1f}s)" for s, (f, rt) in out.items()))


@pytest.mark.slow
def test_08_variational_consistency(verdict):
    p = PhysicalParams(0.01, 10.0, 1.0)
    grid = Grid()
    psi0 = ground_state_imaginary_time(1.0, 0.01, grid)
    dev = {}
    for scheme in ("two-jump", "bang-bang"):
        rep = design(scheme, p)
        ev = evolve_split_step(psi0, rep.protocol, 0.01, stride=1)
        traj = integrate_ermakov(rep.protocol, ErmakovState(rep.a_i), rep.params)
        t, idx = np.unique(traj.times, return_index=True)
        a = np.interp(ev.t, t, traj.a[idx])
        dev[scheme] = float(np.max(np.abs(ev.width - a) / a))
    verdict(8, all(d < 0.02 for d in dev.values()),
            "max relative width deviation " + " ".join(f"{s}={d:.1e}" for s, d in dev.items()))


@pytest.mark.slow
def test_09_stability_ordering(verdict):
    grid_gn = (-0.05, -0.02, 0.0, 0.02, 0.05)
    schemes = ("inverse-engineering", "two-jump", "bang-bang")
    rows = scan_fidelity(schemes, grid_gn, 10.0, GpeSettings(), workers=3)
    F = {(r.scheme, r.g_n): r.fidelity for r in rows}
    ok = all(r.status == "OK" for r in rows)
    ie_vs_bb = all(F["inverse-engineering", g] >= F["bang-bang", g] for g in grid_gn)
    sign = all(F[s, q] >= F[s, -q] for s in schemes for q in (0.02, 0.05))
    table = "; ".join(f"{s}: " + ",".join(f"{F[s, g]:.7f}" for g in grid_gn) for s in schemes)
    verdict(9, ok and ie_vs_bb and sign,
            f"F_ie>=F_bb:{ie_vs_bb} F(+q)>=F(-q):{sign} [{table}]")


def test_10_energy_ordering(verdict):
    p = PhysicalParams(0.0, 10.0, 1.0)
    e = {s: protocol_energy(design(s, p, t_f=5.45))
         for s in ("two-jump", "inverse-engineering", "bang-bang")}
    ok = e["two-jump"] < e["inverse-engineering"] < e["bang-bang"]
    verdict(10, ok, " < ".join(f"{s}:{v:.4f}" for s, v in e.items()))


def test_11_unattainability_scaling(verdict):
    gammas = np.geomspace(10.0, 100.0, 11)
    rows = unattainability_curve(0.0, 1.0, gammas)
    slope, icpt = fit_log_slope(gammas, [r.t_f for r in rows])
    slope_tf, _ = fit_log_slope(gammas, [r.t_f_tf for r in rows])
    ratio = slope_tf / slope
    ok = abs(slope - 1) <= 0.01 and abs(icpt - math.pi / 4) <= 0.02 and abs(ratio - 4 / 3) <= 0.02
    verdict(11, ok, f"slope={slope:.6f} intercept={icpt:.6f} (pi/4={math.pi / 4:.6f}) "
                    f"TF/linear slope ratio={ratio:.5f}")


@pytest.mark.slow
def test_12_numerical_methods(verdict):
    grid = Grid()
    psi = ground_state_imaginary_time(1.0, 0.0, grid)
    f_ho = fidelity(psi, gaussian(grid, 1.0))

    small = Grid(16.0, 256)
    ev = evolve_split_step(gaussian(small, 1.5), constant_protocol([1.0, -0.5], [5.0, 5.0]), 0.05,
                           dt=0.01, stride=1)
    norm_drift = float(np.max(np.abs(ev.norm - ev.norm[0])))

    # self-convergence of the final field along the bang-bang protocol
    rep = design("bang-bang", PhysicalParams(0.01, 10.0, 1.0))
    psi0 = ground_state_imaginary_time(1.0, 0.01, grid)
    fields = [evolve_split_step(psi0, rep.protocol, 0.01, dt=dt).field.values
              for dt in (0.005, 0.0025, 0.00125)]
    ratio = (np.linalg.norm(fields[0] - fields[1]) / np.linalg.norm(fields[1] - fields[2]))
    ok = f_ho > 1 - 1e-9 and norm_drift < 1e-9 and abs(ratio - 4) <= 0.5
    verdict(12, ok, f"1-F(HO)={1 - f_ho:.1e} norm drift/{ev.steps} steps={norm_drift:.1e} "
                    f"dt-halving ratio={ratio:.3f}")
