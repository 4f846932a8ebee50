"""Acceptance gate: one test per release criterion, each at its stated
tolerance, printing a pass/fail line. Run with -s to see the lines."""

import json
import math
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from undulator import (
    Direction,
    FieldModel,
    HelixParams,
    RegimeWarning,
    UndulatorRegimeViolation,
    flip_probability,
    flip_probability_summed,
    helical_angular_power,
    helical_total_power_ultra,
    polarization_characteristics,
    pv_cot_double_integral,
    solve_trajectory,
    spectral_angular_power,
    spin_asymmetry,
    total_power,
)
from undulator.helical import ULTRA_PI_COEFF, ULTRA_SIGMA_COEFF, ULTRA_TOTAL_COEFF
from undulator.specfun import MOMENT_WEIGHTS, oscillatory_moment
from conftest import helix_setup

HELICAL_CASES = ((0.5, 0.05), (0.9, 0.05), (0.99, 0.005))


def report(num, passed, detail):
    print(f"ACCEPTANCE {num}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, detail


def cone_grid(beta_parallel, count=17):
    """17 angles across the radiation cone, where harmonic amplitudes are
    resolvable in double precision."""
    gpar = 1.0 / math.sqrt(1.0 - beta_parallel ** 2)
    return np.linspace(0.7 / gpar, min(3.2 / gpar, 0.97 * math.pi), count)


def test_criterion_1_oscillatory_identities():
    weights = {
        "1": lambda e: np.ones_like(e), "sin": np.sin, "cos": np.cos,
        "sin2": lambda e: np.sin(e) ** 2, "cos2": lambda e: np.cos(e) ** 2,
        "sin_2eta": lambda e: np.sin(2 * e),
        "sin_cos": lambda e: np.sin(e) * np.cos(e),
        "sin_2eta_sin": lambda e: np.sin(2 * e) * np.sin(e),
        "sin_2eta_cos": lambda e: np.sin(2 * e) * np.cos(e),
    }
    start = time.perf_counter()
    eta = 2 * np.pi * np.arange(512) / 512
    worst = 0.0
    for n in range(0, 11):
        for xi in (0.1, 0.5, 1.0, 2.0, 5.0):
            osc = np.exp(1j * (n * eta - xi * np.sin(eta)))
            for name in MOMENT_WEIGHTS:
                ref = np.mean(osc * weights[name](eta))
                worst = max(worst, abs(oscillatory_moment(n, xi, name) - ref))
    elapsed = time.perf_counter() - start
    report(1, worst < 1e-10 and elapsed < 1.0,
           f"nine moment identities, max |err| {worst:.2e} < 1e-10, "
           f"{elapsed:.2f}s < 1s")


def test_criterion_2_classical_helical_oracle():
    start = time.perf_counter()
    worst = 0.0
    for bpar, bp in HELICAL_CASES:
        _, traj, params = helix_setup(bpar, bp)
        for n in range(1, 6):
            for theta in cone_grid(bpar):
                got = spectral_angular_power(
                    traj, Direction.toward(traj, theta, 0.7), n, 0.0)
                ref = helical_angular_power(params, n, theta)
                worst = max(worst, abs(got[0] - ref[0]) / abs(ref[0]),
                            abs(got[1] - ref[1]) / abs(ref[1]))
    elapsed = time.perf_counter() - start
    report(2, worst < 1e-6 and elapsed < 10.0,
           f"classical closed form vs quadrature on 3 cases x 5 n x 17 "
           f"angles, max rel {worst:.2e} < 1e-6, {elapsed:.2f}s < 10s")


def test_criterion_3_quantum_correction_oracle():
    chi = 2e-5
    worst = 0.0
    for bpar, bp in HELICAL_CASES:
        _, traj, _ = helix_setup(bpar, bp)
        thetas = cone_grid(bpar)
        for n in range(1, 6):
            quo = np.empty((len(thetas), 2))
            ref = np.empty_like(quo)
            for i, theta in enumerate(thetas):
                d = Direction.toward(traj, theta, 0.3)

                def dw(c):
                    return np.array(spectral_angular_power(traj, d, n, c))

                def closed(c):
                    return np.array(helical_angular_power(
                        HelixParams.from_speeds(bp, bpar, c), n, theta))

                base = dw(0.0)
                # one Richardson step removes the quadratic bias of the
                # exact-exponential route; the closed form is linear in chi
                quo[i] = (4.0 * (dw(0.5 * chi) - base)
                          - (dw(chi) - base)) / chi
                ref[i] = (closed(chi) - closed(0.0)) / chi
            scale = np.maximum(np.abs(ref), 1e-3 * np.max(np.abs(ref)))
            worst = max(worst, float(np.max(np.abs(quo - ref) / scale)))
    report(3, worst < 1e-4,
           f"first-order chi coefficient, quadrature vs closed form, "
           f"max rel {worst:.2e} < 1e-4")


def test_criterion_4_total_power_identities():
    worst_split = 0.0
    worst_routes = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        for model, gamma in (
            (FieldModel.helical(0.08), 1.3),
            (FieldModel.from_harmonic_rows(
                [[1, 3e-5, 0.0, 0.0, 0.0], [3, 0.0, 0.0, 2e-5, 1e-5]]), 1.8),
        ):
            res = total_power(solve_trajectory(model, gamma), model, 0.0)
            worst_split = max(worst_split, abs(res.i_pi - 0.25),
                              abs(res.i_sigma - 0.75))
        for model, gamma in (
            (FieldModel.helical(2e-5), 1.3),
            (FieldModel.from_harmonic_rows(
                [[1, 1e-5, 0.0, 0.0, 0.0], [2, 0.0, 0.0, 1.2e-5, 0.5e-5]]), 1.8),
        ):
            res = total_power(solve_trajectory(model, gamma), model, 0.0)
            worst_routes = max(worst_routes, abs(
                res.w_classical_field_route / res.w_classical - 1.0))
    report(4, worst_split < 1e-12 and worst_routes < 1e-8,
           f"classical split off by {worst_split:.2e} < 1e-12; power routes "
           f"differ by {worst_routes:.2e} < 1e-8")


def test_criterion_5_delta_sums():
    _, traj, params = helix_setup(0.6, 0.04)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        res = total_power(traj, traj.model, 0.0)
    worst_delta = max(abs(res.delta0 / params.beta_perp ** 2 - 1.0),
                      abs(res.delta1 / params.beta_perp ** 2 - 1.0))

    # band-limited field: cubic principal-value route vs harmonic series,
    # and the quadratic Parseval identity
    model = FieldModel.from_harmonic_rows(
        [[1, 2e-3, 1e-3, 0.0, 0.0], [3, 0.0, 0.0, 1.5e-3, -0.5e-3]])
    traj = solve_trajectory(model, 1.5)
    w0 = traj.omega0
    pv = 2.0 * pv_cot_double_integral(traj.beta_dot_perp, traj.beta_ddot_perp,
                                      traj.period_t)
    d0 = float(np.mean(traj.beta_dot_perp[:, 0] ** 2
                       + traj.beta_dot_perp[:, 1] ** 2))
    sum2 = sum3 = 0.0
    for n in range(1, traj.n_samples // 2):
        c2 = sum(abs(np.fft.rfft(traj.beta[:, k])[n] / traj.n_samples) ** 2
                 for k in (0, 1))
        sum2 += 2.0 * n ** 2 * c2
        sum3 += 2.0 * n ** 3 * c2
    worst_pv = abs(pv / (w0 ** 3 * sum3) - 1.0)
    worst_parseval = abs(w0 ** 2 * sum2 / d0 - 1.0)
    report(5, worst_delta < 1e-8 and worst_pv < 1e-8 and worst_parseval < 1e-10,
           f"helix delta sums off by {worst_delta:.2e} < 1e-8; principal "
           f"value vs cubic series {worst_pv:.2e} < 1e-8; Parseval "
           f"{worst_parseval:.2e} < 1e-10")


def test_criterion_6_ultrarelativistic_split():
    coeff_err = abs(ULTRA_PI_COEFF + ULTRA_SIGMA_COEFF - ULTRA_TOTAL_COEFF)
    coeff_err = max(coeff_err, abs(ULTRA_TOTAL_COEFF - 55 * math.sqrt(3) / 16))
    p = HelixParams.from_speeds(2e-4, math.sqrt(1 - 4e-4 - 4e-8))
    ratio0, f_pi0, f_sg0 = helical_total_power_ultra(p, 0.0)
    split_err = max(abs(ratio0 - 1.0), abs(f_pi0 - 0.125), abs(f_sg0 - 0.875))
    alg_err = 0.0
    for q in (1e-6, 1e-4, 2e-3):
        ratio, f_pi, f_sg = helical_total_power_ultra(p, q)
        alg_err = max(alg_err, abs(f_pi + f_sg - ratio))
    report(6, coeff_err < 1e-15 and split_err == 0.0 and alg_err < 1e-15,
           f"coefficient 55*sqrt(3)/16 to {coeff_err:.1e} < 1e-15; classical "
           f"split exact; f_pi + f_sigma == W/W_cl to {alg_err:.1e}")


def test_criterion_7_spin_suite():
    end_err = max(abs(spin_asymmetry(0.0) - 1.0), abs(spin_asymmetry(1.0)))
    vals = [spin_asymmetry(b) for b in np.linspace(0, 1, 201)]
    monotone = all(a >= b for a, b in zip(vals, vals[1:]))

    # angular quadrature of the small-deflection channel integrands
    # reassembles the closed-form rate
    x, w = np.polynomial.legendre.leggauss(240)
    reasm = 0.0
    for beta in (0.3, 0.6, 0.9):
        b2 = beta ** 2
        psi0 = 1.0 - beta * x
        for spin in (+1, -1):
            if spin == +1:
                kern = (b2 / 4.0) * (1.0 + x ** 2)
            else:
                kern = b2 / 4.0 + (psi0 + 0.5 * beta * x) ** 2
            integral = float(np.sum(w * (1.0 - x ** 2) * kern / psi0 ** 6))
            assembled = (1.0 - b2) / (4.0 * b2 ** 2) * integral
            closed = (1.0 / (30.0 * b2 ** 2)) * (5 - 2 * b2 + 3 * b2 ** 2) \
                / (1 - b2) ** 3 * (1.0 - spin * spin_asymmetry(beta))
            reasm = max(reasm, abs(assembled / closed - 1.0))

    # harmonic summation of the closed amplitudes at beta_perp/bpar = 0.01
    bpar = 0.6
    bp = 0.01 * bpar
    p = HelixParams.from_speeds(bp, math.sqrt(bpar ** 2 - bp ** 2), 1e-5)
    summed_err = max(
        abs(flip_probability_summed(p, s, alpha_fs=1.0)
            / flip_probability(p, s, alpha_fs=1.0) - 1.0)
        for s in (+1, -1))

    b2 = 1.0 - 1e-4
    pr = HelixParams.from_speeds(1e-5, math.sqrt(b2 - 1e-10), 1e-9)
    res = polarization_characteristics(pr)
    ultra_err = abs(res.p_equilibrium / (1.0 - b2) / (5.0 / 6.0) - 1.0)

    report(7, end_err == 0.0 and monotone and reasm < 1e-8
           and summed_err < 1e-3 and ultra_err < 0.01,
           f"asymmetry endpoints exact and monotone; rate reassembly "
           f"{reasm:.2e} < 1e-8; amplitude summation {summed_err:.2e} < 1e-3; "
           f"ultrarelativistic polarization ratio off by {ultra_err:.2e} < 1%")


def test_criterion_8_trajectory_invariants():
    rng = np.random.default_rng(20260810)
    worst_speed = worst_drift = worst_period = 0.0
    for _ in range(5):
        rows = [[n, *(4e-3 * rng.standard_normal(4))] for n in (1, 2, 3)]
        traj = solve_trajectory(FieldModel.from_harmonic_rows(rows),
                                float(rng.uniform(1.3, 4.0)))
        speed = np.sqrt((traj.beta ** 2).sum(axis=1))
        worst_speed = max(worst_speed, float(np.max(np.abs(speed - traj.beta_total))))
        disp = traj.period_t * traj.beta.mean(axis=0)
        worst_drift = max(worst_drift, abs(disp[0]), abs(disp[1]))
        worst_period = max(worst_period, abs(disp[2] - 2 * np.pi))
    try:
        solve_trajectory(FieldModel.helical(1.2 * math.sqrt(1.5 ** 2 - 1)), 1.5)
        raised = False
    except UndulatorRegimeViolation:
        raised = True
    report(8, worst_speed < 1e-10 and worst_drift < 1e-8
           and worst_period < 1e-8 and raised,
           f"speed conserved to {worst_speed:.2e} < 1e-10; drift closure to "
           f"{max(worst_drift, worst_period):.2e} < 1e-8; over-strong field "
           f"rejected: {raised}")


def test_criterion_9_determinism(tmp_path):
    import os
    doc = {
        "mode": "spectrum",
        "field": {"kind": "fourier", "harmonics": [[1, 2e-3, 1e-3, 0.0, 5e-4],
                                                   [2, 0.0, 0.0, 1e-3, 0.0]]},
        "gamma": 1.8, "chi": 1e-7, "n_range": [1, 2, 3], "theta_grid": 13,
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc))
    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / f"run_{threads}.csv"
        env = dict(os.environ, UNDULATOR_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "undulator", "--config", str(cfg),
             "--output", str(out)],
            capture_output=True, text=True, env=env)
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    report(9, outputs[0] == outputs[1] and len(outputs[0]) > 100,
           f"byte-identical CSV across thread counts "
           f"({len(outputs[0])} bytes)")
