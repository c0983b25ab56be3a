"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from silentqec import cli
from silentqec.budget import BudgetParams, failure_budget, optimal_nc, required_ps
from silentqec.codes import braid_transform, braiding_layout, repetition_code, surface_code
from silentqec.coherent import (
    NoiseConfig,
    StateVector,
    apply_rotation,
    rotated_amplitudes,
    prepare_logical,
    precision_experiment,
    silent_drift_experiment,
    syndrome_branches,
)
from silentqec.frame import exact_failure_probability, occurrence_rate, run_shots, threshold_scan
from silentqec.pauli import commutes, in_group
from silentqec.stats import loglog_slope

H = 1 / math.sqrt(2)


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
        assert ok, detail

    return emit


def test_criterion_01_closed_form(report):
    t0 = time.time()
    lay = repetition_code(3)
    zero = prepare_logical(lay, 1, 0).amplitudes
    one = prepare_logical(lay, 0, 1).amplitudes
    rng = np.random.default_rng(20240101)
    worst = 0.0
    for _ in range(100):
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        a, b = complex(v[0], v[1]), complex(v[2], v[3])
        th = rng.uniform(-np.pi, np.pi, 3)
        s = StateVector(3, a * zero + b * one)
        for q in range(3):
            s = apply_rotation(s, q, th[q])
        worst = max(worst, float(np.max(np.abs(s.amplitudes - rotated_amplitudes(a, b, th)))))
    dt = time.time() - t0
    report(1, worst < 1e-12 and dt < 1.0, f"max deviation {worst:.2e} over 100 draws in {dt:.2f}s")


def test_criterion_02_no_defect_gain(report):
    lay = repetition_code(3)
    etas = np.geomspace(0.02, 0.2, 8)
    alpha = beta = H
    ys = []
    p_err = 0.0
    for i, eta in enumerate(etas):
        st = precision_experiment(lay, NoiseConfig(eta=eta), shots=2000, seed=i, alpha=alpha, beta=beta)
        ys.append(st.branch(0).mean_eta_l)
        s = prepare_logical(lay, alpha, beta)
        for q in range(3):
            s = apply_rotation(s, q, eta)
        p_exact = {o: p for o, p, _ in syndrome_branches(s, lay)}[(1, 1)]
        c, sn = math.cos(eta / 2), math.sin(eta / 2)
        p_formula = abs(alpha * c**3 - beta * sn**3) ** 2 + abs(alpha * sn**3 + beta * c**3) ** 2
        p_err = max(p_err, abs(p_exact - p_formula))
    slope, se = loglog_slope(etas, ys)
    ok = abs(slope - 3.0) <= 0.1 and p_err < 1e-10
    report(2, ok, f"n=0 slope {slope:.3f} (+-{se:.3f}); max |P - closed form| {p_err:.1e}")


def test_criterion_03_defect_scaling(report):
    lay = repetition_code(3)
    etas = np.geomspace(0.02, 0.2, 6)
    fx, fy, fw, ex, ey, ew = [], [], [], [], [], []
    for i, eta in enumerate(etas):
        st = precision_experiment(lay, NoiseConfig(eta=eta), shots=100_000, seed=300 + i)
        b = st.branch(1)
        if b.count:
            fx.append(eta), fy.append(b.frequency), fw.append(b.count)
            ex.append(eta), ey.append(b.mean_eta_l), ew.append(b.count)
    sp, sp_se = loglog_slope(fx, fy, fw)
    se_, se_se = loglog_slope(ex, ey, ew)
    ok = abs(sp - 2.0) <= 0.1 and abs(se_ - 1.0) <= 0.15
    report(3, ok, f"P(n=1) slope {sp:.3f} (+-{sp_se:.3f}); eta_L|n=1 slope {se_:.3f}")


def test_criterion_04_general_law(report):
    lay = repetition_code(5)
    etas = np.geomspace(0.05, 0.3, 6)
    y0, y1, w0, w1, x0, x1 = [], [], [], [], [], []
    for i, eta in enumerate(etas):
        st = precision_experiment(lay, NoiseConfig(eta=eta), shots=20_000, seed=400 + i)
        for n, xs, ys, ws in ((0, x0, y0, w0), (1, x1, y1, w1)):
            b = st.branch(n)
            if b.count:
                xs.append(eta), ys.append(b.mean_eta_l), ws.append(b.count)
    s0, _ = loglog_slope(x0, y0, w0)
    s1, _ = loglog_slope(x1, y1, w1)
    ok = abs(s0 - 5) <= 0.4 and abs(s1 - 3) <= 0.4
    report(4, ok, f"n=0 slope {s0:.3f}; n=1 slope {s1:.3f}")


def test_criterion_05_ancilla_noise(report):
    lay = repetition_code(3)
    etas = np.geomspace(0.02, 0.2, 6)
    xs, ys, ws = [], [], []
    for i, eta in enumerate(etas):
        cfg = NoiseConfig(eta=eta, apply_to_ancillas=True)
        st = precision_experiment(lay, cfg, shots=4000, seed=500 + i, alpha=H, beta=H, mode="circuit")
        b = st.branch(0)
        xs.append(eta), ys.append(b.mean_eta_l), ws.append(b.count)
    slope, se = loglog_slope(xs, ys, ws)
    report(5, abs(slope - 3) <= 0.3, f"n=0 slope with ancilla rotations and {lay.distance}-round windows {slope:.3f}")


def test_criterion_06_discrete_oracle(report):
    t0 = time.time()
    lay = repetition_code(3)
    zs = []
    for i, p in enumerate((0.01, 0.05, 0.1)):
        st = run_shots(lay, p, shots=100_000, seed=600 + i)
        exact = 3 * p**2 - 2 * p**3
        zs.append((st.p_L_hat - exact) / math.sqrt(exact * (1 - exact) / st.shots))
    surf = surface_code(3)
    p = 0.05
    exact = exact_failure_probability(surf, p)
    st = run_shots(surf, p, shots=100_000, seed=610)
    zs.append((st.p_L_hat - exact) / math.sqrt(exact * (1 - exact) / st.shots))
    dt = time.time() - t0
    ok = all(abs(z) < 3 for z in zs) and dt < 60
    report(6, ok, "z-scores " + ", ".join(f"{z:+.2f}" for z in zs) + f" in {dt:.1f}s")


@pytest.mark.slow
def test_criterion_07_threshold(report):
    ps = [0.01, 0.02, 0.03, 0.05, 0.07, 0.09, 0.11, 0.13]
    scan = threshold_scan([3, 5, 7], ps, shots=100_000, seed=7)
    tab = scan.table()
    cross = scan.crossings()
    have = all(c is not None for _, _, c in cross)
    p_cross = min((c for _, _, c in cross if c is not None), default=0.0)
    below = [p for p in ps if p <= p_cross / 2]
    ordered = bool(below)
    for p in below:
        a, b, c = tab[(3, p)], tab[(5, p)], tab[(7, p)]
        ordered &= c.ci_high < b.ci_low and b.ci_high < a.ci_low
    detail = "crossings " + ", ".join(f"{d1}/{d2}: {c:.3g}" if c else f"{d1}/{d2}: none" for d1, d2, c in cross)
    detail += f"; separated ordering at p in {below}"
    report(7, have and ordered, detail)


def test_criterion_08_occurrence_law(report):
    p_s = 1e-3
    sizes = np.array([9, 25, 49])
    rates, ses, zs = [], [], []
    for n_c in sizes:
        m = repetition_code(int(n_c)).n_stabilizers
        rate, _ = occurrence_rate(m, p_s, 100_000, seed=int(n_c))
        exp = 1 - (1 - p_s) ** m
        se = math.sqrt(exp * (1 - exp) / 100_000)
        rates.append(rate), ses.append(se), zs.append((rate - exp) / se)
    rates, ses = np.array(rates), np.array(ses)
    w = 1 / ses**2
    A = np.vstack([np.ones_like(sizes, dtype=float), sizes]).T
    coef = np.linalg.solve(A.T @ (A * w[:, None]), A.T @ (w * rates))
    resid = (rates - A @ coef) / ses
    ok = all(abs(z) < 3 for z in zs) and np.all(np.abs(resid) < 3)
    report(8, ok, "z " + ", ".join(f"{z:+.2f}" for z in zs) + f"; linear slope {coef[1]:.3e}/qubit,"
           f" max fit residual {np.max(np.abs(resid)):.2f} sigma")


def test_criterion_09_silent_drift(report):
    eta = 0.05
    lay = repetition_code(5)
    cur = silent_drift_experiment(lay, NoiseConfig(eta=eta), T=50, silent=1, shots=4000, seed=9)
    occ = cur.branch_occupation  # cycles 0..49 silent, 50 is the resumption cycle
    monotone = bool(np.all(np.diff(occ) > 0))
    excess = occ - occ[0]
    T = np.arange(len(occ))
    expo, _ = loglog_slope(T[1:], excess[1:])
    superlinear = expo > 1.0 and excess[50] > 2 * excess[25]
    bounded = float(np.max(cur.control_occupation)) < 2 * eta**2
    z = (cur.resume_alone_frequency - cur.resume_alone_probability) / cur.resume_alone_se
    ok = monotone and superlinear and bounded and abs(z) < 3
    report(9, ok, f"occupation {occ[0]:.2e} -> {occ[-1]:.2e}, growth exponent {expo:.2f}; control max "
           f"{np.max(cur.control_occupation):.2e} < {2 * eta**2:.1e}; Born z = {z:+.2f}")


def test_criterion_10_braiding(report):
    t0 = time.time()
    setup = braiding_layout(3)
    ops, loops, gens = setup.operators, setup.loops, setup.layout.stabilizers
    xa, xs, zs = ops["X_A"], ops["X_S"], ops["Z_S"]
    before = commutes(xa, zs)
    moved = braid_transform(xa, loops["silent"])
    after = not commutes(moved, zs)
    equal = in_group(moved * xa * xs, gens) is not None
    trivial = in_group(braid_transform(xa, loops["trivial"]) * xa, gens) is not None
    dt = time.time() - t0
    ok = before and after and equal and trivial and dt < 1
    report(10, ok, f"[X_A,Z_S]=0 {before}; braided anticommutes {after}; equals X_A X_S mod S {equal};"
           f" trivial loop {trivial}; {dt:.2f}s")


def test_criterion_11_budget(report):
    bp = BudgetParams(1e15, 100, 1000, 1e-4, 1e-2, 1e-20)
    res = failure_budget(bp)
    sil_err = abs(res.silent_term - 1.0)
    need = required_ps(bp, 1.0)
    back = failure_budget(BudgetParams(1e15, 100, 1000, 1e-4, 1e-2, need.p_s)).p_total
    rt_err = abs(back - 1.0)
    ps_err = abs(need.p_s - 1e-20) / 1e-20
    opt = optimal_nc(BudgetParams(1e15, 100, 1000, 1e-4, 1e-2, 1e-12), range(4, 5000))
    ok = sil_err <= 1e-12 and rt_err <= 1e-12 and ps_err <= 1e-12 and opt.interior and res.qec_term < 1e-12
    report(11, ok, f"silent term {res.silent_term!r} (QEC term {res.qec_term:.1e}); required p_s {need.p_s:.6g},"
           f" round-trip error {rt_err:.1e};"
           f" interior optimum N_c = {opt.n_code}")


DETERMINISM_RUNS = [
    ["describe", "--code", "surface", "--size", "3"],
    ["eq4-check", "--eta", "0.2", "--angle-mode", "uniform", "--shots", "50"],
    ["precision", "--etas", "0.05,0.2", "--angle-mode", "uniform", "--shots", "3000", "--cycles", "2", "--rows", "true"],
    ["precision", "--eta", "0.1", "--mode", "circuit", "--apply-to-ancillas", "true", "--shots", "500", "--alpha", "0.6", "--beta", "0.8"],
    ["silent-drift", "--size", "5", "--eta", "0.05", "--T", "8", "--shots", "300", "--silent", "1"],
    ["montecarlo", "--code", "surface", "--size", "3", "--p", "0.05", "--q", "0.02", "--cycles", "3", "--shots", "20000"],
    ["montecarlo", "--size", "9", "--p", "0.02", "--p-s", "0.01", "--cycles", "6", "--shots", "20000"],
    ["threshold", "--code", "surface", "--sizes", "3,5", "--ps", "0.03,0.1", "--shots", "10000"],
    ["silent-mc", "--sizes", "5,9", "--p", "0.02", "--p-s", "0.05", "--cycles", "4", "--shots", "10000"],
    ["budget", "--n-ops", "1e15", "--n-logical", "100", "--p", "1e-4", "--p-s", "1e-12", "--nc-min", "4", "--nc-max", "600"],
]


def test_criterion_12_determinism(report, tmp_path):
    bad = []
    for k, args in enumerate(DETERMINISM_RUNS):
        outs = []
        for rep, threads in enumerate((1, 1, 4)):
            out = tmp_path / f"{k}-{rep}"
            rc = cli.main([*args, "--seed", "424242", "--threads", str(threads), "--output", str(out)])
            outs.append((rc, (out / "results.csv").read_bytes() if rc == 0 else b""))
        if any(rc != 0 for rc, _ in outs) or len({b for _, b in outs}) != 1:
            bad.append(args[0])
    report(12, not bad, f"{len(DETERMINISM_RUNS)} configs x (1, 1, 4 threads) byte-identical"
           + (f"; mismatched: {bad}" if bad else ""))
