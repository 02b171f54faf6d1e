"""Acceptance criteria at their stated tolerances.

Each test records a PASS/FAIL line (printed in the terminal summary) and then
asserts, so a failing criterion also fails the run.  Monte-Carlo criteria use
1000 trials per point; the full module takes a few minutes on one core.
"""

import logging
import math
import os
import time

import numpy as np
import pytest

from daomp.channel import ChannelDrawConfig, NoiseConfig, draw_channel, gen_pilot, propagate, receiver_front_end
from daomp.dictionary import build_dictionary, column_index
from daomp.harness.experiment import run_sweep
from daomp.harness.presets import fig2_trace, fig3, fig4, fig5, fig6
from daomp.harness.trace import trace_experiment
from daomp.model import DDGridSpec, FrameSpec, PathSet, build_window, channel_matrix, cyclic_extension, doppler_matrix
from daomp.solver import StoppingRule, da_omp, least_squares, omp_baseline, reconstruct_channel

log = logging.getLogger(__name__)

TRIALS = 1000
WORKERS = os.cpu_count() or 1
L = 128
GRID = DDGridSpec(4, 16, 2)
FRAME = FrameSpec(L, 64, 4)
NMSE_TARGET = 1e-3


def rel_nmse(est, paths, grid, L):
    H = channel_matrix(paths, L, L)
    return np.linalg.norm(reconstruct_channel(est, grid, L) - H) ** 2 / np.linalg.norm(H) ** 2


def crossing(snr, nmse, target=NMSE_TARGET, extrapolate=False):
    """SNR where the mean NMSE first drops to ``target`` (log-linear interpolation)."""
    y = np.log10(nmse) - math.log10(target)
    for i in range(len(snr) - 1):
        if y[i] > 0 >= y[i + 1]:
            return snr[i] + (snr[i + 1] - snr[i]) * y[i] / (y[i] - y[i + 1])
    if y[0] <= 0:
        return snr[0]
    if extrapolate and y[-1] < y[-2]:
        return snr[-1] + (snr[-1] - snr[-2]) * y[-1] / (y[-2] - y[-1])
    return math.nan


# --------------------------------------------------------------------------- 1

def test_exact_on_grid_recovery(verdicts):
    t0 = time.perf_counter()
    cfg = ChannelDrawConfig(P_range=(1, 8), on_grid=True)
    errors, separated = [], []
    for seed in range(100):
        pilot = gen_pilot(L, np.random.SeedSequence([seed, 0, L]))
        D = build_dictionary(pilot.x, FRAME, GRID)
        paths = draw_channel(cfg, GRID, np.random.SeedSequence([seed, 1]))
        y = receiver_front_end(propagate(pilot, FRAME, paths), FRAME, D.window)
        errors.append(rel_nmse(da_omp(D, y), paths, GRID, L))
    elapsed = time.perf_counter() - t0
    ok = sum(e < 1e-10 for e in errors)
    passed = ok == 100 and elapsed < 10
    verdicts.record(
        "1 exact on-grid recovery",
        passed,
        f"{ok}/100 trials with NMSE < 1e-10 (need 100), worst {max(errors):.2e}, {elapsed:.1f} s",
    )
    assert passed


# --------------------------------------------------------------------------- 2

@pytest.mark.parametrize("L_w", [64, 0])
def test_end_to_end_convention(verdicts, L_w):
    frame = FrameSpec(L, L_w, GRID.G_tau)
    pilot = gen_pilot(L, seed=7)
    D = build_dictionary(pilot.x, frame, GRID)
    h = 0.8 * np.exp(1.1j)
    worst = 0.0
    for l in range(GRID.G_tau):
        for k in range(GRID.G_nu):
            y = receiver_front_end(propagate(pilot, frame, PathSet([h], [l], [k / GRID.u_nu])), frame, D.window)
            col = h * D.psi[:, column_index(l, k, GRID)]
            worst = max(worst, np.linalg.norm(y - col) / np.linalg.norm(col))
    passed = worst <= 1e-10
    verdicts.record(f"2 end-to-end convention (L_w={L_w})", passed,
                    f"max relative deviation {worst:.1e} over 64 cells (tol 1e-10)")
    assert passed


# --------------------------------------------------------------------------- 3

@pytest.fixture(scope="module", params=[1, 4], ids=["gtau1", "gtau4"])
def fig3_result(request):
    return run_sweep(fig3(request.param, trials=TRIALS), workers=WORKERS, keep_trials=False)


def test_fig3_window_gap(verdicts, fig3_result):
    G_tau = fig3_result.config.G_tau
    snr, rc = fig3_result.series("da_omp_rcos")
    _, re = fig3_result.series("da_omp_rect")
    s_rc, s_re = crossing(snr, rc), crossing(snr, re)
    gap = s_re - s_rc
    note = ""
    if math.isnan(s_re):
        x = crossing(snr, re, extrapolate=True)
        note = f"; rect never reaches 1e-3 in 0-30 dB (min {re.min():.2e})"
        if not math.isnan(x):
            note += f", last-segment extrapolation puts it at {x:.1f} dB (gap {x - s_rc:.1f} dB)"
    passed = 3.0 <= gap <= 7.0
    verdicts.record(
        f"3a Fig.3 rcos-vs-rect gap at 1e-3 (G_tau={G_tau})",
        passed,
        f"rcos crosses at {s_rc:.1f} dB, rect at {s_re:.1f} dB, gap {gap:.1f} dB (need 3-7){note}",
    )
    assert passed


def test_fig3_omp_floor(verdicts, fig3_result):
    G_tau = fig3_result.config.G_tau
    parts, passed = [], True
    da30 = fig3_result.at("da_omp_rcos", 30.0).nmse_mean
    for solver in ("omp_rcos", "omp_rect"):
        n20 = fig3_result.at(solver, 20.0).nmse_mean
        n30 = fig3_result.at(solver, 30.0).nmse_mean
        floor = n30 >= n20 / 3
        lower = da30 * 10 <= n30
        passed &= floor and lower
        parts.append(f"{solver} 20dB {n20:.2e} 30dB {n30:.2e} (ratio {n20 / n30:.2f}, need <=3), "
                     f"da_omp_rcos/{solver} at 30dB = 1/{n30 / da30:.1f} (need <=1/10)")
    verdicts.record(f"3b Fig.3 OMP floor (G_tau={G_tau})", passed, "; ".join(parts))
    assert passed


def test_fig3_monotone_in_snr(verdicts, fig3_result):
    G_tau = fig3_result.config.G_tau
    bad = []
    for solver in fig3_result.config.solvers:
        rows = [s for s in fig3_result.summary if s.solver == solver]
        inversions = [(a, b) for a, b in zip(rows, rows[1:]) if b.nmse_mean > a.nmse_mean]
        if len(inversions) > 1 or any(b.nmse_mean - a.nmse_mean > b.nmse_stderr for a, b in inversions):
            bad.append(solver)
    passed = not bad
    verdicts.record(f"3 Fig.3 mean NMSE non-increasing in SNR (G_tau={G_tau})", passed,
                    "all solvers monotone within one inversion <= stderr" if passed else f"violations: {bad}")
    assert passed


# --------------------------------------------------------------------------- 4

def test_fig4_rolloff(verdicts):
    short = run_sweep(fig4(0.125, trials=TRIALS, sweep_values=(20.0, 25.0, 30.0)), workers=WORKERS)
    long = run_sweep(fig4(0.5, trials=TRIALS, sweep_values=(20.0, 25.0, 30.0)), workers=WORKERS)
    parts, passed = [], True
    for snr in (20.0, 25.0, 30.0):
        a, b = long.at("da_omp_rcos", snr), short.at("da_omp_rcos", snr)
        margin = math.hypot(a.nmse_stderr, b.nmse_stderr)
        ok = b.nmse_mean - a.nmse_mean > margin
        passed &= ok
        parts.append(f"{snr:.0f}dB L/2 {a.nmse_mean:.2e} vs L/8 {b.nmse_mean:.2e} (diff/se {(b.nmse_mean - a.nmse_mean) / margin:.1f})")
    verdicts.record("4 Fig.4 longer roll-off helps at SNR>=20dB", passed, "; ".join(parts))
    assert passed


# --------------------------------------------------------------------------- 5

def test_fig5_oversampling(verdicts):
    res = run_sweep(fig5(trials=TRIALS), workers=WORKERS, keep_trials=False)
    u, da = res.series("da_omp_rcos")
    omp4 = res.at("omp_rcos", 4.0).nmse_mean
    beats = res.at("da_omp_rcos", 2.0).nmse_mean < omp4
    improvements = [(a - b) / a for a, b in zip(da, da[1:])]
    u_star = next((u[i] for i in range(len(u) - 1) if u[i] <= 8 and all(x < 0.2 for x in improvements[i:])), None)
    passed = beats and u_star is not None
    verdicts.record(
        "5 Fig.5 oversampling",
        passed,
        f"da_omp_rcos(u=2) {res.at('da_omp_rcos', 2.0).nmse_mean:.2e} vs omp_rcos(u=4) {omp4:.2e}; "
        f"successive gains {', '.join(f'{x:.0%}' for x in improvements)}; plateau from u*={u_star}",
    )
    assert passed


# --------------------------------------------------------------------------- 6

def test_fig6_pilot_length(verdicts):
    res = run_sweep(fig6(trials=TRIALS, sweep_values=(256.0, 512.0)), workers=WORKERS, keep_trials=False)
    rc = res.at("da_omp_rcos", 256.0).nmse_mean
    re = res.at("da_omp_rect", 512.0).nmse_mean
    ratio = max(rc / re, re / rc)
    passed = ratio <= 3
    verdicts.record("6 Fig.6 rcos L=256 vs rect L=512", passed,
                    f"{rc:.2e} vs {re:.2e}, factor {ratio:.2f} (need <=3)")
    assert passed


# --------------------------------------------------------------------------- 7

def test_algorithmic_invariants(verdicts):
    pilot = gen_pilot(L, seed=0)
    dicts = {
        "rcos": build_dictionary(pilot.x, FRAME, GRID),
        "rect": build_dictionary(pilot.x, FrameSpec(L, 0, 4), GRID),
    }
    violations, q_ratio = [], []
    for seed in range(500):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
        paths = draw_channel(ChannelDrawConfig(), GRID, rng)
        noise = NoiseConfig(float(rng.choice([0.0, 10.0, 20.0, 30.0, math.inf])))
        r = propagate(pilot, FRAME, paths, noise, rng)
        for name, D in dicts.items():
            y = receiver_front_end(r, D.frame, D.window, FRAME)
            runs = [da_omp(D, y), omp_baseline(D, y, StoppingRule.fixed(paths.P))]
            if noise.sigma2 > 0:
                runs.append(omp_baseline(D, y, StoppingRule.residual(), noise.sigma2))
            for est in runs:
                norms = [rec.residual_norm for rec in est.trace] + [est.final_residual_norm]
                checks = {
                    "monotone": all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:])),
                    "no I_I": all(d < D.n_support for d in est.support),
                    "distinct": len(set(est.support)) == est.Q,
                    "cap": est.Q <= est.cap and len(est.trace) == est.Q,
                }
                violations += [(seed, name, k) for k, ok in checks.items() if not ok]
            q_ratio.append(runs[0].Q / paths.P)
    over = sum(q > 4 for q in q_ratio)
    if over:
        log.warning("Q > 4P in %d of %d DA-OMP runs (soft check)", over, len(q_ratio))
    passed = not violations
    verdicts.record("7a solver invariants (500 seeded runs)", passed,
                    f"{len(violations)} violations; DA-OMP Q <= 4P in {len(q_ratio) - over}/{len(q_ratio)} runs (soft)")
    assert passed


@pytest.fixture(scope="module")
def fig2_runs():
    cfg = fig2_trace()
    return [trace_experiment(cfg.replace(seed=s)) for s in range(500)]


def test_fig2_peak_location(verdicts, fig2_runs):
    hits = sum(
        all(np.argmax(res.correlations(w)[0]) < res.n_support for w in ("rcos", "rect"))
        for res in fig2_runs
    )
    passed = hits == len(fig2_runs)
    verdicts.record("7b Fig.2 iteration-0 peaks inside I_S", passed, f"{hits}/{len(fig2_runs)} runs")
    assert passed


def test_fig2_stop_order(verdicts, fig2_runs):
    earlier = sum(res.stop_iteration("rcos") <= res.stop_iteration("rect") for res in fig2_runs)
    frac = earlier / len(fig2_runs)
    passed = frac >= 0.8
    stops = np.array([[res.stop_iteration("rcos"), res.stop_iteration("rect")] for res in fig2_runs])
    verdicts.record(
        "7c Fig.2 rcos stops no later than rect",
        passed,
        f"{earlier}/{len(fig2_runs)} = {frac:.1%} (need >=80%); median stop rcos {np.median(stops[:, 0]):.0f}, rect {np.median(stops[:, 1]):.0f}",
    )
    assert passed


# --------------------------------------------------------------------------- 8

def test_oracle_equivalence(verdicts):
    rng = np.random.default_rng(8)
    pilot = gen_pilot(L, seed=4)
    w = build_window(FRAME)
    D = build_dictionary(pilot.x, FRAME, GRID)

    # dictionary columns vs W [I 0] Delta_ext T_ext x
    dict_err = 0.0
    for _ in range(50):
        l, k = int(rng.integers(0, GRID.G_tau + 1)), int(rng.integers(0, GRID.G_nu))
        prefix = FRAME.L_w // 2 + l
        ext = FrameSpec(L, 2 * prefix, 0)
        T = cyclic_extension(ext, "window_trimmed")[: FRAME.L_prime + l]
        Dop = doppler_matrix(FRAME.L_prime + l, k / GRID.u_nu, L, -prefix)
        S = np.hstack([np.eye(FRAME.L_prime), np.zeros((FRAME.L_prime, l))])
        dense = w * (S @ Dop @ T @ pilot.x)
        dict_err = max(dict_err, np.abs(D.psi[:, column_index(l, k, GRID)] - dense).max())

    # least squares vs explicit pseudo-inverse
    ls_err = 0.0
    for _ in range(50):
        A = rng.standard_normal((64, 6)) + 1j * rng.standard_normal((64, 6))
        y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        ref = np.linalg.pinv(A) @ y
        ls_err = max(ls_err, np.linalg.norm(least_squares(A, y) - ref) / np.linalg.norm(ref))

    # linear propagation on the CP-covered block vs circular channel matrix
    prop_err = 0.0
    for _ in range(50):
        paths = draw_channel(ChannelDrawConfig(), GRID, rng)
        core = propagate(pilot, FRAME, paths)[FRAME.L_cp:FRAME.L_cp + L]
        prop_err = max(prop_err, np.abs(core - channel_matrix(paths, L, L) @ pilot.x).max())

    passed = dict_err < 1e-12 and ls_err < 1e-10 and prop_err < 1e-12
    verdicts.record(
        "8 oracle equivalence",
        passed,
        f"dictionary {dict_err:.1e} (tol 1e-12), least squares {ls_err:.1e} (tol 1e-10), "
        f"circular-vs-linear {prop_err:.1e} (tol 1e-12)",
    )
    assert passed
