"""Exit criteria for the simulator, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary.  Run alone with ``pytest tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import oracles
from conftest import ACCEPTANCE_LINES
from nucent.cli import ScanConfig, execute, parse_config
from nucent.event_sim import ExperimentConfig, end_to_end_concurrence
from nucent.interferometer import fringe_scan, propagate_chain
from nucent.nuclear_response import SampleParams, TimeGrid, scattered_wavepacket, switched_pair
from nucent.rate_estimator import XPDCParams, chi2_111, heralded_rate, rate_report
from nucent.tomography import DiagonalProbs, TPEDensityMatrix, Visibility, coherence_estimate, concurrence


def check(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


def _parabolic_minimum(x, y, i):
    """Vertex of the parabola through (x[i-1..i+1], y[i-1..i+1])."""
    x0, x1, x2 = x[i - 1 : i + 2]
    y0, y1, y2 = y[i - 1 : i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    return -b / (2 * a)


def test_1_fringe_reproduction():
    s = SampleParams(alpha=oracles.ALPHA, gamma=oracles.GAMMA, delta_b=oracles.DELTA_B)
    grid = TimeGrid()
    t_phi = np.arange(121) * 0.5
    start = time.perf_counter()
    points = fringe_scan(s, t_phi, grid)
    elapsed = time.perf_counter() - start
    q = np.array([p.q_b_norm for p in points])
    dev = float(np.max(np.abs(q - np.sin(s.delta_b * t_phi) ** 2)))

    # period from the fringe zeros (interior local minima, refined by a parabola)
    minima = [i for i in range(1, len(q) - 1) if q[i] <= q[i - 1] and q[i] <= q[i + 1]]
    zeros = [0.0] + [_parabolic_minimum(t_phi, q, i) for i in minima]
    period = (zeros[-1] - zeros[0]) / (len(zeros) - 1)
    period_err = abs(period - oracles.BEAT_PERIOD)

    ok = dev < 0.05 and period_err <= grid.dt and elapsed < 10.0
    check(
        1,
        "fringe reproduction",
        ok,
        f"max|q_b_norm - sin^2| = {dev:.2e} (< 0.05), period {period:.4f} ns vs "
        f"{oracles.BEAT_PERIOD:.4f} ns (err {period_err:.2e} <= dt {grid.dt}), runtime {elapsed:.2f} s (< 10 s)",
    )


def test_2_pointwise_unitarity():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(100):
        alpha = rng.uniform(0.1, 30.0)
        gamma = rng.uniform(1e-3, 0.05)
        s = SampleParams(alpha, gamma, rng.uniform(0.0, 80.0) * gamma)
        t_phi = rng.uniform(0.0, 300.0)
        dt = 0.05 if s.delta_b == 0 else min(0.05, math.pi / (20 * s.delta_b))
        grid = TimeGrid(0.0, 200.0, dt)
        out = propagate_chain(s, t_phi, grid)
        r, l = switched_pair(s, t_phi, grid)
        lhs = np.abs(out.a) ** 2 + np.abs(out.b) ** 2
        rhs = (r.amplitude**2 + l.amplitude**2) / 2
        mask = rhs > 0
        rel = np.abs(lhs[mask] - rhs[mask]) / rhs[mask]
        worst = max(worst, float(np.max(rel)) if rel.size else 0.0)
        if np.any(~mask):
            worst = max(worst, float(np.max(lhs[~mask])))
    check(2, "pointwise unitarity", worst <= 1e-12, f"worst relative deviation {worst:.2e} over 100 draws (<= 1e-12)")


def test_3_beat_nodes():
    s = SampleParams()
    grid = TimeGrid()
    psi = scattered_wavepacket(s, grid).amplitude
    t = grid.times
    idx = np.flatnonzero(np.sign(psi[:-1]) != np.sign(psi[1:]))
    crossings = t[idx[:11]]
    expected = (2 * np.arange(11) + 1) * math.pi / (2 * s.delta_b)
    err = float(np.max(np.abs(crossings - expected)))
    first_ok = abs(expected[0] - oracles.FIRST_BEAT_NODE) < 1e-12 and abs(crossings[0] - 7.383) <= grid.dt
    check(
        3,
        "beat-node positions",
        err <= grid.dt and first_ok,
        f"max node offset {err:.2e} ns (<= {grid.dt}), first node at {crossings[0]:.3f} ns (expected 7.383)",
    )


def test_4_monte_carlo_fidelity():
    scan = ScanConfig().values
    start = time.perf_counter()
    ideal = end_to_end_concurrence(ExperimentConfig(n_events=100_000), scan)
    incoherent = end_to_end_concurrence(ExperimentConfig(n_events=100_000, eps_inc=1.0), scan)
    elapsed = time.perf_counter() - start
    ok = abs(ideal - 1.0) <= 0.02 and incoherent == 0.0 and elapsed < 120.0
    check(
        4,
        "Monte Carlo fidelity",
        ok,
        f"ideal C = {ideal:.5f} (|C-1| <= 0.02), eps_inc=1 C = {incoherent} (== 0), runtime {elapsed:.1f} s for {len(scan)} scan points x 2 (< 120 s)",
    )


def test_5_concurrence_arithmetic():
    probs = DiagonalProbs(p01=0.4, p10=0.4, p11=0.05, p00=0.15)
    d = coherence_estimate(probs, Visibility(0.9))
    c = concurrence(TPEDensityMatrix(probs, d, 1.0))
    check(5, "concurrence arithmetic", round(c, 4) == 0.5468, f"C = {c:.6f} (expected 0.5468 to 4 dp)")


def test_6_susceptibility_magnitude():
    chi = chi2_111(XPDCParams(signal_ev=14.4e3, idler_ev=100.0))
    check(6, "susceptibility magnitude", 1e-21 <= chi <= 1e-19, f"|chi2_111| = {chi:.3e} C/N (in [1e-21, 1e-19])")


def test_7_rate_formula():
    r = heralded_rate(2.9e6, 29.3e-9, 1.0)
    rows = {name: (value, flag) for name, value, _, flag in rate_report().rows()}
    flagged = rows["heralded_rate"][1] == "paper_claims=~1 Hz"
    ok = round(r, 4) == 0.0850 and math.isclose(r, 2.9e6 * 29.3e-9, rel_tol=1e-15) and flagged
    check(7, "rate formula", ok, f"R_E = {r:.5f} Hz (0.0850), report flag '{rows['heralded_rate'][1]}'")


def test_8_determinism(tmp_path):
    text = """
experiment: {n_events: 100000, seed: 12345, p_abs: 0.9, eta_x: 0.8, eps_inc: 0.05, dark_rate: 0.001, t_phi: 4.0}
scan: {start: 0.0, stop: 14.0, step: 2.0}
"""
    identical = True
    files = 0
    for mode in ("simulate", "fringe", "tomography"):
        cfg = parse_config(f"mode: {mode}\n{text}")
        first = execute(cfg, tmp_path / f"{mode}_w1.csv", workers=1)
        second = execute(cfg, tmp_path / f"{mode}_w1b.csv", workers=1)
        third = execute(cfg, tmp_path / f"{mode}_w4.csv", workers=4)
        for a, b, c in zip(first, second, third):
            files += 1
            identical &= a.read_bytes() == b.read_bytes() == c.read_bytes()
    check(8, "determinism", identical, f"{files} output files byte-identical across reruns and 1 vs 4 workers")
