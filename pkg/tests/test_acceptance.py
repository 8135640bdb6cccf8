"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line, printed in the "acceptance criteria"
section of the pytest summary. Reference values come from mpmath or from
closed forms, never from the package under test.
"""

import io
import math
import time

import mpmath
import numpy as np
import pytest

from discwindow import bessel, cli
from discwindow.bessel import bessel_j, bessel_zero, zeros_below
from discwindow.bracketing import PUBLISHED_UNIQUENESS_THRESHOLD, threshold_report, uniqueness_threshold
from discwindow.fdsolver import Mesh, ReducedProblem, gap_asymptotics, refine_study, solve_lowest
from discwindow.geometry import WaveguideGeometry
from discwindow.variational import (
    LocalizationBump,
    RadialProfile,
    TailFamily,
    TrialParams,
    energy_closed_form,
    energy_quadrature,
    tail_energy,
    unweighted_energy,
)

mpmath.mp.dps = 30
PI2 = math.pi**2
X01 = float(mpmath.besseljzero(0, 1))


def cold_start():
    bessel.clear_zero_cache()


def test_bessel_engine(criterion):
    cold_start()
    t0 = time.perf_counter()
    zeros = {(n, l): bessel_zero(n, l).value for n in range(6) for l in range(1, 21)}
    elapsed = time.perf_counter() - t0
    residual = max(abs(float(mpmath.besselj(n, x))) for (n, l), x in zeros.items())
    own = max(abs(bessel_j(n, x)) for (n, l), x in zeros.items())
    interlace = all(
        zeros[n, l] < zeros[n + 1, l] < zeros[n, l + 1]
        for n in range(5)
        for l in range(1, 20)
    )
    ok = residual <= 1e-12 and own <= 1e-12 and interlace and elapsed < 1.0
    criterion(
        "Bessel engine",
        ok,
        f"max|J_n(x)| mpmath={residual:.1e} own={own:.1e}, interlacing={interlace}, "
        f"{elapsed:.3f}s",
    )
    assert ok


def test_zero_count_estimate(criterion):
    cold_start()
    t0 = time.perf_counter()
    count = len(zeros_below(30.0, "single"))
    elapsed = time.perf_counter() - t0
    estimate = 30.0**2 / PI2
    rel = abs(count - estimate) / estimate
    ok = rel <= 0.2 and elapsed < 1.0
    criterion(
        "zero-count estimate",
        ok,
        f"|zeros below 30| = {count}, lambda^2/pi^2 = {estimate:.2f}, rel {rel:.3f}, "
        f"{elapsed:.3f}s",
    )
    assert ok


def test_leading_asymptotic_zero_formula(criterion):
    worst = (0.0, None)
    for n in range(4):
        for l in range(5, 21):
            exact = float(mpmath.besseljzero(n, l))
            rel = abs((n + 2 * l - 0.5) * math.pi / 2 - exact) / exact
            worst = max(worst, (rel, (n, l)))
    ok = worst[0] < 0.01
    criterion(
        "leading asymptotic of zeros (n <= 3, 5 <= l <= 20)",
        ok,
        f"worst relative error {worst[0]:.4%} at (n, l) = {worst[1]}",
    )
    assert ok


def test_uniqueness_threshold(criterion):
    candidates = sorted(
        float(mpmath.besseljzero(n, l)) for n in range(4) for l in range(1, 4)
    )
    oracle = (2 * candidates[1] / (math.sqrt(3) * math.pi)) ** 2
    derived = uniqueness_threshold("single")
    report = threshold_report()
    rel_pub = abs(derived - PUBLISHED_UNIQUENESS_THRESHOLD) / PUBLISHED_UNIQUENESS_THRESHOLD
    ok = (
        abs(derived - oracle) <= 1e-12
        and abs(derived - 1.9837) <= 5e-4
        and rel_pub <= 0.05
        and report.published == PUBLISHED_UNIQUENESS_THRESHOLD
        and report.relative_discrepancy == pytest.approx(rel_pub)
    )
    criterion(
        "uniqueness threshold",
        ok,
        f"derived {derived:.6f} (oracle {oracle:.6f}), published {report.published}, "
        f"discrepancy {rel_pub:.2%}, leading-asymptotic {report.leading_asymptotic:.4f}",
    )
    assert ok


def test_counting_function(criterion):
    cold_start()
    step = 0.01
    out = io.StringIO()
    t0 = time.perf_counter()
    code = cli.main(
        ["fig3", "--ratio-min", "0.1", "--ratio-max", "4.0", "--ratio-step", str(step)],
        stdout=out,
    )
    elapsed = time.perf_counter() - t0
    rows = [line.split(",") for line in out.getvalue().splitlines()[1:]]
    ratios = [float(r) for r, _ in rows]
    counts = [int(c) for _, c in rows]
    monotone = all(b >= a for a, b in zip(counts, counts[1:]))
    first = next(r for r, c in zip(ratios, counts) if c > 0)
    expected = 2 * X01 / (math.sqrt(3) * math.pi)
    at_one = counts[ratios.index(1.0)]
    ok = (
        code == 0
        and monotone
        and abs(first - expected) <= step
        and at_one == 1
        and elapsed < 1.0
    )
    criterion(
        "counting function",
        ok,
        f"first step at {first} (expected {expected:.4f}), count(1.0) = {at_one}, "
        f"monotone={monotone}, {elapsed:.3f}s",
    )
    assert ok


def test_existence_certificate(criterion):
    ratios = [0.05, 0.1, 0.25, 0.5, 1, 2, 5]
    results = []
    t0 = time.perf_counter()
    for ratio in ratios:
        out = io.StringIO()
        code = cli.main(["certify", "--a", str(ratio), "--d", "1"], stdout=out)
        summary = dict(kv.split("=") for kv in out.getvalue().splitlines()[0].split())
        results.append((ratio, code, float(summary.get("q", "nan"))))
    elapsed = time.perf_counter() - t0
    ok = all(code == 0 and q < 0 for _, code, q in results) and elapsed < 10.0
    worst = max(q for _, _, q in results)
    criterion(
        "existence certificate",
        ok,
        f"exit codes {[c for _, c, _ in results]}, largest q = {worst:.3e}, {elapsed:.2f}s",
    )
    assert ok


def test_tail_scaling_identity(criterion):
    profiles = [
        RadialProfile.plateau(2.0),
        RadialProfile.cosine(2.0, 1.5),
        RadialProfile.gaussian(2.0, 0.4),
    ]
    worst = 0.0
    for profile in profiles:
        base = unweighted_energy(profile)
        for tau in (1e-3, 1e-2, 1e-1, 1.0):
            weighted = tail_energy(TailFamily(profile, tau))
            worst = max(worst, abs(weighted - tau * base) / weighted)
    ok = worst <= 1e-8
    criterion("tail scaling identity", ok, f"worst relative deviation {worst:.1e}")
    assert ok


def test_closed_form_matches_quadrature(criterion):
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(20):
        d = rng.uniform(0.3, 3.0)
        a = rng.uniform(0.05, 4.0)
        g = WaveguideGeometry(d, a)
        lo, hi = np.sort(rng.uniform(0.05, 0.95, 2)) * a
        if hi - lo < 0.05 * a:
            hi = min(lo + 0.05 * a, 0.97 * a)
        b = a + rng.uniform(0.05, 2.0)
        width = rng.uniform(0.2, 3.0)
        kind = rng.integers(3)
        profile = [
            RadialProfile.plateau(b, width),
            RadialProfile.cosine(b, width),
            RadialProfile.gaussian(b, width / 4),
        ][kind]
        p = TrialParams(
            10 ** rng.uniform(-6, 0.5), rng.uniform(0, 3), profile, LocalizationBump(lo, hi)
        )
        exact = energy_quadrature(g, p)
        worst = max(worst, abs(energy_closed_form(g, p) - exact) / (1 + abs(exact)))
    ok = worst <= 1e-6
    criterion("closed form vs quadrature", ok, f"worst scaled difference {worst:.1e} over 20 sets")
    assert ok


def test_solver_against_bracket(criterion):
    g = WaveguideGeometry(1.0, 1.0)
    p = ReducedProblem(g, 0)
    base = Mesh.for_problem(p, 200, 20)
    t0 = time.perf_counter()
    study = refine_study(p, levels=3, base=base)
    fine = base.refined().refined()
    lam = solve_lowest(p, fine).eigenvalues[0]
    elapsed = time.perf_counter() - t0
    err = study.error_estimate
    upper = PI2 / 4 + X01**2
    ok = (
        fine.describe() == "800x80"
        and PI2 / 4 < lam < PI2
        and lam <= upper + 5 * err
        and elapsed < 60.0
    )
    criterion(
        "solver vs bracket",
        ok,
        f"lambda1 = {lam:.6f} on {fine.describe()}, bracket {upper:.6f}, "
        f"Richardson error {err:.2e}, {elapsed:.2f}s",
    )
    assert ok


def test_large_window_gap(criterion):
    radii = (2.0, 4.0, 8.0)
    t0 = time.perf_counter()
    rows = gap_asymptotics([WaveguideGeometry(1.0, a) for a in radii])
    elapsed = time.perf_counter() - t0
    gaps = [r.gap for r in rows]
    scaled = [r.scaled_gap for r in rows]
    positive = all(x > 0 for x in gaps)
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    bounded = all(
        r.gap <= (X01 / r.a) ** 2 + r.error_estimate for r in rows
    )
    scaled_decreasing = all(b < a for a, b in zip(scaled, scaled[1:]))
    ok = positive and decreasing and bounded and scaled_decreasing and elapsed < 300
    criterion(
        "large-window gap",
        ok,
        "gap = " + ", ".join(f"{x:.5f}" for x in gaps)
        + "; gap*a^2 = " + ", ".join(f"{x:.4f}" for x in scaled)
        + f"; positive={positive} decreasing={decreasing} bounded={bounded} "
        f"gap*a^2 decreasing={scaled_decreasing}; {elapsed:.1f}s",
    )
    assert positive and decreasing and bounded and elapsed < 300
    assert scaled_decreasing, f"gap*a^2 is not decreasing: {scaled}"


def test_refinement_study(criterion):
    study = refine_study(ReducedProblem(WaveguideGeometry(1.0, 1.0), 0), levels=3)
    lo, hi = PI2 / 4, PI2 / 4 + X01**2
    ok = study.order >= 1.0 and lo < study.extrapolated < hi
    criterion(
        "refinement study",
        ok,
        f"order {study.order:.3f}, extrapolated {study.extrapolated:.6f} in ({lo:.4f}, {hi:.4f})",
    )
    assert ok
