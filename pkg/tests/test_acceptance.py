"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]`` / ``[FAIL]`` line (also visible
under pytest's output capture) and then asserts the same condition.
Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""
import contextlib
import math
import sys
import time

import numpy as np
import pytest
from scipy.special import roots_legendre

from nodalgrowth.disklab import (
    R_MINUS,
    R_PLUS,
    RHO_PLUS,
    RHO_TILDE_MINUS,
    _sup_on_disk,
    harmonic,
    kernel_constants,
    lemma3_check,
    lemma_family,
    plane_wave,
    poisson_kernel,
    reconstruct,
    rescaled_eigenfunction,
    theorem3_check,
)
from nodalgrowth.eigenbasis import (
    eigenspace_basis,
    level_for_eigenvalue,
    random_eigenfunction,
    single_mode,
)
from nodalgrowth.experiments import (
    cos_mode_average_growth,
    default_sweeps,
    oracle_sweep,
    run_sandwich_sweep,
    run_sandwich_sweeps,
)
from nodalgrowth.geometry import FLAT_TORUS, UNIT_SPHERE, sample_centers
from nodalgrowth.growth import growth_batch, interval_growth_exponent
from nodalgrowth.nodal import circle_zero_count, extract_nodal_set, nodal_convergence
from nodalgrowth.report import rows_to_csv


def report(number, title, ok, detail, capsys):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# ------------------------------------------------------------------------ 1

def test_criterion_1_polynomial_growth(capsys):
    worst = 0.0
    with _Timer() as t:
        for n in range(7):
            for q in (1.5, 2.0, 4.0):
                for alpha in (0.3, 0.5):
                    beta = interval_growth_exponent(lambda x: x**n, alpha, q)
                    worst = max(worst, abs(beta - math.log(1 / alpha) * (n + 1 / q)))
    ok = worst < 1e-6 and t.elapsed < 1.0
    report(1, "1D growth of x^n equals log(1/alpha)(n + 1/q)", ok,
           f"max error {worst:.2e} over 42 cases in {t.elapsed:.2f}s", capsys)


# ------------------------------------------------------------------------ 2

def test_criterion_2_exact_nodal_lengths(capsys):
    worst_t = worst_s = 0.0
    with _Timer() as t:
        for m in range(2, 31):
            space = eigenspace_basis(FLAT_TORUS, level_for_eigenvalue(FLAT_TORUS, m * m))
            length = extract_nodal_set(single_mode(space, m, 0, "cos"), 16).total_length
            worst_t = max(worst_t, abs(length / (4 * math.pi * m) - 1))
        for ell in range(2, 21):
            f = single_mode(eigenspace_basis(UNIT_SPHERE, ell), ell, 0, "cos")
            x, _ = roots_legendre(ell)
            exact = 2 * math.pi * float(np.sum(np.sqrt(1 - x**2)))
            worst_s = max(worst_s, abs(extract_nodal_set(f, 16).total_length / exact - 1))
    ok = worst_t < 5e-3 and worst_s < 5e-3 and t.elapsed < 60
    report(2, "exact nodal lengths (torus cos(mx), sphere zonal)", ok,
           f"max rel error torus {worst_t:.2e}, sphere {worst_s:.2e} in {t.elapsed:.1f}s", capsys)


# ------------------------------------------------------------------------ 3

def test_criterion_3_reconstruction(capsys):
    r_tilde = 0.5 * (R_MINUS + R_PLUS)
    rhos = (r_tilde, 0.5 * (r_tilde + R_PLUS), R_PLUS)
    zs = (0.0, 0.9 + 0.4j, -1.7 + 1.1j, 2.5 * np.exp(2.2j))
    f_torus = [random_eigenfunction(eigenspace_basis(FLAT_TORUS, lv), lv) for lv in (3, 10, 40)]
    groups = {
        "harmonic": ([harmonic(n, np.exp(0.3j * n)) for n in range(0, 9)], 1e-8),
        "plane": ([plane_wave(0.3 * math.cos(a), 0.3 * math.sin(a), a) for a in (0.0, 1.1, 2.5)]
                  + [plane_wave(1e-4, 0.0), plane_wave(0.8, 0.6, 0.2)], 1e-6),
        "rescaled": ([rescaled_eigenfunction(f, (0.4, 1.9), k0) for f in f_torus for k0 in (1e-3, 0.5)],
                     1e-6),
    }
    worst = {}
    with _Timer() as t:
        for name, (probs, _) in groups.items():
            w = 0.0
            for prob in probs:
                for rho in rhos:
                    scale = _sup_on_disk(prob, rho)
                    for z in zs:
                        err = abs(reconstruct(prob, z, rho) - float(prob(z)))
                        w = max(w, err / scale)
            worst[name] = w
    ok = all(worst[k] < groups[k][1] for k in groups) and t.elapsed < 30
    detail = ", ".join(f"{k} {v:.1e} (tol {groups[k][1]:.0e})" for k, v in worst.items())
    report(3, "Green/Poisson reconstruction residual / sup|F|", ok, f"{detail} in {t.elapsed:.1f}s",
           capsys)


# ------------------------------------------------------------------------ 4

def test_criterion_4_lemma3(capsys):
    parts, ok = [], True
    with _Timer() as t:
        for q in (1.5, 2.0, 4.0):
            fam = lemma_family(q)
            eps = kernel_constants(q).epsilon0_admissible
            assert all(p.potential_bound <= eps / 2 * (1 + 1e-12) for p in fam)
            checks = [lemma3_check(p, q) for p in fam]
            worst = max(c.ratio for c in checks)
            c4 = checks[0].bound
            ok &= len(checks) >= 50 and worst <= c4
            parts.append(f"q={q:g}: {len(checks)} problems, max ratio {worst:.3g} <= c4 {c4:.4g}")
    ok &= t.elapsed < 60
    report(4, "sup on r- disk <= c4 * L^q norm on r+ disk", ok,
           "; ".join(parts) + f" in {t.elapsed:.1f}s", capsys)


# ------------------------------------------------------------------------ 5

def test_criterion_5_theorem3(capsys):
    L = math.log(RHO_PLUS / RHO_TILDE_MINUS)
    ok, c5, worst = True, 0.0, 0.0
    for q in (1.5, 2.0, 4.0):
        ratios = []
        for n in range(0, 13):
            chk = theorem3_check(harmonic(n), q)
            worst = max(worst, abs(chk.lhs - (n + 2 / q) * L))
            ok &= circle_zero_count(harmonic(n), 1.0) == 2 * n
            ratios.append(chk.lhs / (1 + 2 * n))
        ok &= all(b <= a + 1e-9 for a, b in zip(ratios, ratios[1:]))
        c5 = max(c5, max(ratios))
    ok &= worst < 1e-6
    report(5, "growth vs circle zeros for Re z^n, n <= 12", ok,
           f"max |lhs - (n+2/q)log(rho+/rho~-)| {worst:.1e}, zero counts 2n, "
           f"lhs/(1+2n) nonincreasing, empirical c5 = {c5:.6g}", capsys)


# ------------------------------------------------------------------------ 6

@pytest.fixture(scope="module")
def default_sweep_csv():
    t0 = time.perf_counter()
    result = run_sandwich_sweeps(default_sweeps(), jobs=1)
    return result, rows_to_csv(result.rows), time.perf_counter() - t0


def test_criterion_6_sandwich(default_sweep_csv, capsys):
    result, _, elapsed = default_sweep_csv
    s = result.summary["sweep"]
    finite = all(math.isfinite(r.lower_ratio) and math.isfinite(r.upper_ratio) for r in result.rows)
    ok = finite and s["lower_spread"] < 10 and s["upper_spread"] < 10
    ok &= not any("ratio_outlier" in r.flags for r in result.rows)

    oracle = run_sandwich_sweep(oracle_sweep(), jobs=1)
    exact = cos_mode_average_growth(2.0, 0.5, 0.5)
    worst_z, worst_h = 0.0, 0.0
    for r in oracle.rows:
        worst_h = max(worst_h, abs(r.h1 / (4 * math.pi * r.level) - 1))
        worst_z = max(worst_z, abs(r.lower_ratio - 4 * math.pi / exact) / r.lower_ratio_err)
    ok &= worst_h < 5e-3 and worst_z < 3.0 and elapsed < 1800
    report(6, "sandwich ratios over the default sweep", ok,
           f"{len(result.rows)} rows; c1 = {s['c1_empirical']:.4g} (spread {s['lower_spread']:.2f}), "
           f"c2 = {s['c2_empirical']:.4g} (spread {s['upper_spread']:.2f}); "
           f"cos(mx) rows: |H1/4pi m - 1| <= {worst_h:.1e}, lower_ratio within {worst_z:.2f} sigma "
           f"of 4pi/A_exact; sweep {elapsed:.0f}s", capsys)


# ------------------------------------------------------------------------ 7

def test_criterion_7_properties(capsys):
    rng = np.random.default_rng(77)
    subjects = [random_eigenfunction(eigenspace_basis(FLAT_TORUS, lv), lv) for lv in (1, 13, 79, 270)]
    subjects += [random_eigenfunction(eigenspace_basis(UNIT_SPHERE, lv), lv) for lv in (2, 10, 30)]

    # nonnegativity over 10^4 records
    n_records = n_negative = 0
    for i, f in enumerate(subjects):
        centers = sample_centers(f.surface, 500, i)
        for recs in growth_batch(f, centers, 0.5, 0.5, [1.5, 2.0, 4.0]).values():
            n_records += len(recs)
            n_negative += sum(r.beta < 0 for r in recs)
    ok_nonneg = n_records >= 10**4 and n_negative == 0

    # monotonicity in alpha over 10^3 triples
    violations = 0
    for k in range(1000):
        f = subjects[k % len(subjects)]
        a1, a2 = sorted(rng.uniform(0.05, 0.95, 2))
        q = float(rng.choice([1.5, 2.0, 4.0]))
        c = sample_centers(f.surface, 1, 10_000 + k)
        b1 = growth_batch(f, c, a1, 0.5, [q])[q][0].beta
        b2 = growth_batch(f, c, a2, 0.5, [q])[q][0].beta
        violations += b2 > b1 + 1e-10
    ok_mono = violations == 0

    # scale invariance
    worst_scale = 0.0
    for f in subjects:
        c = sample_centers(f.surface, 50, 5)
        base = growth_batch(f, c, 0.5, 0.5, [2.0, 4.0])
        for s in (1e-6, 3.0, 1e6):
            other = growth_batch(f.scaled(s), c, 0.5, 0.5, [2.0, 4.0])
            for q in base:
                worst_scale = max(worst_scale, max(abs(a.beta - b.beta) for a, b in zip(base[q], other[q])))
    ok_scale = worst_scale <= 1e-12

    # Richardson deltas shrink under refinement
    pairs = shrinking = 0
    for i, f in enumerate(subjects[1:] + [random_eigenfunction(eigenspace_basis(FLAT_TORUS, 40), 9)]):
        conv = nodal_convergence(f, (8, 16, 32, 64))
        for d0, d1 in zip(conv["deltas"], conv["deltas"][1:]):
            pairs += 1
            shrinking += d1 < d0
    ok_rich = shrinking >= 0.95 * pairs

    # Poisson kernel mass
    n = 4096
    worst_mass = 0.0
    for rho in (0.5, 1.0, 3.0):
        zeta = rho * np.exp(2j * math.pi * np.arange(n) / n)
        for z in rho * 0.9 * np.exp(1j * rng.uniform(0, 2 * math.pi, 10)) * np.sqrt(rng.uniform(0, 1, 10)):
            worst_mass = max(worst_mass, abs(np.mean(poisson_kernel(z, zeta, rho)) - 1))
    ok_mass = worst_mass < 1e-10

    ok = ok_nonneg and ok_mono and ok_scale and ok_rich and ok_mass
    report(7, "property suites", ok,
           f"beta>=0: {n_negative} violations / {n_records}; alpha-monotone: {violations} / 1000; "
           f"scale invariance {worst_scale:.1e}; Richardson deltas shrink {shrinking}/{pairs}; "
           f"Poisson mass error {worst_mass:.1e}", capsys)


# ------------------------------------------------------------------------ 8

def test_criterion_8_determinism(default_sweep_csv, capsys):
    _, first, _ = default_sweep_csv
    with _Timer() as t:
        second = rows_to_csv(run_sandwich_sweeps(default_sweeps(), jobs=2).rows)
    ok = first.encode() == second.encode()
    report(8, "byte-identical CSV for the default sweep", ok,
           f"{len(first)} bytes, second run (2 workers) {t.elapsed:.0f}s", capsys)


class _NoCapture:
    """Stand-in for pytest's ``capsys`` when run as a script."""

    def disabled(self):
        return contextlib.nullcontext()


if __name__ == "__main__":
    failed = 0
    cap = _NoCapture()
    t0 = time.perf_counter()
    res = run_sandwich_sweeps(default_sweeps(), jobs=1)
    sweep = (res, rows_to_csv(res.rows), time.perf_counter() - t0)
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn(sweep, cap) if fn.__code__.co_argcount == 2 else fn(cap)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
