import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

import nodalgrowth.growth as growth
from nodalgrowth.eigenbasis import (
    eigenspace_basis,
    level_for_eigenvalue,
    random_eigenfunction,
    single_mode,
)
from nodalgrowth.errors import ConfigError, TooManyDegenerate
from nodalgrowth.experiments import cos_mode_average_growth
from nodalgrowth.geometry import FLAT_TORUS, UNIT_SPHERE, disk_quadrature, sample_centers
from nodalgrowth.growth import (
    GrowthConfig,
    average_growth,
    growth_batch,
    growth_exponent,
    interval_growth_exponent,
    lq_norm_disk,
    write_growth_csv,
)

TORUS_LEVELS = (1, 10, 40, 120)
SPHERE_LEVELS = (1, 5, 12)


def cos_mode(m):
    space = eigenspace_basis(FLAT_TORUS, level_for_eigenvalue(FLAT_TORUS, m * m))
    return single_mode(space, m, 0, "cos")


def raw_cos_x(pts):
    return np.cos(np.asarray(pts)[..., 0])


def test_config_validation():
    for bad in ({"q": 0.5}, {"alpha": 1.0}, {"alpha": 0.0}, {"k0": 0.0}):
        with pytest.raises(ConfigError):
            GrowthConfig(**bad)
    assert GrowthConfig(k0=0.5).radius(100) == pytest.approx(0.05)


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 4.0])
def test_constant_norm(q):
    disk = disk_quadrature(FLAT_TORUS, (1.0, 2.0), 0.3)
    val = lq_norm_disk(lambda p: np.full(p.shape[:-1], 2.5), disk, q)
    assert val == pytest.approx(2.5 * (math.pi * 0.09) ** (1 / q), rel=1e-12)


def test_cos_x_l2_against_adaptive_oracle():
    disk = disk_quadrature(FLAT_TORUS, (0.0, 0.0), 0.5)
    got = lq_norm_disk(raw_cos_x, disk, 2.0)
    oracle = integrate.dblquad(
        lambda y, x: math.cos(x) ** 2, -0.5, 0.5,
        lambda x: -math.sqrt(0.25 - x * x), lambda x: math.sqrt(0.25 - x * x),
        epsabs=1e-14, epsrel=1e-13,
    )[0] ** 0.5
    assert got == pytest.approx(oracle, abs=1e-8)


def test_sup_norm_at_center():
    disk = disk_quadrature(FLAT_TORUS, (0.0, 0.0), 0.5)
    assert lq_norm_disk(raw_cos_x, disk, math.inf) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ConfigError):
        lq_norm_disk(raw_cos_x, disk, 0.5)


def test_interval_shim_example():
    beta = interval_growth_exponent(lambda x: x**3, 0.5, 2.0)
    assert beta == pytest.approx(3.5 * math.log(2), abs=1e-10)
    assert beta == pytest.approx(2.42602, abs=1e-5)


def test_constant_like_case():
    f = cos_mode(1)
    rec = growth_exponent(f, (0.0, 0.0), GrowthConfig(2.0, 0.5, 0.05))
    assert rec.beta == pytest.approx(math.log(2), rel=0.02)
    assert not rec.flagged


def test_radius_guard():
    with pytest.raises(ConfigError):
        growth_exponent(cos_mode(1), (0.0, 0.0), GrowthConfig(k0=4.0))


@pytest.mark.parametrize("c", [1e-6, 3.0, 1e6, -2.0])
def test_scale_invariance(c):
    f = random_eigenfunction(eigenspace_basis(UNIT_SPHERE, 8), 3)
    centers = sample_centers(UNIT_SPHERE, 20, 1)
    a = growth_batch(f, centers, 0.5, 0.5, [2.0, 4.0, math.inf])
    b = growth_batch(f.scaled(c), centers, 0.5, 0.5, [2.0, 4.0, math.inf])
    for q in a:
        np.testing.assert_allclose([r.beta for r in a[q]], [r.beta for r in b[q]], rtol=0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    kind=st.sampled_from(["torus", "sphere"]), idx=st.integers(0, 2),
    seed=st.integers(0, 2**31), q=st.sampled_from([1.5, 2.0, 4.0, math.inf]),
    a1=st.floats(0.05, 0.95), a2=st.floats(0.05, 0.95),
)
def test_nonnegative_and_monotone_in_alpha(kind, idx, seed, q, a1, a2):
    surf = FLAT_TORUS if kind == "torus" else UNIT_SPHERE
    level = (TORUS_LEVELS if kind == "torus" else SPHERE_LEVELS)[idx]
    f = random_eigenfunction(eigenspace_basis(surf, level), seed)
    centers = sample_centers(surf, 8, seed)
    lo, hi = sorted((a1, a2))
    b_lo = [r.beta for r in growth_batch(f, centers, lo, 0.5, [q])[q]]
    b_hi = [r.beta for r in growth_batch(f, centers, hi, 0.5, [q])[q]]
    assert min(b_lo + b_hi) >= 0.0
    if math.isfinite(q):
        assert all(h <= l + 1e-10 for h, l in zip(b_hi, b_lo))


def test_beta_tends_to_sup_exponent():
    # beta^q falls toward beta^inf as q grows (the area term (2/q) log(1/alpha) vanishes)
    f = random_eigenfunction(eigenspace_basis(FLAT_TORUS, 40), 1)
    qs = [2.0, 4.0, 8.0, 16.0, math.inf]
    batch = growth_batch(f, sample_centers(FLAT_TORUS, 50, 2), 0.5, 0.5, qs)
    b = np.array([[r.beta for r in batch[q]] for q in qs])
    gap = np.abs(b[:-1] - b[-1])
    assert np.all(gap[-1] < gap[0])
    assert np.mean(np.diff(b[:-1], axis=0) < 1e-3) > 0.95


def test_average_cos_oracle():
    f = cos_mode(6)
    avg = average_growth(f, GrowthConfig(), 4096, 17)
    exact = cos_mode_average_growth(2.0, 0.5, 0.5)
    assert abs(avg.value - exact) < 3 * avg.std_error


def test_std_error_rate():
    f = random_eigenfunction(eigenspace_basis(FLAT_TORUS, 30), 0)
    cfg = GrowthConfig()
    ratios = [average_growth(f, cfg, 128, s).std_error / average_growth(f, cfg, 64, s + 1000).std_error
              for s in range(20)]
    assert np.mean(ratios) == pytest.approx(1 / math.sqrt(2), rel=0.3)


def test_average_determinism_and_records():
    f = random_eigenfunction(eigenspace_basis(UNIT_SPHERE, 6), 0)
    a = average_growth(f, GrowthConfig(q=4.0), 32, 5, keep_records=True)
    b = average_growth(f, GrowthConfig(q=4.0), 32, 5)
    assert a.value == b.value and a.std_error == b.std_error
    betas = np.array([r.beta for r in a.records])
    assert a.value == pytest.approx(betas.mean())
    assert a.std_error == pytest.approx(betas.std(ddof=1) / math.sqrt(32))
    with pytest.raises(ConfigError):
        average_growth(f, GrowthConfig(), 8, 5)


def test_degenerate_records_flagged(monkeypatch):
    monkeypatch.setattr(growth, "DEGENERATE_RATIO", 2.0)
    f = random_eigenfunction(eigenspace_basis(FLAT_TORUS, 5), 0)
    rec = growth_exponent(f, (0.3, 0.4), GrowthConfig())
    assert rec.flagged and rec.beta == growth.BETA_CAP
    with pytest.raises(TooManyDegenerate):
        average_growth(f, GrowthConfig(), 32, 1)


def test_growth_csv(tmp_path):
    f = random_eigenfunction(eigenspace_basis(FLAT_TORUS, 5), 0)
    recs = growth_batch(f, sample_centers(FLAT_TORUS, 3, 0), 0.5, 0.5, [2.0])[2.0]
    path = tmp_path / "g.csv"
    write_growth_csv([(f.eigenvalue, 2.0, 0.5, 0.5, r) for r in recs], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,q,alpha,k0,coord1,coord2,beta,flagged"
    assert len(lines) == 4
