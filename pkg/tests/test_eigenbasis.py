import math

import numpy as np
import pytest
from scipy import special

from nodalgrowth.eigenbasis import (
    Eigenspace,
    eigenspace_basis,
    evaluate,
    laplacian_residual,
    level_eigenvalue,
    level_for_eigenvalue,
    normalized_legendre,
    random_eigenfunction,
    single_mode,
    torus_eigenvalues,
)
from nodalgrowth.errors import LevelOutOfRange, PoleProximity, StepTooLarge, SurfaceMismatch
from nodalgrowth.geometry import FLAT_TORUS, UNIT_SPHERE, SurfacePoint


def torus_space(lam):
    return eigenspace_basis(FLAT_TORUS, level_for_eigenvalue(FLAT_TORUS, lam))


def torus_gram(space, n=256):
    x = 2 * math.pi * np.arange(n) / n
    vals = []
    for mode in space.basis:
        vals.append(single_mode(space, *mode[:3]).grid(x, x).ravel())
    v = np.array(vals)
    return v @ v.T * (2 * math.pi / n) ** 2


def sphere_gram(space):
    x, wx = np.polynomial.legendre.leggauss(space.level + 2)
    nphi = 2 * space.level + 4
    phi = 2 * math.pi * np.arange(nphi) / nphi
    vals = np.array([single_mode(space, *m[:3]).grid(np.arccos(x), phi).ravel() for m in space.basis])
    w = np.repeat(wx, nphi) * (2 * math.pi / nphi)
    return (vals * w) @ vals.T


def test_torus_levels_match_brute_force():
    brute = sorted({m * m + n * n for m in range(72) for n in range(72)} - {0})
    assert list(torus_eigenvalues()) == [v for v in brute if v <= 5000]


def test_torus_dimension_25():
    space = torus_space(25)
    assert space.eigenvalue == 25 and space.dimension == 12
    lattice = [(m, n) for m in range(-5, 6) for n in range(-5, 6) if m * m + n * n == 25]
    assert space.dimension == len(lattice)
    pairs = {(abs(b.a), abs(b.b)) for b in space.basis}
    assert pairs == {(5, 0), (0, 5), (3, 4), (4, 3)}


def test_torus_level_one():
    space = eigenspace_basis(FLAT_TORUS, 1)
    assert space.eigenvalue == 1 and space.dimension == 4
    assert {(b.a, b.b, b.parity) for b in space.basis} == {
        (1, 0, "cos"), (1, 0, "sin"), (0, 1, "cos"), (0, 1, "sin")}


def test_sphere_dimension():
    space = eigenspace_basis(UNIT_SPHERE, 3)
    assert space.eigenvalue == 12 and space.dimension == 7


def test_level_bounds():
    with pytest.raises(LevelOutOfRange):
        level_eigenvalue(FLAT_TORUS, 0)
    with pytest.raises(LevelOutOfRange):
        level_eigenvalue(FLAT_TORUS, 10**6)
    with pytest.raises(LevelOutOfRange):
        level_eigenvalue(UNIT_SPHERE, 201)


@pytest.mark.parametrize("lam", [1, 5, 25, 65, 325])
def test_torus_orthonormal(lam):
    g = torus_gram(torus_space(lam))
    assert np.max(np.abs(g - np.eye(len(g)))) < 1e-6


@pytest.mark.parametrize("ell", [1, 2, 7, 30])
def test_sphere_orthonormal(ell):
    g = sphere_gram(eigenspace_basis(UNIT_SPHERE, ell))
    assert np.max(np.abs(g - np.eye(len(g)))) < 1e-6


def test_legendre_against_scipy():
    x = np.linspace(-0.99, 0.99, 17)
    ell = 9
    ours = normalized_legendre(ell, x)
    for m in range(ell + 1):
        ref = special.lpmv(m, ell, x) * (-1) ** m  # remove the Condon-Shortley phase
        ref *= math.sqrt((2 * ell + 1) / (4 * math.pi) * math.factorial(ell - m) / math.factorial(ell + m))
        np.testing.assert_allclose(ours[m], ref, rtol=1e-10, atol=1e-13)


def test_legendre_high_degree_finite():
    p = normalized_legendre(200, np.linspace(-1, 1, 101))
    assert np.all(np.isfinite(p))
    x, w = np.polynomial.legendre.leggauss(220)
    p = normalized_legendre(200, x)
    norms = 2 * math.pi * (p**2) @ w
    np.testing.assert_allclose(norms, 1.0, rtol=1e-9)


def test_random_eigenfunction_norm_and_determinism():
    space = torus_space(65)
    f = random_eigenfunction(space, 7)
    assert abs(np.linalg.norm(f.coefficients) - 1) < 1e-14
    np.testing.assert_array_equal(f.coefficients, random_eigenfunction(space, 7).coefficients)
    one = Eigenspace(FLAT_TORUS, 1, 1.0, space.basis[:1])
    assert abs(random_eigenfunction(one, 3).coefficients[0]) == 1.0


@pytest.mark.parametrize("which", ["torus", "sphere"])
def test_random_l2_norm_by_quadrature(which):
    if which == "torus":
        space = torus_space(50)
        f = random_eigenfunction(space, 1)
        n = 128
        x = 2 * math.pi * np.arange(n) / n
        norm2 = np.sum(f.grid(x, x) ** 2) * (2 * math.pi / n) ** 2
    else:
        space = eigenspace_basis(UNIT_SPHERE, 12)
        f = random_eigenfunction(space, 1)
        x, w = np.polynomial.legendre.leggauss(20)
        phi = 2 * math.pi * np.arange(40) / 40
        norm2 = np.sum(f.grid(np.arccos(x), phi) ** 2 * w[:, None]) * 2 * math.pi / 40
    assert abs(norm2 - 1) < 1e-6


def test_evaluate_examples():
    f = single_mode(eigenspace_basis(FLAT_TORUS, 1), 1, 0, "cos")
    assert evaluate(f, SurfacePoint(FLAT_TORUS, 0.0, 2.2)) == pytest.approx(1 / math.sqrt(2 * math.pi**2), abs=1e-15)
    assert evaluate(f, (0.0, 1.0)) == pytest.approx(0.225079, abs=1e-6)
    y20 = single_mode(eigenspace_basis(UNIT_SPHERE, 2), 2, 0, "cos")
    assert evaluate(y20, (0.0, 0.0)) == pytest.approx(math.sqrt(5 / (4 * math.pi)), abs=1e-14)
    assert evaluate(y20, (0.3, 0.4)) == evaluate(y20, (0.3, 0.4))
    with pytest.raises(SurfaceMismatch):
        evaluate(y20, SurfacePoint(FLAT_TORUS, 0.0, 0.0))


def test_grid_matches_pointwise():
    for space in (torus_space(25), eigenspace_basis(UNIT_SPHERE, 6)):
        f = random_eigenfunction(space, 2)
        a, b = np.linspace(0.1, 3.0, 7), np.linspace(0.0, 6.2, 5)
        pts = np.stack(np.meshgrid(a, b, indexing="ij"), axis=-1)
        np.testing.assert_allclose(f.grid(a, b), f(pts), atol=1e-13)


def test_residual_cos3x():
    f = single_mode(torus_space(9), 3, 0, "cos")
    assert laplacian_residual(f, (0.4, 1.0), 1e-3) < 1e-3


def test_residual_second_order_random_pairs(rng):
    ratios = []
    for k in range(50):
        if k % 2:
            f = random_eigenfunction(torus_space(int(rng.integers(1, 60))), k)
            p = rng.uniform(0, 2 * math.pi, 2)
        else:
            f = random_eigenfunction(eigenspace_basis(UNIT_SPHERE, int(rng.integers(1, 10))), k)
            p = np.array([rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)])
        fmax = np.max(np.abs(f(np.stack(np.meshgrid(np.linspace(0, 3.1, 64), np.linspace(0, 6.28, 64)), -1))))
        r1 = laplacian_residual(f, p, 2e-3)
        r2 = laplacian_residual(f, p, 1e-3)
        assert r2 / (f.eigenvalue * fmax) < 1e-4
        if r1 > 1e-7 * f.eigenvalue * fmax:
            ratios.append(r1 / r2)
    ratios = np.array(ratios)
    assert len(ratios) > 30
    assert np.median(ratios) == pytest.approx(4.0, rel=0.2)


def test_residual_errors():
    f = random_eigenfunction(eigenspace_basis(UNIT_SPHERE, 2), 0)
    with pytest.raises(StepTooLarge):
        laplacian_residual(f, (1.0, 1.0), 0.02)
    with pytest.raises(PoleProximity):
        laplacian_residual(f, (1e-3, 1.0), 1e-3)
