"""Exact Laplace eigenfunctions on the flat torus and the unit sphere.

Torus eigenspaces are spanned by ``cos(m x + n y)`` and ``sin(m x + n y)``
over lattice points with ``m^2 + n^2 = lam``; sphere eigenspaces by the
real spherical harmonics of degree ``l`` (``lam = l (l + 1)``). Both bases
are orthonormal in ``L^2`` of the surface area.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import LevelOutOfRange, PoleProximity, StepTooLarge, SurfaceMismatch
from .geometry import TORUS, SurfaceModel, SurfacePoint, as_coords

LAMBDA_MAX = 5000
SPHERE_LEVEL_MAX = 200

_TORUS_NORM = 1.0 / (np.sqrt(2.0) * np.pi)  # 1 / sqrt(2 pi^2)


class BasisMode(NamedTuple):
    """``(a, b, parity)``: torus ``(m, n, parity)`` or sphere ``(l, m, parity)``.

    ``normalization`` multiplies the raw trigonometric mode on the torus; on
    the sphere it multiplies ``normalized_legendre(l)[m] * trig(m phi)``
    (1 for ``m = 0``, ``sqrt(2)`` otherwise).
    """

    a: int
    b: int
    parity: str
    normalization: float


@dataclass(frozen=True)
class Eigenspace:
    surface: SurfaceModel
    level: int
    eigenvalue: float
    basis: tuple[BasisMode, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


# ------------------------------------------------------------------ levels

@lru_cache(maxsize=None)
def torus_eigenvalues(lam_max: int = LAMBDA_MAX) -> tuple[int, ...]:
    """Sorted distinct nonzero values of ``m^2 + n^2`` up to ``lam_max``."""
    found = []
    for lam in range(1, lam_max + 1):
        for m in range(int(math.isqrt(lam)) + 1):
            n2 = lam - m * m
            if math.isqrt(n2) ** 2 == n2:
                found.append(lam)
                break
    return tuple(found)


def level_eigenvalue(surface: SurfaceModel, level: int) -> float:
    if level < 1:
        raise LevelOutOfRange(f"level must be >= 1, got {level}")
    if surface.kind == TORUS:
        values = torus_eigenvalues()
        if level > len(values):
            raise LevelOutOfRange(f"torus level {level} exceeds cap ({len(values)} levels)")
        return float(values[level - 1])
    if level > SPHERE_LEVEL_MAX:
        raise LevelOutOfRange(f"sphere degree {level} exceeds cap {SPHERE_LEVEL_MAX}")
    return float(level * (level + 1))


def level_for_eigenvalue(surface: SurfaceModel, lam: float) -> int:
    """Smallest level whose eigenvalue is at least ``lam``."""
    if surface.kind == TORUS:
        values = np.asarray(torus_eigenvalues())
        idx = int(np.searchsorted(values, lam))
        if idx >= len(values):
            raise LevelOutOfRange(f"no torus eigenvalue >= {lam} below {LAMBDA_MAX}")
        return idx + 1
    ell = int(np.ceil((-1.0 + np.sqrt(1.0 + 4.0 * lam)) / 2.0))
    return max(ell, 1)


def _torus_lattice(lam: int):
    """All ``(m, n)`` with ``m^2 + n^2 = lam``, sorted."""
    top = int(math.isqrt(lam))
    pts = []
    for m in range(-top, top + 1):
        n2 = lam - m * m
        n = int(math.isqrt(n2))
        if n * n == n2:
            pts.extend({(m, n), (m, -n)})
    return sorted(pts)


def eigenspace_basis(surface: SurfaceModel, level: int) -> Eigenspace:
    lam = level_eigenvalue(surface, level)
    if surface.kind == TORUS:
        modes = []
        for m, n in _torus_lattice(int(lam)):
            # one representative per +-(m, n) pair
            if m > 0 or (m == 0 and n > 0):
                modes.append(BasisMode(m, n, "cos", _TORUS_NORM))
                modes.append(BasisMode(m, n, "sin", _TORUS_NORM))
        return Eigenspace(surface, level, lam, tuple(modes))
    ell = level
    modes = [BasisMode(ell, 0, "cos", 1.0)]
    for m in range(1, ell + 1):
        modes.append(BasisMode(ell, m, "cos", np.sqrt(2.0)))
        modes.append(BasisMode(ell, m, "sin", np.sqrt(2.0)))
    return Eigenspace(surface, level, lam, tuple(modes))


# ------------------------------------------------------ associated Legendre

def normalized_legendre(ell: int, x) -> np.ndarray:
    """Orthonormal associated Legendre functions of degree ``ell``.

    Returns ``P[m]`` for ``m = 0..ell`` (shape ``(ell + 1,) + x.shape``) with
    ``2 pi * int_{-1}^{1} P[m](x)^2 dx = 1``, i.e. ``P[m](cos t) e^{i m phi}``
    is a unit-norm spherical harmonic. No Condon-Shortley phase. The
    recurrence runs on already-normalized values, so nothing overflows.
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    out = np.empty((ell + 1,) + x.shape)
    pmm = np.full(x.shape, np.sqrt(1.0 / (4.0 * np.pi)))
    for m in range(ell + 1):
        if m > 0:
            pmm = pmm * np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t
        if m == ell:
            out[m] = pmm
            continue
        p_prev = pmm
        p_cur = np.sqrt(2.0 * m + 3.0) * x * pmm
        for k in range(m + 2, ell + 1):
            a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            b = np.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
            p_prev, p_cur = p_cur, a * (x * p_cur - b * p_prev)
        out[m] = p_cur
    return out


# ------------------------------------------------------------ eigenfunctions

@dataclass(frozen=True)
class Eigenfunction:
    """Linear combination of an eigenspace basis; callable on chart points."""

    eigenspace: Eigenspace
    coefficients: np.ndarray

    @property
    def eigenvalue(self) -> float:
        return self.eigenspace.eigenvalue

    @property
    def surface(self) -> SurfaceModel:
        return self.eigenspace.surface

    def scaled(self, c: float) -> "Eigenfunction":
        return Eigenfunction(self.eigenspace, c * np.asarray(self.coefficients))

    def __call__(self, coords) -> np.ndarray:
        coords = as_coords(coords)
        return _eval_coords(self, coords[..., 0], coords[..., 1])

    def grid(self, c1, c2) -> np.ndarray:
        """Values on the tensor grid ``c1`` (rows) by ``c2`` (columns)."""
        c1 = np.asarray(c1, dtype=float)
        c2 = np.asarray(c2, dtype=float)
        space = self.eigenspace
        coef = np.asarray(self.coefficients, dtype=float)
        if space.surface.kind == TORUS:
            # treat c1 as x, c2 as y: cos(mx+ny) = cos mx cos ny - sin mx sin ny
            out = np.zeros((c1.size, c2.size))
            for c, mode in zip(coef, space.basis):
                if c == 0.0:
                    continue
                cx, sx = np.cos(mode.a * c1), np.sin(mode.a * c1)
                cy, sy = np.cos(mode.b * c2), np.sin(mode.b * c2)
                w = c * mode.normalization
                if mode.parity == "cos":
                    out += w * (np.outer(cx, cy) - np.outer(sx, sy))
                else:
                    out += w * (np.outer(sx, cy) + np.outer(cx, sy))
            return out
        radial, angular = _sphere_factors(space, coef, c1, c2)
        return radial.T @ angular


def _sphere_weights(space: Eigenspace, coef) -> np.ndarray:
    """Row 0: cos(m phi) weights, row 1: sin(m phi) weights, indexed by m."""
    w = np.zeros((2, space.level + 1))
    for c, mode in zip(coef, space.basis):
        w[0 if mode.parity == "cos" else 1, mode.b] = c * mode.normalization
    return w


def _sphere_factors(space: Eigenspace, coef, theta, phi):
    w = _sphere_weights(space, coef)
    mphi = np.outer(np.arange(space.level + 1), phi)
    angular = w[0][:, None] * np.cos(mphi) + w[1][:, None] * np.sin(mphi)
    return normalized_legendre(space.level, np.cos(theta)), angular


def _eval_coords(f: Eigenfunction, c1, c2) -> np.ndarray:
    space = f.eigenspace
    coef = np.asarray(f.coefficients, dtype=float)
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if space.surface.kind == TORUS:
        out = np.zeros(np.broadcast_shapes(c1.shape, c2.shape))
        for c, mode in zip(coef, space.basis):
            if c == 0.0:
                continue
            arg = mode.a * c1 + mode.b * c2
            trig = np.cos(arg) if mode.parity == "cos" else np.sin(arg)
            out += (c * mode.normalization) * trig
        return out
    shape = np.broadcast_shapes(c1.shape, c2.shape)
    theta = np.broadcast_to(c1, shape).ravel()
    phi = np.broadcast_to(c2, shape).ravel()
    ell = space.level
    leg = normalized_legendre(ell, np.cos(theta))
    w = _sphere_weights(space, coef)
    out = np.zeros(theta.shape)
    for m in range(ell + 1):
        if w[0, m] == 0.0 and w[1, m] == 0.0:
            continue
        ang = w[0, m] * np.cos(m * phi)
        if m > 0:
            ang = ang + w[1, m] * np.sin(m * phi)
        out += leg[m] * ang
    return out.reshape(shape)


def random_eigenfunction(eigenspace: Eigenspace, seed: int) -> Eigenfunction:
    """Gaussian coefficients normalized to unit Euclidean norm."""
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(eigenspace.dimension)
    return Eigenfunction(eigenspace, coef / np.linalg.norm(coef))


def single_mode(eigenspace: Eigenspace, a: int, b: int, parity: str = "cos") -> Eigenfunction:
    """The unit-norm basis mode with the given descriptor."""
    coef = np.zeros(eigenspace.dimension)
    for i, mode in enumerate(eigenspace.basis):
        if (mode.a, mode.b, mode.parity) == (a, b, parity):
            coef[i] = 1.0
            return Eigenfunction(eigenspace, coef)
    raise LevelOutOfRange(f"mode {(a, b, parity)} not in eigenspace of level {eigenspace.level}")


def evaluate(f: Eigenfunction, p) -> float | np.ndarray:
    if isinstance(p, SurfacePoint) and p.surface.kind != f.surface.kind:
        raise SurfaceMismatch(f"point on {p.surface.kind}, eigenfunction on {f.surface.kind}")
    out = f(p)
    return float(out) if np.ndim(out) == 0 else out


# ------------------------------------------------------- residual check

def laplacian_residual(f: Eigenfunction, p, h: float) -> float:
    """``|Delta_h f(p) + lam f(p)|`` with a second-order finite-difference Laplacian."""
    if not 0 < h < 1e-2:
        raise StepTooLarge(f"step must lie in (0, 1e-2), got {h}")
    c1, c2 = (float(v) for v in as_coords(p))
    lam = f.eigenvalue
    if f.surface.kind == TORUS:
        pts = np.array([[c1, c2], [c1 + h, c2], [c1 - h, c2], [c1, c2 + h], [c1, c2 - h]])
        v = f(pts)
        lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / h**2
        return float(abs(lap + lam * v[0]))
    theta, phi = c1, c2
    if min(theta, np.pi - theta) <= 2 * h:
        raise PoleProximity(f"theta={theta} within 2h of a pole")
    pts = np.array(
        [[theta, phi], [theta + h, phi], [theta - h, phi], [theta, phi + h], [theta, phi - h]]
    )
    v = f(pts)
    st = np.sin(theta)
    d_theta = (np.sin(theta + h / 2) * (v[1] - v[0]) - np.sin(theta - h / 2) * (v[0] - v[2])) / (
        h**2 * st
    )
    d_phi = (v[3] + v[4] - 2.0 * v[0]) / (h**2 * st**2)
    return float(abs(d_theta + d_phi + lam * v[0]))
