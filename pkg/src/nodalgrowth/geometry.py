"""Model surfaces, geodesic disk quadrature and area-uniform sampling.

Two closed surfaces are supported, both with closed-form geodesics:

* the flat torus ``[0, 2pi)^2`` with chart coordinates ``(x, y)``;
* the unit sphere with colatitude/longitude ``(theta, phi)``.

Points are passed around as ``ndarray`` of shape ``(..., 2)`` holding chart
coordinates; :class:`SurfacePoint` is a convenience wrapper for a single
point that remembers which surface it lives on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigError, InvalidCount, RadiusTooLarge

TWO_PI = 2.0 * np.pi

TORUS = "torus"
SPHERE = "sphere"


@dataclass(frozen=True)
class SurfaceModel:
    kind: str
    volume: float
    injectivity_radius: float

    def __post_init__(self):
        if self.kind not in (TORUS, SPHERE):
            raise ConfigError(f"unknown surface kind {self.kind!r}")
        if self.volume <= 0 or self.injectivity_radius <= 0:
            raise ConfigError("volume and injectivity radius must be positive")

    def disk_area(self, radius):
        """Riemannian area of a geodesic disk of the given radius."""
        if self.kind == TORUS:
            return np.pi * radius**2
        return TWO_PI * (1.0 - np.cos(radius))

    def wrap(self, coords):
        """Canonical chart coordinates for an array of points."""
        coords = np.asarray(coords, dtype=float)
        if self.kind == TORUS:
            return np.mod(coords, TWO_PI)
        # Fold theta into [0, pi] (crossing a pole shifts phi by pi).
        theta = np.mod(coords[..., 0], TWO_PI)
        phi = coords[..., 1]
        over = theta > np.pi
        theta = np.where(over, TWO_PI - theta, theta)
        phi = np.where(over, phi + np.pi, phi)
        return np.stack([theta, np.mod(phi, TWO_PI)], axis=-1)


FLAT_TORUS = SurfaceModel(TORUS, volume=4.0 * np.pi**2, injectivity_radius=np.pi)
UNIT_SPHERE = SurfaceModel(SPHERE, volume=4.0 * np.pi, injectivity_radius=np.pi)


def surface_by_name(name: str) -> SurfaceModel:
    try:
        return {TORUS: FLAT_TORUS, SPHERE: UNIT_SPHERE}[name]
    except KeyError:
        raise ConfigError(f"unknown surface {name!r}; expected 'torus' or 'sphere'") from None


@dataclass(frozen=True)
class SurfacePoint:
    """A single point in chart coordinates, wrapped on construction."""

    surface: SurfaceModel
    c1: float
    c2: float

    def __post_init__(self):
        c1, c2 = self.surface.wrap(np.array([self.c1, self.c2]))
        object.__setattr__(self, "c1", float(c1))
        object.__setattr__(self, "c2", float(c2))

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.c1, self.c2])


def as_coords(points, surface: SurfaceModel | None = None) -> np.ndarray:
    """Coerce a SurfacePoint, a sequence of them, or an array to ``(..., 2)``."""
    if isinstance(points, SurfacePoint):
        return points.coords
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], SurfacePoint):
        return np.array([p.coords for p in points])
    arr = np.asarray(points, dtype=float)
    if arr.shape[-1] != 2:
        raise ConfigError(f"points must have trailing dimension 2, got shape {arr.shape}")
    return arr


# ---------------------------------------------------------------- embedding

def sphere_to_xyz(coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    theta, phi = coords[..., 0], coords[..., 1]
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def xyz_to_sphere(xyz) -> np.ndarray:
    xyz = np.asarray(xyz, dtype=float)
    norm = np.linalg.norm(xyz, axis=-1)
    z = np.clip(xyz[..., 2] / norm, -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), TWO_PI)
    return np.stack([theta, phi], axis=-1)


def _sphere_frame(coords):
    """Unit normal and an orthonormal tangent frame, defined at the poles too."""
    theta, phi = coords[..., 0], coords[..., 1]
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    c = np.stack([st * cp, st * sp, ct], axis=-1)
    e1 = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e2 = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    return c, e1, e2


def exp_map(surface: SurfaceModel, center, s, psi) -> np.ndarray:
    """Points at geodesic distance ``s`` from ``center`` in direction ``psi``.

    ``center`` has shape ``(..., 2)``; ``s`` and ``psi`` broadcast against a
    trailing node axis, giving an output of shape ``(..., n_nodes, 2)``.
    """
    center = np.asarray(center, dtype=float)
    s = np.asarray(s, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if surface.kind == TORUS:
        pts = np.stack(
            [
                center[..., None, 0] + s * np.cos(psi),
                center[..., None, 1] + s * np.sin(psi),
            ],
            axis=-1,
        )
        return np.mod(pts, TWO_PI)
    c, e1, e2 = _sphere_frame(center)
    cs, ss = np.cos(s)[..., None], np.sin(s)[..., None]
    cpsi, spsi = np.cos(psi)[..., None], np.sin(psi)[..., None]
    xyz = cs * c[..., None, :] + ss * (cpsi * e1[..., None, :] + spsi * e2[..., None, :])
    return xyz_to_sphere(xyz)


def geodesic_distance(surface: SurfaceModel, a, b) -> np.ndarray | float:
    """Geodesic distance between (broadcastable arrays of) points."""
    a = as_coords(a)
    b = as_coords(b)
    if surface.kind == TORUS:
        d = np.mod(a - b + np.pi, TWO_PI) - np.pi
        out = np.hypot(d[..., 0], d[..., 1])
    else:
        dot = np.sum(sphere_to_xyz(a) * sphere_to_xyz(b), axis=-1)
        out = np.arccos(np.clip(dot, -1.0, 1.0))
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------- quadrature

@lru_cache(maxsize=64)
def _polar_rule(n_radial: int, n_angular: int):
    """Gauss-Legendre nodes on [0, 1] and equispaced angles (cached)."""
    x, w = np.polynomial.legendre.leggauss(n_radial)
    return 0.5 * (x + 1.0), 0.5 * w, TWO_PI * np.arange(n_angular) / n_angular


@dataclass(frozen=True)
class DiskQuadrature:
    """Product rule on a geodesic disk, in geodesic polar coordinates.

    ``points`` has shape ``(n_radial * n_angular, 2)``; ``weights`` already
    include the metric Jacobian and the angular step.
    """

    surface: SurfaceModel
    center: np.ndarray
    radius: float
    n_radial: int
    n_angular: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _check_disk(surface, radius, n_radial, n_angular):
    if n_radial < 1 or n_angular < 1:
        raise InvalidCount(f"node counts must be >= 1, got ({n_radial}, {n_angular})")
    if not 0 < radius < surface.injectivity_radius:
        raise RadiusTooLarge(
            f"radius {radius} outside (0, {surface.injectivity_radius}) on {surface.kind}"
        )


def disk_nodes(surface: SurfaceModel, radius: float, n_radial: int, n_angular: int):
    """Center-independent part of the rule: ``(s, psi, weights)`` flattened."""
    _check_disk(surface, radius, n_radial, n_angular)
    u, wu, ang = _polar_rule(n_radial, n_angular)
    s = radius * u
    jac = s if surface.kind == TORUS else np.sin(s)
    w_rad = radius * wu * jac * (TWO_PI / n_angular)
    s_grid = np.repeat(s, n_angular)
    psi_grid = np.tile(ang, n_radial)
    return s_grid, psi_grid, np.repeat(w_rad, n_angular)


def disk_quadrature(
    surface: SurfaceModel,
    center,
    radius: float,
    n_radial: int = 24,
    n_angular: int = 64,
) -> DiskQuadrature:
    """Gauss-Legendre (radial) times trapezoid (angular) rule on a geodesic disk."""
    s, psi, w = disk_nodes(surface, radius, n_radial, n_angular)
    center = surface.wrap(as_coords(center))
    pts = exp_map(surface, center, s, psi)
    return DiskQuadrature(surface, center, float(radius), n_radial, n_angular, pts, w, s, psi)


def resolution_for(radius: float, lam: float, n_radial: int = 24, n_angular: int = 64):
    """Default node counts, doubled while the disk holds too many oscillations.

    An integrand of eigenvalue ``lam`` has about ``radius * sqrt(lam) / pi``
    oscillations per radius; at least 8 radial nodes per oscillation are kept.
    """
    oscillations = radius * np.sqrt(max(lam, 0.0)) / np.pi
    while n_radial < 8 * oscillations:
        n_radial *= 2
        n_angular *= 2
    return n_radial, n_angular


# ----------------------------------------------------------------- sampling

def sample_centers(surface: SurfaceModel, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. points uniform for the Riemannian area, shape ``(n, 2)``."""
    if n < 1:
        raise InvalidCount(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if surface.kind == TORUS:
        return rng.uniform(0.0, TWO_PI, size=(n, 2))
    cos_theta = rng.uniform(-1.0, 1.0, size=n)
    phi = rng.uniform(0.0, TWO_PI, size=n)
    return np.stack([np.arccos(cos_theta), phi], axis=-1)
