"""L^q norms on geodesic disks and growth exponents at wavelength scale.

The growth exponent of ``f`` on a disk ``B`` with shrink factor ``alpha`` is

    beta = log(||f||_{L^q(B)} / ||f||_{L^q(alpha B)}),

evaluated on disks of radius ``r = k0 / sqrt(lam)`` around sample centers.
Averaging over area-uniform centers gives the average local growth.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .eigenbasis import Eigenfunction
from .errors import ConfigError, TooManyDegenerate
from .geometry import (
    DiskQuadrature,
    as_coords,
    disk_nodes,
    disk_quadrature,
    exp_map,
    resolution_for,
    sample_centers,
)

BETA_CAP = 50.0
DEGENERATE_RATIO = 1e-14
MAX_DEGENERATE_FRACTION = 0.01
SUP_REFINEMENT = 4


@dataclass(frozen=True)
class GrowthConfig:
    q: float = 2.0
    alpha: float = 0.5
    k0: float = 0.5

    def __post_init__(self):
        if not (self.q >= 1.0):
            raise ConfigError(f"q must be >= 1 (or inf), got {self.q}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.k0 > 0.0:
            raise ConfigError(f"k0 must be positive, got {self.k0}")

    def radius(self, lam: float) -> float:
        return self.k0 / math.sqrt(lam)


@dataclass(frozen=True)
class GrowthRecord:
    center: np.ndarray
    r_lambda: float
    beta: float
    norm_outer: float
    norm_inner: float
    flagged: bool = False
    n_radial: int = 0
    n_angular: int = 0


@dataclass(frozen=True)
class AverageGrowth:
    value: float
    std_error: float
    n_centers: int
    n_flagged: int = 0
    records: list[GrowthRecord] = field(default_factory=list, repr=False)


# ------------------------------------------------------------------- norms

def _lq(values, weights, q):
    a = np.abs(values)
    if np.isinf(q):
        return np.max(a, axis=-1)
    return np.sum(weights * a**q, axis=-1) ** (1.0 / q)


def lq_norm_disk(f: Callable, disk: DiskQuadrature, q: float) -> float:
    """``(sum w |f|^q)^(1/q)``; for ``q = inf`` the max of ``|f|`` on a denser grid."""
    if not q >= 1.0:
        raise ConfigError(f"q must be >= 1, got {q}")
    if np.isinf(q):
        dense = disk_quadrature(
            disk.surface,
            disk.center,
            disk.radius,
            SUP_REFINEMENT * disk.n_radial,
            SUP_REFINEMENT * disk.n_angular,
        )
        pts = np.concatenate([disk.center[None, :], disk.points, dense.points])
        return float(np.max(np.abs(f(pts))))
    return float(_lq(f(disk.points), disk.weights, q))


def interval_growth_exponent(f: Callable[[float], float], alpha: float, q: float,
                             half_width: float = 1.0) -> float:
    """One-dimensional analogue on ``[-a, a]`` versus ``[-alpha a, alpha a]``.

    Integrals of ``|f|^q`` are computed adaptively with a breakpoint at 0.
    """
    def mass(a):
        g = lambda x: abs(f(x)) ** q
        left, _ = integrate.quad(g, -a, 0.0, epsabs=0.0, epsrel=1e-13, limit=200)
        right, _ = integrate.quad(g, 0.0, a, epsabs=0.0, epsrel=1e-13, limit=200)
        return left + right

    return math.log(mass(half_width) / mass(alpha * half_width)) / q


# -------------------------------------------------------- growth exponents

EVAL_BLOCK = 200_000


def _eval_disks(f, surface, centers, s, psi):
    """``f`` at polar nodes ``(s, psi)`` about each center, in memory-bounded blocks."""
    step = max(1, EVAL_BLOCK // max(len(s), 1))
    out = np.empty((len(centers), len(s)))
    for i in range(0, len(centers), step):
        out[i:i + step] = f(exp_map(surface, centers[i:i + step], s, psi))
    return out


def _concentric_values(f, surface, centers, r_outer, r_inner, n_radial, n_angular):
    """Values of ``f`` at outer and inner disk nodes for every center."""
    s_o, psi_o, w_o = disk_nodes(surface, r_outer, n_radial, n_angular)
    s_i, psi_i, w_i = disk_nodes(surface, r_inner, n_radial, n_angular)
    vals = _eval_disks(f, surface, centers, np.concatenate([s_o, s_i]), np.concatenate([psi_o, psi_i]))
    n = len(s_o)
    return vals[..., :n], w_o, vals[..., n:], w_i


def _sup_values(f, surface, centers, r_outer, r_inner, n_radial, n_angular):
    k = SUP_REFINEMENT
    out = []
    for r in (r_outer, r_inner):
        s1, p1, _ = disk_nodes(surface, r, n_radial, n_angular)
        s2, p2, _ = disk_nodes(surface, r, k * n_radial, k * n_angular)
        s = np.concatenate([[0.0], s1, s2])
        psi = np.concatenate([[0.0], p1, p2])
        out.append(np.max(np.abs(_eval_disks(f, surface, centers, s, psi)), axis=-1))
    # inner disk lies inside the outer one: its nodes count toward the outer sup
    return np.maximum(out[0], out[1]), out[1]


def growth_batch(
    f: Eigenfunction,
    centers,
    alpha: float,
    k0: float,
    qs: Iterable[float],
    n_radial: int | None = None,
    n_angular: int | None = None,
) -> dict[float, list[GrowthRecord]]:
    """Growth records for many centers and several exponents in one pass.

    Eigenfunction values at the quadrature nodes are shared by all finite
    ``q``. Returns ``{q: [GrowthRecord, ...]}``.
    """
    surface = f.surface
    lam = f.eigenvalue
    r = k0 / math.sqrt(lam)
    if n_radial is None or n_angular is None:
        n_radial, n_angular = resolution_for(r, lam)
    centers = surface.wrap(np.atleast_2d(as_coords(centers)))
    qs = [float(q) for q in qs]
    finite = [q for q in qs if not np.isinf(q)]
    result = {}
    if finite:
        v_o, w_o, v_i, w_i = _concentric_values(f, surface, centers, r, alpha * r, n_radial, n_angular)
        for q in finite:
            result[q] = _records(centers, r, _lq(v_o, w_o, q), _lq(v_i, w_i, q), n_radial, n_angular)
    if any(np.isinf(q) for q in qs):
        outer, inner = _sup_values(f, surface, centers, r, alpha * r, n_radial, n_angular)
        result[math.inf] = _records(centers, r, outer, inner, n_radial, n_angular)
    return result


def _records(centers, r, outer, inner, n_radial, n_angular):
    recs = []
    for c, no, ni in zip(centers, outer.tolist(), inner.tolist()):
        flagged = not (ni >= DEGENERATE_RATIO * no) or no == 0.0
        beta = BETA_CAP if flagged else min(math.log(no / ni), BETA_CAP)
        recs.append(GrowthRecord(c.copy(), r, beta, no, ni, flagged, n_radial, n_angular))
    return recs


def growth_exponent(f: Eigenfunction, p, cfg: GrowthConfig,
                    n_radial: int | None = None, n_angular: int | None = None) -> GrowthRecord:
    """Growth exponent of ``f`` at ``p`` on the wavelength disk ``k0 / sqrt(lam)``.

    A denominator below ``1e-14`` times the numerator is not an error: the
    record is returned flagged with ``beta`` capped at 50.
    """
    r = cfg.radius(f.eigenvalue)
    if not r < f.surface.injectivity_radius:
        raise ConfigError(f"wavelength radius {r} exceeds injectivity radius")
    rec = growth_batch(f, as_coords(p)[None, :], cfg.alpha, cfg.k0, [cfg.q], n_radial, n_angular)
    return next(iter(rec.values()))[0]


def summarize(records: list[GrowthRecord]):
    """Mean and standard error over unflagged records."""
    betas = np.array([r.beta for r in records if not r.flagged])
    n_flagged = len(records) - len(betas)
    if len(betas) == 0:
        return math.nan, math.nan, n_flagged
    se = float(np.std(betas, ddof=1) / math.sqrt(len(betas))) if len(betas) > 1 else math.nan
    return float(np.mean(betas)), se, n_flagged


def average_growth(f: Eigenfunction, cfg: GrowthConfig, n_centers: int, seed: int,
                   keep_records: bool = False) -> AverageGrowth:
    """Monte Carlo estimate of the area average of the growth exponent."""
    return average_growth_multi(f, cfg.alpha, cfg.k0, [cfg.q], n_centers, seed, keep_records)[cfg.q]


def average_growth_multi(f, alpha, k0, qs, n_centers, seed, keep_records=False):
    """:func:`average_growth` for several ``q`` sharing the same centers."""
    if n_centers < 16:
        raise ConfigError(f"n_centers must be >= 16, got {n_centers}")
    centers = sample_centers(f.surface, n_centers, seed)
    out = {}
    for q, records in growth_batch(f, centers, alpha, k0, qs).items():
        mean, se, n_flagged = summarize(records)
        if n_flagged > MAX_DEGENERATE_FRACTION * n_centers:
            raise TooManyDegenerate(f"{n_flagged} of {n_centers} centers flagged (q={q})")
        out[q] = AverageGrowth(mean, se, n_centers, n_flagged, records if keep_records else [])
    return out


def write_growth_csv(rows, path) -> None:
    """GrowthRecord batches as CSV.

    ``rows`` is an iterable of ``(lam, q, alpha, k0, record)`` tuples.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "q", "alpha", "k0", "coord1", "coord2", "beta", "flagged"])
        for lam, q, alpha, k0, rec in rows:
            w.writerow([
                f"{lam:.12g}", f"{q:.12g}", f"{alpha:.12g}", f"{k0:.12g}",
                f"{rec.center[0]:.12g}", f"{rec.center[1]:.12g}", f"{rec.beta:.12g}",
                int(rec.flagged),
            ])
