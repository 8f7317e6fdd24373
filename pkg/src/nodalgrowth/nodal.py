"""Nodal set extraction by marching triangles, and zero counting on circles.

The surface is sampled on a structured grid fine enough to resolve the
wavelength ``2 pi / sqrt(lam)``; each grid square is split into two
triangles along its main diagonal and the zero level of the piecewise
linear interpolant is traced triangle by triangle. Only squares whose
corners change sign are ever triangulated, so memory scales with the
length of the nodal set rather than with the grid.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .eigenbasis import Eigenfunction
from .errors import ConfigError, InvalidCount, ResolutionTooCoarse, SamplingTooCoarse
from .geometry import (
    TORUS,
    TWO_PI,
    SurfaceModel,
    sphere_to_xyz,
    xyz_to_sphere,
)

DEFAULT_SPW = 16
SINGULAR_THRESHOLD = 1e-3


@dataclass
class NodalResult:
    surface: SurfaceModel
    polylines: list[np.ndarray] = field(repr=False)
    total_length: float
    grid_resolution: float
    spacing: float
    cell_diameter: float
    n_segments: int
    max_segment_length: float
    suspected_singular_cells: np.ndarray = field(repr=False)
    convergence: dict | None = None


# ------------------------------------------------------------ mesh plumbing

class _Chart:
    """Vertex embedding, edge interpolation and segment metric for one mesh."""

    def __init__(self, kind, vertex_points: Callable[[np.ndarray], np.ndarray]):
        self.kind = kind
        self.vertex_points = vertex_points

    def interpolate(self, pa, pb, t):
        t = t[:, None]
        if self.kind == "torus":
            d = np.mod(pb - pa + np.pi, TWO_PI) - np.pi
            return np.mod(pa + t * d, TWO_PI)
        p = pa + t * (pb - pa)
        if self.kind == "sphere":
            p = p / np.linalg.norm(p, axis=1, keepdims=True)
        return p

    def distance(self, pa, pb):
        if self.kind == "torus":
            d = np.mod(pb - pa + np.pi, TWO_PI) - np.pi
            return np.hypot(d[:, 0], d[:, 1])
        if self.kind == "sphere":
            # atan2 form stays accurate for very short arcs
            cross = np.linalg.norm(np.cross(pa, pb), axis=1)
            return np.arctan2(cross, np.sum(pa * pb, axis=1))
        return np.linalg.norm(pb - pa, axis=1)

    def to_chart(self, p):
        return xyz_to_sphere(p) if self.kind == "sphere" else p


def _mixed_squares(vals, periodic_r, periodic_c):
    """Triangles (vertex ids) of grid squares whose corners change sign."""
    nr, nc = vals.shape
    pos = vals > 0
    rr = nr if periodic_r else nr - 1
    cc = nc if periodic_c else nc - 1
    r0 = np.arange(rr)
    c0 = np.arange(cc)
    r1 = (r0 + 1) % nr
    c1 = (c0 + 1) % nc
    s00 = pos[np.ix_(r0, c0)]
    s10 = pos[np.ix_(r1, c0)]
    s11 = pos[np.ix_(r1, c1)]
    s01 = pos[np.ix_(r0, c1)]
    total = s00.astype(np.int8) + s10 + s11 + s01
    ri, ci = np.nonzero((total > 0) & (total < 4))
    v00 = r0[ri] * nc + c0[ci]
    v10 = r1[ri] * nc + c0[ci]
    v11 = r1[ri] * nc + c1[ci]
    v01 = r0[ri] * nc + c1[ci]
    tri = np.concatenate([np.stack([v00, v10, v11], 1), np.stack([v00, v11, v01], 1)])
    # saddle pattern: diagonal corners agree, adjacent corners disagree
    saddle = (s00 == s11) & (s10 == s01) & (s00 != s10)
    small = np.abs(vals) < SINGULAR_THRESHOLD * np.max(np.abs(vals))
    tiny = small[np.ix_(r0, c0)] & small[np.ix_(r1, c0)] & small[np.ix_(r1, c1)] & small[np.ix_(r0, c1)]
    flagged = np.flatnonzero((saddle | tiny).ravel())
    return tri, flagged


def _march(tri, flat_vals, chart: _Chart):
    """Zero-crossing segments of the linear interpolant on each triangle.

    Returns the crossing points of every sign-changing edge and, per
    segment, the indices of its two endpoints in that point array.
    """
    sv = flat_vals[tri] > 0
    keep = sv.any(axis=1) & ~sv.all(axis=1)
    tri, sv = tri[keep], sv[keep]
    if len(tri) == 0:
        return np.empty((0, 3)), np.empty((0, 2), dtype=np.int64)
    edges = np.stack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]], axis=1)
    crosses = np.stack([sv[:, 0] != sv[:, 1], sv[:, 1] != sv[:, 2], sv[:, 2] != sv[:, 0]], 1)
    # exactly two of three edges cross in every mixed triangle
    seg_edges = edges[crosses].reshape(-1, 2, 2)
    lo = seg_edges.min(axis=2)
    hi = seg_edges.max(axis=2)
    n_vert = int(max(tri.max() + 1, 1))
    keys = lo.astype(np.int64) * n_vert + hi
    uniq, inverse = np.unique(keys.ravel(), return_inverse=True)
    a, b = uniq // n_vert, uniq % n_vert
    va, vb = flat_vals[a], flat_vals[b]
    t = va / (va - vb)
    points = chart.interpolate(chart.vertex_points(a), chart.vertex_points(b), t)
    return points, inverse.reshape(-1, 2)


def _chain(segments, n_points):
    """Link segments sharing an endpoint into vertex chains.

    Returns a list of index arrays into the crossing points; closed chains
    repeat their first index at the end.
    """
    n_seg = len(segments)
    if n_seg == 0:
        return []
    incident = np.full((n_points, 2), -1, dtype=np.int64)
    flat = segments.ravel()
    order = np.argsort(flat, kind="stable")
    sorted_pts = flat[order]
    first = np.ones(len(flat), dtype=bool)
    first[1:] = sorted_pts[1:] != sorted_pts[:-1]
    slot = np.where(first, 0, 1)
    incident[sorted_pts, slot] = order // 2
    degree = (incident >= 0).sum(axis=1)

    seg_list = segments.tolist()
    inc = incident.tolist()
    used = [False] * n_seg
    chains = []

    def walk(start_pt, seg):
        chain = [start_pt]
        pt = start_pt
        while seg >= 0 and not used[seg]:
            used[seg] = True
            s0, s1 = seg_list[seg]
            pt = s1 if s0 == pt else s0
            chain.append(pt)
            i0, i1 = inc[pt]
            seg = i1 if i0 == seg else i0
        return chain

    for pt in np.flatnonzero(degree == 1).tolist():
        seg = inc[pt][0]
        if not used[seg]:
            chains.append(np.array(walk(pt, seg)))
    for seg in range(n_seg):
        if not used[seg]:
            chains.append(np.array(walk(seg_list[seg][0], seg)))
    return chains


def _assemble(surface, chart, points, segments, spw, spacing, diameter, flagged, chain=True):
    if len(segments):
        seg_len = chart.distance(points[segments[:, 0]], points[segments[:, 1]])
    else:
        seg_len = np.zeros(0)
    polylines = []
    if chain:
        chart_pts = chart.to_chart(points) if len(points) else points
        polylines = [chart_pts[idx] for idx in _chain(segments, len(points))]
    return NodalResult(
        surface=surface,
        polylines=polylines,
        total_length=float(np.sum(seg_len)),
        grid_resolution=float(spw),
        spacing=float(spacing),
        cell_diameter=float(diameter),
        n_segments=int(len(segments)),
        max_segment_length=float(seg_len.max()) if len(seg_len) else 0.0,
        suspected_singular_cells=flagged,
    )


def _regularize(vals, zero_sign):
    delta = 1e-12 * np.max(np.abs(vals))
    if delta == 0.0:
        delta = 1e-300
    return np.where(vals == 0.0, zero_sign * delta, vals)


# --------------------------------------------------------------- extraction

def extract_nodal_set(
    f: Eigenfunction,
    samples_per_wavelength: float = DEFAULT_SPW,
    *,
    zero_sign: int = 1,
    chain: bool = True,
) -> NodalResult:
    """Polyline approximation of the zero set of ``f``.

    Grid spacing is at most ``(2 pi / sqrt(lam)) / samples_per_wavelength``.
    Vertex values that are exactly zero are nudged to ``zero_sign * delta``
    with ``delta = 1e-12 * max|f|`` so every triangle has a definite sign
    pattern.
    """
    if samples_per_wavelength < 4:
        raise InvalidCount(f"samples_per_wavelength must be >= 4, got {samples_per_wavelength}")
    lam = f.eigenvalue
    surface = f.surface
    target = (TWO_PI / np.sqrt(lam)) / samples_per_wavelength
    if target > surface.injectivity_radius:
        raise ResolutionTooCoarse(f"spacing {target} exceeds injectivity radius")

    if surface.kind == TORUS:
        n = int(np.ceil(TWO_PI / target))
        h = TWO_PI / n
        axis = h * np.arange(n)
        vals = _regularize(f.grid(axis, axis), zero_sign)

        def vertex_points(ids):
            return np.stack([axis[ids // n], axis[ids % n]], axis=1)

        chart = _Chart("torus", vertex_points)
        tri, flagged = _mixed_squares(vals, True, True)
        points, segments = _march(tri, vals.ravel(), chart)
        return _assemble(surface, chart, points, segments, samples_per_wavelength, h,
                         np.sqrt(2.0) * h, flagged, chain)

    n_theta = int(np.ceil(np.pi / target))
    n_phi = int(np.ceil(TWO_PI / target))
    d_theta, d_phi = np.pi / n_theta, TWO_PI / n_phi
    theta = d_theta * np.arange(1, n_theta)
    phi = d_phi * np.arange(n_phi)
    ring = f.grid(theta, phi)
    poles = f(np.array([[0.0, 0.0], [np.pi, 0.0]]))
    n_ring = ring.size
    flat = _regularize(np.concatenate([ring.ravel(), poles]), zero_sign)
    ring = flat[:n_ring].reshape(ring.shape)
    north, south = n_ring, n_ring + 1

    def vertex_points(ids):
        coords = np.empty((len(ids), 2))
        on_grid = ids < n_ring
        g = ids[on_grid]
        coords[on_grid, 0] = theta[g // n_phi]
        coords[on_grid, 1] = phi[g % n_phi]
        coords[ids == north] = (0.0, 0.0)
        coords[ids == south] = (np.pi, 0.0)
        return sphere_to_xyz(coords)

    chart = _Chart("sphere", vertex_points)
    tri, flagged = _mixed_squares(ring, False, True)
    c = np.arange(n_phi)
    cn = (c + 1) % n_phi
    last = (n_theta - 2) * n_phi
    fans = np.concatenate(
        [
            np.stack([np.full(n_phi, north), c, cn], axis=1),
            np.stack([np.full(n_phi, south), last + cn, last + c], axis=1),
        ]
    )
    tri = np.concatenate([tri, fans])
    points, segments = _march(tri, flat, chart)
    return _assemble(surface, chart, points, segments, samples_per_wavelength,
                     max(d_theta, d_phi), np.hypot(d_theta, d_phi), flagged, chain)


def nodal_length(result: NodalResult) -> float:
    """Riemannian length of the polylines in ``result``."""
    total = 0.0
    for line in result.polylines:
        line = np.asarray(line, dtype=float)
        if len(line) < 2:
            continue
        if result.surface.kind == TORUS:
            d = np.mod(np.diff(line, axis=0) + np.pi, TWO_PI) - np.pi
            total += float(np.sum(np.hypot(d[:, 0], d[:, 1])))
        else:
            xyz = sphere_to_xyz(line)
            cross = np.linalg.norm(np.cross(xyz[:-1], xyz[1:]), axis=1)
            total += float(np.sum(np.arctan2(cross, np.sum(xyz[:-1] * xyz[1:], axis=1))))
    return total


def nodal_convergence(f: Eigenfunction, levels=(16, 32, 64)) -> dict:
    """Lengths at successive 2x refinements with a Richardson error bar.

    The marching-triangles length error is second order in the spacing, so
    ``L_fine + (L_fine - L_coarse) / 3`` is the extrapolated value and
    ``|L_fine - L_coarse| / 3`` its error bar.
    """
    lengths = [extract_nodal_set(f, spw, chain=False).total_length for spw in levels]
    deltas = [abs(b - a) for a, b in zip(lengths, lengths[1:])]
    fine, coarse = lengths[-1], lengths[-2]
    return {
        "levels": tuple(levels),
        "lengths": lengths,
        "deltas": deltas,
        "richardson": fine + (fine - coarse) / 3.0,
        "error": abs(fine - coarse) / 3.0,
    }


def write_polylines_csv(result: NodalResult, path) -> None:
    """Polyline dump with columns ``curve_id, vertex_index, coord1, coord2``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["curve_id", "vertex_index", "coord1", "coord2"])
        for cid, line in enumerate(result.polylines):
            for vid, (a, b) in enumerate(np.asarray(line)):
                writer.writerow([cid, vid, f"{a:.12g}", f"{b:.12g}"])


# ---------------------------------------------------------- planar helpers

def planar_nodal_length(F: Callable, radius: float, n_cells: int = 240,
                        center: complex = 0.0) -> float:
    """Length of the zero set of planar ``F`` inside the disk ``|z - center| < radius``.

    ``F`` takes a complex array. Segments are clipped exactly to the disk.
    """
    if n_cells < 2:
        raise InvalidCount("n_cells must be >= 2")
    axis = np.linspace(-radius, radius, n_cells + 1)
    zz = center + axis[None, :] + 1j * axis[:, None]  # rows: y, cols: x
    vals = _regularize(np.real(F(zz)).astype(float), 1)
    nc = n_cells + 1

    def vertex_points(ids):
        return np.stack([axis[ids % nc], axis[ids // nc]], axis=1)

    chart = _Chart("plane", vertex_points)
    tri, _ = _mixed_squares(vals, False, False)
    points, segments = _march(tri, vals.ravel(), chart)
    if len(segments) == 0:
        return 0.0
    return float(np.sum(_clip_to_disk(points[segments[:, 0]], points[segments[:, 1]], radius)))


def _clip_to_disk(a, b, radius):
    """Length of each segment ``a -> b`` inside the centered disk."""
    d = b - a
    qa = np.sum(d * d, axis=1)
    qb = 2.0 * np.sum(a * d, axis=1)
    qc = np.sum(a * a, axis=1) - radius**2
    disc = qb * qb - 4.0 * qa * qc
    out = np.zeros(len(a))
    ok = (disc > 0) & (qa > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(ok, (-qb - sq) / (2 * qa), 0.0)
        t1 = np.where(ok, (-qb + sq) / (2 * qa), 0.0)
    span = np.clip(np.minimum(t1, 1.0) - np.maximum(t0, 0.0), 0.0, None)
    out[ok] = span[ok] * np.sqrt(qa[ok])
    return out


def _count_crossings(F, radius, n_samples):
    theta = TWO_PI * np.arange(n_samples) / n_samples
    vals = np.real(F(radius * np.exp(1j * theta)))
    pos = vals > 0
    idx = np.flatnonzero(pos != np.roll(pos, -1))
    if len(idx) == 0:
        return np.empty(0)
    lo, hi = theta[idx], theta[idx] + TWO_PI / n_samples
    f_lo = np.real(F(radius * np.exp(1j * lo))) > 0
    # vectorized bisection down to 1e-10 in angle
    while np.max(hi - lo) > 1e-10:
        mid = 0.5 * (lo + hi)
        f_mid = np.real(F(radius * np.exp(1j * mid))) > 0
        same = f_mid == f_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    roots = np.sort(np.mod(0.5 * (lo + hi), TWO_PI))
    # de-duplicate roots closer than one sample spacing in angle
    min_gap = TWO_PI / n_samples
    kept = [roots[0]]
    for r in roots[1:]:
        if r - kept[-1] >= min_gap:
            kept.append(r)
    if len(kept) > 1 and kept[0] + TWO_PI - kept[-1] < min_gap:
        kept.pop()
    return np.array(kept)


def circle_zero_count(F: Callable, radius: float = 1.0, n_samples: int = 1024,
                      return_roots: bool = False):
    """Number of sign changes of ``F(radius e^{i theta})`` around the circle.

    Warns with :class:`SamplingTooCoarse` (non-fatal) when doubling
    ``n_samples`` changes the count.
    """
    if n_samples < 64:
        raise ConfigError(f"n_samples must be >= 64, got {n_samples}")
    roots = _count_crossings(F, radius, n_samples)
    check = _count_crossings(F, radius, 2 * n_samples)
    if len(check) != len(roots):
        warnings.warn(
            f"zero count changed from {len(roots)} to {len(check)} when doubling samples",
            SamplingTooCoarse,
            stacklevel=2,
        )
    if return_roots:
        return len(roots), roots
    return len(roots)

