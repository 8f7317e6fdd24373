"""Eigenvalue sweeps: nodal length against average growth, and growth scans.

A sweep is described by a :class:`SweepConfig`, stored on disk as flat
``key = value`` text. Each eigenvalue level is an independent job; jobs
run in a process pool and results are sorted before anything is written,
so output does not depend on scheduling.
"""
from __future__ import annotations

import dataclasses
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .eigenbasis import (
    eigenspace_basis,
    level_eigenvalue,
    level_for_eigenvalue,
    random_eigenfunction,
    single_mode,
)
from .errors import ConfigError, ConvergenceError, NodalGrowthError
from .geometry import TORUS, sample_centers, surface_by_name
from .growth import average_growth_multi, growth_batch
from .nodal import extract_nodal_set

log = logging.getLogger(__name__)

NODAL_RERUN_DELTA = 0.01
OUTLIER_FACTOR = 10.0
SUBJECTS = ("random", "cos")


# ------------------------------------------------------------------- config

@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one sweep.

    For ``subject = "cos"`` (torus only) each entry of ``levels`` is the
    wavenumber ``m`` of the forced mode ``cos(m x)``, with ``lam = m^2``.
    """

    surface: str = "torus"
    levels: tuple[int, ...] = ()
    qs: tuple[float, ...] = (2.0, 4.0)
    alphas: tuple[float, ...] = (0.5,)
    k0: float = 0.5
    n_centers: int = 512
    samples_per_wavelength: int = 16
    seed: int = 12345
    subject: str = "random"
    out: str = "results"

    def __post_init__(self):
        surface_by_name(self.surface)
        if self.subject not in SUBJECTS:
            raise ConfigError(f"subject must be one of {SUBJECTS}, got {self.subject!r}")
        if self.subject == "cos" and self.surface != TORUS:
            raise ConfigError("the cos subject exists only on the torus")
        if any(lv < 1 for lv in self.levels):
            raise ConfigError("levels must be >= 1")
        if any(not q >= 1.0 for q in self.qs):
            raise ConfigError("every q must be >= 1")
        if any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ConfigError("every alpha must lie in (0, 1)")
        if not self.k0 > 0:
            raise ConfigError("k0 must be positive")
        if self.n_centers < 1:
            raise ConfigError("n_centers must be >= 1")
        if self.samples_per_wavelength < 4:
            raise ConfigError("samples_per_wavelength must be >= 4")

    def eigenvalue(self, level: int) -> float:
        if self.subject == "cos":
            return float(level * level)
        return level_eigenvalue(surface_by_name(self.surface), level)


_LIST_FIELDS = {"levels": int, "qs": float, "alphas": float}
_SCALAR_FIELDS = {"surface": str, "k0": float, "n_centers": int,
                  "samples_per_wavelength": int, "seed": int, "subject": str, "out": str}


def _num(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def dump_config(cfg: SweepConfig) -> str:
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name in _LIST_FIELDS:
            lines.append(f"{f.name} = {', '.join(_num(x) for x in v)}")
        else:
            lines.append(f"{f.name} = {_num(v)}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> SweepConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key not in _LIST_FIELDS and key not in _SCALAR_FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _LIST_FIELDS:
                conv = _LIST_FIELDS[key]
                values[key] = tuple(conv(x) for x in val.split(",") if x.strip()) if val else ()
            else:
                values[key] = _SCALAR_FIELDS[key](val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return SweepConfig(**values)


def load_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


TORUS_TARGETS = (25, 50, 100, 200, 400, 800, 1600, 2500)
SPHERE_DEGREES = (5, 10, 15, 20, 25, 30, 35, 40, 45)


def default_sweeps(seed: int = 12345) -> list[SweepConfig]:
    """The reference sweep: random eigenfunctions on the torus and the sphere."""
    torus = surface_by_name("torus")
    levels = tuple(level_for_eigenvalue(torus, lam) for lam in TORUS_TARGETS)
    return [
        SweepConfig("torus", levels, seed=seed),
        SweepConfig("sphere", SPHERE_DEGREES, seed=seed),
    ]


def oracle_sweep(seed: int = 12345) -> SweepConfig:
    return SweepConfig("torus", (5, 10, 20), qs=(2.0,), subject="cos", seed=seed)


def cos_mode_average_growth(q: float = 2.0, alpha: float = 0.5, k0: float = 0.5) -> float:
    """Exact average growth of ``cos(m x)`` on the flat torus, by 1D quadrature.

    On a disk of radius ``r = k0 / m`` about ``(x0, y0)`` the ``L^q`` mass is
    ``int |cos(phi + u)|^q 2 sqrt((m rho)^2 - u^2) du / m^2`` with
    ``phi = m x0``; the ``m^2`` cancels in the ratio, so the average over
    centers is an average over the phase ``phi`` in ``[0, pi)`` and does
    not depend on ``m``.
    """
    def mass(phi, a):
        g = lambda u: abs(math.cos(phi + u)) ** q * 2.0 * math.sqrt(max(a * a - u * u, 0.0))
        return integrate.quad(g, -a, a, epsabs=0.0, epsrel=1e-12, limit=200)[0]

    beta = lambda phi: math.log(mass(phi, k0) / mass(phi, alpha * k0)) / q
    val, _ = integrate.quad(beta, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val / math.pi


# --------------------------------------------------------------------- rows

@dataclass(frozen=True)
class SandwichRow:
    surface: str
    subject: str
    level: int
    lam: float
    q: float
    alpha: float
    k0: float
    h1: float
    h1_err: float
    avg_growth: float
    avg_growth_se: float
    n_centers: int
    n_flagged: int
    lower_ratio: float
    lower_ratio_err: float
    upper_ratio: float
    upper_ratio_err: float
    flags: str


@dataclass(frozen=True)
class DFRow:
    surface: str
    subject: str
    level: int
    lam: float
    q: float
    alpha: float
    k0: float
    n_centers: int
    max_beta: float
    median_beta: float
    mean_beta: float
    max_beta_over_sqrt_lambda: float
    n_flagged: int


@dataclass
class SweepResult:
    rows: list
    summary: dict = field(default_factory=dict)


def derive_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)[0])


def subject_eigenfunction(cfg: SweepConfig, level: int):
    surface = surface_by_name(cfg.surface)
    if cfg.subject == "cos":
        m = level
        space = eigenspace_basis(surface, level_for_eigenvalue(surface, m * m))
        return single_mode(space, m, 0, "cos")
    return random_eigenfunction(eigenspace_basis(surface, level), derive_seed(cfg.seed, level, 0))


def measure_nodal_length(f, spw: int):
    """Length at ``spw`` and ``2 spw`` (``4 spw`` if still above the rerun delta).

    Returns ``(length, error, converged)`` with a Richardson error bar.
    """
    lengths = [extract_nodal_set(f, spw, chain=False).total_length,
               extract_nodal_set(f, 2 * spw, chain=False).total_length]
    rel = abs(lengths[1] - lengths[0]) / max(lengths[1], 1e-300)
    if rel > NODAL_RERUN_DELTA:
        lengths.append(extract_nodal_set(f, 4 * spw, chain=False).total_length)
        rel = abs(lengths[2] - lengths[1]) / max(lengths[2], 1e-300)
    return lengths[-1], abs(lengths[-1] - lengths[-2]) / 3.0, rel <= NODAL_RERUN_DELTA


def _sandwich_level(cfg: SweepConfig, level: int) -> list[SandwichRow]:
    lam = cfg.eigenvalue(level)
    flags = []
    try:
        f = subject_eigenfunction(cfg, level)
        h1, h1_err, converged = measure_nodal_length(f, cfg.samples_per_wavelength)
        if not converged:
            flags.append("nodal_unconverged")
    except NodalGrowthError as exc:
        log.warning("level %s: nodal extraction failed: %s", level, exc)
        h1, h1_err, f = math.nan, math.nan, None
        flags.append(f"nodal_error:{type(exc).__name__}")
    rows = []
    seed = derive_seed(cfg.seed, level, 1)
    for alpha in cfg.alphas:
        row_flags = list(flags)
        try:
            if f is None:
                raise ConvergenceError("no eigenfunction")
            avgs = average_growth_multi(f, alpha, cfg.k0, cfg.qs, cfg.n_centers, seed)
        except NodalGrowthError as exc:
            log.warning("level %s alpha %s: growth failed: %s", level, alpha, exc)
            avgs = None
            row_flags.append(f"growth_error:{type(exc).__name__}")
        for q in cfg.qs:
            if avgs is None:
                A, se, nf = math.nan, math.nan, 0
            else:
                A, se, nf = avgs[q].value, avgs[q].std_error, avgs[q].n_flagged
            root = math.sqrt(lam)
            lower = h1 / (root * A) if A > 0 else math.inf
            upper = h1 / (root * (A + 1.0))
            rel_h = h1_err / h1 if h1 > 0 else 0.0
            lower_err = abs(lower) * math.hypot(rel_h, se / A) if A > 0 else math.nan
            upper_err = abs(upper) * math.hypot(rel_h, se / (A + 1.0))
            rows.append(SandwichRow(
                cfg.surface, cfg.subject, level, lam, float(q), float(alpha), cfg.k0,
                h1, h1_err, A, se, cfg.n_centers, nf, lower, lower_err, upper, upper_err,
                ";".join(row_flags),
            ))
    return rows


def _df_level(cfg: SweepConfig, level: int) -> list[DFRow]:
    lam = cfg.eigenvalue(level)
    f = subject_eigenfunction(cfg, level)
    centers = sample_centers(f.surface, cfg.n_centers, derive_seed(cfg.seed, level, 1))
    rows = []
    for alpha in cfg.alphas:
        batch = growth_batch(f, centers, alpha, cfg.k0, cfg.qs)
        for q in cfg.qs:
            recs = batch[float(q)]
            betas = np.array([r.beta for r in recs if not r.flagged])
            nf = len(recs) - len(betas)
            if len(betas) == 0:
                mx = med = mean = math.nan
            else:
                mx, med, mean = float(betas.max()), float(np.median(betas)), float(betas.mean())
            rows.append(DFRow(cfg.surface, cfg.subject, level, lam, float(q), float(alpha),
                              cfg.k0, cfg.n_centers, mx, med, mean, mx / math.sqrt(lam), nf))
    return rows


def _run_levels(func, cfg: SweepConfig, jobs: int | None):
    jobs = jobs or os.cpu_count() or 1
    levels = list(cfg.levels)
    if jobs <= 1 or len(levels) <= 1:
        chunks = [func(cfg, lv) for lv in levels]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(levels))) as pool:
            chunks = list(pool.map(func, [cfg] * len(levels), levels))
    return [row for chunk in chunks for row in chunk]


def _sort_key(r):
    return (r.surface, r.lam, r.q, r.alpha, r.level)


def _ratio_extremes(rows) -> dict:
    lower = [r.lower_ratio for r in rows if math.isfinite(r.lower_ratio)]
    upper = [r.upper_ratio for r in rows if math.isfinite(r.upper_ratio)]
    entry = {"rows": len(rows)}
    if lower and upper:
        entry.update(
            c1_empirical=min(lower), lower_ratio_max=max(lower),
            lower_spread=max(lower) / min(lower),
            c2_empirical=max(upper), upper_ratio_min=min(upper),
            upper_spread=max(upper) / min(upper),
        )
    return entry


def _sandwich_summary(rows: list[SandwichRow]) -> tuple[list[SandwichRow], dict]:
    """Empirical constants for the whole sweep and per ``(surface, q, alpha)``.

    A row whose ratio is more than a factor 10 away from the sweep extreme
    on the other side is flagged ``ratio_outlier``.
    """
    total = _ratio_extremes(rows)
    summary = {"sweep": total}
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.surface, r.q, r.alpha), []).append(r)
    for key in sorted(groups):
        summary[f"{key[0]} q={key[1]:g} alpha={key[2]:g}"] = _ratio_extremes(groups[key])
    out = []
    for r in rows:
        flags = [s for s in r.flags.split(";") if s]
        if "c1_empirical" in total and (
            r.lower_ratio > OUTLIER_FACTOR * total["c1_empirical"]
            or r.upper_ratio * OUTLIER_FACTOR < total["c2_empirical"]
        ):
            flags.append("ratio_outlier")
        out.append(dataclasses.replace(r, flags=";".join(flags)))
    out.sort(key=_sort_key)
    cos_rows = [r for r in out if r.subject == "cos"]
    if cos_rows:
        summary["cos_oracle"] = [_oracle_entry(r) for r in cos_rows]
    return out, summary


def _oracle_entry(r: SandwichRow) -> dict:
    """Forced ``cos(m x)`` row against exact length ``4 pi m`` and the oracle average."""
    a_exact = cos_mode_average_growth(r.q, r.alpha, r.k0) if math.isfinite(r.q) else math.nan
    m = r.level
    lower_exact = 4.0 * math.pi / a_exact
    return {
        "m": m, "q": r.q, "alpha": r.alpha,
        "h1_over_4pi_m": r.h1 / (4.0 * math.pi * m),
        "avg_growth_oracle": a_exact,
        "avg_growth_z": (r.avg_growth - a_exact) / r.avg_growth_se,
        "lower_ratio_oracle": lower_exact,
        "lower_ratio_z": (r.lower_ratio - lower_exact) / r.lower_ratio_err,
    }


def run_sandwich_sweep(cfg: SweepConfig, jobs: int | None = None) -> SweepResult:
    """Nodal length, average growth and both sandwich ratios for every level."""
    rows = _run_levels(_sandwich_level, cfg, jobs)
    rows, summary = _sandwich_summary(rows)
    return SweepResult(rows, summary)


def run_sandwich_sweeps(cfgs, jobs: int | None = None) -> SweepResult:
    rows = []
    for cfg in cfgs:
        rows.extend(_run_levels(_sandwich_level, cfg, jobs))
    rows, summary = _sandwich_summary(rows)
    return SweepResult(rows, summary)


def run_df_scan(cfg: SweepConfig, jobs: int | None = None) -> SweepResult:
    """Per level: largest sampled growth exponent and its ratio to ``sqrt(lam)``."""
    rows = sorted(_run_levels(_df_level, cfg, jobs), key=_sort_key)
    finite = [r.max_beta_over_sqrt_lambda for r in rows if math.isfinite(r.max_beta_over_sqrt_lambda)]
    maxb = [r.max_beta for r in rows if math.isfinite(r.max_beta)]
    summary = {
        "max_beta_over_sqrt_lambda": max(finite) if finite else math.nan,
        "max_beta": max(maxb) if maxb else math.nan,
        "median_row_max_beta": float(np.median(maxb)) if maxb else math.nan,
    }
    return SweepResult(rows, summary)
