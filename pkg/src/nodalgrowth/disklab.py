"""Planar bench for solutions of ``Delta F + p F = 0`` on the disk of radius 3.

Contents:

* Green and Poisson kernels of the disk ``rho D`` and the interior
  representation ``F = (1/2pi) iint p F G dA + (1/(2pi rho)) oint F P ds``;
* the chain of constants ``a1 .. a5``, the admissible potential bound and
  the resulting ``L^inf``-``L^q`` constant ``c4``;
* direct numerical checks of the ``L^inf``/``L^q`` lemma, the nodal length
  versus growth bound on the small disk ``(1/60) D``, and the growth versus
  circle zero count bound.

Only closed-form solution families are used (constant potentials), so every
quantity has an exact reference value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .eigenbasis import Eigenfunction, eigenspace_basis, random_eigenfunction
from .errors import (
    CoincidentPoints,
    ConfigError,
    InvalidRadii,
    PotentialTooLarge,
    QuadratureNotConverged,
)
from .geometry import FLAT_TORUS, TORUS, TWO_PI
from .nodal import circle_zero_count, planar_nodal_length
from .report import rows_to_csv

OUTER_RADIUS = 3.0
R_MINUS = 2.5
R_PLUS = 2.75
GROWTH_OUTER = 11.0 / 4.0
GROWTH_INNER = 1.0 / 4.0
NODAL_RADIUS = 1.0 / 60.0
RHO_TILDE_MINUS = 1.0 / 8.0
RHO_PLUS = 3.0 / 8.0


# ------------------------------------------------------------------ problems

@dataclass(frozen=True)
class DiskProblem:
    """Planar solution ``F`` of ``Delta F + p F = 0`` with constant potential."""

    F: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    potential_value: float
    family: str
    params: str = ""

    @property
    def potential_bound(self) -> float:
        return abs(self.potential_value)

    def potential(self, z):
        return np.full(np.shape(z), self.potential_value)

    def __call__(self, z):
        return self.F(np.asarray(z, dtype=complex))

    def __add__(self, other: "DiskProblem") -> "DiskProblem":
        if other.potential_value != self.potential_value:
            raise ConfigError("only problems with the same potential can be added")
        f, g = self.F, other.F
        return DiskProblem(lambda z: f(z) + g(z), self.potential_value,
                           f"{self.family}+{other.family}", f"{self.params}|{other.params}")


def harmonic(n: int, coeff: complex = 1.0) -> DiskProblem:
    """``Re(coeff z^n)`` with zero potential."""
    return DiskProblem(lambda z: np.real(coeff * z**n), 0.0, f"Harmonic({n})",
                       f"n={n};c={complex(coeff):.6g}")


def harmonic_sum(coeffs: dict[int, complex]) -> DiskProblem:
    """``Re(sum_n c_n z^n)`` with zero potential."""
    items = sorted(coeffs.items())

    def F(z):
        return np.real(sum(c * z**n for n, c in items))

    return DiskProblem(F, 0.0, "Harmonic", ";".join(f"c{n}={complex(c):.6g}" for n, c in items))


def plane_wave(k1: float, k2: float, phase: float = 0.0) -> DiskProblem:
    """``cos(k1 x + k2 y + phase)`` solving the equation with ``p = k1^2 + k2^2``."""
    return DiskProblem(lambda z: np.cos(k1 * np.real(z) + k2 * np.imag(z) + phase),
                       k1 * k1 + k2 * k2, "PlaneWave", f"k=({k1:.6g},{k2:.6g});phase={phase:.6g}")


def rescaled_eigenfunction(f: Eigenfunction, p0, k0: float) -> DiskProblem:
    """Pull a torus eigenfunction back to the plane by ``u -> p0 + (k0/sqrt(lam)) u``.

    The flat metric makes this exact: ``Delta F = -k0^2 F``.
    """
    if f.surface.kind != TORUS:
        raise ConfigError("pullback is only exact on the flat torus")
    r = k0 / math.sqrt(f.eigenvalue)
    x0, y0 = float(p0[0]), float(p0[1])

    def F(z):
        pts = np.stack([x0 + r * np.real(z), y0 + r * np.imag(z)], axis=-1)
        return f(pts)

    return DiskProblem(F, k0 * k0, "RescaledEigenfunction",
                       f"lam={f.eigenvalue:.6g};p0=({x0:.6g},{y0:.6g});k0={k0:.6g}")


def pde_residual(prob: DiskProblem, z, h: float = 1e-4) -> np.ndarray:
    """``|Delta_h F + p F|`` with the five-point Laplacian."""
    z = np.asarray(z, dtype=complex)
    F = prob
    lap = (F(z + h) + F(z - h) + F(z + 1j * h) + F(z - 1j * h) - 4.0 * F(z)) / h**2
    return np.abs(lap + prob.potential(z) * F(z))


# ------------------------------------------------------------------- kernels

def green_kernel(z, zeta, rho: float):
    """``log |(rho^2 - z conj(zeta)) / (rho (z - zeta))|``."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(z - zeta) < 1e-14):
        raise CoincidentPoints("Green kernel evaluated at coincident points")
    out = np.log(np.abs(rho * rho - z * np.conj(zeta)) / (rho * np.abs(z - zeta)))
    return float(out) if out.ndim == 0 else out


def poisson_kernel(z, zeta, rho: float):
    """``(rho^2 - |z|^2) / |zeta - z|^2`` for ``|z| < rho = |zeta|``."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    out = (rho * rho - np.abs(z) ** 2) / np.abs(zeta - z) ** 2
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def polar_about(z: complex, rho: float, n_t: int, n_psi: int):
    """Nodes and weights for ``iint_{|zeta| < rho} g dA`` in polar coordinates about ``z``.

    Rays leave ``z`` at angle ``psi`` and stop at the circle; along each ray
    ``t = T(psi) u^2`` so the ``t log t`` behaviour at ``z`` becomes smooth.
    """
    u, wu = _gauss01(n_t)
    psi = TWO_PI * np.arange(n_psi) / n_psi
    e = np.exp(1j * psi)
    proj = np.real(np.conj(z) * e)
    T = -proj + np.sqrt(proj * proj + rho * rho - abs(z) ** 2)
    t = T[:, None] * u[None, :] ** 2
    # dA = t dt dpsi, dt = 2 T u du
    w = (TWO_PI / n_psi) * t * 2.0 * T[:, None] * u[None, :] * wu[None, :]
    zeta = z + t * e[:, None]
    return zeta.ravel(), w.ravel(), t.ravel()


def _angular_count(z, rho, base):
    return max(base, int(math.ceil(30.0 * rho / (rho - abs(z)))))


def representation_terms(prob: DiskProblem, z: complex, rho: float,
                         n_t: int = 48, n_psi: int = 128, n_boundary: int = 256):
    """Raw kernel integrals ``(iint p F G_rho dA, oint F P_rho ds)`` at ``z``."""
    z = complex(z)
    if not abs(z) < rho:
        raise ConfigError(f"|z| = {abs(z)} must be below rho = {rho}")
    zeta, w, t = polar_about(z, rho, n_t, _angular_count(z, rho, n_psi))
    pv = prob.potential(zeta)
    if np.all(pv == 0.0):
        area = 0.0
    else:
        # log|z - zeta| = log t exactly on these nodes
        G = np.log(np.abs(rho * rho - z * np.conj(zeta)) / rho) - np.log(t)
        area = float(np.sum(w * pv * prob(zeta) * G))
    nb = _angular_count(z, rho, n_boundary)
    theta = TWO_PI * np.arange(nb) / nb
    bz = rho * np.exp(1j * theta)
    boundary = float(np.sum(prob(bz) * poisson_kernel(z, bz, rho)) * (TWO_PI * rho / nb))
    return area, boundary


def reconstruct(prob: DiskProblem, z: complex, rho: float, *, check: bool = True,
                n_t: int = 48, n_psi: int = 128, n_boundary: int = 256) -> float:
    """Green potential plus Poisson integral of ``F`` at ``z``.

    With ``-Delta G = 2 pi delta`` and the unnormalized Poisson kernel,
    ``F(z) = area / (2 pi) + boundary / (2 pi rho)``; both factors reproduce
    harmonic polynomials and plane waves exactly. With ``check`` the result
    is recomputed at doubled resolution and must agree to ``1e-6 sup|F|``.
    """
    if not 0 < rho <= OUTER_RADIUS:
        raise ConfigError(f"rho must lie in (0, {OUTER_RADIUS}], got {rho}")
    area, boundary = representation_terms(prob, z, rho, n_t, n_psi, n_boundary)
    value = area / TWO_PI + boundary / (TWO_PI * rho)
    if check:
        a2, b2 = representation_terms(prob, z, rho, 2 * n_t, 2 * n_psi, 2 * n_boundary)
        fine = a2 / TWO_PI + b2 / (TWO_PI * rho)
        scale = _sup_on_disk(prob, rho)
        if abs(fine - value) > 1e-6 * scale:
            raise QuadratureNotConverged(
                f"reconstruction changed by {abs(fine - value):.3g} on refinement (sup|F|={scale:.3g})"
            )
    return value


# ---------------------------------------------------------------- disk norms

def planar_disk_rule(radius: float, n_radial: int = 64, n_angular: int = 256):
    u, wu = _gauss01(n_radial)
    s = radius * u
    psi = TWO_PI * np.arange(n_angular) / n_angular
    z = (s[:, None] * np.exp(1j * psi)[None, :]).ravel()
    w = np.repeat(radius * wu * s * (TWO_PI / n_angular), n_angular)
    return z, w


def planar_lq_norm(F: Callable, radius: float, q: float,
                   n_radial: int = 64, n_angular: int = 256) -> float:
    z, w = planar_disk_rule(radius, n_radial, n_angular)
    a = np.abs(F(z))
    if np.isinf(q):
        return float(np.max(a))
    return float(np.sum(w * a**q) ** (1.0 / q))


def _sup_on_disk(F: Callable, radius: float, n_radial: int = 65, n_angular: int = 256) -> float:
    """Max of ``|F|`` on a polar grid that includes the center and the rim."""
    s = np.linspace(0.0, radius, n_radial)
    psi = TWO_PI * np.arange(n_angular) / n_angular
    z = (s[:, None] * np.exp(1j * psi)[None, :]).ravel()
    return float(np.max(np.abs(F(z))))


# ----------------------------------------------------------------- constants

@dataclass(frozen=True)
class LemmaConstants:
    q: float
    r_minus: float
    r_plus: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    epsilon0_admissible: float
    c4: float


def _green_bound_integral(z: float, q: float, r_minus: float, r_plus: float,
                          n_t: int = 64, n_psi: int = 256) -> float:
    r_tilde = 0.5 * (r_minus + r_plus)
    qc = q / (q - 1.0)
    zeta, w, t = polar_about(complex(z), r_plus, n_t, _angular_count(z, r_plus, n_psi))
    g = np.log((r_plus**2 + abs(z) * np.abs(zeta)) / r_tilde) - np.log(t)
    return float(np.sum(w * np.abs(g) ** qc))


@lru_cache(maxsize=64)
def kernel_constants(q: float, r_minus: float = R_MINUS, r_plus: float = R_PLUS,
                     n_z: int = 64) -> LemmaConstants:
    """Constants of the ``L^inf``-``L^q`` lemma for the radii ``r_minus < r_plus``.

    ``a1`` takes the sup over ``n_z`` points ``|z|`` in ``[0, r_minus]``; the
    bounding integrand depends on ``z`` only through ``|z|``, so points on a
    radius cover the whole disk.
    """
    if not 0.0 < r_minus < r_plus:
        raise InvalidRadii(f"need 0 < r_minus < r_plus, got ({r_minus}, {r_plus})")
    if not 1.0 < q < math.inf:
        raise ConfigError(f"q must lie in (1, inf), got {q}")
    r_tilde = 0.5 * (r_minus + r_plus)
    zs = np.linspace(0.0, r_minus, n_z)
    a1 = max(_green_bound_integral(z, q, r_minus, r_plus) for z in zs) ** (q - 1.0)
    a2 = (TWO_PI * r_plus) ** (q - 1.0) * (r_plus / (r_tilde - r_minus)) ** (2.0 * q)
    a3 = 2.0 ** (q - 1.0) * max(a1, a2)
    a4 = a3 * max(1.0, 2.0 / (r_plus - r_tilde))
    a5 = a4 * math.pi * r_minus**2
    eps_adm = 1.0 / (2.0 * a5)
    eps = 0.5 * eps_adm
    c4 = (a4 * (1.0 + eps) / (1.0 - a5 * eps)) ** (1.0 / q)
    return LemmaConstants(q, r_minus, r_plus, a1, a2, a3, a4, a5, eps_adm, c4)


# -------------------------------------------------------------------- checks

@dataclass(frozen=True)
class TheoremCheck:
    kind: str
    family: str
    parameters: str
    q: float
    lhs: float
    rhs_factor: float
    ratio: float
    bound: float = math.nan


def lemma3_check(prob: DiskProblem, q: float, r_minus: float = R_MINUS,
                 r_plus: float = R_PLUS) -> TheoremCheck:
    """``sup_{r_minus D} |F|`` against ``||F||_{L^q(r_plus D)}``; ``bound`` is ``c4``."""
    consts = kernel_constants(q, r_minus, r_plus)
    if not prob.potential_bound < consts.epsilon0_admissible:
        raise PotentialTooLarge(
            f"|p| = {prob.potential_bound:.3g} not below admissible {consts.epsilon0_admissible:.3g}"
        )
    lhs = _sup_on_disk(prob, r_minus, 129, 512)
    rhs = planar_lq_norm(prob, r_plus, q)
    return TheoremCheck("Lemma3", prob.family, prob.params, q, lhs, rhs, lhs / rhs, consts.c4)


def growth_log_ratio(F: Callable, r_outer: float, r_inner: float, q: float) -> float:
    return math.log(planar_lq_norm(F, r_outer, q) / planar_lq_norm(F, r_inner, q))


def theorem2_check(prob: DiskProblem, q: float, n_cells: int = 240) -> TheoremCheck:
    """Nodal length in ``(1/60) D`` against ``max(beta_q, 1)`` between radii 11/4 and 1/4."""
    lhs = planar_nodal_length(prob, NODAL_RADIUS, n_cells)
    beta = growth_log_ratio(prob, GROWTH_OUTER, GROWTH_INNER, q)
    rhs = max(beta, 1.0)
    return TheoremCheck("Theorem2", prob.family, prob.params, q, lhs, rhs, lhs / rhs)


def theorem3_check(prob: DiskProblem, q: float, rho_tilde_minus: float = RHO_TILDE_MINUS,
                   rho_plus: float = RHO_PLUS, n_samples: int = 1024) -> TheoremCheck:
    """Log-ratio of ``L^q`` norms on two small disks against ``1 + #zeros on S^1``."""
    if not 0.0 < rho_tilde_minus < rho_plus < 0.5:
        raise InvalidRadii(f"need 0 < {rho_tilde_minus} < {rho_plus} < 1/2")
    lhs = growth_log_ratio(prob, rho_plus, rho_tilde_minus, q)
    rhs = 1.0 + circle_zero_count(prob, 1.0, n_samples)
    return TheoremCheck("Theorem3", prob.family, prob.params, q, lhs, rhs, lhs / rhs)


def inequality_terms(prob: DiskProblem, q: float, z: complex, rho: float,
                     consts: LemmaConstants | None = None) -> dict:
    """Both sides of the Hoelder and Poisson steps at ``z`` for one ``rho``.

    The raw (unnormalized) kernel integrals are used, exactly as the
    inequalities are stated for them.
    """
    consts = consts or kernel_constants(q)
    area, boundary = representation_terms(prob, z, rho)
    zr, wr = planar_disk_rule(rho)
    mass_rho = float(np.sum(wr * np.abs(prob(zr)) ** q))
    zp, wp = planar_disk_rule(consts.r_plus)
    mass_plus = float(np.sum(wp * np.abs(prob(zp)) ** q))
    nb = 1024
    bz = rho * np.exp(1j * TWO_PI * np.arange(nb) / nb)
    circle_mass = float(np.sum(np.abs(prob(bz)) ** q) * TWO_PI * rho / nb)
    return {
        "holder_lhs": abs(area) ** q,
        "holder_rhs": consts.a1 * prob.potential_bound**q * mass_rho,
        "holder_rhs_eps": consts.a1 * consts.epsilon0_admissible * mass_plus,
        "poisson_lhs": abs(boundary) ** q,
        "poisson_rhs": consts.a2 * circle_mass,
    }


# ------------------------------------------------------------ test families

def lemma_family(q: float, seed: int = 0) -> list[DiskProblem]:
    """At least 50 problems with ``|p| <= epsilon0_admissible(q) / 2``."""
    eps = kernel_constants(q).epsilon0_admissible
    rng = np.random.default_rng(seed)
    probs = [harmonic(0)]
    for n in range(1, 9):
        probs.append(harmonic(n))
        probs.append(harmonic(n, complex(np.exp(1j * rng.uniform(0, TWO_PI)))))
    for _ in range(6):
        coeffs = {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(0, 5)}
        probs.append(harmonic_sum(coeffs))
    for frac in (1.0, 0.5, 0.1, 0.01):
        for _ in range(5):
            k = math.sqrt(frac * eps / 2.0)
            ang = rng.uniform(0, TWO_PI)
            probs.append(plane_wave(k * math.cos(ang), k * math.sin(ang), rng.uniform(0, TWO_PI)))
    k0 = math.sqrt(eps / 2.0)
    for level in (3, 10, 40):
        f = random_eigenfunction(eigenspace_basis(FLAT_TORUS, level), seed + level)
        for _ in range(3):
            probs.append(rescaled_eigenfunction(f, rng.uniform(0, TWO_PI, 2), k0))
    return probs


def write_checks_csv(checks: list[TheoremCheck], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(rows_to_csv(checks))
