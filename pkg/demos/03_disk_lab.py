# The planar bench: Green/Poisson representation and the constants behind the
# sup-norm bound, then the growth versus zero-count comparison.
#
# Run: python3 demos/03_disk_lab.py
import math

from nodalgrowth.disklab import (
    RHO_PLUS,
    RHO_TILDE_MINUS,
    harmonic,
    kernel_constants,
    lemma3_check,
    lemma_family,
    plane_wave,
    reconstruct,
    representation_terms,
    theorem2_check,
    theorem3_check,
)

# a plane wave solves Delta F + |k|^2 F = 0; both kernel terms contribute
prob = plane_wave(0.3, 0.4, 0.7)
z = 0.8 - 0.5j
area, boundary = representation_terms(prob, z, 2.6)
print(f"F(z) = {float(prob(z)):.12f}")
print(f"area term {area / (2 * math.pi):+.3e}, boundary term {boundary / (2 * math.pi * 2.6):+.12f}")
print(f"reconstructed {reconstruct(prob, z, 2.6):.12f}")

# constants of the sup bound; the admissible potential is tiny
for q in (1.5, 2.0, 4.0):
    c = kernel_constants(q)
    print(f"q = {q:g}: a1 = {c.a1:.3e}, a2 = {c.a2:.3e}, eps0 = {c.epsilon0_admissible:.3e}, c4 = {c.c4:.4g}")

checks = [lemma3_check(p, 2.0) for p in lemma_family(2.0)]
print(f"{len(checks)} problems, largest sup/L^2 ratio {max(c.ratio for c in checks):.3f} "
      f"against c4 = {checks[0].bound:.4g}")

# Re z^n: n diameters through the origin, 2n zeros on the unit circle
for n in (1, 4, 8, 12):
    t2, t3 = theorem2_check(harmonic(n), 2.0), theorem3_check(harmonic(n), 2.0)
    print(f"n = {n:2d}: nodal length {t2.lhs:.4f} (n/30 = {n / 30:.4f}), beta* = {t2.rhs_factor:.2f}; "
          f"log ratio {t3.lhs:.4f}, zeros {int(t3.rhs_factor) - 1}, ratio {t3.ratio:.4f}")
print(f"ratio tends to log(rho+/rho-)/2 = {math.log(RHO_PLUS / RHO_TILDE_MINUS) / 2:.4f}")
