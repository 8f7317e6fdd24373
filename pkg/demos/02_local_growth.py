# Local growth exponents at wavelength scale and their averages.
#
# Run: python3 demos/02_local_growth.py
import math

import numpy as np

from nodalgrowth.eigenbasis import eigenspace_basis, level_for_eigenvalue, random_eigenfunction, single_mode
from nodalgrowth.experiments import cos_mode_average_growth
from nodalgrowth.geometry import FLAT_TORUS, UNIT_SPHERE, sample_centers
from nodalgrowth.growth import GrowthConfig, average_growth, growth_batch, interval_growth_exponent

# one-dimensional warm-up: x^n doubles n + 1/q times on halving the interval
for n in (0, 1, 3):
    beta = interval_growth_exponent(lambda x: x**n, 0.5, 2.0)
    print(f"x^{n}: beta = {beta:.6f}, (n + 1/q) log 2 = {(n + 0.5) * math.log(2):.6f}")

# near a regular point with f(p) != 0 the function looks constant and the
# exponent is just the area ratio: (2/q) log(1/alpha)
f = single_mode(eigenspace_basis(FLAT_TORUS, 1), 1, 0)
tiny = growth_batch(f, [[0.0, 0.0]], 0.5, 0.05, [2.0])[2.0][0]
print(f"cos x at the origin, tiny disk: beta = {tiny.beta:.4f} (ln 2 = {math.log(2):.4f})")

# cos(m x): beta depends only on the phase m x, and averages to a constant
space = eigenspace_basis(FLAT_TORUS, level_for_eigenvalue(FLAT_TORUS, 100))
avg = average_growth(single_mode(space, 10, 0), GrowthConfig(), 2048, seed=4)
print(f"cos(10x): A = {avg.value:.4f} +- {avg.std_error:.4f}, exact {cos_mode_average_growth():.4f}")

# random eigenfunctions: the average stays put as lam grows
for surf, levels in ((FLAT_TORUS, (20, 100, 400)), (UNIT_SPHERE, (5, 15, 30))):
    for lv in levels:
        g = random_eigenfunction(eigenspace_basis(surf, lv), seed=lv)
        batch = growth_batch(g, sample_centers(surf, 512, lv), 0.5, 0.5, [2.0, 4.0, math.inf])
        means = {q: np.mean([r.beta for r in recs]) for q, recs in batch.items()}
        print(f"{surf.kind:6s} lam = {g.eigenvalue:6g}: "
              + ", ".join(f"A(q={q:g}) = {v:.3f}" for q, v in means.items()))
