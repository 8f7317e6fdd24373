# Nodal sets of eigenfunctions on the flat torus and the round sphere.
#
# Run: python3 demos/01_nodal_sets.py
import math

import numpy as np
from scipy.special import roots_legendre

from nodalgrowth.eigenbasis import eigenspace_basis, level_for_eigenvalue, random_eigenfunction, single_mode
from nodalgrowth.geometry import FLAT_TORUS, UNIT_SPHERE
from nodalgrowth.nodal import extract_nodal_set, nodal_convergence

# cos(m x) vanishes on 2m vertical circles of length 2 pi, so H1 = 4 pi m
for m in (3, 7, 15):
    space = eigenspace_basis(FLAT_TORUS, level_for_eigenvalue(FLAT_TORUS, m * m))
    res = extract_nodal_set(single_mode(space, m, 0), 16)
    print(f"cos({m}x): {len(res.polylines)} curves, H1 / (4 pi m) = {res.total_length / (4 * math.pi * m):.6f}")

# zonal harmonics vanish on latitude circles at the roots of P_l
for ell in (2, 5, 12):
    res = extract_nodal_set(single_mode(eigenspace_basis(UNIT_SPHERE, ell), ell, 0), 16)
    x, _ = roots_legendre(ell)
    exact = 2 * math.pi * np.sum(np.sqrt(1 - x**2))
    print(f"Y_{ell}^0: H1 = {res.total_length:.5f}, latitude formula {exact:.5f}")

# a random element of a degenerate eigenspace: no closed form, so refine
f = random_eigenfunction(eigenspace_basis(FLAT_TORUS, 150), seed=1)
conv = nodal_convergence(f)
print(f"random torus mode, lam = {f.eigenvalue:g}")
for spw, length in zip(conv["levels"], conv["lengths"]):
    print(f"  {spw:3d} samples/wavelength: {length:.4f}")
print(f"  extrapolated {conv['richardson']:.4f} +- {conv['error']:.4f}; "
      f"H1 / sqrt(lam) = {conv['richardson'] / math.sqrt(f.eigenvalue):.3f}")

# flag cells where the sign pattern hints at a singular point
res = extract_nodal_set(f, 16)
print(f"  {len(res.suspected_singular_cells)} suspected singular cells of {res.n_segments} segments")
