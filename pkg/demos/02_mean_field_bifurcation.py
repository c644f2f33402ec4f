"""
The mean-field density map and its pitchfork
============================================

When neighbors are drawn from the whole torus the density obeys
``rho' = eps + (1 - 2 eps) M(rho)``.  Below a critical noise level two
symmetric stable fixed points exist; above it only ``rho = 1/2`` survives.
"""

from majority_pca.lattice import all_plus, run_replicas
from majority_pca.meanfield import DensityMap, critical_epsilon, find_fixed_points
from majority_pca.models import ModelSpec, UpdateParams, WholeGrid

for b in (1, 3, 5, 7, 9):
    print(f"b={b}: critical eps = {critical_epsilon(b):.6f}")

###############################################################################
# Fixed points for b = 5 across the transition.

for eps in (0.0, 0.1, 0.2, 0.23, 0.24, 0.3):
    rep = find_fixed_points(DensityMap(5, eps))
    print(f"eps={eps:4.2f}  " + "  ".join(f"{r:.4f}({s[0]})" for r, s in rep.points))

###############################################################################
# A finite torus with whole-grid sampling follows the map closely.

model = ModelSpec(WholeGrid(), UpdateParams(5, 0.1), "meanfield")
late = run_replicas(all_plus(120), model, 300, seed=0, replicas=4).late_mean()
print("simulated:", late.mean(), " map:", max(find_fixed_points(DensityMap(5, 0.1)).stable))
