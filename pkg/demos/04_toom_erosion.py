"""
Toom's North-East-Center rule erases islands
============================================

Without noise, a finite island of ``-`` is eaten away from its north-east
corner.  With a little noise the all-``+`` phase persists.
"""

from majority_pca.lattice import all_plus, format_grid, run
from majority_pca.models import build_model

toom = build_model({"name": "toom-nec", "epsilon": 0.0})
grid = all_plus(10)
grid[3:7, 3:7] = -1
traj = run(grid, toom, 8, seed=0)
print("densities:", [round(d, 3) for d in traj.densities])
print(format_grid(traj.final))

noisy = build_model({"name": "toom-nec", "epsilon": 0.05})
print("late density at eps=0.05:", run(all_plus(100), noisy, 300, seed=1).late_mean())
