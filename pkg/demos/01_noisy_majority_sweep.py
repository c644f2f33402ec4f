"""
Order and disorder in a random-box majority voter
==================================================

Each cell draws 5 neighbors (with replacement) from the 5 x 5 box around it,
takes their majority, and flips the result with probability ``eps``.
Starting from all ``+``, the late-time density of ``+`` stays high at small
``eps`` and relaxes to 1/2 once the noise is large enough.
"""

import numpy as np

from majority_pca.lattice import all_plus, run_replicas
from majority_pca.models import build_model

R = 120
steps = 400          # equilibrium is reached well within 100 steps
replicas = 2

print(" eps    density   std.err")
for eps in (0.10, 0.15, 0.175, 0.20, 0.225, 0.30):
    model = build_model({"name": "intermediate-fixed", "b": 5, "l": 5, "epsilon": eps})
    late = run_replicas(all_plus(R), model, steps, seed=1, replicas=replicas).late_mean()
    print(f"{eps:5.3f}  {late.mean():8.4f}  {late.std(ddof=1) / np.sqrt(replicas):8.1e}")

###############################################################################
# The same sweep from the command line, with 8 replicas and 1000 steps:
#
#   majority-pca sweep --config sweep.json --out table.csv
#
# where sweep.json holds
# ``{"name": "intermediate-fixed", "b": 5, "l": 5, "R": 120, "steps": 1000,
#    "epsilons": [0.15, 0.175, 0.2, 0.225], "replicas": 8}``.
