"""
Bounding the probability of a minus site
========================================

Witness graphs explaining a ``-`` at the origin are grouped by shape (sites
and error sites per layer).  Their summed weight is controlled by iterating
``h(x) = (C x + k C / g)^k + eps``, which stays below ``tilde_x`` as long as
``eps`` is small enough.  Growing the range by an extra factor ``p`` per
step then gives a bound uniform in time.
"""

from majority_pca import bounds
from majority_pca.models import ModelSpec, ProofSchedule, RangeSchedule, ScheduledBox, UpdateParams
from majority_pca.oracles import minus_probability_mc

params = bounds.BoundParams(b=3, g=48.0)
eps = bounds.epsilon_ceiling(params)
print("tilde_x =", bounds.tilde_x(params), " largest eps =", eps)

###############################################################################
# Exact shape sums against the iterated map.

for t_m in range(4):
    exact = bounds.S_direct(t_m, eps, eps, bounds.power_schedule(48, 2), 3)
    it = bounds.iterate_epsilon(eps, t_m, params)[-1]
    print(f"t_m={t_m}: shape sum {exact:.5f} <= iterate {it:.5f}")

###############################################################################
# The certificate, and a Monte Carlo check on the scheduled model.

cert = bounds.certify_nonergodic(g=48, p=2, delta=0.1, b=3)
print(cert.to_json())

T = 5
schedule = RangeSchedule(ProofSchedule(48, 2, 2), T)
model = ModelSpec(ScheduledBox(schedule), UpdateParams(3, cert.params.epsilon))
est, se, n = minus_probability_mc(model, T, R=157, replicas=4, seed=0)
print(f"P(origin is - at T={T}) ~ {est:.5f} +- {se:.1e}  (bound {cert.bound})")
