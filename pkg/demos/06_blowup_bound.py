"""A closed-form floor under the half-inverse energy.

For a trajectory that stays away from zero on a window (c, b) and has
Lipschitz constant C, the energy is at least

    -ln|y(b)| + ln|y(c)| + (ln|y(b)| - ln|y(c)|)^2 / (4 C^2 (b - c)).

Pushing y(c) toward zero sends the floor to infinity: any slope-bounded
trajectory with y(0) = 0 has infinite energy, so the problem pinned at the
left endpoint admits no bounded-slope minimizing sequence at all.
"""

import numpy as np

from lavlab import (Mesh, Trajectory, catalog, energy, graded_mesh,
                    halfinverse_lower_bound)

spec = catalog("half_inverse")

print("family y = max(t, eps): bound over (eps, 2 eps) vs quadrature energy")
print(f"{'eps':>8} {'bound':>14} {'energy':>14}")
for eps in (1e-2, 1e-4, 1e-6):
    tail = graded_mesh(2 * eps, 1.0, 256, 2.0)
    nodes = np.concatenate([[0.0, eps], tail.nodes])
    y = Trajectory(Mesh(nodes), np.maximum(nodes, eps))
    bound = halfinverse_lower_bound(y, (eps, 2 * eps), 1.0)
    e = energy(spec, y).value
    print(f"{eps:8.0e} {bound:14.5g} {e:14.5g}")

print("\nboth columns diverge like 1/eps: the blow-up in action.")
