"""
Two roads merging into one
==========================

Two incoming arcs feed one outgoing arc.  Arc 0 starts full on
``[-1/2, 0]``, arc 1 carries density 3/4 on ``[-1/4, 0]`` and the outgoing
arc is empty.  The junction cannot pass both queues at once, so a congested
plateau forms at the merge and drains over time.

We compare the Godunov run with the closed-form front-tracking solution.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import netjunction as nj
from netjunction.exact import MERGE, MergeSolution, merge_initial_condition, merge_network

# %%
# The junction trace while both queues are present solves a single balance
# equation; the bisection finds it at machine precision.

net = merge_network()
res = nj.solve(net, [1.0, 0.75], [0.0])
print(f"p1 = {res.p:.12f}   closed form {MERGE.p1:.12f}")
print(f"flux through the junction {res.total_flux:.12f}")

# %%
# A run with 600 cells per arc is quick and already close to the exact
# profile.  The outgoing fan leaves through the right end near t = 0.6,
# which the solver reports as an ``OuterBoundaryWarning``.

mesh = nj.build_mesh(net, 0.6 / 600)
traj = nj.run(net, mesh, merge_initial_condition(), 2.4, output_times=[1.2, 2.4], dt=0.5e-3)
exact = MergeSolution(net)

fig, axes = plt.subplots(2, 3, figsize=(12, 6), sharey=True)
for row, t in enumerate((1.2, 2.4)):
    state = traj.at(t)
    for h, ax in enumerate(axes[row]):
        x = mesh.centers(h)
        ax.plot(x, state.rho[h], lw=1.5, label="Godunov")
        ax.plot(x, exact(t, x, h), "k--", lw=1, label="exact")
        ax.set_title(f"{net.arcs[h].name}, t = {t}")
axes[0, 0].legend()
fig.tight_layout()
fig.savefig("merge_front_tracking.png", dpi=120)

# %%
# Relative L1 errors on the three arc groups.

for t in (1.2, 2.4):
    rep = nj.rel_l1_error(traj.at(t), exact, t)
    print(f"t={t}: whole {rep.whole:.3e}  incoming {rep.incoming:.3e}  outgoing {rep.outgoing:.3e}")

# %%
# Landmarks of the exact solution: arc 1 empties at t_F = 3/2 and arc 0 at
# t_H = 3/2 + C_G^2, which works out to 11/4.

print(f"t_F = {MERGE.t_f}, t_H = {MERGE.t_h:.12f}")
