"""
Junction Riemann problems
=========================

Constant data on every arc give self-similar solutions: each arc carries
the scalar Riemann solution between its own state and the junction trace
``p*``.  The six shipped presets cover 2-1, 1-2 and 2-2 junctions.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from netjunction.analysis import sample_points
from netjunction.presets import reference_solution, run_preset

names = ["riemann-2-1-a", "riemann-2-1-b", "riemann-1-2-a", "riemann-1-2-b", "riemann-2-2-a", "riemann-2-2-b"]

# %%
# dx = 1e-3 keeps this to a few seconds; pass ``dx=None`` for the shipped
# 1e-4 mesh.

fig, axes = plt.subplots(len(names), 1, figsize=(8, 2.2 * len(names)))
for name, ax in zip(names, axes):
    res = run_preset(name, dx=1e-3)
    cfg, state = res.config, res.trajectory.final
    exact = reference_solution(cfg)
    print(f"{name}: p* = {exact.p_star:.12f}  E_whole = {res.reports[cfg.t_end].whole:.3e}")
    # lay the arcs side by side, incoming arcs first
    offset = 0.0
    for h, arc in enumerate(cfg.network.arcs):
        x = sample_points(state.mesh, h, "center")
        shift = offset - x[0]
        ax.plot(x + shift, state.rho[h], lw=1.2)
        ax.plot(x + shift, exact(state.t, x, h), "k--", lw=0.8)
        offset += arc.length * 1.1
    ax.set_title(name, fontsize=9)
    ax.set_ylim(-0.05, 1.05)
fig.tight_layout()
fig.savefig("junction_riemann_presets.png", dpi=110)
