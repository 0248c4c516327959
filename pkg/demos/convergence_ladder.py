"""
Convergence on the merge problem
================================

Relative L1 errors at t = 2.4 with the time step held at 2.5e-5 on every
mesh.  The first-order scheme meets shocks and kinks, so the observed rate
stays below one.

The four coarse meshes take about a minute on one core; set
``NETJUNCTION_THREADS`` to spread them over several.
"""

from netjunction import convergence_rates
from netjunction.io import write_table_csv
from netjunction.presets import TABLE_CELLS, convergence_study

reports = convergence_study(TABLE_CELLS, dt=0.25e-4, t=2.4)
rates = [None] + convergence_rates(reports)

print(f"{'N':>6} {'E_whole':>11} {'rate':>6} {'E_in':>11} {'E_out':>11}")
for rep, r in zip(reports, rates):
    rate = f"{r.whole:6.3f}" if r else "     -"
    print(f"{rep.cells_per_arc:6d} {rep.whole:11.4e} {rate} {rep.incoming:11.4e} {rep.outgoing:11.4e}")

write_table_csv("table1.csv", reports)
