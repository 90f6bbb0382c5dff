"""
Fully distinguishable vs fully indistinguishable photons
========================================================

With all arrival times equal the engine reproduces the closed forms for the
five representative events; far apart it reproduces simple combinatorics.
The second part prints all 35 events for the three phase choices of the
event-landscape figure.
"""
import math

from fourphoton.cli import cmd_figure2, cmd_table1

for alpha, phi in ((0, 0), (0, math.pi), (math.pi / 4, 0)):
    print(f"\nalpha = {alpha:.4f}, phi = {phi:.4f}")
    print(f"{'event':>10} {'P_dist':>10} {'closed':>10} {'engine':>10}")
    for label, ev, pd, _, closed, engine in cmd_table1(alpha, phi).rows:
        print(f"{label:>4} {ev:>10} {pd:10.6f} {closed:10.6f} {engine:10.6f}")

###############################################################################
# All 35 events
# -------------

table = cmd_figure2()
print("\n" + " ".join(f"{c:>18}" for c in table.columns))
for row in table.rows:
    print(" ".join(f"{v:>18}" if isinstance(v, (str, int)) else f"{v:18.6f}" for v in row))

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    idx = [r[0] for r in table.rows]
    fig, ax = plt.subplots(figsize=(8, 3))
    for col, marker in zip(table.columns[2:], "Dso^"):
        ax.plot(idx, [r[table.columns.index(col)] for r in table.rows], marker=marker, linestyle="none", label=col)
    ax.set_xlabel("event index")
    ax.set_ylabel("probability")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig("figure2.png", dpi=120)
    print("wrote figure2.png")
