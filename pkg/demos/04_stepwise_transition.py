"""
Step-wise transition and four-photon fringes
============================================

Starting from ``x = (0, 220, 440, 660) um`` with ``alpha = pi``, the path
lengths ``x2``, ``x3`` and ``x4`` are tuned to zero one after another. Once
four-photon interference sets in, the event probabilities oscillate with the
fast phase; the min/max over one period is reported as an envelope.
"""
import numpy as np

from fourphoton import event_order, scenario_stepwise
from fourphoton.source import format_pattern

rows = scenario_stepwise(points_per_leg=30)
s14, s21, s35 = (0, 1, 0, 3), (0, 2, 0, 2), (1, 1, 1, 1)

print(f"{'x2':>6} {'x3':>6} {'x4':>6}  {'setting':>10}  {'P(s14)':>9} {'s14 fringe':>11} {'s21 fringe':>11} {'s35 fringe':>11}")
for row in rows[::6] + [rows[-1]]:
    x = np.array(row.path_lengths) * 1e6
    print(f"{x[1]:6.1f} {x[2]:6.1f} {x[3]:6.1f}  {format_pattern(row.setting_weights.dominant()):>10}  "
          f"{row.probability(s14):9.5f} {row.envelope_width(s14):11.2e} {row.envelope_width(s21):11.2e} "
          f"{row.envelope_width(s35):11.2e}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    v = np.array([r.sweep_value for r in rows]) * 1e6
    fig, ax = plt.subplots(figsize=(6, 3))
    for name, ev in (("s35", s35), ("s14", s14), ("s21", s21)):
        k = event_order().index(ev)
        line, = ax.plot(v, [r.probability(ev) for r in rows], label=name)
        ax.fill_between(v, [r.envelope_min[k] for r in rows], [r.envelope_max[k] for r in rows],
                        color=line.get_color(), alpha=0.3)
    ax.set_xlabel("total path tuned [um]")
    ax.set_ylabel("probability")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig("stepwise_transition.png", dpi=120)
    print("wrote stepwise_transition.png")
