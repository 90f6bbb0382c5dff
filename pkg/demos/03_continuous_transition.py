"""
Continuous transition
=====================

Path lengths ``x = (0, y, -y, 2y)`` move all photons together from fully
distinguishable (``y = -180 um``) to fully indistinguishable (``y = 0``).
The fast phase stays fixed along this path, so no fringes appear.
"""
import numpy as np

from fourphoton import nonmonotonicity_report, scenario_continuous
from fourphoton.source import format_pattern

rows = scenario_continuous()
events = {"s35 (1,1,1,1)": (1, 1, 1, 1), "s14 (0,1,0,3)": (0, 1, 0, 3), "s21 (0,2,0,2)": (0, 2, 0, 2)}

print(f"{'y [um]':>8} " + " ".join(f"{k:>15}" for k in events) + "  dominant setting")
for row in rows[::15] + [rows[-1]]:
    vals = " ".join(f"{row.probability(e):15.6f}" for e in events.values())
    print(f"{row.sweep_value * 1e6:8.1f} {vals}  {format_pattern(row.setting_weights.dominant())}")

for name, ev in events.items():
    r = nonmonotonicity_report(rows, ev)
    print(f"{name}: max {r.max_value:.6f} at y = {r.argmax * 1e6:.0f} um, ends {r.endpoint_values[0]:.6f} / "
          f"{r.endpoint_values[1]:.6f}, interior max: {r.interior_max}, decreasing: {r.monotone_decreasing}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    y = np.array([r.sweep_value for r in rows]) * 1e6
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(5, 5))
    for label, w in rows[0].setting_weights.labelled().items():
        series = [r.setting_weights.labelled()[label] for r in rows]
        if max(series) > 0.05:
            ax1.plot(y, series, label=label)
    ax1.set_ylabel("setting weight")
    ax1.legend(fontsize=7)
    for name, ev in events.items():
        ax2.plot(y, [r.probability(ev) for r in rows], label=name)
    ax2.set_xlabel("y [um]")
    ax2.set_ylabel("probability")
    ax2.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig("continuous_transition.png", dpi=120)
    print("wrote continuous_transition.png")
