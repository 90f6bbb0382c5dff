"""
Temporal overlaps and distinguishability settings
=================================================

Photons from the four input ports arrive at times ``t_j = x_j / c``. Their
Gaussian temporal modes overlap by ``exp(-dw^2 dt^2 / 4)`` in modulus, and
Gram-Schmidt in port order turns the four modes into an orthonormal internal
basis. Grouping ports that share an internal mode gives the
distinguishability settings ``{1,2,3,4}`` ... ``{1,1,1,1}``.
"""
import numpy as np

from fourphoton import gram_schmidt, overlap, setting_weights, wavelength_to_spec

spec = wavelength_to_spec(780e-9, 5e-9)
print(f"omega0 = {spec.omega0:.4e} rad/s, delta_omega = {spec.delta_omega:.4e} rad/s")
print(f"coherence length = {spec.coherence_length * 1e6:.1f} um")

###############################################################################
# Overlap as a function of path difference
# ----------------------------------------

for dx_um in (0, 20, 40, 80, 120, 200):
    s = spec.with_path_lengths([0, dx_um * 1e-6, 0, 0])
    o = overlap(s, 1, 2)
    print(f"dx = {dx_um:4d} um  |<t1|t2>|^2 = {abs(o) ** 2:.4f}")

###############################################################################
# Settings for a few path configurations
# --------------------------------------
# Only settings with non-negligible weight are listed.

for xs in ([0, 0, 0, 0], [0, 0, 440, 660], [0, 0, 0, 660], [0, 30, -30, 60], [0, 220, 440, 660]):
    s = spec.with_path_lengths(np.array(xs) * 1e-6)
    exp = gram_schmidt(s)
    w = {k: v for k, v in setting_weights(exp).labelled().items() if v > 1e-3}
    print(f"x = {xs} um, K = {exp.n_internal}: " + ", ".join(f"{k} {v:.3f}" for k, v in w.items()))
