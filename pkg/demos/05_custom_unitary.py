"""
Bringing your own multiport
===========================

Any 4x4 unitary can replace the Hadamard array. Here a random unitary is
written to the plain-text format, read back with validation, and used for
partially distinguishable photons. The twin terms can be switched off to
study the quadruplet alone.
"""
import tempfile
from pathlib import Path

import numpy as np

from fourphoton import load_unitary, simulate, wavelength_to_spec
from fourphoton.multiport import save_unitary

rng = np.random.default_rng(7)
z = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))) / np.sqrt(2)
q, r = np.linalg.qr(z)
u = q * (np.diag(r) / abs(np.diag(r)))

path = Path(tempfile.mkdtemp()) / "random.txt"
save_unitary(path, u)
print(path.read_text())
loaded = load_unitary(path)
print("max |U^dagger U - I| =", loaded.report.unitary_deviation)

spec = wavelength_to_spec(780e-9, 5e-9, [0, 30e-6, -30e-6, 60e-6])
full = simulate(spec, loaded.matrix)
quad = simulate(spec, loaded.matrix, components=("quadruplet",))
print(f"{'event':>10} {'full state':>11} {'quadruplet':>11}")
for (ev, p), (_, q4) in zip(full, quad):
    print(f"{str(ev):>10} {p:11.6f} {q4:11.6f}")
print(f"totals: {full.total():.12f} {quad.total():.12f}")
