"""
Eve's single-qubit probe
========================

A qubit on the x-z great circle meets Eve's probe. We look at what Bob
and Eve are left holding, and at how symmetrizing the attack turns it
into a plain shrink of Bob's Bloch vector.
"""

import numpy as np

from qeve.probe import IntensityGamma, ProbeParams, apply_probe, ber, shrink_factor, symmetrized_bob
from qeve.states import bloch_of

# a measurement of intensity gamma: gamma = 0 does nothing, pi/2 is a full readout
gamma = np.pi / 3
p = IntensityGamma(gamma)
print("probe angles (alpha, beta):", p.params)

# Bob's state is untouched in the up/down basis ...
for theta in (0.0, np.pi):
    out = apply_probe(theta, p)
    print(f"theta={theta:.3f}  Bob Bloch {np.round(bloch_of(out.rho_bob), 6)}")

# ... but the left/right states get disturbed
out = apply_probe(np.pi / 2, p)
print("theta=pi/2  Bob Bloch", np.round(bloch_of(out.rho_bob), 6))
print("            Eve Bloch", np.round(bloch_of(out.rho_eve), 6))

# Averaging over four orthogonal symmetry axes shrinks every input by eta
thetas = np.linspace(0, 2 * np.pi, 7)
ratios = [np.linalg.norm(bloch_of(symmetrized_bob(t, p))) for t in thetas]
print("shrink over the circle:", np.round(ratios, 12))
print("eta =", shrink_factor(p), " BER =", ber(p), " (1 - cos g)/4 =", (1 - np.cos(gamma)) / 4)

# the general probe trades Bob's disturbance against Eve's copy
for alpha, beta in [(0.0, 0.0), (np.pi / 12, np.pi / 12), (0.2, 0.6)]:
    q = ProbeParams(alpha, beta)
    print(f"alpha={alpha:.3f} beta={beta:.3f}  eta={shrink_factor(q):.4f}  BER={ber(q):.4f}")
