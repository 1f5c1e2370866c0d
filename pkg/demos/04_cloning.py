"""
Imperfect cloning and the two Bobs
==================================

Eve's probe with alpha = beta is a copier. The best such machine reaches
a mean fidelity of (8 + 3 sqrt 3)/16, the universal cloner 5/6. Feeding
the two outputs to two Bobs shows why neither can keep a Bell violation.
"""

import numpy as np

from qeve.cloning import (
    bloch_locus,
    broadcast_bell,
    copy_pair_covariance,
    mean_fidelity,
    optimize_cloner,
    pgqcm,
    uqcm,
)

opt = optimize_cloner()
print(f"best copier: alpha = {opt.alpha:.6f} (pi/12 = {np.pi / 12:.6f}), F = {opt.f_bar:.8f}")
print(f"relaxed alpha != beta search: F = {opt.relaxed_f_bar:.8f}")
print("universal cloner: F =", mean_fidelity(uqcm()))

# Bloch loci of the copy: circles for the symmetric machines, a lopsided curve otherwise
for spec in (pgqcm(), pgqcm(symmetrized=True), uqcm()):
    r = np.linalg.norm(bloch_locus(spec, 32), axis=1)
    print(f"{spec.label():28s} copy radius {r.min():.4f} .. {r.max():.4f}")

for spec in (pgqcm(symmetrized=True), uqcm()):
    s = broadcast_bell(spec)
    print(f"{spec.label():28s} S(A,B1) = {s.s_b1:.4f}  S(A,B2) = {s.s_b2:.4f}")

s = broadcast_bell(pgqcm(), search=True)
print(f"unsymmetrized copier, searched directions: {s.s_b1:.6f}, {s.s_b2:.6f}")

# the two Bobs' outcomes are anticorrelated beyond their marginals
print("cov(B1, B2) for the universal cloner:", copy_pair_covariance(uqcm(), 0.3))
