"""
Monte-Carlo sessions
====================

Seeded BB84 and Ekert runs with different eavesdroppers. The random
numbers come from a counter-based generator, so the same seed gives the
same report however many threads do the work.
"""

import numpy as np

from qeve.cloning import uqcm
from qeve.simulate import EveStrategy, SimConfig, broadcast_sim, report_fields, run, to_json

n = 200_000
for text in ["none", "intercept:1", "intensity:1.0472:sym", "intensity:1.0472", "cloner:uqcm"]:
    r = run(SimConfig(n, seed=1, protocol="bb84", eve=EveStrategy.parse(text)))
    print(f"BB84  {text:22s} q={r.empirical_q:.4f}  per basis {np.round(r.per_basis_q, 4)}  "
          f"Eve guesses {r.eve_guess_rate:.3f}")

for gamma in (0.0, 0.6, 1.2):
    r = run(SimConfig(n, seed=2, protocol="ekert", eve=EveStrategy("intensity", gamma=gamma)))
    print(f"Ekert gamma={gamma:.1f}  S = {r.empirical_s:.3f} +/- {r.empirical_s_stderr:.3f}  "
          f"(closed form {np.sqrt(2) * (1 + np.cos(gamma)):.3f})")

res = broadcast_sim(SimConfig(n, seed=3, protocol="ekert"), uqcm())
print(f"two Bobs behind the universal cloner: S1={res.bob1.empirical_s:.3f} "
      f"S2={res.bob2.empirical_s:.3f} cov={res.bob_covariance:.4f}")

cfg = SimConfig(100_000, seed=42, eve=EveStrategy.parse("intensity:0.7854"))
print(to_json(report_fields(cfg, run(cfg))))
