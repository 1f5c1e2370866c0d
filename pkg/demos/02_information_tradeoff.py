"""
Who knows more, Bob or Eve?
===========================

Bob's information falls with the error rate while Eve's rises. Where the
two curves cross, a key can no longer be distilled by one-way
classical processing.
"""

import numpy as np

from qeve.information import (
    gamma_for_ber,
    info_ab,
    info_eve_intensity,
    intensity_crossing,
    optimize_info,
)
from qeve.probe import intercept_resend

qs = np.linspace(0.0, 0.25, 11)
print(" q       I_AB     I_AE(gamma)  I_AE(opt)  intercept/resend")
for q in qs:
    ir_q, ir_i = intercept_resend(4 * q)
    best = optimize_info(q)
    print(f"{q:.3f}  {info_ab(q):.4f}   {info_eve_intensity(gamma_for_ber(q)):.4f}      "
          f"{best.i_ae:.4f}     {ir_i:.4f}")

q, i = intensity_crossing()
print(f"\nintensity-gamma curves cross at q = {q:.4f}, I = {i:.4f}")

best = optimize_info(q)
print(f"the best 2-D probe gets {best.i_ae:.4f} bits there, with {best.params}")

# beyond a quarter error rate the general probe passes half a bit
print("I_AE(opt) at q = 0.4:", round(optimize_info(0.4).i_ae, 4))
