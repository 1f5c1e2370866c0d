"""
qeve: eavesdropping on quantum key distribution with a single-qubit probe.

Information trade-offs, Bell tests, imperfect cloning and seeded
Monte-Carlo sessions, all on plain numpy arrays.
"""

from .states import (
    SINGLET,
    bloch_of,
    chsh_value,
    density_of,
    fidelity_pure,
    horodecki_m,
    partial_trace,
    pure_state_density,
)
from .probe import (
    IntensityGamma,
    ProbeParams,
    SymmetryAxis,
    apply_probe,
    ber,
    epr_joint,
    eve_joint,
    intercept_resend,
    probe_unitary,
    shrink_factor,
    symmetrized_bob,
)
from .information import (
    BinaryEnsemble,
    StrategyReport,
    accessible_info,
    binary_entropy,
    info_ab,
    info_eve_general,
    info_eve_intensity,
    intensity_crossing,
    optimize_info,
    posterior_up,
    strategy_report,
)
from .entanglement import (
    BellSetting,
    TILTED_SETTING,
    best_chsh,
    horodecki_threshold,
    q_bell,
    qpa_feasible,
    s_ab_intensity,
    s_ae_intensity,
    singlet_fraction,
)
from .cloning import (
    ClonerSpec,
    bloch_locus,
    broadcast_bell,
    clone,
    mean_fidelity,
    optimize_cloner,
    pgqcm,
    uqcm,
)
from .simulate import EveStrategy, SimConfig, SimResult, broadcast_sim, run, run_bb84, run_ekert

__version__ = "0.1.0"
