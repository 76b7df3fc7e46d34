"""Simulation and verification lab for rank-one spiked heavy-tailed Wigner matrices."""

__version__ = "0.1.0"

from .tails import TailLaw, law_from_config
from .matrices import (
    SpikeVectorSpec,
    SpikedModel,
    build_wigner,
    realize_spike,
    perturbed_matrix,
    top_eigenvalues,
    max_entry_stat,
    truncation_split,
    trace_power,
    check_sandwich_even,
    check_sandwich_odd,
)
from .combinat import (
    catalan,
    sigma_conv,
    positive_conv,
    verify_shift_identity,
    r_tail,
    verify_conv_bounds,
    enumerate_cycle_classes,
    verify_multiplicity_bounds,
    s1,
    log_s1,
    s2,
    s_of_M,
)
from .limits import (
    f_bbp,
    f_inverse_upper,
    frechet_E_cdf,
    zeta_cdf,
    f_zeta_cdf,
    thm1_cdf,
    thm2_cdf,
    thm3_cdf,
    G1,
    G2,
    estimate_F,
    sup_h,
    sup_h1,
    sup_h2,
    LimitLaw,
)
from .montecarlo import (
    ExperimentConfig,
    TrialRecord,
    EmpiricalDistribution,
    derive_seed,
    run_experiment,
    ks_distance,
    quantile,
    convergence_sweep,
)
