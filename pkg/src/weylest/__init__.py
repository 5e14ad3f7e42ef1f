"""Entanglement-free parameter estimation of discrete Weyl channels."""

__version__ = "0.1.0"

from .weyl import (
    WeylIndex,
    LabeledEigenbasis,
    Degenerate,
    weyl_matrix,
    commutation_phase,
    f_shift,
    eigensystem,
)
from .design import (
    DesignBlock,
    MeasurementConfig,
    InsufficientConfigError,
    build_design_block,
    commuting_cover,
    exact_rank,
    find_config,
    nondegenerate_set,
    precompute_B,
)
from .channels import (
    ChannelParams,
    apply_channel,
    compose,
    identity_channel,
    make_depolarizing,
    make_exp_corr_channel,
    transition_matrix,
    transition_probs,
)
from .simulate import (
    CountVector,
    RngStream,
    rng_stream,
    simulate_dpepc,
    simulate_dpepc_oracle,
    simulate_ope,
)
from .estimate import (
    Estimate,
    SingularMatrixError,
    IllConditionedError,
    correct_estimate,
    correct_to_simplex,
    dpepc_estimate,
    dpepc_estimate_block_mitigated,
    mitigate_depolarizing,
    mitigate_general,
    ope_estimate,
)
from .metrics import (
    TrialBatch,
    bias_norm,
    diamond_distance,
    loglog_slope,
    mean_diamond,
    summed_mse,
    summed_variance,
)
from .experiment import (
    ExperimentSpec,
    ResultRow,
    load_spec,
    read_csv,
    report,
    run_experiment,
    write_csv,
)
