"""Closed-form global-optimal design of beyond-diagonal reconfigurable
surfaces, with seeded Monte-Carlo experiments reproducing the
bound-achievement, scaling and complexity behavior of the synthesis."""

from .errors import (
    BdrisError,
    ConfigError,
    DegenerateChannelError,
    DegenerateInputError,
    InternalConsistencyError,
    InvalidGeometryError,
    InvalidInputError,
    UnsupportedSizeError,
)
from .linalg import EigenResult, SvdTriplet, dominant_svd, spectral_norm, sym_eig_desc
from .channel import (
    ChannelSet,
    ScenarioConfig,
    build_scenario,
    path_loss,
    sample_channel,
    transmissive_mask,
    trial_rng,
)
from .synthesis import (
    PowerBounds,
    PropositionReport,
    QuadFormSystem,
    ScatteringMatrix,
    build_T,
    build_quadform,
    received_power,
    synthesize_block,
    synthesize_blocks,
    synthesize_group,
    upper_bounds,
    verify_propositions,
)
from .mimo import (
    BeamformingPair,
    DesignReport,
    InitBounds,
    alternating_design,
    design_fc_no_direct,
    init_lower_bounds,
)
from .multiuser import (
    StackedSystem,
    design_fc_no_direct_mu,
    design_general_mu,
    equivalent_channel,
    optimal_precoder,
    stack_weighted,
    weighted_sum_power,
)
from .baselines import (
    OracleResult,
    ReactanceNetwork,
    brute_force_optimum,
    no_ris_power,
    reactance_to_scattering,
    single_connected_design,
)
from .experiments import (
    ExperimentResult,
    ResultRow,
    SweepConfig,
    load_config_file,
    parse_config_text,
    run_complexity_bench,
    run_constraint_suite,
    run_mimo_sweep,
    run_mu_sweep,
    run_oracle_suite,
    run_proposition_suite,
    run_siso_sweep,
    sweep_config_from_mapping,
)

__version__ = "0.1.0"
