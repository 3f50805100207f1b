"""Aggregate frequency dynamics of coherent generators and their reduced-order models."""

from .errors import *  # noqa: F401,F403
from .lti import (
    PartialFractionTerms,
    StateSpace,
    Trajectory,
    TransferFunction,
    dc_gain,
    frequency_response,
    hinf_norm,
    minimal_state_space,
    partial_fractions,
    polynomial_divide,
    poles,
    solve_lyapunov,
    step_response,
    transfer_of,
)
from .metrics import ComparisonReport, ErrorTriple, compare_models, hinf_diff, inertia_sweep, step_error_norms
from .network import (
    CoherentGroup,
    DroopInverter,
    NetworkSpec,
    Swing,
    SwingTurbine,
    aggregate_turbine,
    band_constants,
    coherence_gap,
    coherent_aggregate,
    coi_trajectory,
    generator_transfer,
    lemma2_bound,
    network_response,
)
from .reduction import (
    W_CL,
    W_TB,
    EquivalentGenerator,
    FrequencyWeight,
    ReductionMethod,
    fw_balanced_truncation,
    interpret_reduced,
    match_dc,
    reduce_closed_loop_path,
    reduce_turbine_path,
)
from .scenario import Scenario, load_scenario, parse_scenario

__version__ = "0.1.0"
