"""Per-unit dq simulation of a self-excited synchronous generator.

The package turns nameplate and standard-test data into a two-axis
equivalent circuit, integrates the six flux-linkage states through switched
operating conditions (short circuits, load steps, open terminals), models
main-flux saturation with a two-constant hyperbolic curve, and closes the
loop of a rectified self-excitation supply to reproduce voltage build-up
from remanent flux.

Typical use::

    from sesgsim import (
        MachineParameters, derive_parameters, ExcitationConfig,
        IntegratorConfig, build_scenario, simulate,
    )

    d = derive_parameters(MachineParameters(...), overrides)
    ts = simulate(d, ExcitationConfig(), build_scenario("sudden_short_circuit"),
                  IntegratorConfig(duration=3.0))

or drive everything from a JSON file with :func:`load_config` and
:func:`run_from_config`, which is what the ``sim`` command does.
"""

from .config_io import (
    PLOT_CHANNELS,
    RunConfig,
    config_hash,
    config_to_dict,
    emit_plot,
    load_config,
    parse_config,
    read_csv,
    run_from_config,
    write_csv,
)
from .errors import (
    ConfigurationError,
    FitError,
    NumericalError,
    ParameterError,
    SaturationRangeError,
    SimError,
)
from .excitation import (
    DEFAULT_RECTIFIER_GAIN,
    ExcitationConfig,
    critical_rectifier_gain,
    excitation_emf,
    self_excitation_fixed_point,
)
from .integrator import IntegratorConfig, euler_step, rk4_step, simulate
from .model import (
    FluxState,
    ModelMatrices,
    OperatingCondition,
    assemble_matrices,
    assemble_reduced,
    electromagnetic_torque,
    extract_currents,
    inverse_park,
    open_terminal_field_modes,
    state_derivative,
    steady_state,
)
from .params import (
    DerivedParameters,
    MachineParameters,
    composite_reactances,
    derive_parameters,
    impedance_base,
    parallel,
    to_per_unit,
    validate_machine,
)
from .saturation import (
    FroelichCurve,
    equivalent_field_current,
    evaluate_occ,
    fit_froelich,
    rescale_saturated_parameters,
    saturated_xmd,
)
from .scenarios import (
    COLUMNS,
    SCENARIOS,
    EnvelopeSummary,
    Event,
    ScenarioScript,
    TimeSeries,
    build_scenario,
    cycle_mean_envelope,
    envelope_metrics,
    fit_recovery_constant,
    peel_decay_constants,
)

__version__ = "0.1.0"

__all__ = [
    "COLUMNS",
    "DEFAULT_RECTIFIER_GAIN",
    "PLOT_CHANNELS",
    "SCENARIOS",
    "ConfigurationError",
    "DerivedParameters",
    "EnvelopeSummary",
    "Event",
    "ExcitationConfig",
    "FitError",
    "FluxState",
    "FroelichCurve",
    "IntegratorConfig",
    "MachineParameters",
    "ModelMatrices",
    "NumericalError",
    "OperatingCondition",
    "ParameterError",
    "RunConfig",
    "SaturationRangeError",
    "ScenarioScript",
    "SimError",
    "TimeSeries",
    "assemble_matrices",
    "assemble_reduced",
    "build_scenario",
    "composite_reactances",
    "config_hash",
    "config_to_dict",
    "critical_rectifier_gain",
    "cycle_mean_envelope",
    "derive_parameters",
    "electromagnetic_torque",
    "emit_plot",
    "envelope_metrics",
    "equivalent_field_current",
    "euler_step",
    "evaluate_occ",
    "excitation_emf",
    "extract_currents",
    "fit_froelich",
    "fit_recovery_constant",
    "impedance_base",
    "inverse_park",
    "load_config",
    "open_terminal_field_modes",
    "parallel",
    "parse_config",
    "peel_decay_constants",
    "read_csv",
    "rescale_saturated_parameters",
    "rk4_step",
    "run_from_config",
    "saturated_xmd",
    "self_excitation_fixed_point",
    "simulate",
    "state_derivative",
    "steady_state",
    "to_per_unit",
    "validate_machine",
    "write_csv",
]
