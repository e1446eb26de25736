"""Energy and carbon footprint estimation for AI workloads on edge/IoT infrastructure."""

from .carbon import (
    AVERAGE_CI_DISCLAIMER,
    CarbonIntensitySeries,
    EnergyMixSnapshot,
    GridProfile,
    SourceCoefficients,
    build_ci_series,
    ci_at,
    emissions,
    itemize_emissions,
    mix_to_ci,
)
from .errors import ConfigurationError, CoverageError, EdgeCarbonError, ModelError, ValidationError
from .power import (
    FacilityProfile,
    PowerModel,
    PowerTrace,
    apply_pue,
    integrate_energy,
    power_at,
    sum_traces,
    task_power_trace,
)
from .scenario import (
    ResourceConfig,
    Scenario,
    ScenarioReport,
    SweepResult,
    compare_locations,
    compare_models,
    estimate,
    pareto_front,
    relative_reduction,
    sweep_resources,
    sweep_start_time,
)
from .units import (
    CarbonIntensity,
    CarbonMass,
    Energy,
    Power,
    TimeInterval,
    energy_from_power,
    format_timestamp,
    parse_timestamp,
    wh_to_joules,
)
from .workload import (
    ModelProfile,
    Task,
    TaskKind,
    WorkloadTrace,
    implied_mean_power,
    inference_duration,
    inference_energy,
    transfer_duration,
    transfer_energy,
)

__version__ = "0.1.0"
