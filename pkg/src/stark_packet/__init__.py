"""Exact dynamics of a two-level emitter driven by a single-photon packet in a 1D guide."""

__version__ = "0.1.0"

from .model import (
    DomainError,
    InitialCondition,
    PacketSpec,
    PhysicalParams,
    TimeGrid,
    exponential_packet,
    load_packet_csv,
    make_params,
    packet_amplitude_at,
    packet_norm,
    tabulated_packet,
)
from .dynamics import (
    AmplitudeSeries,
    evolve_psi_ode,
    excitation_norm,
    field_backward,
    field_forward,
    psi_closed_form,
)
from .generator import (
    GeneratorSeries,
    decay_rate_closed_form,
    effective_color,
    interaction_energy,
    stark_shift_closed_form,
    stark_shift_numeric,
)
from .lindblad import DensityMatrix2, crosscheck_population, lindblad_rhs, propagate_master
from .observables import (
    difference_signal,
    intensities,
    interference_formula,
    monochromatic_ratios,
)
from .config import ScenarioConfig, emit_config, parse_config
from .runner import SimulationResult, emit_csv, run_fig2, run_fig3, run_scenario, run_sweep
