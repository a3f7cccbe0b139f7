"""Noisy segmented quantum channels: dephasing and amplitude damping.

A channel of total length T is split into n identical segments of dwell time
dt = T / n, each applying the same single-qubit noise map.  The package
evaluates the bath-specific per-segment coherence factors (dephasing
exponents by frequency quadrature, damping amplitudes in closed form),
composes them across segments, and tabulates purity, fidelity, and
concurrence of the outputs — the quantities that improve as a fixed-length
channel is cut into shorter segments whenever the noise is not
time-independent Markovian.
"""

from .baths import (
    DEFAULT_QUAD,
    DampingRates,
    LorentzianSpectrum,
    MarkovClass,
    OhmicSpectrum,
    QuadratureConfig,
    QuadratureError,
    QuadratureWarning,
    SqueezedVacuumBath,
    ThermalBath,
    classify_markovianity,
    damping_rates,
    decoherence_squeezed,
    decoherence_thermal,
    decoherence_vacuum,
    dephasing_rate,
    lorentzian_amplitude,
    lorentzian_amplitude_by_ode,
    lorentzian_amplitude_derivative,
    rates_from_amplitude,
)
from .channels import (
    amplitude_damping_kraus,
    dephasing_factor,
    dephasing_kraus,
    segment_power,
    segmented_damping_output,
    segmented_dephasing_output,
    segmented_output_by_kraus,
    two_qubit_damping_state,
    two_qubit_dephasing_state,
    two_qubit_output,
)
from .metrics import (
    MetricSet,
    coherence_purity,
    concurrence,
    metrics_after_damping,
    metrics_after_dephasing,
    uhlmann_fidelity,
)
from .states import (
    KrausSet,
    TwoQubitPure,
    ValidationReport,
    apply_kraus,
    bell_pair,
    compose_segments,
    extend_first_qubit,
    plus_state,
    pure_qubit_density,
    reduced_state,
    require_valid_state,
    validate_state,
)
from .sweep import (
    CSV_HEADER,
    THREADS_ENV_VAR,
    ConsistencyError,
    SweepRow,
    SweepSpec,
    csv_text,
    format_number,
    run_sweep,
    segments_for,
    write_table,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_QUAD",
    "DampingRates",
    "LorentzianSpectrum",
    "MarkovClass",
    "OhmicSpectrum",
    "QuadratureConfig",
    "QuadratureError",
    "QuadratureWarning",
    "SqueezedVacuumBath",
    "ThermalBath",
    "classify_markovianity",
    "damping_rates",
    "decoherence_squeezed",
    "decoherence_thermal",
    "decoherence_vacuum",
    "dephasing_rate",
    "lorentzian_amplitude",
    "lorentzian_amplitude_by_ode",
    "lorentzian_amplitude_derivative",
    "rates_from_amplitude",
    "amplitude_damping_kraus",
    "dephasing_factor",
    "dephasing_kraus",
    "segment_power",
    "segmented_damping_output",
    "segmented_dephasing_output",
    "segmented_output_by_kraus",
    "two_qubit_damping_state",
    "two_qubit_dephasing_state",
    "two_qubit_output",
    "MetricSet",
    "coherence_purity",
    "concurrence",
    "metrics_after_damping",
    "metrics_after_dephasing",
    "uhlmann_fidelity",
    "KrausSet",
    "TwoQubitPure",
    "ValidationReport",
    "apply_kraus",
    "bell_pair",
    "compose_segments",
    "extend_first_qubit",
    "plus_state",
    "pure_qubit_density",
    "reduced_state",
    "require_valid_state",
    "validate_state",
    "CSV_HEADER",
    "THREADS_ENV_VAR",
    "ConsistencyError",
    "SweepRow",
    "SweepSpec",
    "csv_text",
    "format_number",
    "run_sweep",
    "segments_for",
    "write_table",
    "__version__",
]
