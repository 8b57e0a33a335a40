"""Stark tuning of donor electron spins in germanium.

Forward models for the quadratic Stark shift (spin-orbit and hyperfine),
the valley g-tensor picture behind it, a simulator for the echo-phase
measurement, and least-squares extraction of the Stark parameters.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import MillerDirection, Geometry, classify_geometry, projection_squared, to_unit_vector, valley_axes
from .gtensor import (
    RepopulationModel,
    ValleyGTensor,
    calibrate_kappa,
    effective_g_tensor,
    g_along,
    repopulation_weights,
    resonance_frequency,
    valley_tensor_in_crystal_frame,
)
from .stark import (
    AS75,
    AVERAGED,
    P31,
    DonorSpecies,
    FieldConfiguration,
    Source,
    StarkParameters,
    StarkRegistry,
    StrainConfiguration,
    bipolar_effective_shift,
    default_registry,
    donor,
    lookup,
    shift_with_strain,
    stark_shift,
)
from .experiment import (
    SAMPLES,
    EchoPhaseDataset,
    NoiseModel,
    PulseSequence,
    echo_amplitude,
    generate_dataset,
    hyperfine_projections,
    phase_from_shift,
)
from .fitting import FitOptions, FitResult, average_opposite_lines, global_fit
from .addressability import TunabilityReport, tunability
