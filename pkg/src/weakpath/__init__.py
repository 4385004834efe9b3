"""Sequential measurements on pre- and post-selected quantum systems.

Path amplitudes, von Neumann pointer readings, weak values, and a
brute-force composite simulation used as an oracle.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .hilbert import as_state, eigensystem, propagator, tensor
from .kernels import BACKEND
from .pathways import (
    MeasurementStep,
    PathAmplitudeSet,
    Scenario,
    SpectralDecomposition,
    conditional_path_probability,
    interference_intensities,
    path_amplitudes,
    postselect_outcome,
    spectral,
    spectral_from_basis,
    strong_outcome_probabilities,
    strong_sequence_probability,
)
from .profiles import PointerSpec
from .pointers import (
    ReadingDistribution,
    design_postselection,
    mean_momentum,
    mean_reading,
    observable_weak_value,
    reading_amplitude,
    reading_distribution,
    rectangular_mixture_weight,
    weak_expansion,
    weak_value,
)
from .composite import DiscretizedPointer, max_deviation, run_composite, sample_trials
from .scenarios import (
    build_cheshire,
    build_double_slit,
    build_three_box,
    builtin,
    load_scenario,
    parse_scenario,
    random_scenario,
    serialize_scenario,
)
