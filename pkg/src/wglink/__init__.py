"""wglink: multiplexed quantum state transfer through a microwave waveguide.

Simulation of one- and two-excitation dynamics of qubit + filter emitters
coupled to the discretized modes of a rectangular waveguide, plus the control
synthesis, tomography, cross-talk calibration, and multiplexing-capacity
machinery built on top of it.
"""

__version__ = "0.1.0"

from .model import (
    ConfigurationError,
    EmitterSpec,
    ModeGrid,
    NetworkSpec,
    WaveguideSpec,
    build_mode_grid,
    coupling_matrix,
    dispersion,
)
from .wavepackets import (
    Control,
    PhotonMode,
    TimeGrid,
    analytic_g0,
    analytic_g1,
    chirped_mode,
    emit_markov,
    default_grid,
    mode_fidelity,
    orthogonal_family,
    sech_mode,
    synthesize_control,
    time_reverse,
)

__all__ = [
    "ConfigurationError",
    "EmitterSpec",
    "ModeGrid",
    "NetworkSpec",
    "WaveguideSpec",
    "build_mode_grid",
    "coupling_matrix",
    "dispersion",
    "Control",
    "PhotonMode",
    "TimeGrid",
    "analytic_g0",
    "analytic_g1",
    "chirped_mode",
    "default_grid",
    "emit_markov",
    "mode_fidelity",
    "orthogonal_family",
    "sech_mode",
    "synthesize_control",
    "time_reverse",
]
