"""Discretized physical model of the waveguide link.

A rectangular microwave waveguide of length ``l_wg`` supports standing-wave
modes with wavenumbers k_m = m*pi/l_wg and dispersion

    omega(k) = c * sqrt((pi/l1)**2 + k**2),

where ``l1`` is the long transverse dimension (WR90: 2.286 cm).  Each emitter
is a qubit + filter-resonator pair coupled to every waveguide mode with an
Ohmic strength; filters sit at one of the two waveguide ends, which fixes the
sign pattern of the couplings through the standing-wave mode functions
cos(k_m x) evaluated at x = 0 or x = l_wg.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .units import C_LIGHT


class ConfigurationError(ValueError):
    """Raised when a model or scenario description is physically invalid."""


@dataclass(frozen=True)
class WaveguideSpec:
    """Waveguide geometry and the mode-selection window.

    Parameters
    ----------
    length : float
        Waveguide length l_wg in meters.
    cross_section : float
        Long transverse dimension l1 in meters (sets the cutoff c*pi/l1).
    n_modes : int
        Number of discretized modes kept around `center_frequency`.
    center_frequency : float
        Window center in rad/s; the n_modes modes nearest to it are kept.
    light_speed : float
        Phase velocity constant c in m/s.
    """

    length: float
    cross_section: float
    n_modes: int
    center_frequency: float
    light_speed: float = C_LIGHT

    def __post_init__(self):
        if self.length <= 0 or self.cross_section <= 0:
            raise ConfigurationError("waveguide dimensions must be positive")
        if self.n_modes < 1:
            raise ConfigurationError("n_modes must be >= 1")

    @property
    def cutoff(self) -> float:
        """Cutoff angular frequency c*pi/l1 below which nothing propagates."""
        return self.light_speed * np.pi / self.cross_section


@dataclass(frozen=True)
class ModeGrid:
    """Discretized waveguide modes: wavenumbers, frequencies, group velocities.

    All arrays share the ordering of `mode_indices` (contiguous integers m,
    strictly increasing).
    """

    mode_indices: np.ndarray     # integer m, k_m = m*pi/l_wg
    wavenumbers: np.ndarray      # rad/m
    frequencies: np.ndarray      # rad/s
    group_velocities: np.ndarray  # m/s
    spec: WaveguideSpec

    def __len__(self) -> int:
        return len(self.mode_indices)

    @property
    def fsr(self) -> np.ndarray:
        """Per-mode free spectral range v_g * pi / l_wg (rad/s)."""
        return self.group_velocities * np.pi / self.spec.length

    def fsr_at(self, omega: float) -> float:
        """Free spectral range evaluated at frequency `omega` by interpolation."""
        return float(np.interp(omega, self.frequencies, self.fsr))

    def group_velocity_at(self, omega: float) -> float:
        k = wavenumber_of(self.spec, omega)
        return self.spec.light_speed**2 * k / omega


def dispersion(spec: WaveguideSpec, k):
    """omega(k) = c*sqrt((pi/l1)^2 + k^2)."""
    return spec.light_speed * np.hypot(np.pi / spec.cross_section, k)


def wavenumber_of(spec: WaveguideSpec, omega: float) -> float:
    """Inverse dispersion; requires omega above cutoff."""
    if omega <= spec.cutoff:
        raise ConfigurationError(
            f"frequency {omega:.4e} rad/s is below the waveguide cutoff {spec.cutoff:.4e}"
        )
    return np.sqrt((omega / spec.light_speed) ** 2 - (np.pi / spec.cross_section) ** 2)


def build_mode_grid(spec: WaveguideSpec) -> ModeGrid:
    """Select the n_modes waveguide modes nearest the configured window center.

    The integer window is contiguous because omega(m) is strictly increasing.

    Raises
    ------
    ConfigurationError
        If the window center is at or below cutoff, or the requested window
        does not fit between m = 1 and a sanity ceiling (5x the center
        frequency), which would indicate a nonsensical configuration.
    """
    if spec.center_frequency <= spec.cutoff:
        raise ConfigurationError(
            "mode window center must lie above the waveguide cutoff "
            f"({spec.center_frequency:.4e} <= {spec.cutoff:.4e} rad/s)"
        )
    k_c = wavenumber_of(spec, spec.center_frequency)
    m_c = k_c * spec.length / np.pi

    # candidate integer range generously bracketing the window
    half = spec.n_modes // 2 + 2
    m_lo = max(1, int(np.floor(m_c)) - half - 1)
    m_hi = int(np.ceil(m_c)) + half + 1
    m = np.arange(m_lo, m_hi + 1)
    w = dispersion(spec, m * np.pi / spec.length)

    order = np.argsort(np.abs(w - spec.center_frequency), kind="stable")
    chosen = np.sort(m[order[: spec.n_modes]])
    if len(chosen) < spec.n_modes or chosen[0] < 1:
        raise ConfigurationError("mode window does not fit above m = 1")
    # contiguity is guaranteed by monotone dispersion; assert as a cheap sanity check
    if not np.all(np.diff(chosen) == 1):
        raise ConfigurationError("selected mode window is not contiguous")

    w_max_sane = 5.0 * spec.center_frequency
    if dispersion(spec, chosen[-1] * np.pi / spec.length) > w_max_sane:
        raise ConfigurationError("requested n_modes exceeds the sane window around the center")

    k = chosen * np.pi / spec.length
    omega = dispersion(spec, k)
    v_g = spec.light_speed**2 * k / omega
    return ModeGrid(
        mode_indices=chosen,
        wavenumbers=k,
        frequencies=omega,
        group_velocities=v_g,
        spec=spec,
    )


NodeSide = Literal["left", "right"]


@dataclass
class EmitterSpec:
    """One qubit + filter-resonator pair at a waveguide end.

    Parameters
    ----------
    qubit_frequency : float
        Qubit energy delta_j in rad/s (calibration may detune it from the
        filter).
    filter_frequency : float
        Bare filter frequency omega_Rj in rad/s.
    kappa : float
        Bare filter decay rate into the waveguide, rad/s.
    node_side : {"left", "right"}
        Which waveguide end the filter sits at; decides the coupling parity.
    control : Control, optional
        Time-dependent qubit-filter coupling; None means g = 0.
    """

    qubit_frequency: float
    filter_frequency: float
    kappa: float
    node_side: NodeSide = "left"
    control: Optional[object] = None
    label: str = ""

    def __post_init__(self):
        if self.kappa <= 0:
            raise ConfigurationError("kappa must be positive")
        if self.node_side not in ("left", "right"):
            raise ConfigurationError(f"node_side must be 'left' or 'right', got {self.node_side!r}")


def coupling_matrix(grid: ModeGrid, emitters: Sequence[EmitterSpec], length: float) -> np.ndarray:
    """Ohmic filter-waveguide couplings G[m, j] (rad/s), modes x emitters.

    |G| = sqrt(kappa_j * v_g(k_m) * omega_m / (2 * omega_Rj * l_wg)), with the
    standing-wave sign (-1)^(m*s_j), s_j = 0 on the left end and 1 on the
    right end.
    """
    w_lo, w_hi = grid.frequencies[0], grid.frequencies[-1]
    for j, em in enumerate(emitters):
        if not (w_lo <= em.filter_frequency <= w_hi):
            raise ConfigurationError(
                f"emitter {j} filter frequency {em.filter_frequency:.4e} rad/s "
                f"outside the mode window [{w_lo:.4e}, {w_hi:.4e}]"
            )
    kap = np.array([em.kappa for em in emitters])
    w_r = np.array([em.filter_frequency for em in emitters])
    s = np.array([0 if em.node_side == "left" else 1 for em in emitters])
    mag = np.sqrt(
        kap[None, :]
        * grid.group_velocities[:, None]
        * grid.frequencies[:, None]
        / (2.0 * w_r[None, :] * length)
    )
    sign = np.where((grid.mode_indices[:, None] * s[None, :]) % 2 == 0, 1.0, -1.0)
    return mag * sign


@dataclass
class NetworkSpec:
    """Full link: waveguide modes plus the ordered emitter list and couplings."""

    waveguide: WaveguideSpec
    emitters: list
    grid: ModeGrid = None
    couplings: np.ndarray = None   # G[m, j]

    def __post_init__(self):
        if self.grid is None:
            self.grid = build_mode_grid(self.waveguide)
        if self.couplings is None:
            self.couplings = coupling_matrix(self.grid, self.emitters, self.waveguide.length)

    @property
    def n_emitters(self) -> int:
        return len(self.emitters)

    @property
    def n_modes(self) -> int:
        return len(self.grid)

    def flight_time(self, omega: Optional[float] = None) -> float:
        """One-way photon flight time l_wg / v_g at carrier `omega` (default: window center)."""
        if omega is None:
            omega = self.waveguide.center_frequency
        return self.waveguide.length / self.grid.group_velocity_at(omega)
