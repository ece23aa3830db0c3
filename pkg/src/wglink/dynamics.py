"""Network propagation in the one- and two-excitation sectors.

Everything runs in the rotating frame of the mode-window center, so the
fastest phase in the integrator is set by the window half-width rather than
the 9 GHz carrier.  Fixed-step RK4 with step size from two stability rules:
kappa_max * dt <= 1e-3 and Delta_max * dt <= 0.1, where Delta_max is the
largest rotating-frame diagonal.  The caller's TimeGrid fixes the output
sampling; internal steps subdivide each output interval evenly.

Two-excitation states are square symmetric matrices M over the site basis
with Frobenius norm 1; the physical pair amplitude for sites a < b is
sqrt(2) M[a, b] and the (q_j, q_j) entries are pinned to zero (transmon
qubits cannot doubly occupy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .model import ConfigurationError, NetworkSpec
from .wavepackets import TimeGrid

__all__ = [
    "Trajectory",
    "evolve_single",
    "evolve_double",
    "snapshot_spectrum",
    "pair_initial",
    "single_initial",
    "mode_slice",
    "qubit_index",
    "filter_index",
]


def qubit_index(network: NetworkSpec, j: int) -> int:
    return j


def filter_index(network: NetworkSpec, j: int) -> int:
    return network.n_emitters + j


def mode_slice(network: NetworkSpec) -> slice:
    return slice(2 * network.n_emitters, 2 * network.n_emitters + network.n_modes)


@dataclass
class Trajectory:
    """Propagation record: per-site population traces plus the final state.

    `norm` is the total one-excitation norm, or the squared Frobenius norm in
    the two-excitation sector; both are conserved by the closed network and
    serve as the integration-quality monitor.
    """

    network: NetworkSpec
    grid: TimeGrid
    frame: float
    sector: str
    times: np.ndarray
    qubit_pop: np.ndarray
    filter_pop: np.ndarray
    mode_pop: np.ndarray
    norm: np.ndarray
    final_state: np.ndarray
    snapshots: dict = field(default_factory=dict)
    n_sub: int = 1
    dt_internal: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def final_mode_amplitudes(self) -> np.ndarray:
        if self.sector != "single":
            raise ConfigurationError("mode amplitudes are a one-excitation concept")
        return self.final_state[mode_slice(self.network)]


def _frame_diag(network: NetworkSpec, frame: float) -> np.ndarray:
    d_q = np.array([em.qubit_frequency - frame for em in network.emitters])
    d_c = np.array([em.filter_frequency - frame for em in network.emitters])
    d_p = network.grid.frequencies - frame
    return np.concatenate([d_q, d_c, d_p])


def _step_policy(network: NetworkSpec, diag: np.ndarray, grid: TimeGrid, dt_scale: float) -> tuple:
    kappa_max = max(em.kappa for em in network.emitters)
    delta_max = float(np.max(np.abs(diag)))
    dt_max = 1e-3 / kappa_max
    if delta_max > 0:
        dt_max = min(dt_max, 0.1 / delta_max)
    dt_max *= dt_scale
    n_sub = max(1, int(math.ceil(grid.dt / dt_max)))
    return n_sub, grid.dt / n_sub


def _resolve_controls(network: NetworkSpec, controls) -> list:
    if controls is None:
        controls = [em.control for em in network.emitters]
    controls = list(controls)
    if len(controls) != network.n_emitters:
        raise ConfigurationError(
            f"{len(controls)} controls for {network.n_emitters} emitters"
        )
    return controls


def _sample_controls(controls, grid: TimeGrid, n_sub: int, dt: float):
    """Complex control samples at internal step nodes and midpoints."""
    nq = len(controls)
    n_int = grid.n_steps * n_sub
    # exact endpoints: an ulp of accumulation overshoot past the control's
    # grid would sample g = 0 at the final node
    t_nodes = np.linspace(grid.t0, grid.t1, n_int + 1)
    t_half = 0.5 * (t_nodes[:-1] + t_nodes[1:])
    g_nodes = np.zeros((n_int + 1, nq), dtype=np.complex128)
    g_half = np.zeros((n_int, nq), dtype=np.complex128)
    for j, ctrl in enumerate(controls):
        if ctrl is None:
            continue
        g_nodes[:, j] = ctrl.sample(t_nodes)
        g_half[:, j] = ctrl.sample(t_half)
    return np.ascontiguousarray(g_nodes), np.ascontiguousarray(g_half)


def _snap_steps(grid: TimeGrid, snapshot_times) -> np.ndarray:
    idx = sorted({int(round((ts - grid.t0) / grid.dt)) for ts in snapshot_times})
    for i in idx:
        if i < 0 or i > grid.n_steps:
            raise ConfigurationError("snapshot time outside the propagation window")
    return np.asarray(idx, dtype=np.int64)


def single_initial(network: NetworkSpec, excited: int = 0) -> np.ndarray:
    """One excitation sitting on qubit `excited`."""
    x0 = np.zeros(2 * network.n_emitters + network.n_modes, dtype=np.complex128)
    x0[qubit_index(network, excited)] = 1.0
    return x0


def pair_initial(network: NetworkSpec, a: int = 0, b: int = 1) -> np.ndarray:
    """Two-excitation start: qubits `a` and `b` each hold one excitation."""
    if a == b:
        raise ConfigurationError("hard-core qubits cannot hold two excitations")
    D = 2 * network.n_emitters + network.n_modes
    M0 = np.zeros((D, D), dtype=np.complex128)
    M0[a, b] = M0[b, a] = 1.0 / np.sqrt(2.0)
    return M0


def evolve_single(
    network: NetworkSpec,
    controls=None,
    grid: Optional[TimeGrid] = None,
    *,
    frame: Optional[float] = None,
    initial: Optional[np.ndarray] = None,
    snapshot_times: Sequence[float] = (),
    dt_scale: float = 1.0,
) -> Trajectory:
    """Propagate one excitation through the full network."""
    if grid is None:
        raise ConfigurationError("evolve_single needs an explicit TimeGrid")
    controls = _resolve_controls(network, controls)
    if frame is None:
        frame = network.waveguide.center_frequency
    diag = _frame_diag(network, frame)
    n_sub, dt = _step_policy(network, diag, grid, dt_scale)
    g_nodes, g_half = _sample_controls(controls, grid, n_sub, dt)

    nq = network.n_emitters
    D = 2 * nq + network.n_modes
    x0 = single_initial(network) if initial is None else np.asarray(initial, dtype=np.complex128)
    if x0.shape != (D,):
        raise ConfigurationError(f"initial state must have shape ({D},)")

    Gc = np.ascontiguousarray(network.couplings.astype(np.complex128))
    GTc = np.ascontiguousarray(Gc.T)
    traces = np.empty((grid.n_steps + 1, 2 * nq + 2))
    snap_steps = _snap_steps(grid, snapshot_times)
    snaps = np.empty((len(snap_steps), D), dtype=np.complex128)

    final = _kernels.rk4_single(
        x0, diag, Gc, GTc, g_nodes, g_half, grid.n_steps, n_sub, dt, traces, snap_steps, snaps
    )
    return Trajectory(
        network=network,
        grid=grid,
        frame=frame,
        sector="single",
        times=grid.times,
        qubit_pop=traces[:, :nq].copy(),
        filter_pop=traces[:, nq : 2 * nq].copy(),
        mode_pop=traces[:, 2 * nq].copy(),
        norm=traces[:, 2 * nq + 1].copy(),
        final_state=final,
        snapshots={float(grid.t0 + i * grid.dt): snaps[n] for n, i in enumerate(snap_steps)},
        n_sub=n_sub,
        dt_internal=dt,
    )


def evolve_double(
    network: NetworkSpec,
    controls=None,
    grid: Optional[TimeGrid] = None,
    *,
    frame: Optional[float] = None,
    initial: Optional[np.ndarray] = None,
    dt_scale: float = 1.0,
) -> Trajectory:
    """Propagate two excitations; the state is the symmetric matrix M."""
    if grid is None:
        raise ConfigurationError("evolve_double needs an explicit TimeGrid")
    controls = _resolve_controls(network, controls)
    if frame is None:
        frame = network.waveguide.center_frequency
    diag = _frame_diag(network, frame)
    n_sub, dt = _step_policy(network, diag, grid, dt_scale)
    g_nodes, g_half = _sample_controls(controls, grid, n_sub, dt)

    nq = network.n_emitters
    D = 2 * nq + network.n_modes
    M0 = pair_initial(network) if initial is None else np.asarray(initial, dtype=np.complex128)
    if M0.shape != (D, D):
        raise ConfigurationError(f"initial state must have shape ({D}, {D})")
    if not np.allclose(M0, M0.T):
        raise ConfigurationError("two-excitation initial state must be symmetric")
    for j in range(nq):
        if M0[j, j] != 0:
            raise ConfigurationError(f"qubit {j} cannot hold two excitations")

    Gc = np.ascontiguousarray(network.couplings.astype(np.complex128))
    # G^T zero-padded over the qubit/filter columns keeps the kernel's
    # filter-row product on contiguous operands
    GTfull = np.zeros((nq, D), dtype=np.complex128)
    GTfull[:, 2 * nq :] = Gc.T
    traces = np.empty((grid.n_steps + 1, 2 * nq + 2))

    final = _kernels.rk4_double(
        np.ascontiguousarray(M0), diag, Gc, GTfull, g_nodes, g_half, grid.n_steps, n_sub, dt, traces
    )
    return Trajectory(
        network=network,
        grid=grid,
        frame=frame,
        sector="double",
        times=grid.times,
        qubit_pop=traces[:, :nq].copy(),
        filter_pop=traces[:, nq : 2 * nq].copy(),
        mode_pop=traces[:, 2 * nq].copy(),
        norm=traces[:, 2 * nq + 1].copy(),
        final_state=final,
        n_sub=n_sub,
        dt_internal=dt,
    )


def snapshot_spectrum(traj: Trajectory, time: float) -> tuple:
    """Mode frequencies and amplitudes from the stored snapshot nearest `time`."""
    if traj.sector != "single":
        raise ConfigurationError("spectra are read from one-excitation snapshots")
    if not traj.snapshots:
        raise ConfigurationError("trajectory carries no snapshots")
    t_near = min(traj.snapshots, key=lambda ts: abs(ts - time))
    psi = traj.snapshots[t_near][mode_slice(traj.network)]
    return traj.network.grid.frequencies, psi
