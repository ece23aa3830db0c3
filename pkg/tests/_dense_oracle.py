"""Reference propagators built by brute-force basis enumeration.

Everything here is deliberately independent of the package's structured
kernels: the Hamiltonian is assembled as a dense matrix over explicitly
enumerated occupation states, and propagation uses scipy integrators.  Only
small networks are tractable, which is the point; these are ground truth for
gate tests, not production code.
"""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm


def dense_h1(network, frame, g):
    """One-excitation Hamiltonian at a single control sample g (length nq)."""
    nq = network.n_emitters
    N = network.n_modes
    D = 2 * nq + N
    H = np.zeros((D, D), dtype=complex)
    for j, em in enumerate(network.emitters):
        H[j, j] = em.qubit_frequency - frame
        H[nq + j, nq + j] = em.filter_frequency - frame
        H[j, nq + j] = np.conj(g[j])
        H[nq + j, j] = g[j]
        for k in range(N):
            H[nq + j, 2 * nq + k] = network.couplings[k, j]
            H[2 * nq + k, nq + j] = network.couplings[k, j]
    for k in range(N):
        H[2 * nq + k, 2 * nq + k] = network.grid.frequencies[k] - frame
    return H


def pair_basis(network):
    """Ordered (a, b) site pairs with a <= b, qubit double occupancy excluded."""
    nq = network.n_emitters
    D = 2 * nq + network.n_modes
    pairs = []
    for a in range(D):
        for b in range(a, D):
            if a == b and a < nq:
                continue
            pairs.append((a, b))
    return pairs


def dense_h2(h1, pairs):
    """Two-excitation Hamiltonian via the symmetric-tensor projection.

    Pair state |a,b> = a_dag_a a_dag_b |0> normalized; its tensor
    representative is (e_a x e_b + e_b x e_a) / sqrt(2 (1 + delta_ab)), and
    H2 is the compression of h1 x I + I x h1 onto those vectors.
    """
    D = h1.shape[0]
    vecs = np.zeros((len(pairs), D * D), dtype=complex)
    for p, (a, b) in enumerate(pairs):
        v = np.zeros((D, D), dtype=complex)
        v[a, b] += 1.0
        v[b, a] += 1.0
        vecs[p] = (v / np.sqrt(2.0 * (1.0 + (a == b)))).ravel()
    Hbig = np.kron(h1, np.eye(D)) + np.kron(np.eye(D), h1)
    return vecs.conj() @ Hbig @ vecs.T


def pair_vector_from_matrix(M, pairs):
    """Physical pair amplitudes from the symmetric-matrix representation."""
    out = np.empty(len(pairs), dtype=complex)
    for p, (a, b) in enumerate(pairs):
        out[p] = M[a, a] if a == b else np.sqrt(2.0) * M[a, b]
    return out


def matrix_from_pair_vector(psi, pairs, D):
    M = np.zeros((D, D), dtype=complex)
    for p, (a, b) in enumerate(pairs):
        if a == b:
            M[a, a] = psi[p]
        else:
            M[a, b] = M[b, a] = psi[p] / np.sqrt(2.0)
    return M


def _controls_at(controls, t):
    return np.array(
        [0j if c is None else complex(c.sample(np.array([t]))[0]) for c in controls]
    )


def propagate_single_ivp(network, controls, frame, t0, t1, x0, t_eval=None, rtol=1e-12, atol=1e-14):
    def rhs(t, y):
        g = _controls_at(controls, t)
        H = dense_h1(network, frame, g)
        x = y[: len(x0)] + 1j * y[len(x0) :]
        dx = -1j * (H @ x)
        return np.concatenate([dx.real, dx.imag])

    y0 = np.concatenate([x0.real, x0.imag])
    sol = solve_ivp(rhs, (t0, t1), y0, t_eval=t_eval, rtol=rtol, atol=atol, method="DOP853")
    return sol.y[: len(x0)] + 1j * sol.y[len(x0) :]


def propagate_single_expm(network, g_const, frame, span, x0):
    H = dense_h1(network, frame, np.asarray(g_const, dtype=complex))
    return expm(-1j * H * span) @ x0


def propagate_double_ivp(network, controls, frame, t0, t1, psi0, pairs, rtol=1e-12, atol=1e-14):
    n = len(psi0)

    def rhs(t, y):
        g = _controls_at(controls, t)
        H2 = dense_h2(dense_h1(network, frame, g), pairs)
        psi = y[:n] + 1j * y[n:]
        dpsi = -1j * (H2 @ psi)
        return np.concatenate([dpsi.real, dpsi.imag])

    y0 = np.concatenate([psi0.real, psi0.imag])
    sol = solve_ivp(rhs, (t0, t1), y0, rtol=rtol, atol=atol, method="DOP853")
    return sol.y[:n, -1] + 1j * sol.y[n:, -1]
