"""Single-threaded RK4 integration kernels.

The network Hamiltonian is never formed densely: the only off-diagonal blocks
are the per-emitter qubit-filter controls g_j(t) and the filter-mode coupling
matrix G, so one right-hand side costs O(nq*N) in the one-excitation sector
and two thin matrix products in the two-excitation sector.  Controls arrive
pre-sampled at step nodes and midpoints.  State layout is
[q_0..q_{nq-1}, c_0..c_{nq-1}, psi_0..psi_{N-1}].
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _rhs_single(x, diag, Gc, GTc, g, out, nq):
    base = 2 * nq
    fm = np.dot(GTc, x[base:])        # filter <- mode drive, (nq,)
    for j in range(nq):
        out[j] = -1j * (diag[j] * x[j] + np.conj(g[j]) * x[nq + j])
        out[nq + j] = -1j * (diag[nq + j] * x[nq + j] + g[j] * x[j] + fm[j])
    mc = np.dot(Gc, x[nq:base])       # mode <- filter drive, (N,)
    for k in range(Gc.shape[0]):
        out[base + k] = -1j * (diag[base + k] * x[base + k] + mc[k])


@njit(cache=True)
def _record_single(traces, row, x, nq):
    norm = 0.0
    for j in range(nq):
        traces[row, j] = abs(x[j]) ** 2
        traces[row, nq + j] = abs(x[nq + j]) ** 2
        norm += traces[row, j] + traces[row, nq + j]
    pm = 0.0
    for k in range(2 * nq, x.shape[0]):
        pm += abs(x[k]) ** 2
    traces[row, 2 * nq] = pm
    traces[row, 2 * nq + 1] = norm + pm


@njit(cache=True)
def rk4_single(x0, diag, Gc, GTc, g_nodes, g_half, n_out, n_sub, dt, traces, snap_steps, snaps):
    nq = GTc.shape[0]
    D = x0.shape[0]
    x = x0.copy()
    k1 = np.empty(D, np.complex128)
    k2 = np.empty(D, np.complex128)
    k3 = np.empty(D, np.complex128)
    k4 = np.empty(D, np.complex128)
    xt = np.empty(D, np.complex128)

    _record_single(traces, 0, x, nq)
    si = 0
    if snap_steps.size > 0 and snap_steps[0] == 0:
        snaps[0] = x
        si = 1

    step = 0
    for i in range(n_out):
        for _ in range(n_sub):
            ga = g_nodes[step]
            gm = g_half[step]
            gb = g_nodes[step + 1]
            _rhs_single(x, diag, Gc, GTc, ga, k1, nq)
            for d in range(D):
                xt[d] = x[d] + 0.5 * dt * k1[d]
            _rhs_single(xt, diag, Gc, GTc, gm, k2, nq)
            for d in range(D):
                xt[d] = x[d] + 0.5 * dt * k2[d]
            _rhs_single(xt, diag, Gc, GTc, gm, k3, nq)
            for d in range(D):
                xt[d] = x[d] + dt * k3[d]
            _rhs_single(xt, diag, Gc, GTc, gb, k4, nq)
            for d in range(D):
                x[d] = x[d] + (dt / 6.0) * (k1[d] + 2.0 * (k2[d] + k3[d]) + k4[d])
            step += 1
        _record_single(traces, i + 1, x, nq)
        if si < snap_steps.size and snap_steps[si] == i + 1:
            snaps[si] = x
            si += 1
    return x


@njit(cache=True)
def _h_apply_double(M, diag, Gc, GTfull, g, nq, B):
    """B = H M blockwise.  GTfull is G^T zero-padded to (nq, D) so both
    matrix products run on contiguous operands."""
    D = M.shape[0]
    base = 2 * nq
    F = np.dot(GTfull, M)             # filter <- mode rows, (nq, D)
    Mc = np.empty((nq, D), np.complex128)
    for j in range(nq):
        for b in range(D):
            Mc[j, b] = M[nq + j, b]
    P = np.dot(Gc, Mc)                # mode <- filter rows, (N, D)
    for j in range(nq):
        cg = np.conj(g[j])
        gj = g[j]
        dq = diag[j]
        dc = diag[nq + j]
        for b in range(D):
            B[j, b] = dq * M[j, b] + cg * M[nq + j, b]
            B[nq + j, b] = dc * M[nq + j, b] + gj * M[j, b] + F[j, b]
    for k in range(D - base):
        dk = diag[base + k]
        for b in range(D):
            B[base + k, b] = dk * M[base + k, b] + P[k, b]


@njit(cache=True)
def _stage_fused_double(B, Msrc, Macc, Mdst, ca, cd, nq, mode):
    """One RK4 stage from B = H M_stage: k = -i (B + B^T), hard-core diagonal
    pinned, then the low-storage update.  mode 0: Macc = Msrc + ca k and
    Mdst = Msrc + cd k; mode 1: Macc += ca k and Mdst = Msrc + cd k;
    mode 2: Mdst = Macc + ca k.  Tiled so the transposed B read stays in
    cache; only upper-triangle pairs are visited (k is symmetric)."""
    D = B.shape[0]
    T = 64
    for I0 in range(0, D, T):
        I1 = min(I0 + T, D)
        for J0 in range(I0, D, T):
            J1 = min(J0 + T, D)
            for a in range(I0, I1):
                b0 = J0 if J0 > a else a
                for b in range(b0, J1):
                    k = -1j * (B[a, b] + B[b, a])
                    if a == b:
                        if a < nq:
                            k = 0.0 + 0.0j
                        if mode == 0:
                            Macc[a, a] = Msrc[a, a] + ca * k
                            Mdst[a, a] = Msrc[a, a] + cd * k
                        elif mode == 1:
                            Macc[a, a] += ca * k
                            Mdst[a, a] = Msrc[a, a] + cd * k
                        else:
                            Mdst[a, a] = Macc[a, a] + ca * k
                    else:
                        if mode == 0:
                            Macc[a, b] = Msrc[a, b] + ca * k
                            Macc[b, a] = Msrc[b, a] + ca * k
                            Mdst[a, b] = Msrc[a, b] + cd * k
                            Mdst[b, a] = Msrc[b, a] + cd * k
                        elif mode == 1:
                            Macc[a, b] += ca * k
                            Macc[b, a] += ca * k
                            Mdst[a, b] = Msrc[a, b] + cd * k
                            Mdst[b, a] = Msrc[b, a] + cd * k
                        else:
                            Mdst[a, b] = Macc[a, b] + ca * k
                            Mdst[b, a] = Macc[b, a] + ca * k


@njit(cache=True)
def _record_double(traces, row, M, nq):
    # occupations <n_a> = 2 (M M^dag)_{aa} = 2 * row sum of |M|^2
    D = M.shape[0]
    base = 2 * nq
    total = 0.0
    pm = 0.0
    for a in range(D):
        rs = 0.0
        for b in range(D):
            rs += abs(M[a, b]) ** 2
        total += rs
        if a < nq:
            traces[row, a] = 2.0 * rs
        elif a < base:
            traces[row, a] = 2.0 * rs
        else:
            pm += 2.0 * rs
    traces[row, base] = pm
    traces[row, base + 1] = total


@njit(cache=True)
def rk4_double(M0, diag, Gc, GTfull, g_nodes, g_half, n_out, n_sub, dt, traces):
    nq = GTfull.shape[0]
    D = M0.shape[0]
    M = M0.copy()
    B = np.empty((D, D), np.complex128)
    Macc = np.empty((D, D), np.complex128)
    Mt = np.empty((D, D), np.complex128)

    _record_double(traces, 0, M, nq)

    step = 0
    for i in range(n_out):
        for _ in range(n_sub):
            ga = g_nodes[step]
            gm = g_half[step]
            gb = g_nodes[step + 1]
            _h_apply_double(M, diag, Gc, GTfull, ga, nq, B)
            _stage_fused_double(B, M, Macc, Mt, dt / 6.0, 0.5 * dt, nq, 0)
            _h_apply_double(Mt, diag, Gc, GTfull, gm, nq, B)
            _stage_fused_double(B, M, Macc, Mt, dt / 3.0, 0.5 * dt, nq, 1)
            _h_apply_double(Mt, diag, Gc, GTfull, gm, nq, B)
            _stage_fused_double(B, M, Macc, Mt, dt / 3.0, dt, nq, 1)
            _h_apply_double(Mt, diag, Gc, GTfull, gb, nq, B)
            _stage_fused_double(B, M, Macc, M, dt / 6.0, 0.0, nq, 2)
            step += 1
        _record_double(traces, i + 1, M, nq)
    return M
