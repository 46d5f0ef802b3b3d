"""Applications of interior field estimation: sound field synthesis by
(weighted) pressure matching and kernel-interpolation-based spatial active
noise control (ANC).

Both applications reuse the kernel interpolation machinery: pressures
sampled at a discrete set of points are extended to a region through the
kernel ``j0(k |r - r'|)``, giving a quadratic region weighting matrix that
replaces plain per-point squared errors.
"""

from __future__ import annotations

import numpy as np

from .specfun import sph_jn
from .wavefuncs import green


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------

def square_boundary_points(side, count, z=0.0, outward_shift=0.0):
    """`count` points regularly spaced along a square boundary in the z-plane.

    The square is axis-aligned, centered at the origin, with the given side
    length.  When `outward_shift` is nonzero, every second point is moved
    outward (perpendicular to its edge) by that distance.
    """
    if count % 4 != 0:
        raise ValueError("count must be a multiple of 4")
    per_edge = count // 4
    h = side / 2.0
    pts = []
    normals = []
    # walk the perimeter counterclockwise, one edge at a time
    for edge in range(4):
        for i in range(per_edge):
            frac = (i + 0.5) / per_edge
            along = -h + side * frac
            if edge == 0:
                pts.append([along, -h, z]); normals.append([0.0, -1.0, 0.0])
            elif edge == 1:
                pts.append([h, along, z]); normals.append([1.0, 0.0, 0.0])
            elif edge == 2:
                pts.append([-along, h, z]); normals.append([0.0, 1.0, 0.0])
            else:
                pts.append([-h, -along, z]); normals.append([-1.0, 0.0, 0.0])
    pts = np.asarray(pts)
    if outward_shift:
        normals = np.asarray(normals)
        pts[1::2] += outward_shift * normals[1::2]
    return pts


def square_grid(side, spacing, z=0.0, midpoint=False):
    """Grid of points covering a centered square in the z-plane.

    With ``midpoint=False`` the nodes include the square's boundary
    (``(side/spacing + 1)**2`` points), the natural choice for control and
    evaluation point sets.  With ``midpoint=True`` the nodes sit at cell
    centers, giving a second-order midpoint quadrature rule for region
    integrals.  Returns (points, cell_area).
    """
    if midpoint:
        n = int(round(side / spacing))
        ax = -side / 2.0 + spacing * (np.arange(n) + 0.5)
    else:
        n = int(round(side / spacing)) + 1
        ax = np.linspace(-side / 2.0, side / 2.0, n)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([X, Y, np.full_like(X, z)], axis=-1).reshape(-1, 3)
    return pts, spacing * spacing


def transfer_matrix(src_pos, pts, k):
    """Free-field transfer functions G[n, l] = g_l(r_n) = G(r_n; r_l)."""
    src_pos = np.asarray(src_pos, dtype=float)
    pts = np.asarray(pts, dtype=float)
    return np.stack([green(pts, s, k) for s in src_pos], axis=-1)


# ---------------------------------------------------------------------------
# Kernel region weighting
# ---------------------------------------------------------------------------

def kernel_vector(points, r, k):
    """kappa(r) with entries j0(k |r - points_n|); r may be (..., 3)."""
    d = np.linalg.norm(np.asarray(r, float)[..., None, :] - points, axis=-1)
    return sph_jn(0, k * d)


def region_weighting(points, region_pts, cell_measure, k, reg):
    """Quadratic region weighting matrix for pressures sampled at `points`.

    ``W = P^H [ \\int kappa(r)^* kappa(r)^T dV ] P`` with
    ``P = (K + reg I)^{-1}``; the integral over the target region is
    approximated by the midpoint rule on `region_pts` with cell measure
    `cell_measure`.  Used both for weighted pressure matching (points =
    control points) and spatial ANC (points = error microphones).
    """
    points = np.asarray(points, dtype=float)
    K = kernel_vector(points, points, k)
    P = np.linalg.inv(K + reg * np.eye(len(points)))
    kap = kernel_vector(points, np.asarray(region_pts, float), k)  # (Q, M)
    inner = cell_measure * (kap.conj().T @ kap)
    return P.conj().T @ inner @ P


# ---------------------------------------------------------------------------
# Pressure matching
# ---------------------------------------------------------------------------

def pm_drive(G, u_des, eta):
    """Pressure-matching driving signals (G^H G + eta I)^{-1} G^H u_des."""
    G = np.asarray(G, dtype=complex)
    u_des = np.asarray(u_des, dtype=complex).reshape(-1)
    L = G.shape[1]
    return np.linalg.solve(G.conj().T @ G + eta * np.eye(L), G.conj().T @ u_des)


def wpm_drive(G, u_des, eta, W):
    """Weighted pressure matching, (G^H W G + eta I)^{-1} G^H W u_des.

    With W = I this reduces exactly to :func:`pm_drive`.
    """
    G = np.asarray(G, dtype=complex)
    W = np.asarray(W, dtype=complex)
    u_des = np.asarray(u_des, dtype=complex).reshape(-1)
    L = G.shape[1]
    return np.linalg.solve(
        G.conj().T @ W @ G + eta * np.eye(L), G.conj().T @ W @ u_des
    )


# ---------------------------------------------------------------------------
# Spatial ANC, frequency domain
# ---------------------------------------------------------------------------

def anc_cost(e, A):
    """Regional noise power estimate e^H A e (real part)."""
    e = np.asarray(e, dtype=complex).reshape(-1)
    return float(np.real(e.conj() @ np.asarray(A, dtype=complex) @ e))


def anc_error(W, G, d, x):
    """Error-microphone signals e = d + G W x."""
    y = np.asarray(W, dtype=complex) @ np.asarray(x, dtype=complex)
    return np.asarray(d, dtype=complex) + np.asarray(G, dtype=complex) @ y


def anc_gradient(W, G, A, d, x):
    """Gradient of e^H A e with respect to W^*: G^H A e x^H."""
    e = anc_error(W, G, d, x)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    G = np.asarray(G, dtype=complex)
    return np.outer(G.conj().T @ (np.asarray(A, complex) @ e), x.conj())


def anc_lms_run(G, A, d, x, mu, iters, W0=None, record_cost=False):
    """Frequency-domain LMS adaptation W <- W - mu G^H A e x^H.

    Returns the final filter and, optionally, the per-iteration cost (the
    cost is evaluated after each update).
    """
    G = np.asarray(G, dtype=complex)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    M, L = G.shape
    W = np.zeros((L, x.size), dtype=complex) if W0 is None else np.array(W0, dtype=complex)
    costs = []
    for _ in range(iters):
        W = W - mu * anc_gradient(W, G, A, d, x)
        if record_cost:
            costs.append(anc_cost(anc_error(W, G, d, x), A))
    if record_cost:
        return W, np.asarray(costs)
    return W


# ---------------------------------------------------------------------------
# Spatial ANC, time domain (kernel-weighted FxLMS)
# ---------------------------------------------------------------------------

def weighting_taps(A_of_freq, nfft, half_len):
    """Centered FIR truncation A(k), k = -K..K, of a frequency weighting.

    `A_of_freq` maps a frequency bin (in cycles/sample, 0..0.5) to an (M, M)
    weighting matrix; the inverse real-signal DFT over `nfft` bins is
    truncated to ``2*half_len + 1`` taps.  Returns an array of shape
    (2K+1, M, M) indexed by k + K.
    """
    freqs = np.fft.rfftfreq(nfft)
    spec = np.stack([A_of_freq(f) for f in freqs])  # (nfft//2+1, M, M)
    taps = np.fft.irfft(spec, n=nfft, axis=0)
    K = half_len
    out = np.concatenate([taps[-K:], taps[: K + 1]], axis=0)
    return out


def fxlms_weighted_run(G_fir, A_taps, x, d, mu, filt_len, W0=None):
    """Kernel-weighted FxLMS adaptation in the time domain.

    Parameters
    ----------
    G_fir : (J, M, L) secondary-path FIR filters.
    A_taps : (2K+1, M, M) truncated weighting filter A(k), k = -K..K.
    x : (T, R) reference signals; d : (T, M) primary noise at the error mics.
    mu : step size.  filt_len : control filter length I.

    Implements ``W_{n+1}(i) = W_n(i) - mu sum_j H(j)^T e(n-K) x(n-i-j)^T``
    with ``H(i) = sum_{j=0}^{2K} A(j) G(i-j)`` (indices of A shifted to
    0..2K), and returns (W, e_history).
    """
    G_fir = np.asarray(G_fir, dtype=float)
    A_taps = np.asarray(A_taps, dtype=float)
    x = np.atleast_2d(np.asarray(x, dtype=float).T).T  # (T, R)
    d = np.asarray(d, dtype=float)
    J, M, L = G_fir.shape
    two_k_plus_1 = A_taps.shape[0]
    K = (two_k_plus_1 - 1) // 2
    T, R = x.shape
    I = filt_len

    # H(i) = sum_{j=0}^{2K} A(j) G(i - j), i = 0..J+2K-1
    H = np.zeros((J + 2 * K, M, L))
    for i in range(J + 2 * K):
        for j in range(two_k_plus_1):
            if 0 <= i - j < J:
                H[i] += A_taps[j] @ G_fir[i - j]

    W = np.zeros((I, L, R)) if W0 is None else np.array(W0, dtype=float)
    y_hist = np.zeros((T, L))
    e_hist = np.zeros((T, M))
    for n in range(T):
        # secondary source outputs and error signals for this sample
        for i in range(min(I, n + 1)):
            y_hist[n] += W[i] @ x[n - i]
        e = d[n].copy()
        for i in range(min(J, n + 1)):
            e += G_fir[i] @ y_hist[n - i]
        e_hist[n] = e
        if n - K < 0:
            continue
        e_delay = e_hist[n - K]
        for i in range(I):
            upd = np.zeros((L, R))
            for j in range(J + 2 * K):
                idx = n - i - j
                if idx < 0:
                    break
                upd += np.outer(H[j].T @ e_delay, x[idx])
            W[i] -= mu * upd
    return W, e_hist
