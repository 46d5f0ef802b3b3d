"""Sound field estimation from arbitrarily placed (possibly directional)
microphones.

Two regularized least-squares estimators are provided:

* Finite-dimensional: expand the field about a global origin ``r0`` in
  regular spherical wave functions up to degree ``N0`` (or in a finite set
  of plane waves) and solve a Tikhonov-regularized system for the
  coefficients.
* Infinite-dimensional: kernel ridge regression in the native space of
  interior fields; the representer of microphone m is
  ``v_m(r) = sum d_{m,nu,mu} phi_{nu,mu}(r - r_m)`` and the Gram matrix has
  the closed form built from the translation operator.  For omnidirectional
  microphones this collapses to the kernel ``j0(k |r - r'|)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specfun import num_coeffs, sph_jn
from .wavefuncs import (
    CoefficientSet,
    plane_wave,
    regular_swf_matrix,
    translation_matrix,
)


# ---------------------------------------------------------------------------
# Basis specifications (finite-dimensional route)
# ---------------------------------------------------------------------------

@dataclass
class SphericalBasis:
    """Regular spherical wave functions up to degree `order` about `origin`."""

    order: int
    origin: np.ndarray

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)

    @property
    def size(self):
        return num_coeffs(self.order)

    def eval_matrix(self, r, k):
        return regular_swf_matrix(self.order, np.asarray(r) - self.origin, k)


@dataclass
class PlaneWaveBasis:
    """Plane waves from directions `dirs` with phase reference `origin`."""

    dirs: np.ndarray
    origin: np.ndarray

    def __post_init__(self):
        self.dirs = np.asarray(self.dirs, dtype=float).reshape(-1, 3)
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)

    @property
    def size(self):
        return len(self.dirs)

    def eval_matrix(self, r, k):
        rel = np.asarray(r, dtype=float) - self.origin
        return np.exp(-1j * k * rel @ self.dirs.T)


def build_observation_matrix(mics, basis, k):
    """Matrix B with B[m, n] = (observation functional m)(basis function n).

    For the spherical basis the entries follow from the translation
    operator: the local expansion of ``phi_{nu,mu}(r - r0)`` about the
    microphone position is one column of ``T(r_m - r0)``, so row m is
    ``d_m^H T(r_m - r0)`` with degrees up to the microphone order.  For the
    plane-wave basis row m is ``gamma_m(x_n)^* e^{-ik x_n . (r_m - r0)}``.
    """
    M = len(mics)
    B = np.zeros((M, basis.size), dtype=complex)
    if isinstance(basis, PlaneWaveBasis):
        for m, mic in enumerate(mics):
            rel = mic.pos - basis.origin
            B[m] = mic.gamma_conj(basis.dirs) * np.exp(-1j * k * basis.dirs @ rel)
        return B
    for m, mic in enumerate(mics):
        T = translation_matrix(mic.pos - basis.origin, k, mic.order, basis.order)
        B[m] = mic.directivity_coeffs().conj() @ T
    return B


def solve_tikhonov(B, s, reg, noise_cov=None):
    """Tikhonov-regularized weighted least squares.

    Minimizes ``(s - B c)^H Sigma^{-1} (s - B c) + reg * ||c||^2`` and
    evaluates whichever of the two equivalent closed forms

        c = (B^H Sigma^{-1} B + reg I)^{-1} B^H Sigma^{-1} s
          = B^H (B B^H + reg Sigma)^{-1} s

    involves the smaller linear solve.  `noise_cov` defaults to identity.
    """
    B = np.asarray(B, dtype=complex)
    s = np.asarray(s, dtype=complex).reshape(-1)
    M, N = B.shape
    if noise_cov is None:
        noise_cov = np.eye(M)
    noise_cov = np.asarray(noise_cov, dtype=complex)
    if M <= N:
        A = B @ B.conj().T + reg * noise_cov
        return B.conj().T @ np.linalg.solve(A, s)
    Sinv_B = np.linalg.solve(noise_cov, B)
    A = B.conj().T @ Sinv_B + reg * np.eye(N)
    rhs = Sinv_B.conj().T @ s
    return np.linalg.solve(A, rhs)


def eval_finite(coeffs, basis, r, k):
    """Evaluate the finite-dimensional estimate at points `r`."""
    return basis.eval_matrix(r, k) @ np.asarray(coeffs, dtype=complex)


# ---------------------------------------------------------------------------
# Infinite-dimensional (kernel) route
# ---------------------------------------------------------------------------

def kernel_matrix(mics, k):
    """Gram matrix K of the microphone representers.

    ``K[m1, m2] = sum d_{m1}^* d_{m2} T^{(m2 block)}_{(m1 block)}(r_{m1} - r_{m2})``;
    for omni pairs this equals ``j0(k |r_{m1} - r_{m2}|)``.
    """
    M = len(mics)
    K = np.zeros((M, M), dtype=complex)
    all_omni = all(m.kind == "omni" for m in mics)
    if all_omni:
        pos = np.array([m.pos for m in mics])
        dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
        return sph_jn(0, k * dist).astype(complex)
    for m1 in range(M):
        d1 = mics[m1].directivity_coeffs().conj()
        for m2 in range(M):
            d2 = mics[m2].directivity_coeffs()
            T = translation_matrix(
                mics[m1].pos - mics[m2].pos, k, mics[m1].order, mics[m2].order
            )
            K[m1, m2] = d1 @ T @ d2
    return K


def solve_kernel(K, s, reg, noise_cov=None):
    """Representer weights ``alpha = (K + reg Sigma)^{-1} s``."""
    K = np.asarray(K, dtype=complex)
    s = np.asarray(s, dtype=complex).reshape(-1)
    M = K.shape[0]
    if noise_cov is None:
        noise_cov = np.eye(M)
    return np.linalg.solve(K + reg * np.asarray(noise_cov, dtype=complex), s)


def representer_matrix(mics, r, k):
    """Matrix V with V[i, m] = v_m(r_i) for evaluation points r_i."""
    r = np.asarray(r, dtype=float)
    pts = r.reshape(-1, 3)
    V = np.zeros((len(pts), len(mics)), dtype=complex)
    for m, mic in enumerate(mics):
        Phi = regular_swf_matrix(mic.order, pts - mic.pos, k)
        V[:, m] = Phi @ mic.directivity_coeffs()
    return V.reshape(r.shape[:-1] + (len(mics),))


def eval_kernel(alpha, mics, r, k):
    """Evaluate the kernel estimate ``sum_m alpha_m v_m(r)``."""
    return representer_matrix(mics, r, k) @ np.asarray(alpha, dtype=complex)


def extract_expansion(alpha, mics, origin, order, k):
    """Expansion coefficients of the kernel estimate about `origin`.

    Each representer, being a regular field, re-expands about the global
    origin through the translation operator; the estimate's coefficients are
    ``sum_m alpha_m T(origin - r_m) d_m`` truncated at the requested degree.
    """
    coeffs = np.zeros(num_coeffs(order), dtype=complex)
    for a, mic in zip(np.asarray(alpha, dtype=complex), mics):
        T = translation_matrix(
            np.asarray(origin, float) - mic.pos, k, order, mic.order
        )
        coeffs += a * (T @ mic.directivity_coeffs())
    return CoefficientSet(order=order, origin=origin, coeffs=coeffs)


def finite_kernel_matrix(mics, origin, order, k):
    """Gram matrix of the finite-dimensional model, ``B B^H``.

    ``K_finite[m1, m2] = sum_{n <= order} (F_{m1} p_n)(F_{m2} p_n)^*`` for
    the spherical basis about `origin`; it converges to
    :func:`kernel_matrix` as the truncation degree grows.
    """
    B = build_observation_matrix(mics, SphericalBasis(order=order, origin=origin), k)
    return B @ B.conj().T


def finite_to_infinite_gap(mics, origin, order, k):
    """Relative Frobenius gap between the truncated and exact Gram matrices."""
    Kf = finite_kernel_matrix(mics, origin, order, k)
    Ki = kernel_matrix(mics, k)
    return float(np.linalg.norm(Kf - Ki) / np.linalg.norm(Ki))
