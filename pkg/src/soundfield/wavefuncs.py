"""Solutions of the homogeneous/inhomogeneous Helmholtz equation and the
algebra that connects them: free-field Green's function, plane waves,
regular/singular spherical wave functions, expansion evaluation, translation
and rotation of expansion coefficients.

A field ``u`` regular around an origin ``r0`` is represented by coefficients
``c[nu**2+nu+mu]`` of the regular spherical wave functions:

    u(r) = sum_{nu,mu} c_{nu,mu} phi_{nu,mu}(r - r0)

with phi as in :func:`regular_swf`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import (
    degrees_orders,
    flat_index,
    gaunt,
    legendre,
    num_coeffs,
    sph_harm_matrix,
    sph_hn,
    sph_hn_all,
    sph_jn,
    sph_jn_all,
    wigner_D,
)


# ---------------------------------------------------------------------------
# Canonical solutions
# ---------------------------------------------------------------------------

def green(r, r_src, k):
    """Free-field Green's function e^{ik|r-rs|} / (4 pi |r-rs|).

    `r` may have shape (..., 3); `r_src` is a single 3-vector.
    """
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r - np.asarray(r_src, dtype=float), axis=-1)
    return np.exp(1j * k * d) / (4.0 * np.pi * d)


def plane_wave(r, x_inc, k):
    """Unit-amplitude plane wave e^{-i k x_inc . r} arriving from direction x_inc."""
    r = np.asarray(r, dtype=float)
    x_inc = np.asarray(x_inc, dtype=float)
    return np.exp(-1j * k * (r @ x_inc))


def _radial_dirs(r):
    r = np.asarray(r, dtype=float)
    rad = np.linalg.norm(r, axis=-1)
    safe = np.where(rad > 0, rad, 1.0)
    dirs = r / safe[..., None]
    # Direction of the zero vector is immaterial (radial factor handles it),
    # but it must be a valid unit vector for the harmonic evaluation.
    dirs = np.where(rad[..., None] > 0, dirs, np.array([0.0, 0.0, 1.0]))
    return rad, dirs


def regular_swf(nu, mu, r, k):
    """Regular spherical wave function phi_{nu,mu}(r).

    ``phi_{nu,mu}(r) = i^{-nu} j_nu(k|r|) Yhat_{nu,mu}(r/|r|)`` with
    ``phi_{0,0}(0) = 1`` and ``phi_{nu,mu}(0) = 0`` for nu > 0.
    """
    rad, dirs = _radial_dirs(r)
    ynorm = sph_harm_matrix(nu, dirs)[..., flat_index(nu, mu)]
    vals = (1j ** (-nu)) * sph_jn(nu, k * rad) * ynorm
    if nu == 0:
        vals = np.where(rad > 0, vals, 1.0 + 0.0j)
    else:
        vals = np.where(rad > 0, vals, 0.0 + 0.0j)
    return vals


def singular_swf(nu, mu, r, k):
    """Singular spherical wave function psi_{nu,mu}(r).

    ``psi_{nu,mu}(r) = (ik/4pi) i^{nu} h_nu(k|r|) Yhat_{nu,mu}(r/|r|)^*``
    with h_nu the spherical Hankel function of the first kind.
    """
    rad, dirs = _radial_dirs(r)
    ynorm = sph_harm_matrix(nu, dirs)[..., flat_index(nu, mu)].conj()
    return (1j * k / (4.0 * np.pi)) * (1j**nu) * sph_hn(nu, k * rad) * ynorm


def regular_swf_matrix(order, r, k):
    """All phi_{nu,mu}(r) for nu <= order; shape ``shape(r)[:-1] + ((order+1)**2,)``."""
    rad, dirs = _radial_dirs(r)
    Y = sph_harm_matrix(order, dirs)
    jn = sph_jn_all(order, k * rad)  # (order+1, ...)
    nu, _ = degrees_orders(order)
    radial = np.moveaxis(jn, 0, -1)[..., nu] * (1j ** (-nu.astype(float)))
    vals = radial * Y
    at_origin = rad == 0
    if np.any(at_origin):
        origin_row = np.zeros(num_coeffs(order), dtype=complex)
        origin_row[0] = 1.0
        vals = np.where(at_origin[..., None], origin_row, vals)
    return vals


def singular_swf_matrix(order, r, k):
    """All psi_{nu,mu}(r) for nu <= order, flat layout as for the regular set."""
    rad, dirs = _radial_dirs(r)
    Y = sph_harm_matrix(order, dirs).conj()
    hn = sph_hn_all(order, k * rad)
    nu, _ = degrees_orders(order)
    radial = np.moveaxis(hn, 0, -1)[..., nu] * (1j ** nu.astype(float))
    return (1j * k / (4.0 * np.pi)) * radial * Y


# ---------------------------------------------------------------------------
# Coefficient sets
# ---------------------------------------------------------------------------

@dataclass
class CoefficientSet:
    """Truncated expansion of a regular field about an origin."""

    order: int
    origin: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.coeffs.size != num_coeffs(self.order):
            raise ValueError(
                f"expected {num_coeffs(self.order)} coefficients for order "
                f"{self.order}, got {self.coeffs.size}"
            )

    def evaluate(self, r, k):
        """Evaluate the expansion at points `r` (shape (..., 3))."""
        Phi = regular_swf_matrix(self.order, np.asarray(r) - self.origin, k)
        return Phi @ self.coeffs

    def to_json(self):
        return json.dumps(
            {
                "order": self.order,
                "origin": [float(v) for v in self.origin],
                "re": [float(v) for v in self.coeffs.real],
                "im": [float(v) for v in self.coeffs.imag],
            }
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        coeffs = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(
            obj["im"], dtype=float
        )
        return cls(order=int(obj["order"]), origin=obj["origin"], coeffs=coeffs)


def plane_wave_coeffs(order, x_inc, k, origin=(0.0, 0.0, 0.0)):
    """Expansion coefficients of a plane wave about `origin`.

    About the origin of the wave's phase reference, a plane wave arriving
    from unit direction ``x_inc`` has coefficients ``Yhat_{nu,mu}(x_inc)^*``;
    moving the expansion origin multiplies all of them by the plane-wave
    value at the new origin.
    """
    origin = np.asarray(origin, dtype=float)
    phase = np.exp(-1j * k * float(np.dot(np.asarray(x_inc, dtype=float), origin)))
    coeffs = sph_harm_matrix(order, np.asarray(x_inc, dtype=float)).conj() * phase
    return CoefficientSet(order=order, origin=origin, coeffs=coeffs)


# ---------------------------------------------------------------------------
# Far-field (directional) representation
# ---------------------------------------------------------------------------

def sw_to_pw(coeffs):
    """Herglotz density of an interior field from its expansion coefficients.

    If ``u(r) = (1/4pi) \\int utilde(x) e^{-ik x.r} dS(x)`` then
    ``utilde(x) = (1/4pi) sum u_{nu,mu} Yhat_{nu,mu}(x)``; this returns the
    harmonic coefficients of ``utilde``, i.e. ``u_{nu,mu} / 4pi``.
    """
    return np.asarray(coeffs, dtype=complex) / (4.0 * np.pi)


def pw_to_sw(density_coeffs):
    """Inverse of :func:`sw_to_pw` (``u_{nu,mu} = 4pi * utilde_{nu,mu}``)."""
    return 4.0 * np.pi * np.asarray(density_coeffs, dtype=complex)


# ---------------------------------------------------------------------------
# Translation and rotation
# ---------------------------------------------------------------------------

def translation_matrix(displacement, k, order_out, order_in):
    """Regular-to-regular translation operator as a dense matrix.

    Entry ``T[(nu,mu), (nu',mu')]`` satisfies

        phi_{nu',mu'}(r + d) = sum_{nu,mu} T[(nu,mu), (nu',mu')] phi_{nu,mu}(r)

    for the displacement ``d``; equivalently
    ``T[(nu,mu),(nu',mu')] = (1/4pi) \\int Yhat_{nu,mu}(x)^* Yhat_{nu',mu'}(x)
    e^{-ik x.d} dS(x)``.  Rows cover degrees up to `order_out`, columns up to
    `order_in`.
    """
    n_out = num_coeffs(order_out)
    n_in = num_coeffs(order_in)
    phi = regular_swf_matrix(order_out + order_in, np.asarray(displacement, float), k)
    T = np.zeros((n_out, n_in), dtype=complex)
    for nu in range(order_out + 1):
        for mu in range(-nu, nu + 1):
            row = flat_index(nu, mu)
            for nup in range(order_in + 1):
                for mup in range(-nup, nup + 1):
                    mupp = mup - mu
                    if abs(mupp) > nu + nup:
                        continue
                    acc = 0.0 + 0.0j
                    lo = max(abs(nu - nup), abs(mupp))
                    if (lo + nu + nup) % 2 == 1:
                        lo += 1
                    for nupp in range(lo, nu + nup + 1, 2):
                        g = gaunt(nu, mu, nup, mup, nupp, mupp)
                        if g != 0.0:
                            acc += g * phi[flat_index(nupp, mupp)]
                    T[row, flat_index(nup, mup)] = acc
    return T


def translate_coeffs(cset, new_origin, k, order_out=None):
    """Re-expand a coefficient set about a new origin."""
    if order_out is None:
        order_out = cset.order
    d = np.asarray(new_origin, dtype=float) - cset.origin
    T = translation_matrix(d, k, order_out, cset.order)
    return CoefficientSet(order=order_out, origin=new_origin, coeffs=T @ cset.coeffs)


def rotate_coeffs(cset, rot, k=None):
    """Coefficients of ``u(R r)`` given those of ``u(r)`` about the origin.

    Uses ``phi_{nu,mu'}(R r) = sum_mu D^{(nu)}_{mu',mu}(R)^* phi_{nu,mu}(r)``
    (with D as defined in :func:`soundfield.specfun.wigner_D`), so each degree
    block transforms by the conjugate-transposed Wigner D-matrix.
    """
    if np.linalg.norm(cset.origin) > 0:
        raise ValueError("rotation of coefficients requires origin at 0")
    out = np.zeros_like(cset.coeffs)
    rot = np.asarray(rot, dtype=float)
    for nu in range(cset.order + 1):
        D = wigner_D(nu, rot)
        block = slice(nu * nu, (nu + 1) ** 2)
        out[block] = D.conj().T @ cset.coeffs[block]
    return CoefficientSet(order=cset.order, origin=cset.origin, coeffs=out)


# ---------------------------------------------------------------------------
# Addition theorem
# ---------------------------------------------------------------------------

def green_partial_wave(r, r_src, k, order):
    """Partial-wave expansion of the Green's function.

    ``G(r; r_src) = sum_{nu,mu} psi_{nu,mu}(r_src) phi_{nu,mu}(r)`` valid for
    ``|r| < |r_src|``; the sum over orders collapses to Legendre polynomials:

    ``G = (ik/4pi) sum_nu (2nu+1) j_nu(k|r|) h_nu(k|r_src|) P_nu(cos angle)``.
    """
    r = np.asarray(r, dtype=float)
    r_src = np.asarray(r_src, dtype=float)
    rad, dirs = _radial_dirs(r)
    rs = float(np.linalg.norm(r_src))
    ds = r_src / rs
    cosang = np.clip(dirs @ ds, -1.0, 1.0)
    out = np.zeros(rad.shape, dtype=complex)
    for nu in range(order + 1):
        out += (
            (2 * nu + 1)
            * sph_jn(nu, k * rad)
            * sph_hn(nu, k * rs)
            * legendre(nu, cosang)
        )
    return (1j * k / (4.0 * np.pi)) * out
