r"""Theta functions with real characteristics.

.. math::

    \vartheta_{\alpha,\beta}(z, w) = \sum_{l\in\mathbb{Z}}
        \exp\bigl(\pi i (l+\alpha)^2 w + 2\pi i (l+\alpha)(z+\beta)\bigr)

Series are summed in a fixed symmetric order around the dominant index and
accumulated with :func:`math.fsum` on the real and imaginary parts, so the
result does not depend on platform summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError

__all__ = [
    "MIN_IM_TAU",
    "ThetaChar",
    "ModuliParams",
    "required_cutoff",
    "theta",
    "theta_dz",
    "jacobi_null_product",
    "lattice_factor",
]

#: Moduli with smaller imaginary part are rejected; their series converge too slowly.
MIN_IM_TAU = 0.05


@dataclass(frozen=True)
class ThetaChar:
    """Characteristic pair ``(alpha, beta)``; any finite reals."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("theta characteristics must be finite")


def required_cutoff(im_w: float, tol: float) -> int:
    """Smallest ``N`` with ``exp(-pi * im_w * (N - 1/2)**2) < tol / 10``."""
    if im_w <= 0:
        raise DomainError(f"Im(w) must be positive, got {im_w!r}")
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    r = math.sqrt(math.log(10.0 / tol) / (math.pi * im_w))
    n = max(1, math.ceil(r + 0.5))
    while math.exp(-math.pi * im_w * (n - 0.5) ** 2) >= tol / 10:
        n += 1
    return n


def _check_modulus(w: complex, what: str = "tau") -> complex:
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"{what} must be finite, got {w!r}")
    if w.imag <= 0:
        raise DomainError(f"{what} must lie in the upper half plane, got {w!r}")
    if w.imag < MIN_IM_TAU:
        raise DomainError(
            f"Im({what}) = {w.imag:.3g} is below the supported minimum {MIN_IM_TAU}")
    return w


@dataclass(frozen=True)
class ModuliParams:
    """Complex modulus plus global numerical controls.

    Parameters
    ----------
    tau : complex
        Modulus of the elliptic curve, ``Im tau >= MIN_IM_TAU``.
    tol : float
        Absolute truncation tolerance (relative to the largest series term).
    series_cutoff : int, optional
        Fixed cutoff ``|l - l0| <= series_cutoff``. When omitted the cutoff is
        derived per evaluation point from :func:`required_cutoff`. A fixed
        cutoff that is too small for ``tol`` makes evaluation raise
        :class:`TruncationError`.
    """

    tau: complex
    tol: float = 1e-15
    series_cutoff: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "tau", _check_modulus(self.tau))
        if not (self.tol > 0):
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if self.series_cutoff is not None and self.series_cutoff < 1:
            raise DomainError("series_cutoff must be a positive integer")

    @property
    def kappa(self) -> float:
        """``Im(-1/tau)``, the decay rate of Gaussians in ``x``."""
        return self.tau.imag / abs(self.tau) ** 2

    def cutoff_for(self, w: complex) -> int:
        """Cutoff to use for a series in modulus ``w``."""
        w = _check_modulus(w, "at_tau")
        need = required_cutoff(w.imag, self.tol)
        if self.series_cutoff is None:
            return need
        if self.series_cutoff < need:
            raise TruncationError(
                f"series_cutoff={self.series_cutoff} is too small for tol={self.tol:g} "
                f"at Im(w)={w.imag:.4g}; at least {need} terms per side are needed")
        return self.series_cutoff


def _ordered_indices(center: int, cutoff: int) -> np.ndarray:
    # center, center+1, center-1, center+2, ...
    k = np.arange(1, cutoff + 1)
    out = np.empty(2 * cutoff + 1, dtype=np.int64)
    out[0] = 0
    out[1::2] = k
    out[2::2] = -k
    return out + center


def _fsum_complex(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _theta_terms(char: ThetaChar, z: complex, params: ModuliParams, at_tau: complex):
    w = _check_modulus(at_tau, "at_tau")
    z = complex(z)
    cutoff = params.cutoff_for(w)
    # index of the largest term
    center = int(round(-char.alpha - z.imag / w.imag))
    shifted = _ordered_indices(center, cutoff) + char.alpha
    expo = 1j * math.pi * shifted**2 * w + 2j * math.pi * shifted * (z + char.beta)
    return shifted, np.exp(expo)


def theta(char: ThetaChar, z: complex, params: ModuliParams, at_tau: complex | None = None) -> complex:
    """Evaluate ``theta_{alpha,beta}(z, at_tau)``.

    ``at_tau`` defaults to ``params.tau``.
    """
    at_tau = params.tau if at_tau is None else at_tau
    _, terms = _theta_terms(char, z, params, at_tau)
    return _fsum_complex(terms)


def theta_dz(char: ThetaChar, z: complex, params: ModuliParams, at_tau: complex | None = None) -> complex:
    """``z``-derivative of :func:`theta`, differentiated term by term."""
    at_tau = params.tau if at_tau is None else at_tau
    shifted, terms = _theta_terms(char, z, params, at_tau)
    return _fsum_complex(2j * math.pi * shifted * terms)


def jacobi_null_product(params: ModuliParams, at_tau: complex | None = None) -> complex:
    """``-pi * theta_00(0) * theta_{0,1/2}(0) * theta_{1/2,0}(0)``.

    By Jacobi's derivative formula this equals
    ``theta_dz(ThetaChar(0.5, 0.5), 0, params, at_tau)``.
    """
    at_tau = params.tau if at_tau is None else at_tau
    t00 = theta(ThetaChar(0.0, 0.0), 0.0, params, at_tau)
    t01 = theta(ThetaChar(0.0, 0.5), 0.0, params, at_tau)
    t10 = theta(ThetaChar(0.5, 0.0), 0.0, params, at_tau)
    return -math.pi * t00 * t01 * t10


def lattice_factor(char: ThetaChar, z: complex, w: complex) -> complex:
    """Multiplier ``f`` with ``theta(z + w) = f * theta(z)``.

    Reindexing ``l -> l - 1`` in the series gives
    ``f = exp(-pi i w - 2 pi i (z + beta))``.
    """
    return complex(np.exp(-1j * math.pi * w - 2j * math.pi * (complex(z) + char.beta)))
