"""Coordinates with respect to the period lattice ``2*pi*(Z + tau*Z)``."""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi

#: Tolerance for deciding lattice membership of user-supplied floats.
LATTICE_TOL = 1e-9


def decompose(mu: complex, tau: complex) -> tuple[float, float]:
    """Real coefficients ``(p, q)`` with ``mu = p + q*tau``."""
    mu, tau = complex(mu), complex(tau)
    q = mu.imag / tau.imag
    p = mu.real - q * tau.real
    return p, q


def compose(p: float, q: float, tau: complex) -> complex:
    return complex(p + q * complex(tau))


def reduce_coefficients(p: float, q: float) -> tuple[float, float]:
    """Reduce both coefficients into ``[0, 2*pi)``.

    Values within ``LATTICE_TOL`` of ``2*pi`` wrap to ``0`` so that
    representatives of one class reduce to the same pair.
    """
    def red(c: float) -> float:
        r = math.fmod(c, TWO_PI)
        if r < 0:
            r += TWO_PI
        if TWO_PI - r < LATTICE_TOL:
            r = 0.0
        return r
    return red(p), red(q)


def reduce_modulus(mu: complex, tau: complex) -> complex:
    """Representative of ``mu`` whose lattice coefficients lie in ``[0, 2*pi)``."""
    p, q = reduce_coefficients(*decompose(mu, tau))
    return compose(p, q, tau)


def lattice_offset(delta: complex, tau: complex) -> tuple[float, float]:
    """Coefficients of ``delta`` measured in units of the lattice generators."""
    p, q = decompose(delta, tau)
    return p / TWO_PI, q / TWO_PI


def in_lattice(delta: complex, tau: complex, tol: float = LATTICE_TOL) -> bool:
    """Whether ``delta`` lies in ``2*pi*(Z + tau*Z)`` up to ``tol``."""
    a, b = lattice_offset(delta, tau)
    return abs(a - round(a)) < tol and abs(b - round(b)) < tol
