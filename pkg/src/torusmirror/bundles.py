r"""Stable bundles :math:`E_{(a/n,\mu/n)}` on the elliptic curve.

A bundle is glued from the trivial bundle on the square by

* ``psi(x + 2*pi, y) = exp(i*a*y/n) * V @ psi(x, y)``
* ``psi(x, y + 2*pi) = U**(-a) @ psi(x, y)``

with ``U = diag(omega**k)``, ``omega = exp(2*pi*i/n)`` and ``V`` the cyclic
shift. The connection is ``d - (i/2pi) * s(x) dy`` with
``s(x) = (a/n) x + mu/n``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, StabilityError
from .lattice import TWO_PI, decompose, in_lattice, lattice_offset
from .theta import ModuliParams

__all__ = [
    "BundleDescriptor",
    "TransitionData",
    "ConnectionData",
    "IsoWitness",
    "make_bundle",
    "transition_data",
    "connection_data",
    "degree",
    "cocycle_check",
    "hom_dims",
    "iso_class_equal",
    "iso_witness",
    "dbar",
    "holomorphy_residual",
    "with_shift",
]


@dataclass(frozen=True)
class BundleDescriptor:
    """Rank ``n``, degree ``a`` and modulus ``mu = p + q*tau``."""

    n: int
    a: int
    mu: complex
    tau: complex
    p: float
    q: float

    @property
    def slope(self) -> float:
        return self.a / self.n

    def s(self, x):
        """Connection function ``(a/n) x + mu/n``."""
        return (self.a / self.n) * x + self.mu / self.n

    def to_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "mu_re": self.mu.real, "mu_im": self.mu.imag,
                "p": self.p, "q": self.q}


def make_bundle(n: int, a: int, mu: complex, params: ModuliParams) -> BundleDescriptor:
    """Descriptor for :math:`E_{(a/n,\\mu/n)}` over ``params.tau``.

    Raises :class:`StabilityError` unless ``gcd(n, |a|) == 1``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"rank must be a positive integer, got {n!r}")
    if int(a) != a:
        raise DomainError(f"degree must be an integer, got {a!r}")
    n, a = int(n), int(a)
    if math.gcd(n, abs(a)) != 1:
        raise StabilityError(f"gcd({n}, {a}) = {math.gcd(n, abs(a))}; only coprime (n, a) are stable")
    tau = params.tau
    mu = complex(mu)
    p, q = decompose(mu, tau)
    return BundleDescriptor(n=n, a=a, mu=mu, tau=tau, p=p, q=q)


def _roots(n: int, powers) -> np.ndarray:
    # exact reduction of the exponent keeps U**n == I to rounding
    k = np.mod(np.asarray(powers, dtype=np.int64), n)
    return np.exp(2j * np.pi * k / n)


@dataclass(frozen=True)
class TransitionData:
    """Gluing matrices of a rank ``n`` degree ``a`` bundle."""

    n: int
    a: int
    U: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)

    @property
    def omega(self) -> complex:
        return cmath.exp(2j * math.pi / self.n)

    def y_factor(self, y: float) -> complex:
        return cmath.exp(1j * self.a * y / self.n)

    def x_transition(self, y: float, wraps: int = 0) -> np.ndarray:
        """Matrix applied when ``x`` advances by ``2*pi``, at ``y + 2*pi*wraps``.

        The wrapped phase is the exact root of unity ``omega**(a*wraps)``, so
        large degrees do not lose digits to ``a * (y + 2*pi) / n``.
        """
        return self.y_factor(y) * complex(_roots(self.n, [self.a * wraps])[0]) * self.V

    def y_transition(self) -> np.ndarray:
        """``U**(-a)``, applied when ``y`` advances by ``2*pi``."""
        return np.diag(_roots(self.n, -self.a * np.arange(self.n)))


def transition_data(B: BundleDescriptor) -> TransitionData:
    n = B.n
    U = np.diag(_roots(n, np.arange(n)))
    V = np.roll(np.eye(n, dtype=complex), 1, axis=1)  # V[i, i+1] = 1
    return TransitionData(n=n, a=B.a, U=U, V=V)


@dataclass(frozen=True)
class ConnectionData:
    """Diagonal connection ``-(i/2pi) s(x) dy``."""

    n: int
    a: int
    mu: complex

    def coefficient(self, x):
        return -1j / TWO_PI * ((self.a / self.n) * x + self.mu / self.n)

    def curvature(self) -> complex:
        """Constant ``dx^dy`` coefficient of the curvature (times the identity)."""
        return -1j / TWO_PI * (self.a / self.n)


def connection_data(B: BundleDescriptor) -> ConnectionData:
    return ConnectionData(B.n, B.a, B.mu)


def degree(B: BundleDescriptor) -> float:
    """Integrate ``(i/2pi) tr F`` over the fundamental square.

    The curvature is constant, so the integral is the density times ``(2 pi)^2``.
    """
    density = (1j / TWO_PI) * B.n * connection_data(B).curvature()
    return float(np.real(density * TWO_PI**2))


def cocycle_check(B: BundleDescriptor, transitions: TransitionData | None = None,
                  ys: Iterable[float] | None = None, tol: float = 1e-14) -> bool:
    """Compare both gluing paths around the corner chart.

    Going ``x`` first then ``y`` gives ``U**(-a) @ (e^{i a y/n} V)``; going
    ``y`` first then ``x`` (where the chart coordinate has moved to
    ``y + 2*pi``) gives ``e^{i a (y+2pi)/n} V @ U**(-a)``.
    """
    T = transition_data(B) if transitions is None else transitions
    ys = np.linspace(0.0, TWO_PI, 9) if ys is None else ys
    Ua = T.y_transition()
    for y in ys:
        first = Ua @ T.x_transition(y)
        second = T.x_transition(y, wraps=1) @ Ua
        if np.max(np.abs(first - second)) > tol:
            return False
    return True


def _same_tau(B1: BundleDescriptor, B2: BundleDescriptor) -> None:
    if abs(B1.tau - B2.tau) > 1e-14 * max(1.0, abs(B1.tau)):
        raise DomainError(f"bundles live over different moduli: {B1.tau} vs {B2.tau}")


def iso_class_equal(B1: BundleDescriptor, B2: BundleDescriptor) -> bool:
    """Whether the two descriptors give isomorphic bundles."""
    _same_tau(B1, B2)
    if (B1.n, B1.a) != (B2.n, B2.a):
        return False
    return in_lattice(B2.mu - B1.mu, B1.tau)


def hom_dims(B1: BundleDescriptor, B2: BundleDescriptor) -> tuple[int, int]:
    """``(dim H^0, dim H^1)`` of ``Hom(B1, B2)``.

    For equal rank and degree ``h1`` is set equal to ``h0``, which is what
    Riemann-Roch forces when the Euler characteristic vanishes.
    """
    _same_tau(B1, B2)
    chi = B2.a * B1.n - B1.a * B2.n
    if (B1.n, B1.a) != (B2.n, B2.a):
        return max(chi, 0), max(-chi, 0)
    h0 = 1 if iso_class_equal(B1, B2) else 0
    return h0, h0


def dbar(f: Callable, x: float, y: float, tau: complex, h: float = 1e-3):
    """``d/dzbar`` of ``f(x, y)`` with a fourth-order centred stencil.

    ``z = x + tau*y`` up to scaling, so ``d/dzbar = (tau d/dx - d/dy)/(tau - conj(tau))``.
    """
    def d(g):
        return (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h)
    fx = d(lambda t: np.asarray(f(x + t, y)))
    fy = d(lambda t: np.asarray(f(x, y + t)))
    return (tau * fx - fy) / (tau - np.conj(tau))


def holomorphy_residual(f: Callable, s_diff: Callable, tau: complex,
                        points: Iterable[tuple[float, float]], h: float = 1e-3) -> float:
    r"""Max of ``|2 dbar f - i/(pi (conj(tau)-tau)) s_diff(x) f|`` over ``points``.

    ``s_diff(x)`` is ``s_target(x) - s_source(x)`` for a morphism ``f``.
    """
    k = 1j / (math.pi * (np.conj(tau) - tau))
    worst = 0.0
    for x, y in points:
        val = 2 * dbar(f, x, y, tau, h) - k * s_diff(x) * np.asarray(f(x, y))
        worst = max(worst, float(np.max(np.abs(val))))
    return worst


@dataclass(frozen=True)
class IsoWitness:
    r"""Explicit isomorphism ``Phi`` between two equal-slope bundles.

    ``Phi(x, y) = exp(-(k/n) i x + i I y + ((l-1)/n) a i y) * M`` where
    ``M[i, (i + l - 1) mod n] = omega**(-i k)`` and all other entries vanish.
    The nonzero entries form an upper-right block of size ``n-l+1`` and a
    lower-left block of size ``l-1``.
    """

    n: int
    a: int
    l: int
    I: int
    k: int
    matrix: np.ndarray = field(repr=False)

    @property
    def block_sizes(self) -> tuple[int, int]:
        return self.n - self.l + 1, self.l - 1

    def prefactor(self, x, y):
        return np.exp(-1j * self.k / self.n * x + 1j * self.I * y
                      + 1j * (self.l - 1) * self.a / self.n * y)

    def __call__(self, x: float, y: float) -> np.ndarray:
        return self.prefactor(x, y) * self.matrix


def iso_witness(B1: BundleDescriptor, B2: BundleDescriptor) -> IsoWitness | None:
    """Holomorphic isomorphism ``B1 -> B2`` (scale ``c = 1``), or ``None``."""
    if not iso_class_equal(B1, B2):
        return None
    n, a = B1.n, B1.a
    dp, dq = lattice_offset(B2.mu - B1.mu, B1.tau)
    P, k = int(round(dp)), int(round(dq))
    # P = n*I + a*(l-1) with 1 <= l <= n
    for l in range(1, n + 1):
        if (P - a * (l - 1)) % n == 0:
            I = (P - a * (l - 1)) // n
            break
    else:  # pragma: no cover - gcd(n, a) = 1 guarantees a solution
        raise AssertionError("no block offset solves the lattice condition")
    M = np.zeros((n, n), dtype=complex)
    rows = np.arange(n)
    M[rows, (rows + l - 1) % n] = _roots(n, -rows * k)
    return IsoWitness(n=n, a=a, l=l, I=I, k=k, matrix=M)


def with_shift(T: TransitionData, V: np.ndarray) -> TransitionData:
    """Copy of ``T`` with a replaced shift matrix (for negative tests)."""
    return replace(T, V=np.asarray(V, dtype=complex))
