"""Unimodular lattice maps acting on branes and on the cone class.

Everything in the group action uses Python integers only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .fukaya import BraneDescriptor
from .theta import ModuliParams

__all__ = ["LatticeMatrix", "act_on_brane", "reduction_matrix", "transport_cone_class",
           "transported_cone", "IDENTITY"]


@dataclass(frozen=True)
class LatticeMatrix:
    """Integer matrix ``[[g11, g12], [g21, g22]]`` with determinant 1."""

    g11: int
    g12: int
    g21: int
    g22: int

    def __post_init__(self):
        for v in (self.g11, self.g12, self.g21, self.g22):
            if not isinstance(v, int) or isinstance(v, bool):
                raise DomainError(f"lattice matrix entries must be int, got {v!r}")
        if self.det != 1:
            raise DomainError(f"determinant is {self.det}, not 1")

    @property
    def det(self) -> int:
        return self.g11 * self.g22 - self.g12 * self.g21

    def inverse(self) -> "LatticeMatrix":
        return LatticeMatrix(self.g22, -self.g12, -self.g21, self.g11)

    def __matmul__(self, other: "LatticeMatrix") -> "LatticeMatrix":
        return LatticeMatrix(
            self.g11 * other.g11 + self.g12 * other.g21,
            self.g11 * other.g12 + self.g12 * other.g22,
            self.g21 * other.g11 + self.g22 * other.g21,
            self.g21 * other.g12 + self.g22 * other.g22,
        )

    def apply(self, v: tuple[int, int]) -> tuple[int, int]:
        x, y = v
        return self.g11 * x + self.g12 * y, self.g21 * x + self.g22 * y

    def as_rows(self) -> list[list[int]]:
        return [[self.g11, self.g12], [self.g21, self.g22]]


IDENTITY = LatticeMatrix(1, 0, 0, 1)


def act_on_brane(g: LatticeMatrix, brane: BraneDescriptor) -> BraneDescriptor:
    """Pull a brane back along ``(x, y) -> g (x, y)``.

    The direction vector ``(n, a)`` becomes ``g^{-1} (n, a)``, reoriented so
    the rank is positive. Position and holonomy ``(p, q)`` are carried over
    unchanged.
    """
    n, a = g.inverse().apply((brane.n, brane.a))
    if n == 0:
        raise DomainError("the transformed brane is vertical and has no bundle mirror")
    if n < 0:
        n, a = -n, -a
    assert math.gcd(n, abs(a)) == 1, "unimodular maps preserve primitive vectors"
    return BraneDescriptor(n, a, brane.p, brane.q)


def reduction_matrix(n: int, a: int, m: int, b: int) -> LatticeMatrix:
    """``[[n, m-n], [a, b-a]]``, sending ``(1, 0) -> (n, a)`` and ``(1, 1) -> (m, b)``."""
    if b * n - a * m != 1:
        raise DomainError(f"bn - am = {b * n - a * m}; the reduction needs exactly 1")
    return LatticeMatrix(int(n), int(m - n), int(a), int(b - a))


def transported_cone(g: LatticeMatrix) -> tuple[int, int]:
    """Rank and degree of the cone after transport: ``g (2, 1) = (m+n, a+b)``."""
    return g.apply((2, 1))


def transport_cone_class(g: LatticeMatrix, mu: complex, nu: complex, params: ModuliParams) -> complex:
    """Cone class for the general pair reduced by ``g``.

    The moduli ``mu`` and ``nu`` travel with the objects unchanged, so the
    class is the one of the reduced pair.
    """
    from .cone import eta_class

    n, a = g.apply((1, 0))
    m, b = g.apply((1, 1))
    if b * n - a * m != 1:  # pragma: no cover - det g = 1 forces this
        raise DomainError("matrix is not a reduction matrix")
    if n < 1 or m < 1:
        raise DomainError(f"g sends the reduced pair to ranks ({n}, {m}); both must be positive")
    return eta_class(mu, nu, params)
