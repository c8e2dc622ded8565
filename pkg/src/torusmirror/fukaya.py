r"""Lagrangian branes on the symplectic torus and their structure constants.

A brane of slope ``a/n`` is the line ``y = (a/n) x + p/n`` with a flat
``U(1)`` connection ``d - (i/2pi)(q/n) dx``. The complexified symplectic form
is ``-(1/tau) dx^dy``.

For the branes ``L0 = (0, p)``, ``L1 = (1, s)`` and ``Lh = (1/2, u/2)`` the
product ``m2`` sums over the triangles cut out by ``Lh``, ``L1`` and the
translates ``y = p + 2 pi k`` of ``L0``. Each triangle contributes
``exp((i/2pi) * sympl_area) * holonomy``. The boundary holonomy already
alternates in sign along the family, so no extra per-triangle sign is
applied; the sum equals ``theta_{(p+s-u)/2pi, 0}((v-q-t)/2pi, -1/tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonTransversalError, StabilityError
from .lattice import TWO_PI
from .theta import ModuliParams, ThetaChar, theta

__all__ = [
    "BraneDescriptor",
    "TriangleDatum",
    "make_brane",
    "intersections",
    "holonomy_factor",
    "triangles",
    "m2_constant",
    "m3_terms",
    "m3_nontransversal_constant",
]

PI = math.pi


@dataclass(frozen=True)
class BraneDescriptor:
    """Line ``y = (a/n) x + p/n`` with holonomy ``q/n``."""

    n: int
    a: int
    p: float
    q: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"brane rank must be positive, got {self.n}")
        if math.gcd(self.n, abs(self.a)) != 1:
            raise StabilityError(f"slope pair ({self.n}, {self.a}) is not primitive")

    @property
    def slope(self) -> float:
        return self.a / self.n

    def offset_class(self, x: float, y: float) -> float:
        """``(y - (a/n) x - p/n) / (2 pi / n)``; an integer on the brane."""
        return (y - self.slope * x - self.p / self.n) * self.n / TWO_PI


def make_brane(n: int, a: int, p: float, q: float) -> BraneDescriptor:
    return BraneDescriptor(int(n), int(a), float(p), float(q))


def intersections(L1: BraneDescriptor, L2: BraneDescriptor) -> list[tuple[float, float]]:
    """Intersection points of two branes in the fundamental square, sorted."""
    det = L2.a * L1.n - L1.a * L2.n
    if det == 0:
        raise NonTransversalError("branes with equal slopes do not meet transversally; see m3_nontransversal_constant")
    # lifts of brane i are y = slope_i x + (p_i + 2 pi j_i)/n_i; |det| classes of (j1, j2) suffice
    pts = {}
    span = abs(det) * (L1.n + L2.n) + 2
    dslope = L1.slope - L2.slope
    for j1 in range(-span, span + 1):
        for j2 in range(-span, span + 1):
            c1 = (L1.p + TWO_PI * j1) / L1.n
            c2 = (L2.p + TWO_PI * j2) / L2.n
            x = (c2 - c1) / dslope
            y = L1.slope * x + c1
            xr, yr = x % TWO_PI, y % TWO_PI
            xr = 0.0 if TWO_PI - xr < 1e-10 else xr
            yr = 0.0 if TWO_PI - yr < 1e-10 else yr
            key = (round(xr, 8), round(yr, 8))
            pts.setdefault(key, (xr, yr))
        if len(pts) == abs(det):
            break
    out = sorted(pts.values())
    if len(out) != abs(det):  # pragma: no cover - the search window covers every class
        raise AssertionError(f"found {len(out)} intersection points, expected {abs(det)}")
    return out


def holonomy_factor(brane: BraneDescriptor, edge, tol: float = 1e-10) -> complex:
    """Parallel transport ``exp((i/2pi)(q/n) dx)`` along a segment of the brane."""
    (x0, y0), (x1, y1) = edge
    for x, y in ((x0, y0), (x1, y1)):
        c = brane.offset_class(x, y)
        if abs(c - round(c)) > tol:
            raise DomainError(f"point ({x}, {y}) is not on the brane")
    if abs(round(brane.offset_class(x0, y0)) - round(brane.offset_class(x1, y1))) > 0:
        raise DomainError("edge endpoints lie on different lifts of the brane")
    return complex(np.exp(1j / TWO_PI * (brane.q / brane.n) * (x1 - x0)))


@dataclass(frozen=True)
class TriangleDatum:
    """One member of the triangle family contributing to ``m2``."""

    index: int
    vertices: tuple
    area_euclid: float
    area_sympl: complex
    holonomy: complex
    sign: int
    term: complex
    base_length: float

    def csv_row(self) -> list:
        return [self.index, self.area_euclid, self.area_sympl.real, self.area_sympl.imag,
                self.holonomy.real, self.holonomy.imag, self.sign, self.term.real, self.term.imag]


def _shoelace(pts) -> float:
    (x1, y1), (x2, y2), (x3, y3) = pts
    return 0.5 * abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))


def _config(config):
    if len(config) != 6:
        raise DomainError("config must be (p, q, s, t, u, v)")
    return tuple(float(c) for c in config)


def triangles(config, params: ModuliParams, K: int | None = None) -> list[TriangleDatum]:
    """Triangles bounded by ``Lh``, ``L1`` and the translates of ``L0``.

    ``e1 = Lh n L1`` is fixed; ``e2 = L1 n {y = p + 2 pi k}`` and
    ``e3 = Lh n {y = p + 2 pi k}``. The boundary is traversed
    ``e1 -> e3`` along ``Lh``, ``e3 -> e2`` along ``L0``, ``e2 -> e1`` along ``L1``.
    Family members are labelled so that the horizontal edge has signed length
    ``2 pi (index + frac)`` with ``frac`` in ``[0, 1)``; at the vanishing
    configuration this is ``pi (2 index + 1)``.
    """
    p, q, s, t, u, v = _config(config)
    tau = params.tau
    w = -1.0 / tau
    K = params.cutoff_for(w) + 2 if K is None else int(K)
    L0, L1, Lh = make_brane(1, 0, p, q), make_brane(1, 1, s, t), make_brane(2, 1, u, v)
    delta = (p + s - u) / TWO_PI
    shift = math.floor(delta + 1e-12)
    e1 = (u - 2 * s, u - s)
    out = []
    for n in range(-K, K + 1):
        k = n - shift
        yk = p + TWO_PI * k
        e2 = (yk - s, yk)
        e3 = (2 * yk - u, yk)
        area = _shoelace((e1, e2, e3))
        sympl = w * area
        hol = (holonomy_factor(Lh, (e1, e3)) * holonomy_factor(L0, (e3, e2))
               * holonomy_factor(L1, (e2, e1)))
        term = complex(np.exp(1j / TWO_PI * sympl) * hol)
        out.append(TriangleDatum(n, (e1, e2, e3), area, complex(sympl), hol, 1, term,
                                 abs(e3[0] - e2[0])))
    return out


def m2_constant(config, params: ModuliParams, route: str = "triangles") -> complex:
    """Structure constant of ``m2(e1 (x) e2)`` for the three-slope configuration.

    ``config = (p, q, s, t, u, v)``. ``route="triangles"`` sums the enumerated
    triangle family; ``route="closed_form"`` evaluates the theta series.
    """
    p, q, s, t, u, v = _config(config)
    if route == "triangles":
        terms = [tri.term for tri in triangles(config, params)]
        # symmetric order around the largest terms
        order = sorted(range(len(terms)), key=lambda i: abs(terms[i]))
        re = math.fsum(terms[i].real for i in order)
        im = math.fsum(terms[i].imag for i in order)
        return complex(re, im)
    if route == "closed_form":
        char = ThetaChar((p + s - u) / TWO_PI, 0.0)
        return theta(char, (v - q - t) / TWO_PI, params, -1.0 / params.tau)
    raise DomainError(f"unknown route {route!r}; expected 'triangles' or 'closed_form'")


def m3_terms(params: ModuliParams, cutoff: int | None = None):
    """``(l, edge_length, term)`` for the series of :func:`m3_nontransversal_constant`."""
    tau = params.tau
    w = -1.0 / tau
    cutoff = params.cutoff_for(w) if cutoff is None else int(cutoff)
    out = []
    for j in range(2 * cutoff + 1):
        l = (j + 1) // 2 if j % 2 else -(j // 2)
        edge = PI * (2 * l + 1)
        term = (-1) ** (l % 2) * edge * np.exp(1j / TWO_PI * w * (PI**2 / 2) * (2 * l + 1) ** 2)
        out.append((l, edge, complex(term)))
    return out


def m3_nontransversal_constant(params: ModuliParams) -> complex:
    r"""``sum_l (-1)^l pi (2l+1) exp((i/2pi)(-1/tau)(pi^2/2)(2l+1)^2)``.

    Equals ``-theta_dz((1/2, 1/2), 0, -1/tau)``.
    """
    terms = [t for _, _, t in m3_terms(params)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
