r"""Brute-force kernel dimension of the Dolbeault operator on Hom spaces.

A morphism ``Phi`` between two bundles is expanded in y-Fourier modes. Every
mode solves a first-order linear ODE in ``x``

.. math::

    f' = \frac{i}{\tau}\Bigl(\omega - \frac{S(x)}{2\pi}\Bigr) f
         + \frac{\bar\tau - \tau}{2\tau} F,

where ``S`` is the difference of connection functions and ``F`` collects
the bump coupling of a mapping cone. Each retained mode is integrated across
one period with fixed-step RK4. The gluing across ``x -> x + 2 pi`` then
links the value of a mode at ``2 pi`` to a shifted mode at ``0``. Links that
leave the truncated window are replaced by the condition that the in-window
end vanishes, which is how decay at both ends (the absence of divergent
solutions) enters the linear system. The kernel is read off from its
singular values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bundles import BundleDescriptor, make_bundle
from .errors import DomainError
from .lattice import TWO_PI

__all__ = ["Frame", "KernelEstimate", "FourierModeSystem", "bundle_frame", "cone_frame",
           "assemble", "solve_h0", "solve_cone_h0", "solve_hom"]

log = logging.getLogger(__name__)

STEPS_PER_PERIOD = 512
REL_THRESHOLD = 1e-6
MIN_GAP = 10.0
GROWTH_RATIO = 1e3


@dataclass(frozen=True)
class Frame:
    """Local model of a bundle with monomial gluing.

    Component ``k`` carries the connection function ``slope[k] * x + offset[k]``.
    Across ``x -> x + 2 pi`` a section transforms as
    ``(T psi)_k = const[k] * exp(i freq[k] y) * psi_{perm[k]}``; across
    ``y -> y + 2 pi`` component ``k`` is multiplied by ``ytrans[k]``.
    ``coupling`` is an optional upper-triangular entry ``(0, 1)`` given as a
    mode-function ``H -> psi_H(x)``.
    """

    slope: tuple
    offset: tuple
    perm: tuple
    freq: tuple
    const: tuple
    ytrans: tuple
    coupling: object = None
    tau: complex = 1j

    @property
    def rank(self) -> int:
        return len(self.slope)

    def s(self, k: int, x):
        return self.slope[k] * x + self.offset[k]


def bundle_frame(B: BundleDescriptor) -> Frame:
    n, a = B.n, B.a
    roots = [complex(np.exp(2j * np.pi * ((-a * k) % n) / n)) for k in range(n)]
    return Frame(slope=(a / n,) * n, offset=(B.mu / n,) * n,
                 perm=tuple((k + 1) % n for k in range(n)), freq=(a / n,) * n,
                 const=(1.0,) * n, ytrans=tuple(roots), tau=B.tau)


def cone_frame(cone) -> Frame:
    """Frame of ``C(psi) = E0 (+) E1`` with the bump in the upper corner."""
    return Frame(slope=(0.0, 1.0), offset=(cone.mu, cone.nu), perm=(0, 1), freq=(0.0, 1.0),
                 const=(1.0, 1.0), ytrans=(1.0, 1.0), coupling=cone, tau=cone.params.tau)


@dataclass
class KernelEstimate:
    """Numerical kernel dimension with its evidence."""

    dimension: int
    singular_values: list
    threshold: float
    gap: float
    conclusive: bool
    rejected_by_growth: int = 0
    edge_ratio: float = 0.0

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "threshold": self.threshold, "gap": self.gap,
                "conclusive": self.conclusive, "rejected_by_growth": self.rejected_by_growth,
                "smallest_singular_values": sorted(self.singular_values)[:6]}


@dataclass
class FourierModeSystem:
    """Retained modes of ``Hom(A, B)`` and their one-period propagator."""

    N: int
    states: list = field(repr=False)
    index: dict = field(repr=False)
    omega: np.ndarray = field(repr=False)
    links: list = field(repr=False)
    boundary: list = field(repr=False)
    propagator: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)


def _frac(x: float) -> float:
    r = x - math.floor(x)
    return 0.0 if r > 1 - 1e-12 else r


def _mode_offset(zB: complex, zA: complex) -> float:
    return _frac(np.angle(zB / zA) / TWO_PI)


def _coupling_terms(A: Frame, B: Frame, index: dict, states: list):
    """``(row, col, sign, mode shift)`` tuples for the bump forcing."""
    out = []
    for r, (i, j, k, w) in enumerate(states):
        # B-side: (psi_B Phi)_ij = psi * Phi_1j when i == 0
        if B.coupling is not None and i == 0:
            out.append((r, (1, j), +1.0, w))
        # A-side: -(Phi psi_A)_ij = -Phi_i0 * psi when j == 1
        if A.coupling is not None and j == 1:
            out.append((r, (i, 0), -1.0, w))
    return out


def assemble(A: Frame, B: Frame, N: int, steps: int = STEPS_PER_PERIOD) -> FourierModeSystem:
    """Build the shooting system for ``Hom(A, B)`` with modes ``|k| <= N``."""
    tau = A.tau
    cpl = A.coupling if A.coupling is not None else B.coupling
    states, index, omega = [], {}, []
    for i in range(B.rank):
        for j in range(A.rank):
            th = _mode_offset(B.ytrans[i], A.ytrans[j])
            for k in range(-N, N + 1):
                index[(i, j, k)] = len(states)
                states.append((i, j, k, th + k))
                omega.append(th + k)
    omega = np.array(omega)
    D = len(states)

    def offset_of(i, j):
        return _mode_offset(B.ytrans[i], A.ytrans[j])

    # forcing couplings: state r receives psi_H * state (entry, mode w - H)
    forcing = []
    if cpl is not None:
        Hs = cpl.active_modes(0.0, TWO_PI)
        for r, ent, sign, w in _coupling_terms(A, B, index, states):
            th = offset_of(*ent)
            for H in Hs:
                kk = round(w - H - th)
                col = index.get((ent[0], ent[1], kk))
                if col is not None:
                    forcing.append((r, col, sign, H))
    slopes = np.array([B.slope[i] - A.slope[j] for (i, j, _, _) in states])
    offs = np.array([B.offset[i] - A.offset[j] for (i, j, _, _) in states], dtype=complex)
    gain = (np.conj(tau) - tau) / (2 * tau)

    def diag(x):
        return 1j / tau * (omega - (slopes * x + offs) / TWO_PI)

    h = TWO_PI / steps
    if not forcing:
        y = np.ones(D, dtype=complex)
        x = 0.0
        for _ in range(steps):
            k1 = diag(x) * y
            k2 = diag(x + h / 2) * (y + h / 2 * k1)
            k3 = diag(x + h / 2) * (y + h / 2 * k2)
            k4 = diag(x + h) * (y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            x += h
        prop = np.diag(y)
    else:
        rows = np.array([f[0] for f in forcing])
        cols = np.array([f[1] for f in forcing])
        sg = np.array([f[2] for f in forcing])
        Hf = np.array([f[3] for f in forcing])
        Hu, Hpos = np.unique(Hf, return_inverse=True)

        def rhs(x, Y):
            out = diag(x)[:, None] * Y
            amp = gain * sg * cpl.bump.psi_H(Hu, x)[Hpos]
            np.add.at(out, rows, amp[:, None] * Y[cols])
            return out

        Y = np.eye(D, dtype=complex)
        x = 0.0
        for _ in range(steps):
            k1 = rhs(x, Y)
            k2 = rhs(x + h / 2, Y + h / 2 * k1)
            k3 = rhs(x + h / 2, Y + h / 2 * k2)
            k4 = rhs(x + h, Y + h * k3)
            Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            x += h
        prop = Y

    # gluing: mode w of (i, j) at 2pi = c * mode (w - delta) of (perm i, perm j) at 0
    links, hit = [], set()
    eqs, scale = [], []
    for r, (i, j, k, w) in enumerate(states):
        ti, tj = B.perm[i], A.perm[j]
        delta = B.freq[i] - A.freq[j]
        cst = B.const[i] / A.const[j]
        kk = w - delta - offset_of(ti, tj)
        if abs(kk - round(kk)) > 1e-9:  # pragma: no cover - frames are built consistently
            raise AssertionError("gluing does not preserve the mode lattice")
        tgt = index.get((ti, tj, int(round(kk))))
        links.append((r, tgt))
        row = prop[r].copy()
        # scale by the size of the two sides, not of their difference,
        # so that a cancelling (closed) cycle stays small
        sc = np.linalg.norm(row)
        if tgt is not None:
            row[tgt] -= cst
            hit.add(tgt)
            sc = math.hypot(sc, abs(cst))
        eqs.append(row)
        scale.append(sc)
    boundary = [c for c in range(D) if c not in hit]
    for c in boundary:
        row = np.zeros(D, dtype=complex)
        row[c] = 1.0
        eqs.append(row)
        scale.append(1.0)
    scale = np.array(scale)
    if not np.all(np.isfinite(scale)):
        raise DomainError("mode propagator overflowed; lower the cutoff N or raise Im(tau)")
    M = np.array(eqs) / scale[:, None]
    return FourierModeSystem(N, states, index, omega, links, boundary, prop, M)


def _edge_rows(system: FourierModeSystem, width: int = 3) -> np.ndarray:
    N = system.N
    return np.array([r for r, (_, _, k, _) in enumerate(system.states) if abs(k) > N - width])


def _kernel(system: FourierModeSystem) -> KernelEstimate:
    _, sv, vh = np.linalg.svd(system.matrix)
    D = system.matrix.shape[1]
    sv = sv[:D]
    thr = REL_THRESHOLD * sv[0]
    dim = int(np.sum(sv < thr))
    if dim == 0:
        gap = float(sv[-1] / thr)
    elif dim == D:
        gap = 0.0
    else:
        gap = float(sv[D - dim - 1] / max(sv[D - dim], np.finfo(float).tiny))
    rejected, ratio = 0, 0.0
    if dim:
        # candidates must not grow toward the truncation edge
        basis = vh[D - dim:].conj().T
        edge = _edge_rows(system)
        peak = np.max(np.abs(basis))
        if edge.size:
            es = np.linalg.svd(basis[edge], compute_uv=False)
            ratio = float(es[0] / peak) if peak > 0 else 0.0
            rejected = int(np.sum(es > peak / GROWTH_RATIO))
    conclusive = gap >= MIN_GAP
    est = KernelEstimate(dim - rejected, [float(v) for v in sv], float(thr), gap, conclusive,
                         rejected, ratio)
    if not conclusive:
        log.warning("kernel dimension %d is inconclusive: spectral gap %.3g < %g",
                    est.dimension, gap, MIN_GAP)
    return est


def solve_hom(A: Frame, B: Frame, N: int) -> KernelEstimate:
    return _kernel(assemble(A, B, N))


def default_cutoff(B1: BundleDescriptor, B2: BundleDescriptor) -> int:
    return 10 + abs(B2.a * B1.n - B1.a * B2.n)


def solve_h0(B1: BundleDescriptor, B2: BundleDescriptor, N: int | None = None) -> KernelEstimate:
    """Numerical ``dim Hom(B1, B2)`` of holomorphic maps.

    ``N`` defaults to ``10 + |bn - am|``; the Gaussian width of the solution
    families grows with the degree difference.
    """
    if abs(B1.tau - B2.tau) > 1e-14:
        raise DomainError("bundles live over different moduli")
    if max(B1.n, B2.n) > 3:
        raise DomainError("ranks above 3 are not supported")
    N = default_cutoff(B1, B2) if N is None else int(N)
    return solve_hom(bundle_frame(B1), bundle_frame(B2), N)


def solve_cone_h0(direction: str, eta: complex, cone, N: int = 8) -> KernelEstimate:
    """Numerical ``dim Hom`` between ``E_(1/2, eta/2)`` and the cone.

    ``direction="into"`` computes ``Hom(E, C(psi))`` and ``"outof"`` computes
    ``Hom(C(psi), E)``.
    """
    E = bundle_frame(make_bundle(2, 1, eta, cone.params))
    C = cone_frame(cone)
    if direction == "into":
        return solve_hom(E, C, N)
    if direction == "outof":
        return solve_hom(C, E, N)
    raise DomainError(f"direction must be 'into' or 'outof', got {direction!r}")
