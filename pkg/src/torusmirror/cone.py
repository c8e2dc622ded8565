r"""Mapping cone of the bump morphism and its isomorphism to a rank-two bundle.

Setting: ``E0 = E_(0, mu)``, ``E1 = E_(1, nu)`` with ``mu = p + q tau`` and
``nu = s + t tau``. The degree-one morphism ``psi : E1 -> E0[1]`` is a sum of
translated bumps ``psi_H(x) = A * b(x - x_H)`` centred at
``x_H = -2 pi H + p - s``. The cone ``C(psi)`` is isomorphic to
``E_(1/2, eta/2)`` exactly when ``eta = mu + nu + pi + pi tau`` modulo the
period lattice; :func:`phi_tilde` and :func:`phi` are the two explicit
morphisms and their composite is the scalar :func:`c_tau`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from .bundles import BundleDescriptor, make_bundle
from .errors import DomainError, QuadratureError, TruncationError
from .lattice import TWO_PI, decompose, in_lattice, reduce_modulus
from .theta import ModuliParams, jacobi_null_product, required_cutoff

__all__ = [
    "PROFILES",
    "BumpMorphism",
    "MorphismConfig",
    "ConeData",
    "ConeReport",
    "DetSpectrum",
    "make_bump",
    "make_cone",
    "phi_tilde",
    "phi",
    "phi_tilde_grid",
    "phi_grid",
    "c_tau",
    "eta_class",
    "verify_cone",
    "det_spectrum",
    "identity_id_sum",
    "holomorphy_residuals",
    "transition_residuals",
]

PI = math.pi


def _raised_cosine(t):
    return np.where(np.abs(t) < 1.0, 0.5 * (1.0 + np.cos(PI * t)), 0.0)


def _smooth(t):
    inside = np.abs(t) < 1.0
    tt = np.where(inside, t, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - tt * tt)), 0.0)


#: Bump shapes on the unit interval; the argument is ``xi / epsilon``.
PROFILES = {"raised_cosine": _raised_cosine, "smooth": _smooth}

_PANELS = 64
_GL_X, _GL_W = leggauss(16)


@dataclass(frozen=True)
class BumpMorphism:
    """Representative of the nontrivial class ``psi`` and its cutoff integral.

    ``theta_eps(xi)`` is the normalized partial integral of the weighted bump
    measured from the left edge of its support. A change of variables shows it
    does not depend on ``H``; it is tabulated once at panel edges and refined
    inside a panel by Gauss-Legendre quadrature.
    """

    epsilon: float
    tau: complex
    p: float
    q: float
    s: float
    t: float
    profile: str
    amplitude: complex
    lam: complex
    _edges: np.ndarray = field(repr=False)
    _cum: np.ndarray = field(repr=False)
    _total: complex = field(repr=False)

    @property
    def c(self) -> complex:
        return (-self.p + self.s) / TWO_PI + (self.t - self.q) / TWO_PI * self.tau

    def center(self, H):
        """``x_H = -2 pi H + p - s``."""
        return -TWO_PI * np.asarray(H) + self.p - self.s

    def lambda_H(self, H) -> complex:
        H = np.asarray(H, dtype=float)
        tau = self.tau
        return np.exp(1j / tau * (PI * H**2 + (-self.p + self.s - self.q * tau + self.t * tau) * H
                                  + self.lam))

    def shape(self, xi):
        return PROFILES[self.profile](np.asarray(xi, dtype=float) / self.epsilon)

    def psi_H(self, H, x):
        return self.amplitude * self.shape(np.asarray(x) - self.center(H))

    def psi_tilde(self, x, y):
        """``sum_H psi_H(x) exp(i H y)`` at scalar ``(x, y)``."""
        lo = math.floor((self.p - self.s - x - self.epsilon) / TWO_PI)
        Hs = np.arange(lo, lo + 3)
        return complex(np.sum(self.psi_H(Hs, x) * np.exp(1j * Hs * y)))

    def weight(self, H, x):
        """Integrating factor paired with ``psi_H``."""
        x = np.asarray(x)
        return np.exp(-1j / self.tau * (x**2 / (2 * TWO_PI) + (self.c + H) * x))

    def _reduced(self, xi):
        # weight * shape after factoring out the H-dependent constant
        ci = (self.t - self.q) / TWO_PI * self.tau
        return np.exp(-1j / self.tau * (xi + TWO_PI * ci) ** 2 / (2 * TWO_PI)) * self.shape(xi)

    def _partial(self, lo, hi):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        nodes = mid[..., None] + half[..., None] * _GL_X
        return np.sum(self._reduced(nodes) * _GL_W, axis=-1) * half

    def theta_eps(self, xi):
        """Normalized cutoff; exactly 0 left of the support and 1 right of it."""
        xi = np.asarray(xi, dtype=float)
        out = np.where(xi >= self.epsilon, 1.0 + 0j, 0.0 + 0j)
        inside = np.abs(xi) < self.epsilon
        if np.any(inside):
            v = xi[inside]
            j = np.clip(np.searchsorted(self._edges, v, side="right") - 1, 0, _PANELS - 1)
            out[inside] = (self._cum[j] + self._partial(self._edges[j], v)) / self._total
        return out


def _lambda0(tau: complex, q: float, t: float) -> complex:
    v = q + t + PI
    return (q / 2) * tau + (t / 2) * tau - (v / 2) * tau - PI / 4


def make_bump(epsilon: float, mu: complex, nu: complex, params: ModuliParams,
              profile: str = "raised_cosine") -> BumpMorphism:
    """Bump representative normalized so the ``H = 0`` weighted integral is ``lambda_{tau,0}``."""
    if not (0.0 < epsilon < PI):
        raise DomainError(f"epsilon must lie in (0, pi), got {epsilon!r}")
    if profile not in PROFILES:
        raise DomainError(f"unknown bump profile {profile!r}; choose from {sorted(PROFILES)}")
    tau = params.tau
    p, q = decompose(mu, tau)
    s, t = decompose(nu, tau)
    lam = _lambda0(tau, q, t)
    edges = np.linspace(-epsilon, epsilon, _PANELS + 1)
    proto = BumpMorphism(epsilon, tau, p, q, s, t, profile, 0j, lam, edges,
                         np.zeros(_PANELS + 1, dtype=complex), 1.0 + 0j)
    panel = proto._partial(edges[:-1], edges[1:])
    cum = np.concatenate([[0j], np.cumsum(panel)])
    total = cum[-1]
    if not np.isfinite(total) or total == 0:
        raise QuadratureError("bump normalization integral is degenerate")
    c = proto.c
    # weight(0, x_0 + xi) = exp(i pi c^2 / tau) * reduced(xi)
    amplitude = np.exp(1j / tau * lam) / (np.exp(1j * PI * c * c / tau) * total)
    return BumpMorphism(epsilon, tau, p, q, s, t, profile, complex(amplitude), lam,
                        edges, cum, total)


@dataclass(frozen=True)
class MorphismConfig:
    """Parameters of the morphism fields ``phi_tilde`` and ``phi``."""

    tau: complex
    p: float
    q: float
    s: float
    t: float
    epsilon: float = PI / 2
    N: int = 25
    profile: str = "raised_cosine"

    def __post_init__(self):
        if self.N < 10:
            raise TruncationError(f"index cutoff N={self.N} is below the supported minimum 10")
        tail = math.exp(-2 * PI * _kappa(self.tau) * (self.N - 1) ** 2)
        if tail > 1e-16:
            need = required_cutoff(2 * _kappa(self.tau), 1e-15) + 1
            raise TruncationError(f"index cutoff N={self.N} leaves a tail of {tail:.2e}; use N >= {need}")

    @classmethod
    def from_moduli(cls, mu: complex, nu: complex, params: ModuliParams, **kw) -> "MorphismConfig":
        p, q = decompose(mu, params.tau)
        s, t = decompose(nu, params.tau)
        return cls(params.tau, p, q, s, t, **kw)

    @property
    def mu(self) -> complex:
        return self.p + self.q * self.tau

    @property
    def nu(self) -> complex:
        return self.s + self.t * self.tau

    @property
    def eta(self) -> complex:
        """Representative ``u + v tau`` with ``u = p+s+pi``, ``v = q+t+pi``."""
        return (self.p + self.s + PI) + (self.q + self.t + PI) * self.tau

    @cached_property
    def bump(self) -> BumpMorphism:
        return make_bump(self.epsilon, self.mu, self.nu, ModuliParams(self.tau), self.profile)


def _kappa(tau: complex) -> float:
    return tau.imag / abs(tau) ** 2


class _SeriesEngine:
    """Vectorized evaluation of the four component series over an x-grid."""

    def __init__(self, cfg: MorphismConfig, xs):
        self.cfg = cfg
        self.xs = np.atleast_1d(np.asarray(xs, dtype=float))
        self.idx = np.arange(-cfg.N, cfg.N + 1)
        self.bump = cfg.bump
        self.d = cfg.q - cfg.t
        self.x0 = cfg.p - cfg.s

    def gsum(self, sh):
        """``G[x, K] = (-1)^K exp(-i d K - (i/8 pi tau)(x - 4 pi K + sh)^2)``."""
        tau, K, x = self.cfg.tau, self.idx[None, :], self.xs[:, None]
        sign = np.where(K % 2 == 0, 1.0, -1.0)
        return sign * np.exp(-1j * self.d * K - 1j / (8 * PI * tau) * (x - 4 * PI * K + sh) ** 2)

    def dsum(self, off, sh):
        r"""Coefficients of the bump-weighted double sums.

        ``D[x, I] = sum_H (-1)^(I+H) exp(-i d I - (pi i/tau)(H - 2I + off)^2
        + (i/8 pi tau)(x + 4 pi I + sh)^2) * (theta(x - x_H) - theta(x - x_c))``
        where ``x_c`` is the centre at the half-integer ``H = 2I - off``. The
        subtracted column sums to zero over ``H`` and only the window between
        the two cutoffs survives.
        """
        tau, x, I = self.cfg.tau, self.xs[:, None, None], self.idx[None, :, None]
        hx = (self.x0 - self.xs) / TWO_PI
        hc = 2 * self.idx - off
        lo = int(math.floor(min(hx.min(), hc.min()))) - 2
        hi = int(math.ceil(max(hx.max(), hc.max()))) + 2
        H = np.arange(lo, hi + 1)[None, None, :]
        th_x = self.bump.theta_eps(self.xs[:, None] - self.bump.center(H[0]))[:, None, :]
        xc = -TWO_PI * hc + self.x0
        th_c = self.bump.theta_eps(self.xs[:, None] - xc[None, :])[:, :, None]
        diff = th_x - th_c
        live = diff != 0
        expo = (-1j * self.d * I - (PI * 1j / tau) * (H - 2 * I + off) ** 2
                + 1j / (8 * PI * tau) * (x + 4 * PI * I + sh) ** 2)
        sign = np.where((I + H) % 2 == 0, 1.0, -1.0)
        terms = np.where(live, sign * diff * np.exp(np.where(live, expo, 0.0)), 0.0)
        return terms.sum(axis=2)


def _y_modes(cfg: MorphismConfig, ys):
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    idx = np.arange(-cfg.N, cfg.N + 1)
    return ys, np.exp(1j * idx[:, None] * ys[None, :])


def _prefactor(expo_x, ys, half: bool, d: float):
    # expo_x: (nx,) ; optional exp(i y / 2 - i d / 2)
    out = np.exp(expo_x)[:, None] * np.ones((1, ys.size))
    if half:
        out = out * np.exp(0.5j * ys - 0.5j * d)[None, :]
    return out


def phi_tilde_grid(cfg: MorphismConfig, xs, ys) -> np.ndarray:
    """``phi_tilde`` on the tensor grid ``xs x ys``; shape ``(nx, ny, 2, 2)``."""
    eng = _SeriesEngine(cfg, xs)
    ys, E = _y_modes(cfg, ys)
    p, s, tau, d, x = cfg.p, cfg.s, cfg.tau, eng.d, eng.xs
    pre = (np.conj(tau) - tau) / (2 * tau)
    cm = 1j / (8 * PI * tau) * (p - s - PI) ** 2
    cp = 1j / (8 * PI * tau) * (p - s + PI) ** 2
    out = np.empty((x.size, ys.size, 2, 2), dtype=complex)
    out[..., 0, 0] = -pre * 1j * _prefactor(-1j / (4 * PI) * (d - PI) * x - cm, ys, False, d) \
        * (eng.dsum(-0.5, -p + s + PI) @ E)
    out[..., 0, 1] = -pre * _prefactor(-1j / (4 * PI) * (d - PI) * x - cm, ys, True, d) \
        * (eng.dsum(-1.5, -p + s + 3 * PI) @ E)
    out[..., 1, 0] = _prefactor(1j / (4 * PI) * (d + PI) * x + cp, ys, False, d) \
        * (eng.gsum(-p + s - PI) @ E)
    out[..., 1, 1] = -1j * _prefactor(1j / (4 * PI) * (d + PI) * x + cp, ys, True, d) \
        * (eng.gsum(-p + s - 3 * PI) @ E)
    return out


def phi_grid(cfg: MorphismConfig, xs, ys) -> np.ndarray:
    """``phi`` on the tensor grid ``xs x ys``; shape ``(nx, ny, 2, 2)``."""
    eng = _SeriesEngine(cfg, xs)
    ys, E = _y_modes(cfg, ys)
    p, s, tau, d, x = cfg.p, cfg.s, cfg.tau, eng.d, eng.xs
    pre = (np.conj(tau) - tau) / (2 * tau)
    cm = 1j / (8 * PI * tau) * (p - s - PI) ** 2
    cp = 1j / (8 * PI * tau) * (p - s + PI) ** 2
    out = np.empty((x.size, ys.size, 2, 2), dtype=complex)
    out[..., 0, 0] = _prefactor(1j / (4 * PI) * (d - PI) * x + cm, ys, False, d) \
        * (eng.gsum(-p + s + PI) @ E)
    out[..., 0, 1] = pre * 1j * _prefactor(-1j / (4 * PI) * (d + PI) * x - cp, ys, False, d) \
        * (eng.dsum(0.5, -p + s - PI) @ E)
    # the x-exponent here carries (d - pi); it is fixed by phi_21(x, y) = e^{-iy/2} phi_11(x + 2 pi, y)
    out[..., 1, 0] = 1j * _prefactor(1j / (4 * PI) * (d - PI) * x + cm, ys, True, d) \
        * (eng.gsum(-p + s - PI) @ E)
    out[..., 1, 1] = -pre * _prefactor(-1j / (4 * PI) * (d + PI) * x - cp, ys, True, d) \
        * (eng.dsum(-0.5, -p + s + PI) @ E)
    return out


def phi_tilde(point: tuple[float, float], cfg: MorphismConfig) -> np.ndarray:
    """2x2 value of the morphism ``E_(1/2, eta/2) -> C(psi)`` at ``point``."""
    x, y = point
    return phi_tilde_grid(cfg, [x], [y])[0, 0]


def phi(point: tuple[float, float], cfg: MorphismConfig) -> np.ndarray:
    """2x2 value of the morphism ``C(psi) -> E_(1/2, eta/2)`` at ``point``."""
    x, y = point
    return phi_grid(cfg, [x], [y])[0, 0]


def _symmetric_order(cutoff: int) -> np.ndarray:
    k = np.arange(1, cutoff + 1)
    out = np.zeros(2 * cutoff + 1, dtype=np.int64)
    out[1::2], out[2::2] = k, -k
    return out


def _ctau_series(tau: complex, cutoff: int) -> complex:
    # sum_l (-1)^l (2l+1) exp(-(pi i / tau)(l + 1/2)^2); l and -l-1 pair up
    l = _symmetric_order(cutoff)
    terms = np.where(l % 2 == 0, 1.0, -1.0) * (2 * l + 1) * np.exp(-(PI * 1j / tau) * (l + 0.5) ** 2)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def c_tau(params: ModuliParams, route: str = "direct") -> complex:
    """The scalar ``c_tau`` with ``phi @ phi_tilde = c_tau * I``.

    ``route="direct"`` sums its defining series; ``route="jacobi"`` uses the
    product of three theta nulls at ``-1/tau``.
    """
    tau = params.tau
    pref = (np.conj(tau) - tau) / (4 * tau) * 1j
    w = -1.0 / tau
    if route == "direct":
        return complex(pref * _ctau_series(tau, params.cutoff_for(w)))
    if route == "jacobi":
        return complex(-pref / PI * jacobi_null_product(params, w))
    raise DomainError(f"unknown route {route!r}; expected 'direct' or 'jacobi'")


def eta_class(mu: complex, nu: complex, params: ModuliParams) -> complex:
    """``mu + nu + pi + pi tau`` with both lattice coefficients reduced into ``[0, 2 pi)``."""
    tau = params.tau
    return reduce_modulus(complex(mu) + complex(nu) + PI + PI * tau, tau)


@dataclass(frozen=True)
class ConeData:
    """The cone ``C(psi)`` of the bump morphism between ``E_(0,mu)`` and ``E_(1,nu)``."""

    mu: complex
    nu: complex
    params: ModuliParams
    bump: BumpMorphism
    E0: BundleDescriptor
    E1: BundleDescriptor

    @staticmethod
    def transition(y: float) -> np.ndarray:
        """Gluing matrix across ``x -> x + 2 pi``."""
        return np.diag([1.0, np.exp(1j * y)])

    def s(self, x):
        """Diagonal connection functions of ``E0`` and ``E1``."""
        return np.array([self.E0.s(x), self.E1.s(x)])

    def active_modes(self, x0: float = 0.0, x1: float = TWO_PI):
        """Integers ``H`` whose bump meets ``[x0, x1]``."""
        b = self.bump
        lo = math.ceil((b.p - b.s - x1 - b.epsilon) / TWO_PI)
        hi = math.floor((b.p - b.s - x0 + b.epsilon) / TWO_PI)
        return list(range(lo, hi + 1))


def make_cone(mu: complex, nu: complex, params: ModuliParams, epsilon: float = PI / 2,
              profile: str = "raised_cosine") -> ConeData:
    return ConeData(complex(mu), complex(nu), params, make_bump(epsilon, mu, nu, params, profile),
                    make_bundle(1, 0, mu, params), make_bundle(1, 1, nu, params))


@dataclass
class ConeReport:
    """Outcome of the cone isomorphism check."""

    eta_used: complex
    c_tau_direct: complex
    c_tau_jacobi: complex
    residual_phi_phitilde: float | None
    residual_phitilde_phi: float | None
    verdict: bool
    applicable: bool = True
    offdiag: float | None = None
    diag_spread: float | None = None
    cone_h0: dict | None = None
    config: dict = field(default_factory=dict)
    grid_residuals: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        def pair(z):
            return [float(z.real), float(z.imag)]
        return {
            "eta": pair(self.eta_used),
            "c_tau_direct": pair(self.c_tau_direct),
            "c_tau_jacobi": pair(self.c_tau_jacobi),
            "residual_phi_phitilde": self.residual_phi_phitilde,
            "residual_phitilde_phi": self.residual_phitilde_phi,
            "verdict": bool(self.verdict),
            "applicable": bool(self.applicable),
            "offdiag": self.offdiag,
            "diag_spread": self.diag_spread,
            "cone_h0": self.cone_h0,
            "config": self.config,
        }


def _inf_norm(M):
    return np.max(np.sum(np.abs(M), axis=-1), axis=-1)


def verify_cone(mu: complex, nu: complex, params: ModuliParams, grid: int = 32, N: int = 25,
                tol: float = 1e-6, epsilon: float = PI / 2, profile: str = "raised_cosine",
                eta: complex | None = None, cone_modes: int = 8) -> ConeReport:
    """Check ``phi @ phi_tilde = phi_tilde @ phi = c_tau * I`` on a uniform grid.

    When ``eta`` is given and lies off the class ``eta_class(mu, nu)`` no
    isomorphism exists; the cone Hom dimensions are computed instead and the
    verdict is false.
    """
    if grid < 16:
        raise DomainError(f"grid must be at least 16, got {grid}")
    if tol < 1e-8:
        raise DomainError(f"tol must be at least 1e-8, got {tol:g}")
    cfg = MorphismConfig.from_moduli(mu, nu, params, epsilon=epsilon, N=N, profile=profile)
    cd, cj = c_tau(params, "direct"), c_tau(params, "jacobi")
    config = {"tau": [params.tau.real, params.tau.imag], "p": cfg.p, "q": cfg.q, "s": cfg.s,
              "t": cfg.t, "epsilon": epsilon, "N": N, "grid": grid, "tol": tol, "profile": profile}
    klass = eta_class(mu, nu, params)
    if eta is not None and not in_lattice(complex(eta) - klass, params.tau):
        from .dolbeault import solve_cone_h0
        cone = make_cone(mu, nu, params, epsilon, profile)
        dims = {d: solve_cone_h0(d, eta, cone, cone_modes).dimension for d in ("into", "outof")}
        return ConeReport(complex(eta), cd, cj, None, None, False, applicable=False,
                          cone_h0=dims, config=config)
    xs = TWO_PI * np.arange(grid) / grid
    A = phi_grid(cfg, xs, xs)
    B = phi_tilde_grid(cfg, xs, xs)
    AB = np.einsum("xyij,xyjk->xyik", A, B)
    BA = np.einsum("xyij,xyjk->xyik", B, A)
    eye = cd * np.eye(2)
    r1 = float(np.max(_inf_norm(AB - eye)))
    r2 = float(np.max(_inf_norm(BA - eye)))
    off = float(max(np.max(np.abs(AB[..., 0, 1])), np.max(np.abs(AB[..., 1, 0])),
                    np.max(np.abs(BA[..., 0, 1])), np.max(np.abs(BA[..., 1, 0]))))
    diag = np.concatenate([AB[..., 0, 0].ravel(), AB[..., 1, 1].ravel(),
                           BA[..., 0, 0].ravel(), BA[..., 1, 1].ravel()])
    spread = float(np.max(np.abs(diag - diag[0])))
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    res = np.abs(AB - eye).reshape(-1, 4)
    dump = np.column_stack([X.ravel(), Y.ravel(), res])
    ok = (r1 < tol and r2 < tol and off < tol and spread < tol and abs(cd) > 1e-8
          and all(np.isfinite([r1, r2])))
    return ConeReport(klass if eta is None else complex(eta), cd, cj, r1, r2, bool(ok),
                      offdiag=off, diag_spread=spread, config=config, grid_residuals=dump)


@dataclass(frozen=True)
class DetSpectrum:
    """y-Fourier content of ``det phi_tilde * exp(-i y / 2)``."""

    modes: dict
    surviving: int
    profile_deviation: float

    def leakage(self) -> float:
        return max((v for a, v in self.modes.items() if a != self.surviving), default=0.0)


def det_spectrum(cfg: MorphismConfig, xs, ny: int = 64) -> DetSpectrum:
    """Split ``det phi_tilde`` into y-modes at every ``x`` in ``xs``.

    Only ``a = -1`` should survive, with x-profile proportional to ``exp(i x / 2)``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = TWO_PI * np.arange(ny) / ny
    M = phi_tilde_grid(cfg, xs, ys)
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    g = det * np.exp(-0.5j * ys)[None, :]
    coef = np.fft.fft(g, axis=1) / ny
    freqs = np.fft.fftfreq(ny, d=1.0 / ny).astype(int)
    mags = {int(a): float(np.max(np.abs(coef[:, j]))) for j, a in enumerate(freqs)}
    surviving = max(mags, key=mags.get)
    col = coef[:, list(freqs).index(surviving)]
    ratio = col * np.exp(-0.5j * xs)
    ref = ratio[0]
    dev = float(np.max(np.abs(ratio - ref)) / abs(ref))
    return DetSpectrum(dict(sorted(mags.items())), surviving, dev)


def holomorphy_residuals(cfg: MorphismConfig, points, which: str = "phi_tilde",
                         h: float = 1e-3) -> np.ndarray:
    r"""Entrywise residuals of ``d_B Phi - Phi d_A = 0`` at ``points``.

    For ``phi_tilde`` (into the cone) the first row picks up ``+psi * Phi_2j``;
    for ``phi`` (out of the cone) the second column picks up ``-Phi_i1 * psi``.
    Returns the max residual per entry, shape ``(2, 2)``.
    """
    tau = cfg.tau
    k = 1j / (PI * (np.conj(tau) - tau))
    bump = cfg.bump
    mu, nu, eta = cfg.mu, cfg.nu, cfg.eta
    grid = phi_tilde_grid if which == "phi_tilde" else phi_grid
    if which not in ("phi_tilde", "phi"):
        raise DomainError(f"which must be 'phi_tilde' or 'phi', got {which!r}")

    def f(x, y):
        return grid(cfg, [x], [y])[0, 0]

    worst = np.zeros((2, 2))
    for x, y in points:
        fx = (-f(x + 2 * h, y) + 8 * f(x + h, y) - 8 * f(x - h, y) + f(x - 2 * h, y)) / (12 * h)
        fy = (-f(x, y + 2 * h) + 8 * f(x, y + h) - 8 * f(x, y - h) + f(x, y - 2 * h)) / (12 * h)
        db = (tau * fx - fy) / (tau - np.conj(tau))
        F = f(x, y)
        sE = x / 2 + eta / 2
        sC = np.array([mu, x + nu])
        ps = bump.psi_tilde(x, y)
        if which == "phi_tilde":
            S = sC[:, None] - sE
            forcing = np.array([[ps * F[1, 0], ps * F[1, 1]], [0, 0]])
        else:
            S = sE - sC[None, :] * np.ones((2, 1))
            forcing = np.array([[0, -F[0, 0] * ps], [0, -F[1, 0] * ps]])
        r = 2 * db - k * S * F + forcing
        worst = np.maximum(worst, np.abs(r))
    return worst


def transition_residuals(cfg: MorphismConfig, points) -> dict:
    """Compatibility of both morphisms with the gluing across ``x`` and ``y``."""
    V = np.array([[0, 1], [1, 0]], dtype=complex)
    out = {"phi_tilde_x": 0.0, "phi_tilde_y": 0.0, "phi_x": 0.0, "phi_y": 0.0}
    sgn = np.diag([1.0, -1.0])
    for x, y in points:
        A0, A1 = phi_tilde((x, y), cfg), phi_tilde((x + TWO_PI, y), cfg)
        B0, B1 = phi((x, y), cfg), phi((x + TWO_PI, y), cfg)
        TE = np.exp(0.5j * y) * V
        SC = ConeData.transition(y)
        out["phi_tilde_x"] = max(out["phi_tilde_x"], np.max(np.abs(A1 - SC @ A0 @ np.linalg.inv(TE))))
        out["phi_x"] = max(out["phi_x"], np.max(np.abs(B1 - TE @ B0 @ np.linalg.inv(SC))))
        A2, B2 = phi_tilde((x, y + TWO_PI), cfg), phi((x, y + TWO_PI), cfg)
        out["phi_tilde_y"] = max(out["phi_tilde_y"], np.max(np.abs(A2 - A0 @ sgn)))
        out["phi_y"] = max(out["phi_y"], np.max(np.abs(B2 - sgn @ B0)))
    return {k: float(v) for k, v in out.items()}


def identity_id_sum(a: int, epsilon: float, mu: complex, nu: complex, params: ModuliParams,
                    x: float, allow_zero: bool = False, dps: int = 40) -> complex:
    r"""Double sum that must vanish for every nonzero integer ``a``.

    .. math::

        \sum_k e^{2\pi i k a/\tau} \sum_l (-1)^l e^{-\pi i (l+1/2)^2/\tau}
        \bigl[\theta_\varepsilon(x - x_{k+l}) - \theta_\varepsilon(x - x_k - \pi)\bigr]

    Individual terms reach ``exp(pi a^2 Im(-1/tau))``, so the sum is carried
    in ``dps``-digit arithmetic. ``a = 0`` is refused unless ``allow_zero``.
    """
    import mpmath as mp

    if int(a) != a:
        raise DomainError(f"a must be an integer, got {a!r}")
    a = int(a)
    if a == 0 and not allow_zero:
        raise DomainError("a = 0 violates the identity's hypothesis (pass allow_zero to compute it)")
    if not (0.0 < epsilon < PI):
        raise DomainError(f"epsilon must lie in (0, pi), got {epsilon!r}")
    with mp.workdps(dps):
        tau = mp.mpc(params.tau.real, params.tau.imag)
        pi = mp.pi
        p, q = decompose(mu, params.tau)
        s, t = decompose(nu, params.tau)
        p, q, s, t = (mp.mpf(v) for v in (p, q, s, t))
        eps = mp.mpf(epsilon)
        ci = (t - q) / (2 * pi) * tau

        def integrand(xi):
            return mp.exp(-1j / tau * (xi + 2 * pi * ci) ** 2 / (4 * pi)) * (1 + mp.cos(pi * xi / eps)) / 2

        total = mp.quad(integrand, [-eps, 0, eps])
        cache = {}

        def th(center):
            xi = mp.mpf(x) - center
            if xi <= -eps:
                return mp.mpf(0)
            if xi >= eps:
                return mp.mpf(1)
            key = mp.nstr(xi, 30)
            if key not in cache:
                cache[key] = mp.quad(integrand, [-eps, xi]) / total
            return cache[key]

        kap = params.kappa
        K = int(abs(a) + math.sqrt(a * a + 60.0 / (PI * kap))) + 3
        L = K + int(math.sqrt(60.0 / (PI * kap))) + 3
        gauss = {l: (-1) ** (l % 2) * mp.exp(-(pi * 1j / tau) * (l + mp.mpf(1) / 2) ** 2)
                 for l in range(-L, L + 1)}
        x0 = p - s
        acc = mp.mpc(0)
        for k in range(-K, K + 1):
            ref = th(-2 * pi * k + x0 + pi)
            inner = mp.mpc(0)
            for l in range(-L, L + 1):
                dlt = th(-2 * pi * (k + l) + x0) - ref
                if dlt != 0:
                    inner += gauss[l] * dlt
            if inner != 0:
                acc += mp.exp(2 * pi * 1j * k * a / tau) * inner
        return complex(acc)
