"""Independent high-precision reference values built on mpmath."""

from __future__ import annotations

import mpmath as mp


def theta_series(alpha, beta, z, w, terms=60):
    """Plain theta series with characteristics, summed in mpmath."""
    alpha, beta, z, w = mp.mpf(alpha), mp.mpf(beta), mp.mpc(z), mp.mpc(w)
    return mp.fsum(mp.exp(mp.pi * 1j * (l + alpha) ** 2 * w + 2 * mp.pi * 1j * (l + alpha) * (z + beta))
                   for l in range(-terms, terms + 1))


def jacobi_theta_char(alpha, beta, z, w):
    """Characteristic theta from mpmath's jtheta for the four half-period cases."""
    q = mp.exp(mp.pi * 1j * mp.mpc(w))
    x = mp.pi * mp.mpc(z)
    table = {(0.5, 0.5): lambda: -mp.jtheta(1, x, q), (0.0, 0.0): lambda: mp.jtheta(3, x, q),
             (0.0, 0.5): lambda: mp.jtheta(4, x, q), (0.5, 0.0): lambda: mp.jtheta(2, x, q)}
    return table[(alpha, beta)]()


class MorphismOracle:
    """Raw double series for the cone morphisms with an mpmath cutoff integral.

    Uses the undifferenced bump sums directly, so it is independent of the
    reference-column subtraction in the vectorized engine.
    """

    def __init__(self, tau, p, q, s, t, epsilon, dps=80, imax=5, hpad=30):
        self.dps, self.imax, self.hpad = dps, imax, hpad
        with mp.workdps(dps):
            self.tau = mp.mpc(tau)
            self.p, self.q, self.s, self.t = (mp.mpf(v) for v in (p, q, s, t))
            self.eps = mp.mpf(epsilon)
            self.ci = (self.t - self.q) / (2 * mp.pi) * self.tau
            self.total = mp.quad(self._integrand, [-self.eps, 0, self.eps])
        self._cache = {}

    def _integrand(self, xi):
        return (mp.exp(-1j / self.tau * (xi + 2 * mp.pi * self.ci) ** 2 / (4 * mp.pi))
                * (1 + mp.cos(mp.pi * xi / self.eps)) / 2)

    def theta_eps(self, xi):
        if xi <= -self.eps:
            return mp.mpf(0)
        if xi >= self.eps:
            return mp.mpf(1)
        key = mp.nstr(xi, 40)
        if key not in self._cache:
            self._cache[key] = mp.quad(self._integrand, [-self.eps, xi]) / self.total
        return self._cache[key]

    def _d(self, x, I, off, sh):
        tau, pi = self.tau, mp.pi
        d = self.q - self.t
        x0 = self.p - self.s
        hmin = int(mp.floor((x0 - x - self.eps) / (2 * pi))) - 1
        hmax = 2 * I + self.hpad
        acc = mp.mpc(0)
        for H in range(hmin, hmax + 1):
            th = self.theta_eps(x - (-2 * pi * H + x0))
            if th == 0:
                continue
            acc += (-1) ** ((I + H) % 2) * th * mp.exp(-(pi * 1j / tau) * (H - 2 * I + off) ** 2)
        return acc * mp.exp(-1j * d * I + 1j / (8 * pi * tau) * (x + 4 * pi * I + sh) ** 2)

    def _g(self, x, K, sh):
        tau, pi = self.tau, mp.pi
        d = self.q - self.t
        return (-1) ** (K % 2) * mp.exp(-1j * d * K - 1j / (8 * pi * tau) * (x - 4 * pi * K + sh) ** 2)

    def _series(self, fn, y, *args):
        return mp.fsum(fn(*args[:1], I, *args[1:]) * mp.exp(1j * I * y)
                       for I in range(-self.imax, self.imax + 1))

    def _gseries(self, x, y, sh, kmax=40):
        return mp.fsum(self._g(x, K, sh) * mp.exp(1j * K * y) for K in range(-kmax, kmax + 1))

    def _dseries(self, x, y, off, sh):
        return mp.fsum(self._d(x, I, off, sh) * mp.exp(1j * I * y)
                       for I in range(-self.imax, self.imax + 1))

    def phi_tilde(self, x, y):
        with mp.workdps(self.dps):
            x, y = mp.mpf(x), mp.mpf(y)
            pi, tau, p, s = mp.pi, self.tau, self.p, self.s
            d = self.q - self.t
            pre = (mp.conj(tau) - tau) / (2 * tau)
            cm = 1j / (8 * pi * tau) * (p - s - pi) ** 2
            cp = 1j / (8 * pi * tau) * (p - s + pi) ** 2
            em = mp.exp(-1j / (4 * pi) * (d - pi) * x - cm)
            ep = mp.exp(1j / (4 * pi) * (d + pi) * x + cp)
            half = mp.exp(1j * y / 2 - 1j * d / 2)
            return [[-pre * 1j * em * self._dseries(x, y, -0.5, -p + s + pi),
                     -pre * em * half * self._dseries(x, y, -1.5, -p + s + 3 * pi)],
                    [ep * self._gseries(x, y, -p + s - pi),
                     -1j * ep * half * self._gseries(x, y, -p + s - 3 * pi)]]

    def phi(self, x, y):
        with mp.workdps(self.dps):
            x, y = mp.mpf(x), mp.mpf(y)
            pi, tau, p, s = mp.pi, self.tau, self.p, self.s
            d = self.q - self.t
            pre = (mp.conj(tau) - tau) / (2 * tau)
            cm = 1j / (8 * pi * tau) * (p - s - pi) ** 2
            cp = 1j / (8 * pi * tau) * (p - s + pi) ** 2
            half = mp.exp(1j * y / 2 - 1j * d / 2)
            return [[mp.exp(1j / (4 * pi) * (d - pi) * x + cm) * self._gseries(x, y, -p + s + pi),
                     pre * 1j * mp.exp(-1j / (4 * pi) * (d + pi) * x - cp)
                     * self._dseries(x, y, 0.5, -p + s - pi)],
                    [1j * mp.exp(1j / (4 * pi) * (d - pi) * x + cm) * half * self._gseries(x, y, -p + s - pi),
                     -pre * mp.exp(-1j / (4 * pi) * (d + pi) * x - cp) * half
                     * self._dseries(x, y, -0.5, -p + s + pi)]]
