import math

import numpy as np
import pytest

from torusmirror.bundles import (cocycle_check, connection_data, degree, hom_dims, holomorphy_residual,
                                 iso_class_equal, iso_witness, make_bundle, transition_data, with_shift)
from torusmirror.errors import DomainError, StabilityError
from torusmirror.lattice import TWO_PI
from torusmirror.theta import ModuliParams

PI = math.pi


def test_trivial_bundle(p_i):
    B = make_bundle(1, 0, 0, p_i)
    assert (B.n, B.a, B.p, B.q) == (1, 0, 0.0, 0.0)
    assert cocycle_check(B)


def test_decomposition(p_i):
    B = make_bundle(2, 1, PI + PI * 1j, p_i)
    assert B.p == pytest.approx(PI, abs=1e-15) and B.q == pytest.approx(PI, abs=1e-15)
    tau = 0.3 + 1.1j
    B = make_bundle(3, -1, 1.2 - 0.7j, ModuliParams(tau))
    assert abs(B.p + B.q * tau - (1.2 - 0.7j)) < 1e-14
    assert B.to_dict()["mu_im"] == -0.7


@pytest.mark.parametrize("n,a", [(2, 4), (3, 0), (2, 0), (6, -3)])
def test_unstable_rejected(p_i, n, a):
    with pytest.raises(StabilityError):
        make_bundle(n, a, 0, p_i)


@pytest.mark.parametrize("n,a", [(0, 1), (-1, 0), (1.5, 1)])
def test_bad_rank(p_i, n, a):
    with pytest.raises(DomainError):
        make_bundle(n, a, 0, p_i)


@pytest.mark.parametrize("n", range(1, 9))
def test_heisenberg(n):
    T = transition_data(make_bundle(n, 1, 0, ModuliParams(1j)))
    U, V, w = T.U, T.V, T.omega
    eye = np.eye(n)
    # V U = omega U V for U = diag(omega^k) and V[i, i+1] = 1
    assert np.max(np.abs(V @ U - w * U @ V)) < 1e-14
    assert np.max(np.abs(np.linalg.matrix_power(U, n) - eye)) < 1e-14
    assert np.max(np.abs(np.linalg.matrix_power(V, n) - eye)) < 1e-14


@pytest.mark.parametrize("n,a", [(1, 0), (2, 1), (3, -1), (3, 2), (5, 3), (7, -4)])
def test_cocycle(params, n, a):
    assert cocycle_check(make_bundle(n, a, 0.4 + 0.2j, params))


def test_cocycle_detects_corruption(p_i):
    B = make_bundle(3, 1, 0, p_i)
    T = transition_data(B)
    assert not cocycle_check(B, with_shift(T, T.V @ T.V))


@pytest.mark.parametrize("n,a", [(1, 0), (2, 1), (3, -2), (5, 7)])
def test_degree(n, a, p_i):
    assert abs(degree(make_bundle(n, a, 0.3, p_i)) - a) < 1e-12
    c = connection_data(make_bundle(n, a, 0.3, p_i))
    assert c.curvature() == pytest.approx(-1j / TWO_PI * a / n)


def test_hom_dims_examples(p_i):
    mu, nu, eta = 0.3 + 0.1j, -0.2 + 0.4j, PI + PI * 1j
    E0, E1 = make_bundle(1, 0, mu, p_i), make_bundle(1, 1, nu, p_i)
    assert hom_dims(E0, E1) == (1, 0)
    assert hom_dims(E1, E0) == (0, 1)
    E = make_bundle(2, 1, eta, p_i)
    assert hom_dims(E, make_bundle(2, 1, eta + TWO_PI, p_i)) == (1, 1)
    assert hom_dims(E, make_bundle(2, 1, eta + PI, p_i)) == (0, 0)


def test_hom_dims_mismatched_tau():
    with pytest.raises(DomainError):
        hom_dims(make_bundle(1, 0, 0, ModuliParams(1j)), make_bundle(1, 1, 0, ModuliParams(2j)))


def test_riemann_roch(p_i):
    objs = [(n, a) for n in (1, 2, 3) for a in range(-3, 4) if math.gcd(n, abs(a)) == 1]
    for n, a in objs:
        for m, b in objs:
            h0, h1 = hom_dims(make_bundle(n, a, 0.1, p_i), make_bundle(m, b, 0.7j, p_i))
            assert h0 - h1 == b * n - a * m
            if b * n - a * m > 0:
                assert h1 == 0
            if b * n - a * m < 0:
                assert h0 == 0


def test_iso_class(p_i):
    eta = PI + PI * 1j
    E = make_bundle(2, 1, eta, p_i)
    assert iso_class_equal(E, make_bundle(2, 1, eta + TWO_PI + TWO_PI * 1j, p_i))
    assert iso_class_equal(E, E)
    assert not iso_class_equal(make_bundle(1, 0, 0, p_i), make_bundle(1, 1, 0, p_i))
    assert not iso_class_equal(E, make_bundle(2, 1, eta + 1e-6, p_i))
    assert iso_witness(E, make_bundle(2, 1, eta + 1.0, p_i)) is None


def _pts():
    return [(x, y) for x in (0.3, 2.0, 4.4) for y in (0.1, 3.3)]


def test_witness_identity(p_i):
    E = make_bundle(3, 2, 0.5 + 0.1j, p_i)
    W = iso_witness(E, E)
    assert (W.l, W.I, W.k) == (1, 0, 0)
    assert np.allclose(W(0.7, 1.9), np.eye(3), atol=1e-15)


def test_witness_tau_shift(p_i):
    mu = 0.4 + 0.2j
    B1, B2 = make_bundle(2, 1, mu, p_i), make_bundle(2, 1, mu + TWO_PI * 1j, p_i)
    W = iso_witness(B1, B2)
    assert W.k == 1 and W.l == 1 and W.block_sizes == (2, 0)
    assert np.allclose(W.matrix, np.diag([1, -1]), atol=1e-15)
    assert W.prefactor(1.0, 0.0) == pytest.approx(np.exp(-0.5j))
    res = holomorphy_residual(W, lambda x: (B2.mu - B1.mu) / 2, p_i.tau, _pts())
    assert res < 1e-9


def test_witness_real_shift(p_i):
    B1, B2 = make_bundle(1, 0, 0.3, p_i), make_bundle(1, 0, 0.3 + TWO_PI, p_i)
    W = iso_witness(B1, B2)
    assert (W.I, W.k) == (1, 0)
    assert holomorphy_residual(W, lambda x: TWO_PI, p_i.tau, _pts()) < 1e-10


@pytest.mark.parametrize("n,a,dp,dq", [(3, 1, 1, 0), (3, 1, 2, 1), (2, -1, 1, -1), (3, 2, -1, 2)])
def test_witness_general(params, n, a, dp, dq):
    tau = params.tau
    mu = 0.3 + 0.2j
    B1 = make_bundle(n, a, mu, params)
    B2 = make_bundle(n, a, mu + TWO_PI * (dp + dq * tau), params)
    W = iso_witness(B1, B2)
    assert sum(W.block_sizes) == n
    assert holomorphy_residual(W, lambda x: (B2.mu - B1.mu) / n, tau, _pts()) < 1e-8
    # gluing compatibility: Phi(x+2pi) T1 = T2 Phi(x) and the same in y
    T = transition_data(B1)
    for x, y in _pts():
        lhs = W(x + TWO_PI, y) @ T.x_transition(y)
        rhs = T.x_transition(y) @ W(x, y)
        assert np.max(np.abs(lhs - rhs)) < 1e-12
        lhs = W(x, y + TWO_PI) @ T.y_transition()
        rhs = T.y_transition() @ W(x, y)
        assert np.max(np.abs(lhs - rhs)) < 1e-12
