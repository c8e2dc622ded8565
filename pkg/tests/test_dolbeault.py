import math

import numpy as np
import pytest

from torusmirror.bundles import hom_dims, make_bundle
from torusmirror.cone import eta_class, make_cone
from torusmirror.dolbeault import (FourierModeSystem, _kernel, assemble, bundle_frame, solve_cone_h0,
                                   solve_h0)
from torusmirror.errors import DomainError
from torusmirror.lattice import TWO_PI
from torusmirror.theta import ModuliParams

PI = math.pi
OBJS = [(n, a) for n in (1, 2, 3) for a in range(-3, 4) if math.gcd(n, a) == 1 or (n == 1 and a == 0)]


def test_spec_examples(p_i):
    nu, mu, eta = 0.4 + 0.3j, 0.2 - 0.1j, PI + PI * 1j
    assert solve_h0(make_bundle(1, 0, 0, p_i), make_bundle(1, 1, nu, p_i)).dimension == 1
    assert solve_h0(make_bundle(1, 1, nu, p_i), make_bundle(1, 0, mu, p_i)).dimension == 0
    E = make_bundle(2, 1, eta, p_i)
    est = solve_h0(E, E)
    assert est.dimension == 1 and est.conclusive and est.gap >= 10


@pytest.mark.parametrize("tau", [1j, 0.3 + 1.1j])
def test_all_small_pairs(tau):
    P = ModuliParams(tau)
    mu, nu = 0.7 + 0.3 * tau, -1.1 + 0.8 * tau
    count = 0
    for n, a in OBJS:
        for m, b in OBJS:
            if b * n == a * m:
                continue
            B1, B2 = make_bundle(n, a, mu, P), make_bundle(m, b, nu, P)
            est = solve_h0(B1, B2)
            assert est.conclusive and est.gap >= 10, (n, a, m, b, est.gap)
            assert est.dimension == hom_dims(B1, B2)[0], (n, a, m, b)
            count += 1
    assert count == 210


@pytest.mark.parametrize("n,a", [(1, 0), (1, 1), (2, 1), (2, -1), (3, 1), (3, -2)])
def test_equal_pairs(params, n, a):
    tau = params.tau
    mu = 0.9 + 0.4 * tau
    B = make_bundle(n, a, mu, params)
    for shift, expect in [(0, 1), (TWO_PI, 1), (TWO_PI * tau, 1), (TWO_PI * (1 - tau), 1),
                          (PI, 0), (0.5 * tau, 0)]:
        est = solve_h0(B, make_bundle(n, a, mu + shift, params))
        assert est.conclusive
        assert est.dimension == expect, (shift, est.gap)


def test_lattice_shift_invariance(p_i):
    for (n, a), (m, b) in [((1, 0), (2, 1)), ((3, -1), (1, 1)), ((2, 1), (3, -1))]:
        base = solve_h0(make_bundle(n, a, 0.3, p_i), make_bundle(m, b, 0.2j, p_i)).dimension
        for s in (TWO_PI, TWO_PI * 1j):
            assert solve_h0(make_bundle(n, a, 0.3 + s, p_i), make_bundle(m, b, 0.2j, p_i)).dimension == base


def test_cutoff_robustness(p_i):
    for (n, a), (m, b) in [((1, 0), (3, 2)), ((2, -1), (1, 1)), ((2, 1), (2, 1))]:
        B1, B2 = make_bundle(n, a, 0.1, p_i), make_bundle(m, b, 0.1, p_i)
        N = 10 + abs(b * n - a * m)
        assert solve_h0(B1, B2, N).dimension == solve_h0(B1, B2, N + 4).dimension


def test_rank_limit(p_i):
    with pytest.raises(DomainError):
        solve_h0(make_bundle(4, 1, 0, p_i), make_bundle(1, 0, 0, p_i))


def test_boundary_modes_flagged(p_i):
    B = make_bundle(2, 1, 0.3, p_i)
    sysm = assemble(bundle_frame(B), bundle_frame(make_bundle(3, 1, 0.1, p_i)), 8)
    assert sysm.boundary
    assert sysm.matrix.shape[1] == len(sysm.states)
    assert np.all(np.isfinite(sysm.matrix))


def _synthetic(svals):
    D = len(svals)
    states = [(0, 0, k, 0.0) for k in range(D)]
    return FourierModeSystem(N=100, states=states, index={}, omega=np.zeros(D), links=[], boundary=[],
                             propagator=np.eye(D), matrix=np.diag(svals))


def test_gap_flagging():
    est = _kernel(_synthetic([1.0, 1e-3, 3e-6, 9e-7]))
    assert est.dimension == 1 and not est.conclusive and est.gap < 10
    est = _kernel(_synthetic([1.0, 1e-3, 1e-10]))
    assert est.dimension == 1 and est.conclusive and est.gap > 1e3
    est = _kernel(_synthetic([1.0, 0.5]))
    assert est.dimension == 0 and est.conclusive


CONES = [(PI, 0.0), (PI + 0.7j, 0.3j), (0.4 + 0.2j, 1.3 - 0.5j), (2.0, 1.0 + 0.9j)]


@pytest.mark.parametrize("mu,nu", CONES)
def test_cone_dimensions(p_i, mu, nu):
    tau = p_i.tau
    cone = make_cone(mu, nu, p_i)
    e = eta_class(mu, nu, p_i)
    for eta, expect in [(e, 1), (e + PI, 0), (e + TWO_PI, 1), (e + TWO_PI * tau, 1), (mu + nu, 0)]:
        for direction in ("into", "outof"):
            est = solve_cone_h0(direction, eta, cone)
            assert est.conclusive
            assert est.dimension == expect, (direction, eta, est.gap)


def test_cone_other_tau():
    P = ModuliParams(-0.5 + 0.8j)
    cone = make_cone(PI, 0, P)
    e = eta_class(PI, 0, P)
    assert solve_cone_h0("into", e, cone).dimension == 1
    assert solve_cone_h0("outof", e + PI * P.tau, cone).dimension == 0


def test_cone_bad_direction(p_i):
    with pytest.raises(DomainError):
        solve_cone_h0("sideways", 0, make_cone(PI, 0, p_i))
