import math
import random

import pytest

from torusmirror.cone import eta_class
from torusmirror.errors import DomainError
from torusmirror.fukaya import make_brane
from torusmirror.sl2z import (IDENTITY, LatticeMatrix, act_on_brane, reduction_matrix, transport_cone_class,
                              transported_cone)
from torusmirror.theta import ModuliParams

PI = math.pi


def test_reduction_examples():
    assert reduction_matrix(1, 0, 1, 1) == IDENTITY
    g = reduction_matrix(2, 1, 3, 2)
    assert g.as_rows() == [[2, 1], [1, 1]] and g.det == 1
    assert reduction_matrix(1, 0, 2, 1).as_rows() == [[1, 1], [0, 1]]


@pytest.mark.parametrize("namb", [(2, 1, 3, 1), (1, 0, 1, 2), (1, 1, 1, 0)])
def test_reduction_rejects(namb):
    with pytest.raises(DomainError, match="bn - am"):
        reduction_matrix(*namb)


def test_matrix_validation():
    with pytest.raises(DomainError):
        LatticeMatrix(2, 0, 0, 1)
    with pytest.raises(DomainError):
        LatticeMatrix(1.0, 0, 0, 1)
    with pytest.raises(DomainError):
        LatticeMatrix(True, 0, 0, 1)


def test_identity_action():
    B = make_brane(3, 2, 0.4, 1.1)
    assert act_on_brane(IDENTITY, B) == B


def test_reduction_sends_pair_to_basic():
    for n, a, m, b in [(2, 1, 3, 2), (1, 0, 2, 1), (3, 1, 2, 1), (2, -1, 1, 0), (2, 1, 5, 3)]:
        g = reduction_matrix(n, a, m, b)
        assert act_on_brane(g, make_brane(n, a, 0.3, 0.2)) == make_brane(1, 0, 0.3, 0.2)
        assert act_on_brane(g, make_brane(m, b, 1.0, -0.5)) == make_brane(1, 1, 1.0, -0.5)
        assert transported_cone(g) == (m + n, a + b)


def test_vertical_image_refused():
    with pytest.raises(DomainError, match="vertical"):
        act_on_brane(LatticeMatrix(0, -1, 1, 0), make_brane(1, 0, 0, 0))


def test_orientation_normalized():
    B = act_on_brane(LatticeMatrix(-1, 0, 0, -1), make_brane(2, 1, 0, 0))
    assert (B.n, B.a) == (2, 1)


def test_group_laws():
    g, h = LatticeMatrix(2, 1, 1, 1), LatticeMatrix(1, 1, 0, 1)
    assert g @ g.inverse() == IDENTITY
    assert (g @ h).inverse() == h.inverse() @ g.inverse()
    B = make_brane(3, 1, 0.2, 0.4)
    assert act_on_brane(g @ h, B) == act_on_brane(h, act_on_brane(g, B))


def test_cone_class(p_i):
    g = reduction_matrix(2, 1, 3, 2)
    assert transport_cone_class(g, 0, 0, p_i) == pytest.approx(PI + PI * 1j)
    mu, nu = 0.4 + 0.1j, 1.3 - 0.6j
    assert transport_cone_class(g, mu, nu, p_i) == eta_class(mu, nu, p_i)
    h = reduction_matrix(1, 0, 2, 1)
    assert transport_cone_class(g @ h, mu, nu, p_i) == transport_cone_class(g, mu, nu, p_i)
    with pytest.raises(DomainError):
        transport_cone_class(LatticeMatrix(-1, 0, 0, -1), mu, nu, p_i)


def test_random_reductions():
    rng = random.Random(2024)
    P = ModuliParams(0.3 + 1.1j)
    found = 0
    while found < 50:
        n, m = rng.randint(1, 40), rng.randint(1, 40)
        a = rng.randint(-40, 40)
        if math.gcd(n, abs(a)) != 1:
            continue
        # solve b n - a m = 1 for b given m
        if (1 + a * m) % n:
            continue
        b = (1 + a * m) // n
        g = reduction_matrix(n, a, m, b)
        assert g.det == 1 and all(isinstance(v, int) for v in (g.g11, g.g12, g.g21, g.g22))
        assert transported_cone(g) == (m + n, a + b)
        assert transport_cone_class(g, 0.1, 0.2j, P) == eta_class(0.1, 0.2j, P)
        found += 1
