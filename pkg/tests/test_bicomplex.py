import cmath
import doctest
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import bicpb.bicomplex as bc
from bicpb.bicomplex import E1, E2, I1, I2, ONE, ZERO, Bicomplex, OrderRelation, compare
from bicpb.errors import SingularElement

from generators import random_bicomplex

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
bicomplexes = st.builds(Bicomplex, finite, finite, finite, finite)


def close(u, v, rel=1e-10):
    return (u - v).norm() <= rel * (1.0 + max(u.norm(), v.norm()))


def as_matrix(u):
    # independent oracle: phi1 + i2 phi2 acts like [[phi1, -phi2], [phi2, phi1]]
    return np.array([[u.phi1, -u.phi2], [u.phi2, u.phi1]])


def test_doctests():
    assert doctest.testmod(bc).failed == 0


def test_add_examples():
    assert Bicomplex(1) + Bicomplex(0, 0, 1) == Bicomplex(1, 0, 1, 0)
    u = Bicomplex(1, 2, 3, 4)
    assert u - u == ZERO
    assert bc.add(u, ZERO) == u
    assert bc.negate(u) == Bicomplex(-1, -2, -3, -4)
    assert bc.scalar_mul(2, u) == Bicomplex(2, 4, 6, 8)


def test_additive_identity_random():
    rng = np.random.default_rng(1)
    for u in random_bicomplex(rng, 1000):
        assert u + ZERO == u


def test_mul_examples():
    assert Bicomplex(1, 1) * Bicomplex(1, 0, 1) == Bicomplex(1, 1, 1, 1)
    assert E1 * E2 == ZERO
    assert E1 + E2 == ONE
    assert E1 * E1 == E1 and E2 * E2 == E2
    assert I1 * I1 == -ONE and I2 * I2 == -ONE


def test_mul_matches_matrix_representation():
    rng = np.random.default_rng(2)
    us, vs = random_bicomplex(rng, 500), random_bicomplex(rng, 500)
    for u, v in zip(us, vs):
        got = as_matrix(u * v)
        want = as_matrix(u) @ as_matrix(v)
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12 * np.abs(want).max())


@given(bicomplexes, bicomplexes, bicomplexes)
def test_ring_laws(u, v, w):
    scale = (1 + u.norm()) * (1 + v.norm()) * (1 + w.norm())
    assert (u * v - v * u).norm() <= 1e-12 * scale
    assert ((u * v) * w - u * (v * w)).norm() <= 1e-12 * scale
    assert (u * (v + w) - (u * v + u * w)).norm() <= 1e-12 * scale
    assert ((u + v) + w - (u + (v + w))).norm() <= 1e-12 * scale


def test_idempotent_examples():
    s1, s2 = bc.idempotent_decompose(I2)
    assert s1 == -1j and s2 == 1j
    assert tuple(bc.idempotent_decompose(Bicomplex(5))) == (5, 5)
    assert tuple(bc.idempotent_decompose(E1)) == (1, 0)
    assert tuple(bc.idempotent_decompose(E2)) == (0, 1)


@given(bicomplexes)
def test_idempotent_round_trip(u):
    assert close(bc.idempotent_compose(u.idempotent()), u, 1e-12)


@given(bicomplexes, bicomplexes)
def test_idempotent_homomorphism(u, v):
    a1, a2 = u.idempotent()
    b1, b2 = v.idempotent()
    c1, c2 = (u * v).idempotent()
    scale = (1.0 + u.norm()) * (1.0 + v.norm())
    assert abs(c1 - a1 * b1) <= 1e-10 * scale
    assert abs(c2 - a2 * b2) <= 1e-10 * scale


def test_norm_examples():
    assert bc.norm(ZERO) == 0
    assert Bicomplex(1, 1, 1, 1).norm() == 2
    assert math.isclose(E1.norm(), 1 / math.sqrt(2), rel_tol=1e-15)
    assert math.isclose(E1.norm_idempotent(), 1 / math.sqrt(2), rel_tol=1e-15)


@given(bicomplexes)
def test_norm_two_formulas(u):
    assert math.isclose(u.norm(), u.norm_idempotent(), rel_tol=1e-12, abs_tol=1e-300)


def test_singular_and_inverse_examples():
    assert bc.is_singular(E1) and bc.is_singular(E2)
    assert not bc.is_singular(ONE)
    assert bc.inverse(Bicomplex(2)) == Bicomplex(0.5)
    assert bc.inverse(I2) == -I2
    assert I2 * (-I2) == ONE
    with pytest.raises(SingularElement) as exc:
        bc.inverse(E1)
    assert exc.value.modulus == 0.0
    with pytest.raises(SingularElement):
        ONE / E2


@given(bicomplexes)
def test_inverse_properties(u):
    if u.singular_modulus() < 1e-3 * u.norm() ** 2 or u.norm() < 1e-6:
        return
    assert close(u * u.inverse(), ONE, 1e-10)
    assert close(u.inverse().inverse(), u, 1e-9)


def test_degenerate_examples():
    assert not bc.is_degenerate(Bicomplex(1, 0, 0, 1))
    assert bc.is_degenerate(Bicomplex(3, -7))
    assert not bc.is_degenerate(E1)
    assert E1.determinant() == 0.25


def test_degenerate_nonzero_is_nonsingular():
    rng = np.random.default_rng(3)
    from generators import random_degenerate
    for u in random_degenerate(rng, 200):
        if u.norm() > 1e-3:
            assert u.is_degenerate() and not u.is_singular()


def test_compare_examples():
    assert compare(1 + I2, 2 + 2 * I2) is OrderRelation.LESS_D
    assert compare(2 + 2 * I2, 1 + I2) is OrderRelation.GREATER_D
    u = Bicomplex(1, 2, 3, 4)
    assert compare(u, u) is OrderRelation.EQUAL
    assert compare(I1, ONE) is OrderRelation.INCOMPARABLE
    assert compare(ONE, Bicomplex(2)) is OrderRelation.LESS_B
    assert compare(ONE, 1 + I2) is OrderRelation.LESS_C
    assert compare(ZERO, ONE).is_le and not compare(ZERO, ONE).is_strictly_less


def test_compare_within_tolerance_is_equal():
    u = Bicomplex(1, 1, 1, 1)
    assert compare(u, u + Bicomplex(1e-14)) is OrderRelation.EQUAL
    assert compare(u, u + Bicomplex(1e-14), tol=0.0) is OrderRelation.LESS_B


@given(bicomplexes, bicomplexes)
def test_compare_antisymmetric(u, v):
    a, b = compare(u, v), compare(v, u)
    mirror = {"less": "greater", "greater": "less"}
    if a in (OrderRelation.EQUAL, OrderRelation.INCOMPARABLE):
        assert b is a
    else:
        head, case = a.value.split("-")
        assert b.value == f"{mirror[head]}-{case}"


@given(bicomplexes, bicomplexes, bicomplexes)
def test_compare_transitive(u, v, w):
    if bc.leq(u, v, 0.0) and bc.leq(v, w, 0.0):
        assert bc.leq(u, w, 0.0)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        Bicomplex(math.nan)
    with pytest.raises(ValueError):
        Bicomplex(0, math.inf)
    with pytest.raises(ValueError):
        Bicomplex(1e308) * Bicomplex(1e308)


def test_json_round_trip():
    u = Bicomplex(1.5, -2, 0.25, 3)
    assert Bicomplex.from_json(u.to_json()) == u
    with pytest.raises(ValueError):
        Bicomplex.from_json([1, 2, 3])


def test_power():
    u = Bicomplex(1, 2, 0.5, 0.25)
    assert bc.power(u, 1) is u
    assert close(u ** 2, u * u, 1e-12)
    assert close(u ** 3, u * u * u, 1e-12)
    assert close(bc.power(Bicomplex(4), 0.5), Bicomplex(2), 1e-15)


def test_exp_i1():
    t = 0.7
    z = cmath.exp(1j * t)
    assert bc.exp_i1(t) == Bicomplex(z.real, z.imag)
