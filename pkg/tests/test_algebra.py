import cmath
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcbergman import algebra as A
from bcbergman.algebra import BiComplex, Hyperbolic, hyp_leq
from bcbergman.errors import NonFiniteValue, ZeroDivisorError

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
bicomplex = st.builds(BiComplex, complexes, complexes)


def cartesian_mul(z, w):
    """(z1 + j z2)(w1 + j w2) with j^2 = -1: the oracle for the ring product."""
    (z1, z2), (w1, w2) = z, w
    return z1 * w1 - z2 * w2, z1 * w2 + z2 * w1


def close(a, b, rel=1e-12):
    scale = 1.0 + max(a.sup(), b.sup())
    return (a - b).sup() <= rel * scale


# -- construction ----------------------------------------------------------

def test_from_cartesian_real_unit():
    z = A.from_cartesian(1, 0)
    assert z.b1 == 1 and z.b2 == 1


def test_from_cartesian_j():
    z = A.from_cartesian(0, 1)
    assert z.b1 == -1j and z.b2 == 1j


def test_one_plus_k_is_twice_e():
    # 1 + j*i = 1 + k = 2e
    z = A.from_cartesian(1, 1j)
    assert z == BiComplex(2, 0)
    assert z == 2 * A.E
    # and 1 + j*(-i) = 1 - k = 2e†
    assert A.from_cartesian(1, -1j) == BiComplex(0, 2)


def test_cartesian_round_trip():
    z = BiComplex(0.3 - 2j, 1.5 + 0.25j)
    back = A.from_cartesian(*z.to_cartesian())
    assert close(z, back, 1e-15)


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteValue):
        BiComplex(float("nan"), 0)
    with pytest.raises(NonFiniteValue):
        A.from_cartesian(0, complex(math.inf, 0))


def test_idempotents():
    e, ed = A.E, A.EDAG
    assert e * ed == A.ZERO
    assert e * e == e
    assert ed * ed == ed
    assert e + ed == A.ONE


# -- ring -------------------------------------------------------------------

def test_j_squared():
    assert close(A.J * A.J, BiComplex(-1, -1))


def test_i_times_j_is_k():
    assert close(A.I * A.J, A.K)
    assert A.K == A.E - A.EDAG


def test_mul_matches_cartesian_product():
    z = A.from_cartesian(1 + 2j, -0.5 + 1j)
    w = A.from_cartesian(-3 + 0.5j, 2 - 1j)
    want = A.from_cartesian(*cartesian_mul(z.to_cartesian(), w.to_cartesian()))
    assert close(A.mul(z, w), want)


def test_function_aliases():
    z, w = BiComplex(1 + 1j, 2), BiComplex(-1, 3j)
    assert A.add(z, w) == z + w
    assert A.sub(z, w) == z - w
    assert A.neg(z) == BiComplex(-1 - 1j, -2)
    assert 2 + z == BiComplex(3 + 1j, 4)
    assert 1 - z == BiComplex(-1j, -1)


def test_inverse_examples():
    assert A.inverse(BiComplex(2, 4)) == BiComplex(0.5, 0.25)
    assert A.inverse(A.ONE) == A.ONE
    with pytest.raises(ZeroDivisorError):
        A.inverse(A.E)


def test_zero_divisor_tolerance_is_relative():
    assert BiComplex(1e6, 1e-7).is_zero_divisor()
    assert not BiComplex(1.0, 1e-7).is_zero_divisor()
    with pytest.raises(ZeroDivisorError):
        A.ONE / BiComplex(3, 0)


def test_division():
    z, w = BiComplex(1 + 1j, 2), BiComplex(2, -1j)
    assert close((z / w) * w, z)
    assert close(1 / w * w, A.ONE)


# -- conjugations -------------------------------------------------------------

def test_conjugation_examples():
    z = BiComplex(1j, 2)
    assert A.conj(z, "star") == BiComplex(-1j, 2)
    assert A.conj(z, "dagger") == BiComplex(2, 1j)
    assert A.conj(z, "bar") == BiComplex(2, -1j)


def test_conjugations_in_cartesian_units():
    # star flips i and j, dagger flips j and k, bar flips i and k
    assert A.I.conj("star") == -A.I and close(A.J.conj("star"), -A.J) and A.K.conj("star") == A.K
    assert A.I.conj("dagger") == A.I and close(A.J.conj("dagger"), -A.J)
    assert A.K.conj("dagger") == -A.K
    assert A.I.conj("bar") == -A.I and close(A.J.conj("bar"), A.J) and A.K.conj("bar") == -A.K


def test_unknown_conjugation():
    with pytest.raises(ValueError):
        A.ONE.conj("tilde")


# -- modulus and order ------------------------------------------------------

def test_modulus_examples():
    assert A.modulus_k(BiComplex(3, 4)) == Hyperbolic(3, 4)
    assert A.modulus_k(A.ZERO) == Hyperbolic(0, 0)
    z = BiComplex(3 - 4j, 1j)
    m = z.modulus_k()
    assert close(m.as_bicomplex() * m.as_bicomplex(), z * z.conj("star"))


def test_hyp_leq_examples():
    assert hyp_leq(Hyperbolic(1, 1), Hyperbolic(2, 3)) is True
    assert hyp_leq(Hyperbolic(0, 0), Hyperbolic(1, -1)) is None
    x = Hyperbolic(0.5, -2)
    assert hyp_leq(x, x) is True
    assert hyp_leq(Hyperbolic(2, 3), Hyperbolic(1, 1)) is False


def test_hyperbolic_helpers():
    h = Hyperbolic(4, 9)
    assert h.sqrt() == Hyperbolic(2, 3)
    assert h.in_d_plus() and not Hyperbolic(-1, 0).in_d_plus()
    assert 2 * h == Hyperbolic(8, 18)
    assert h * Hyperbolic(0.5, 1) == Hyperbolic(2, 9)
    assert Hyperbolic(0, 2).is_zero_divisor()
    with pytest.raises(ValueError):
        Hyperbolic(-1, 1).sqrt()


# -- theta --------------------------------------------------------------------

def test_theta_swaps_i_and_j():
    assert close(A.theta(A.I), A.J)
    assert close(A.theta(A.J), A.I)
    assert close(A.theta(A.K), A.K)
    assert close(A.theta(A.ONE), A.ONE)


def test_theta_cartesian_permutation():
    z = A.from_cartesian(1 + 2j, 3 + 4j)  # (x1, y1, x2, y2) = (1, 2, 3, 4)
    assert z.theta().components() == pytest.approx((1, 3, 2, 4))


def test_j_coefficients():
    # the C(j) idempotent coefficients of j itself are (-j, j), read as (-i, i)
    a1, a2 = A.I.j_coefficients()
    assert a1 == pytest.approx(-1j) and a2 == pytest.approx(1j)


# -- JSON -------------------------------------------------------------------------

def test_json_round_trip():
    z = BiComplex(0.25 - 1j, 3)
    assert A.from_json(json.loads(json.dumps(z.to_json()))) == z


def test_json_cartesian_form():
    z = A.from_json({"z1": [1, 0], "z2": 1})
    assert z == A.from_cartesian(1, 1)


@pytest.mark.parametrize("bad", [[1, 2], {"b1": [1, 2, 3], "b2": 0}, {"b1": "x", "b2": 0}, {"q": 1}])
def test_json_rejects(bad):
    with pytest.raises(ValueError):
        A.from_json(bad)


# -- properties ---------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(bicomplex, bicomplex, bicomplex)
def test_ring_axioms(z, w, v):
    scale = (1 + z.sup()) * (1 + w.sup()) * (1 + v.sup())
    assert ((z * w) * v - z * (w * v)).sup() <= 1e-12 * scale
    assert z * w == w * z
    assert (z * (w + v) - (z * w + z * v)).sup() <= 1e-12 * scale
    assert z + w == w + z


@settings(max_examples=200, deadline=None)
@given(bicomplex, bicomplex)
def test_product_matches_cartesian(z, w):
    want = A.from_cartesian(*cartesian_mul(z.to_cartesian(), w.to_cartesian()))
    assert (z * w - want).sup() <= 1e-12 * (1 + z.sup()) * (1 + w.sup())


@settings(max_examples=200, deadline=None)
@given(bicomplex)
def test_conjugation_table(z):
    kinds = ("star", "dagger", "bar")
    for k in kinds:
        assert z.conj(k).conj(k) == z
    for a in kinds:
        for b in kinds:
            if a != b:
                (third,) = set(kinds) - {a, b}
                assert z.conj(a).conj(b) == z.conj(third)
                assert z.conj(a).conj(b) == z.conj(b).conj(a)


@settings(max_examples=200, deadline=None)
@given(bicomplex, bicomplex)
def test_modulus_multiplicative(z, w):
    lhs = (z * w).modulus_k()
    rhs = z.modulus_k() * w.modulus_k()
    scale = 1 + z.sup() * w.sup()
    assert abs(lhs.a - rhs.a) <= 1e-12 * scale and abs(lhs.b - rhs.b) <= 1e-12 * scale


@settings(max_examples=200, deadline=None)
@given(bicomplex, bicomplex)
def test_triangle_inequality(z, w):
    lhs = (z + w).modulus_k()
    rhs = z.modulus_k() + w.modulus_k()
    slack = 1e-12 * (1 + z.sup() + w.sup())
    assert hyp_leq(lhs, rhs + Hyperbolic(slack, slack)) is True


@settings(max_examples=200, deadline=None)
@given(bicomplex)
def test_modulus_zero_divisor_agrees(z):
    assert z.modulus_k().is_zero_divisor() == z.is_zero_divisor()


@settings(max_examples=200, deadline=None)
@given(bicomplex, bicomplex)
def test_theta_automorphism(z, w):
    scale = (1 + z.sup()) * (1 + w.sup())
    assert ((z * w).theta() - z.theta() * w.theta()).sup() <= 1e-12 * scale
    assert ((z + w).theta() - (z.theta() + w.theta())).sup() <= 1e-12 * scale
    assert (z.theta().theta() - z).sup() <= 1e-12 * (1 + z.sup())


@settings(max_examples=100, deadline=None)
@given(bicomplex)
def test_inverse_property(z):
    if z.is_zero_divisor():
        return
    prod = z * z.inverse()
    assert abs(prod.b1 - 1) <= 1e-12 and abs(prod.b2 - 1) <= 1e-12


def test_unit_phase_modulus():
    z = BiComplex(cmath.exp(0.3j), cmath.exp(-2j))
    assert z.modulus_k().a == pytest.approx(1) and z.modulus_k().b == pytest.approx(1)
