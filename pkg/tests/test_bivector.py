from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewtwistor import _num
from skewtwistor.bivector import (
    Bivector, bivector_of, cayley_rotation, cross, endo_inner, endo_of, hodge, inner2,
    sd_split, summand, wedge, zero_bivector,
)
from skewtwistor.errors import MixedSummand, NotAntisymmetric

B = Bivector.basis
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
six = st.lists(rationals, min_size=6, max_size=6)
three = st.lists(rationals, min_size=3, max_size=3)


def plus(v):
    return Bivector(s=list(v) + [0, 0, 0])


def minus(v):
    return Bivector(s=[0, 0, 0] + list(v))


def I4():
    return _num.eye(4, True)


# ------------------------------------------------------------ examples

def test_hodge_examples():
    assert hodge(B("E12")) == B("E34")
    assert hodge(B("s2+")) == B("s2+")
    assert hodge(B("s3-")) == -B("s3-")


def test_sd_split_examples():
    p, m = sd_split(B("E12"))
    assert p == B("s1+") * Fraction(1, 2) and m == B("s1-") * Fraction(1, 2)
    assert sd_split(B("s1+")) == (B("s1+"), zero_bivector())
    z = zero_bivector()
    assert sd_split(z) == (z, z)


def test_endo_of_s1_plus():
    K = endo_of(B("s1+"))
    E = I4()
    # columns are images: E1 -> E2, E2 -> -E1, E3 -> E4, E4 -> -E3
    assert list(K @ E[:, 0]) == list(E[:, 1])
    assert list(K @ E[:, 1]) == list(-E[:, 0])
    assert list(K @ E[:, 2]) == list(E[:, 3])
    assert list(K @ E[:, 3]) == list(-E[:, 2])


def test_bivector_of_inverse_and_rejection():
    assert bivector_of(endo_of(B("s2-"))) == B("s2-")
    with pytest.raises(NotAntisymmetric):
        bivector_of(I4())


def test_cross_examples():
    assert cross(B("s1+"), B("s2+")) == B("s3+")
    assert cross(B("s1-"), B("s2-")) == B("s3-")
    assert cross(B("s1+"), B("s1+")) == zero_bivector()
    with pytest.raises(MixedSummand):
        cross(B("s1+"), B("s1-"))


def test_wedge_matches_basis():
    E = I4()
    assert wedge(E[0], E[1]) == B("E12")
    assert wedge(E[1], E[0]) == -B("E12")


def test_summand_labels():
    assert summand(B("s3+")) == "+"
    assert summand(B("s1-")) == "-"
    assert summand(B("E12")) is None
    assert summand(zero_bivector()) == "0"


# ------------------------------------------------------------ properties

@given(six)
def test_hodge_involution_and_split(v):
    a = Bivector(s=v)
    assert hodge(hodge(a)) == a
    p, m = sd_split(a)
    assert p + m == a and hodge(p) == p and hodge(m) == -m


@given(six)
def test_endo_round_trip(v):
    a = Bivector(s=v)
    K = endo_of(a)
    assert np.all(K == -K.T)
    assert bivector_of(K) == a


@given(six, six)
def test_endo_inner_is_twice_inner2(u, v):
    a, b = Bivector(s=u), Bivector(s=v)
    assert endo_inner(endo_of(a), endo_of(b)) == 2 * inner2(a, b)


@given(three, three, st.sampled_from(("+", "-")))
def test_product_identity(u, v, tag):
    """K_a K_b = -g(a,b) Id ± K_{a×b} within one summand."""
    mk = plus if tag == "+" else minus
    a, b = mk(u), mk(v)
    sign = 1 if tag == "+" else -1
    lhs = endo_of(a) @ endo_of(b)
    rhs = -I4() * inner2(a, b) + endo_of(cross(a, b)) * sign
    assert np.all(lhs == rhs)


@given(three, three, st.sampled_from(("+", "-")))
def test_cross_is_half_bracket(u, v, tag):
    mk = plus if tag == "+" else minus
    a, b = mk(u), mk(v)
    Ka, Kb = endo_of(a), endo_of(b)
    sign = 1 if tag == "+" else -1
    assert np.all(endo_of(cross(a, b)) * sign == (Ka @ Kb - Kb @ Ka) * Fraction(1, 2))


@given(three, three)
def test_opposite_summands_commute(u, v):
    Ka, Kb = endo_of(plus(u)), endo_of(minus(v))
    assert np.all(Ka @ Kb == Kb @ Ka)


@given(three, three, st.sampled_from(("+", "-")))
def test_anticommute_iff_orthogonal(u, v, tag):
    mk = plus if tag == "+" else minus
    a, b = mk(u), mk(v)
    Ka, Kb = endo_of(a), endo_of(b)
    assert bool(np.all(Ka @ Kb + Kb @ Ka == 0)) == (inner2(a, b) == 0)


def test_unit_bivector_squares_to_minus_identity():
    for name in ("s1+", "s2+", "s3+", "s1-", "s2-", "s3-"):
        K = endo_of(B(name))
        assert np.all(K @ K == -I4())
    a = Bivector(s=[Fraction(3, 5), Fraction(4, 5), 0, 0, 0, 0])
    assert np.all(endo_of(a) @ endo_of(a) == -I4())


def _rotate(a: Bivector, R) -> Bivector:
    K = endo_of(a)
    return bivector_of(R @ K @ R.T)


skew6 = st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=3), min_size=6, max_size=6)


@settings(max_examples=40)
@given(skew6, six, six)
def test_frame_independence(w, u, v):
    """All identities survive conjugation by a rational rotation of determinant +1."""
    A = Bivector(s=w).full_matrix()
    R = cayley_rotation(A)
    assert np.all(R @ R.T == I4()) and _num.det(R) == 1
    a, b = Bivector(s=u), Bivector(s=v)
    ra, rb = _rotate(a, R), _rotate(b, R)
    assert inner2(ra, rb) == inner2(a, b)
    assert hodge(ra) == _rotate(hodge(a), R)
    pa, _ = sd_split(a)
    pb, _ = sd_split(b)
    assert cross(_rotate(pa, R), _rotate(pb, R)) == _rotate(cross(pa, pb), R)
