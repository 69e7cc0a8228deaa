from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import random_geometry, random_triples
from skewtwistor import _num
from skewtwistor.bivector import PAIRS, Bivector, endo_of, inner2
from skewtwistor.catalog import make_flat, make_g_lambda
from skewtwistor.checks import block_pp, block_mixed, decompose, flip_point
from skewtwistor.errors import NotVertical
from skewtwistor.twistor import (
    ProductFiberPoint, TwistorPoint, VerticalVector, brute_force_check, curvature_action,
    horizontal_nijenhuis, k_m, mixed_nijenhuis, sample_fibers, vertical_cs, vertical_nijenhuis,
)

B = Bivector.basis
E = _num.eye(4, True)
TP = TwistorPoint


def P(tag, i):
    return TP(B(f"s{i}{tag}"), tag)


# ------------------------------------------------------------ fibre structures

def test_vertical_cs_examples():
    assert vertical_cs(P("+", 1), B("s2+")) == B("s3+")
    assert vertical_cs(P("-", 1), B("s2-")) == -B("s3-")
    with pytest.raises(NotVertical):
        vertical_cs(P("+", 1), B("s1+"))
    with pytest.raises(NotVertical):
        vertical_cs(P("+", 1), B("s2-"))


def test_twistor_point_validation():
    with pytest.raises(ValueError):
        TP(B("s1+") * 2, "+")
    with pytest.raises(ValueError):
        TP(B("s1+"), "-")


@pytest.mark.parametrize("tag", ["+", "-"])
def test_vertical_cs_matches_composition(tag):
    """K_sigma ∘ K_V = K_{J_sigma V} for unit sigma ⊥ V."""
    for p in sample_fibers(12)[tag]:
        V, JV = p.vertical_basis()
        assert np.allclose(_num.to_float(p.endo @ endo_of(V)), _num.to_float(endo_of(JV)), atol=1e-12)
        assert vertical_cs(p, JV).isclose(-V)


def test_k_m_examples():
    J = ProductFiberPoint(P("+", 1), P("+", 1))
    V = VerticalVector(B("s2+"), B("s2+"))
    assert k_m(1, J, V) == VerticalVector(B("s3+"), B("s3+"))
    assert k_m(2, J, V) == VerticalVector(B("s3+"), -B("s3+"))
    for m, other in ((3, 2), (4, 1)):
        assert k_m(m, J, V) == -k_m(other, J, V)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_k_m_squares_to_minus_identity(m):
    S = sample_fibers(10)
    for p1 in S["+"][::3]:
        for p2 in S["-"][::3]:
            J = ProductFiberPoint(p1, p2)
            (a, b), (c, d) = p1.vertical_basis(), p2.vertical_basis()
            V = VerticalVector(a + b * Fraction(1, 3) if a.exact and b.exact else a + b * (1 / 3),
                               c - d * 2)
            assert k_m(m, J, k_m(m, J, V)).isclose(-V, 1e-12)


def test_sample_fibers_basis_and_determinism():
    S6 = sample_fibers(6)
    for tag in "+-":
        got = sorted(tuple(p.coords) for p in S6[tag])
        assert got == sorted(tuple(v) for v in np.vstack([np.eye(3), -np.eye(3)]).astype(int).tolist())
    a, b = sample_fibers(26, 7), sample_fibers(26, 7)
    assert all(x.sigma == y.sigma for t in "+-" for x, y in zip(a[t], b[t]))
    assert all(abs(float(inner2(p.sigma, p.sigma)) - 1) < 1e-12 for p in a["+"])
    assert any(x.sigma != y.sigma for x, y in zip(a["+"][6:], sample_fibers(26, 8)["+"][6:]))


# ------------------------------------------------------------ Nijenhuis pieces

@pytest.mark.parametrize("geom", random_triples(3, start=500), ids=lambda g: g.name)
def test_horizontal_nijenhuis_vanishes_for_skew_torsion(geom):
    T = geom.point.torsion3
    for p in sample_fibers(26)["+"][:6]:
        for i, j in PAIRS:
            assert _num.all_zero(horizontal_nijenhuis(T, p, E[i], E[j]))


def test_horizontal_nijenhuis_zero_and_non_skew():
    p = P("+", 2)
    assert _num.all_zero(horizontal_nijenhuis(lambda X, Y: X * 0, p, E[0], E[1]))
    a, b, C = _num.array([1, 2, 0, -1]), _num.array([0, 1, 3, 0]), _num.array([2, 0, 1, 1])

    def T(X, Y):                          # (a∧b)(X, Y) C: antisymmetric but not a 3-form
        return C * ((X @ a) * (Y @ b) - (Y @ a) * (X @ b))

    assert any(not _num.all_zero(horizontal_nijenhuis(T, q, E[i], E[j]))
               for q in sample_fibers(6)["+"] for i, j in PAIRS)


def test_horizontal_nijenhuis_vectorial_torsion_vanishes():
    """Vectorial torsion g(X,A)Y - g(Y,A)X is not skew yet passes: it preserves every J."""
    A = _num.array([1, 2, 0, -1])

    def T(X, Y):
        return Y * (X @ A) - X * (Y @ A)

    assert all(_num.all_zero(horizontal_nijenhuis(T, q, E[i], E[j]))
               for q in sample_fibers(6)["+"] for i, j in PAIRS)


def test_vertical_nijenhuis_flat_zero():
    pc = make_flat().point
    J = ProductFiberPoint(P("+", 1), P("-", 2))
    for m in (1, 2, 3, 4):
        for i, j in PAIRS:
            assert vertical_nijenhuis(m, pc.rd_op, J, E[i], E[j]).is_zero()


def test_vertical_nijenhuis_tracks_mixed_block():
    """g_1, tau = 0, m = 2 on (+,-): nonzero somewhere iff the mixed R^D block is nonzero."""
    pc = make_g_lambda(0, 1).point
    J = ProductFiberPoint(P("+", 1), P("-", 1))
    nonzero = any(not vertical_nijenhuis(2, pc.rd_op, J, E[i], E[j]).is_zero()
                  for i, j in PAIRS)
    assert nonzero == (block_mixed(pc.rd_op) != 0)


@pytest.mark.parametrize("geom", random_triples(2, start=600), ids=lambda g: g.name)
def test_vertical_components_orthogonal_to_sigma(geom):
    pc = geom.point
    for p1 in sample_fibers(6)["+"]:
        J = ProductFiberPoint(p1, P("-", 3))
        for i, j in PAIRS:
            v = vertical_nijenhuis(1, pc.rd_op, J, E[i], E[j])
            assert inner2(v.v1, J.j1.sigma) == 0 and inner2(v.v2, J.j2.sigma) == 0
        a = curvature_action(pc.rd_op, E[0], E[2], p1.sigma)
        assert inner2(a, p1.sigma) == 0


def test_mixed_nijenhuis():
    J = ProductFiberPoint(P("+", 1), P("+", 1))
    V = VerticalVector(B("s2+"), B("s3+"))
    assert _num.all_zero(mixed_nijenhuis(1, J, V, E[0]))
    assert list(mixed_nijenhuis(3, J, V, E[0])) == [0, 0, 0, 2]
    zero = VerticalVector(B("s2+") * 0, B("s2+") * 0)
    assert _num.all_zero(mixed_nijenhuis(4, J, zero, E[2]))
    with pytest.raises(NotVertical):
        mixed_nijenhuis(3, J, VerticalVector(B("s1+"), B("s2+")), E[0])


@given(st.integers(0, 5), st.integers(0, 5), st.sampled_from(PAIRS))
def test_vertical_nijenhuis_bilinear_in_rd(i, j, pair):
    """N is linear in the curvature operator (fixed J, X, Y)."""
    pc1, pc2 = make_g_lambda(1, 1, (1, 0, 0, 0)).point, make_g_lambda(0, 3).point
    J = ProductFiberPoint(sample_fibers(6)["+"][i], sample_fibers(6)["-"][j])
    X, Y = E[pair[0]], E[pair[1]]
    lhs = vertical_nijenhuis(2, pc1.rd_op + pc2.rd_op, J, X, Y)
    rhs = vertical_nijenhuis(2, pc1.rd_op, J, X, Y) + vertical_nijenhuis(2, pc2.rd_op, J, X, Y)
    assert lhs == rhs


# ------------------------------------------------------------ oracle

def test_pointwise_and_vectorised_oracle_agree():
    pc = random_geometry(101).point
    S = sample_fibers(10)
    scale = 1 + _num.fnorm(pc.rnabla_op)
    rd = _num.to_float(pc.rd_op)
    Ef = np.eye(4)
    for m, comps in ((1, "++"), (2, "+-")):
        mx = max(vertical_nijenhuis(m, rd, ProductFiberPoint(p1, p2), Ef[i], Ef[j]).max_abs()
                 for p1 in S[comps[0]] for p2 in S[comps[1]] for i, j in PAIRS)
        res = brute_force_check(m, comps, pc, S)
        assert abs(mx / scale - res.vertical) < 1e-12


def test_oracle_examples():
    flat = make_flat().point
    for m in (1, 2):
        assert brute_force_check(m, "+-", flat).verdict
    for m in (3, 4):
        r = brute_force_check(m, "++", flat)
        assert not r.verdict and r.mixed > 0 and r.witness
    # g_2 has W+ = 0; (+,-) with tau = 0 holds
    assert brute_force_check(1, "+-", make_g_lambda(0, 2).point).verdict


@pytest.mark.parametrize("geom", [make_g_lambda(0, 1), make_g_lambda(0, 2), make_g_lambda(0, 3),
                                  make_g_lambda(1, 1, (3, 0, 0, 0)), random_geometry(9)],
                         ids=lambda g: g.name)
def test_single_twistor_reduction(geom):
    """m = 1 on (+,+): fails exactly when W+ or the (+,+) block of R^D is nonzero."""
    pc = geom.point
    dec = decompose(pc)
    expected = _num.all_zero(dec.wplus) and block_pp(pc.rd_op) == 0
    assert brute_force_check(1, "++", pc).verdict == expected


def test_flip_point_oracle_consistency():
    """The oracle on (-,-) equals the oracle on (+,+) of the reoriented point."""
    g = make_g_lambda(1, 1, (-3, 0, 0, 0))
    a = brute_force_check(1, "--", g.point)
    b = brute_force_check(1, "++", flip_point(g.point))
    assert a.verdict == b.verdict


def test_exact_samples_are_rational_unit_and_close():
    a, b = sample_fibers(26), sample_fibers(26, exact=True)
    for t in "+-":
        for x, y in zip(a[t], b[t]):
            assert y.sigma.exact and inner2(y.sigma, y.sigma) == 1
            assert np.allclose(_num.to_float(y.coords), _num.to_float(x.coords), atol=0.05)
