from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from skewtwistor import _num
from skewtwistor.catalog import (
    by_name, einstein_weyl_scan, exterior_d_basis, g_lambda_algebra, hopf_complex_structure, lee_form,
    make_flat, make_g_lambda, make_hopf, solve_conf_locus,
)
from skewtwistor.decomposition import decompose_point
from skewtwistor.errors import NoSolution, NotOrthogonalComplexStructure
from skewtwistor.lie import basis_ricci
from skewtwistor.weyl import WeylStructure, conformal_scalar

A1 = [[1, 0, 0, 0]]


def test_g_lambda_jacobi_for_many_lambda():
    for lam in (0, 1, 5, Fraction(-7, 3)):
        assert g_lambda_algebra(lam).jacobi_defect() == 0


def test_g1_basis_ricci_magnitudes():
    r = basis_ricci(make_g_lambda(0, 1))
    assert [r[i, i] for i in range(4)] == [-6, Fraction(-9, 2), Fraction(-9, 2), Fraction(-15, 2)]


def test_curvature_independent_of_lambda():
    a, b = make_g_lambda(0, 2).point, make_g_lambda(5, 2).point
    assert np.all(a.ricci == b.ricci) and np.all(a.rnabla_op == b.rnabla_op)


def test_scalar_at_k2():
    assert make_g_lambda(0, 2).point.scalar_curv == -6


def test_lambda_sign_isometry():
    for lam in (1, 5):
        a, b = make_g_lambda(lam, 3).point, make_g_lambda(-lam, 3).point
        assert a.scalar_curv == b.scalar_curv
        da, db = decompose_point(a), decompose_point(b)
        assert da.wplus_norm2 == db.wplus_norm2 and da.wminus_norm2 == db.wminus_norm2


def test_hopf_curvature():
    pc = make_hopf().point
    assert np.all(pc.ricci == _num.array(np.diag([2, 2, 2, 0])))
    dec = decompose_point(pc)
    assert _num.all_zero(dec.wplus) and _num.all_zero(dec.wminus)


def test_flat_all_zero():
    pc = make_flat().point
    assert _num.all_zero(pc.rnabla_op) and _num.all_zero(pc.rd_op)


def test_lee_form():
    flat = make_flat()
    assert _num.all_zero(lee_form(flat, hopf_complex_structure()))
    hopf = make_hopf()
    theta = lee_form(hopf, hopf_complex_structure())
    assert list(theta) == [0, 0, 0, 2]
    assert _num.all_zero(exterior_d_basis(hopf, theta))
    assert conformal_scalar(WeylStructure(hopf, theta)) == 0
    with pytest.raises(NotOrthogonalComplexStructure):
        lee_form(hopf, _num.eye(4, True))
    J = hopf_complex_structure() * 2
    with pytest.raises(NotOrthogonalComplexStructure):
        lee_form(hopf, J)


def test_conf_locus_g1_consistent_sign():
    loc = solve_conf_locus(make_g_lambda(0, 1), A1)
    assert loc.roots == [-5, -3]
    mu = loc.symbols[0]
    assert sp.expand(loc.polynomial + sp.Rational(3, 2) * (mu ** 2 + 8 * mu + 15)) == 0


def test_conf_locus_g2_relation():
    loc = solve_conf_locus(make_g_lambda(0, 2), [[1, 0, 0, 0], [0, 0, 0, 1]])
    m1, m4 = loc.symbols
    assert [str(s) for s in loc.symbols] == ["mu1", "mu4"]
    assert sp.expand(loc.polynomial + sp.Rational(3, 8) * ((m1 + 4) ** 2 + 4 * m4 ** 2)) == 0


def test_conf_locus_flat_and_empty():
    assert solve_conf_locus(make_flat(), A1).roots == [0]
    with pytest.raises(NoSolution):
        solve_conf_locus(make_g_lambda(0, 2), [[0, 0, 0, 1]])


def test_conf_locus_roots_evaluate_to_zero():
    g = make_g_lambda(0, 1)
    for r in solve_conf_locus(g, A1).roots:
        ws = WeylStructure(g, [Fraction(int(r)), 0, 0, 0])
        assert conformal_scalar(ws) == 0


def test_einstein_weyl_scan():
    r2 = einstein_weyl_scan(make_g_lambda(0, 2))
    assert r2.passing == [(0, 0, 0, 0)] and r2.grid_size == 9 ** 4
    assert all(np.allclose(p, 0, atol=1e-6) for p, _ in r2.minima)
    r1 = einstein_weyl_scan(make_g_lambda(0, 1))
    assert r1.passing == [] and r1.minima == []
    rf = einstein_weyl_scan(make_flat())
    assert rf.passing == [(0, 0, 0, 0)]


def test_einstein_weyl_scan_wider_box_finds_g1_solution():
    vals = [Fraction(i) for i in range(-4, 5)]
    res = einstein_weyl_scan(make_g_lambda(0, 1), vals)
    assert res.passing == [(3, 0, 0, 0)]


def test_einstein_weyl_scan_empty_values():
    assert einstein_weyl_scan(make_flat(), []).passing == []


def test_by_name():
    assert by_name("g_lambda", {"k": 2}).point.scalar_curv == -6
    assert by_name("hopf").name == "hopf"
    with pytest.raises(KeyError):
        by_name("k3")
