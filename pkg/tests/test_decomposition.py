from fractions import Fraction

import numpy as np
import pytest

from helpers import random_triples
from skewtwistor import _num
from skewtwistor.catalog import make_flat, make_g_lambda, make_hopf
from skewtwistor.checks import flip_point
from skewtwistor.decomposition import decompose, decompose_point, is_asd, is_einstein, is_sd
from skewtwistor.errors import InconsistentInput

CATALOG = [make_flat(), make_hopf()] + [make_g_lambda(lam, k) for lam in (0, 1, 5)
                                         for k in (Fraction(1, 2), 1, 2, 3)]


def test_constant_curvature_operator():
    s = Fraction(12)
    dec = decompose(_num.eye(6, True) * (s / 6), _num.eye(4, True) * 3, s)
    assert _num.all_zero(dec.b_op) and _num.all_zero(dec.wplus) and _num.all_zero(dec.wminus)


@pytest.mark.parametrize("k,wplus_zero", [(Fraction(1, 2), False), (1, True), (Fraction(3, 2), False),
                                          (2, True), (3, False)])
def test_weyl_plus_locus(k, wplus_zero):
    dec = decompose_point(make_g_lambda(1, k).point)
    assert is_asd(dec) == wplus_zero
    assert not is_sd(dec)


def test_einstein_flags():
    assert is_einstein(decompose_point(make_g_lambda(0, 2).point))
    assert not is_einstein(decompose_point(make_g_lambda(0, 1).point))
    flat = decompose_point(make_flat().point)
    assert is_einstein(flat) and is_sd(flat) and is_asd(flat)


@pytest.mark.parametrize("geom", CATALOG + random_triples(4), ids=lambda g: g.name)
def test_exact_reassembly(geom):
    pc = geom.point
    dec = decompose_point(pc)
    assert np.all(dec.reassemble() == pc.rnabla_op)
    assert np.trace(dec.wplus) == 0 and np.trace(dec.wminus) == 0
    assert np.all(dec.wplus == dec.wplus.T)


@pytest.mark.parametrize("geom", CATALOG, ids=lambda g: g.name)
def test_b_block_s1_instance(geom):
    """g(B(s1+), s1-) = ½(ρ11 + ρ22 - ρ33 - ρ44)."""
    pc = geom.point
    r = pc.ricci
    assert decompose_point(pc).b_op[3, 0] == (r[0, 0] + r[1, 1] - r[2, 2] - r[3, 3]) / 2


@pytest.mark.parametrize("geom", CATALOG[2:] + random_triples(3), ids=lambda g: g.name)
def test_orientation_flip_swaps_weyl(geom):
    d1 = decompose_point(geom.point)
    d2 = decompose_point(geom.flipped().point)
    assert d1.wplus_norm2 == d2.wminus_norm2 and d1.wminus_norm2 == d2.wplus_norm2


def test_inconsistent_input_rejected():
    pc = make_g_lambda(0, 1).point
    with pytest.raises(InconsistentInput):
        decompose(pc.rnabla_op, pc.ricci + _num.eye(4, True), pc.scalar_curv + 4)
    bad = pc.rnabla_op.copy()
    bad[0, 1] += 1
    with pytest.raises(InconsistentInput):
        decompose(bad, pc.ricci, pc.scalar_curv)


@pytest.mark.parametrize("geom", random_triples(4, start=300), ids=lambda g: g.name)
def test_flip_point_matches_flipped_geometry(geom):
    """Reorienting the frame equals rebuilding the geometry with -orientation and -tau."""
    a = flip_point(geom.point)
    b = geom.flipped().point
    for name in ("rnabla_op", "rd_op", "ricci", "nabla_tau", "dtau", "tau", "torsion3"):
        assert np.all(getattr(a, name) == getattr(b, name)), name
    assert a.delta_tau == b.delta_tau and a.scalar_curv == b.scalar_curv
