"""Weyl structures (g, theta) on the left-invariant backend.

The Weyl connection is
``nabla^w_X Y = nabla_X Y - ½[theta(X) Y + theta(Y) X - g(X, Y) theta^#]``,
so that ``nabla^w g = theta ⊗ g``.  In dimension n = 4 its symmetrised Ricci
tensor is

    Ric^sym = Ric + ½[(nabla_X theta)(Y) + (nabla_Y theta)(X)]
              - ½[|theta|² g - theta ⊗ theta] - ½ (delta theta) g,

i.e. the coefficient of the symmetrised derivative is (n-2)/4.  This is the
symmetric part of the unsymmetrised Weyl-Ricci tensor, and its trace is the
conformal scalar curvature ``s - 3/2 |theta|² - 3 delta theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _num
from .errors import NonConstantGauge
from .lie import (
    Connection, InvariantGeometry, codiff, curvature_tensor, levi_civita, nabla_tau_table,
)

N_DIM = 4


@dataclass(frozen=True)
class WeylStructure:
    """``theta`` holds coefficients on the dual basis alpha^i, like ``tau``."""

    geometry: InvariantGeometry
    theta: np.ndarray

    def __post_init__(self):
        theta = _num.array(self.theta)
        if theta.shape != (4,):
            raise ValueError("theta must have 4 components")
        object.__setattr__(self, "theta", theta)

    @property
    def exact(self) -> bool:
        return self.geometry.exact and _num.is_exact(self.theta)

    @property
    def frame_theta(self) -> np.ndarray:
        fr = self.geometry.frame
        th = self.theta if self.exact else _num.to_float(self.theta)
        return fr.F @ th


def conf_weyl(geom: InvariantGeometry) -> WeylStructure:
    """theta = +tau: vanishing conformal scalar curvature is condition (conf)."""
    return WeylStructure(geom, geom.tau)


def einstein_weyl_of(geom: InvariantGeometry) -> WeylStructure:
    """theta = -tau: Einstein-Weyl is the Ricci identity of the (+,-) theorem."""
    return WeylStructure(geom, -geom.tau)


def _scalars(exact: bool):
    return (Fraction(1, 2), Fraction(3, 2), Fraction(1, 4)) if exact else (0.5, 1.5, 0.25)


def weyl_connection(ws: WeylStructure) -> Connection:
    lc = levi_civita(ws.geometry.frame)
    exact = ws.exact
    th = ws.frame_theta
    half = _scalars(exact)[0]
    I = _num.eye(4, exact)
    G = lc.Gamma if exact else _num.to_float(lc.Gamma)
    corr = (np.einsum("a,bc->abc", th, I) + np.einsum("b,ac->abc", th, I)
            - np.einsum("ab,c->abc", I, th))
    return Connection(G - corr * half, True, exact)


def nonmetricity(conn: Connection) -> np.ndarray:
    """Q[a, b, c] = (nabla_{E_a} g)(E_b, E_c)."""
    return -(conn.Gamma + conn.Gamma.transpose(0, 2, 1))


def ricci_sym_curvature(ws: WeylStructure) -> np.ndarray:
    """Symmetrised Ricci tensor computed from the curvature of the Weyl connection."""
    conn = weyl_connection(ws)
    C = ws.geometry.frame.C
    R = curvature_tensor(conn, C if ws.exact else _num.to_float(C))
    ric = -np.einsum("abca->bc", R)
    return (ric + ric.T) * _scalars(ws.exact)[0]


def ricci_sym(ws: WeylStructure) -> np.ndarray:
    """Closed-form symmetrised Weyl-Ricci tensor (n = 4)."""
    exact = ws.exact
    pc = ws.geometry.point
    lc = levi_civita(ws.geometry.frame)
    th = ws.frame_theta
    half = _scalars(exact)[0]
    ric = pc.ricci if exact else _num.to_float(pc.ricci)
    nt = nabla_tau_table(lc, th)
    delta = codiff(lc, th)
    I = _num.eye(4, exact)
    c = Fraction(N_DIM - 2, 4) if exact else (N_DIM - 2) / 4
    return (ric + (nt + nt.T) * c
            - (I * (th @ th) - np.outer(th, th)) * c
            - I * (delta * half))


def conformal_scalar(ws: WeylStructure):
    """s - (n-1)(n-2)/4 |theta|² - (n-1) delta theta with n = 4."""
    exact = ws.exact
    pc = ws.geometry.point
    lc = levi_civita(ws.geometry.frame)
    th = ws.frame_theta
    s = pc.scalar_curv if exact else float(pc.scalar_curv)
    three_halves = _scalars(exact)[1]
    return s - three_halves * (th @ th) - 3 * codiff(lc, th)


def einstein_weyl_residual(ws: WeylStructure) -> np.ndarray:
    """Ric^sym - (s^w / 4) g; zero exactly for Einstein-Weyl structures."""
    exact = ws.exact
    return ricci_sym(ws) - _num.eye(4, exact) * (conformal_scalar(ws) * _scalars(exact)[2])


def gauge_transform(ws: WeylStructure, f=None, *, factor=None) -> WeylStructure:
    """(g, theta) -> (e^f g, theta + df) for constant f.

    Pass ``factor = e^f`` instead of ``f`` to stay in rational arithmetic.
    """
    if (f is None) == (factor is None):
        raise TypeError("give exactly one of f or factor")
    if callable(f) or callable(factor):
        raise NonConstantGauge("only constant gauge functions exist on the invariant backend;"
                               " use the chart backend for general f")
    if factor is None:
        factor = math.exp(float(f))
    factor = _num.exact(factor)
    if factor <= 0:
        raise ValueError("conformal factor must be positive")
    g = ws.geometry
    return WeylStructure(g.with_gram(g.gram * factor), ws.theta)
