"""Four-dimensional curvature decomposition R = s/6 Id + B + W+ + W-."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _num
from .bivector import PAIRS, S_BASIS
from .errors import InconsistentInput

LIE_TOL = 1e-9
CHART_TOL = 1e-4


@dataclass(frozen=True)
class CurvatureDecomposition:
    scalar_part: object       # s / 6
    b_op: np.ndarray          # 6x6, only the (+,-) and (-,+) blocks are non-zero
    wplus: np.ndarray         # 3x3 symmetric trace-free
    wminus: np.ndarray
    exact: bool

    @property
    def wplus_norm2(self):
        return _num.norm2(self.wplus)

    @property
    def wminus_norm2(self):
        return _num.norm2(self.wminus)

    @property
    def b_norm2(self):
        return _num.norm2(self.b_op)

    def reassemble(self) -> np.ndarray:
        out = self.b_op.copy()
        out[:3, :3] = out[:3, :3] + self.wplus
        out[3:, 3:] = out[3:, 3:] + self.wminus
        return out + _num.eye(6, self.exact) * self.scalar_part


def b_operator(ricci, scalar) -> np.ndarray:
    """Matrix of B(X∧Y) = rho(X)∧Y + X∧rho(Y) - (s/2) X∧Y in the s± basis."""
    exact = _num.is_exact(ricci) and _num.is_exact(np.asarray([scalar], dtype=object))
    ricci = np.asarray(ricci) if exact else _num.to_float(ricci)
    half = Fraction(1, 2) if exact else 0.5
    Be = _num.zeros((6, 6), exact)     # column p = B(E_i∧E_j) in E-coordinates
    for p, (i, j) in enumerate(PAIRS):
        for k in range(4):
            # rho(E_i) = sum_k ricci[i, k] E_k
            for (a, b), coeff in (((k, j), ricci[i, k]), ((i, k), ricci[j, k])):
                if a == b or coeff == 0:
                    continue
                q = PAIRS.index((min(a, b), max(a, b)))
                Be[q, p] = Be[q, p] + (coeff if a < b else -coeff)
        Be[p, p] = Be[p, p] - scalar * half
    S = S_BASIS if exact else _num.to_float(S_BASIS)
    # x_s = ½ S x_e, x_e = S^T x_s
    return (S @ Be @ S.T) * half


def decompose(rnabla_op, ricci, scalar, tol: float | None = None) -> CurvatureDecomposition:
    """Split a Levi-Civita curvature operator; the B block is recomputed from Ricci.

    Raises InconsistentInput when the independently built B does not match
    the off-diagonal blocks of the operator (exactly in rational mode).
    """
    M = np.asarray(rnabla_op)
    exact = _num.is_exact(M) and _num.is_exact(ricci) and _num.is_exact(np.asarray([scalar], dtype=object))
    if not exact:
        M, ricci, scalar = _num.to_float(M), _num.to_float(ricci), float(scalar)
    if tol is None:
        tol = 0.0 if exact else LIE_TOL * (1.0 + _num.fnorm(M))
    if _num.max_abs(M - M.T) > tol:
        raise InconsistentInput("curvature operator is not symmetric")
    sixth = Fraction(1, 6) if exact else 1.0 / 6.0
    B = b_operator(ricci, scalar)
    if _num.max_abs(B[:3, :3]) > tol or _num.max_abs(B[3:, 3:]) > tol:
        raise InconsistentInput("B does not exchange Λ²+ and Λ²-")
    W = M - _num.eye(6, exact) * (scalar * sixth) - B
    if _num.max_abs(W[:3, 3:]) > tol or _num.max_abs(W[3:, :3]) > tol:
        raise InconsistentInput("off-diagonal blocks disagree with B computed from Ricci")
    wplus, wminus = W[:3, :3].copy(), W[3:, 3:].copy()
    for w in (wplus, wminus):
        if abs(float(np.trace(w))) > tol:
            raise InconsistentInput("Weyl block is not trace-free; Ricci does not match the operator")
    return CurvatureDecomposition(scalar * sixth, B, wplus, wminus, exact)


def _block_zero(block, exact: bool, tol: float) -> bool:
    if exact:
        return _num.all_zero(block)
    return _num.fnorm(block) <= tol


def is_einstein(dec: CurvatureDecomposition, tol: float = LIE_TOL) -> bool:
    return _block_zero(dec.b_op, dec.exact, tol)


def is_sd(dec: CurvatureDecomposition, tol: float = LIE_TOL) -> bool:
    """Self-dual: W- vanishes."""
    return _block_zero(dec.wminus, dec.exact, tol)


def is_asd(dec: CurvatureDecomposition, tol: float = LIE_TOL) -> bool:
    """Anti-self-dual: W+ vanishes."""
    return _block_zero(dec.wplus, dec.exact, tol)


def decompose_point(pc) -> CurvatureDecomposition:
    return decompose(pc.rnabla_op, pc.ricci, pc.scalar_curv)
