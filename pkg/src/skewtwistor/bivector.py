"""Exact linear algebra on R^4 and Λ²R^4.

Conventions, fixed once for the whole package:

* bivectors are stored in the basis ``E_i∧E_j`` (i<j) ordered
  12, 13, 14, 23, 24, 34 and, in parallel, in the orthonormal basis
  ``s1+, s2+, s3+, s1-, s2-, s3-`` where
  ``s1± = E12 ± E34``, ``s2± = E13 ± E42``, ``s3± = E14 ± E23``;
* the inner product on Λ² is ``g(v1∧v2, v3∧v4) = ½ det[g(vi, vj)]``, so
  ``E_i∧E_j`` has squared norm ½ and the s-basis is orthonormal;
* a bivector ``a`` corresponds to the skew endomorphism ``K_a`` with
  ``g(K_a X, Y) = 2 g(a, X∧Y)``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _num
from .errors import MixedSummand, NotAntisymmetric

PAIRS: tuple[tuple[int, int], ...] = tuple(combinations(range(4), 2))
PAIR_INDEX = {p: n for n, p in enumerate(PAIRS)}

# Rows: s-basis vectors written in E_i∧E_j coordinates.
S_BASIS = _num.array([
    [1, 0, 0, 0, 0, 1],     # s1+ = E12 + E34
    [0, 1, 0, 0, -1, 0],    # s2+ = E13 - E24
    [0, 0, 1, 1, 0, 0],     # s3+ = E14 + E23
    [1, 0, 0, 0, 0, -1],    # s1- = E12 - E34
    [0, 1, 0, 0, 1, 0],     # s2- = E13 + E24
    [0, 0, 1, -1, 0, 0],    # s3- = E14 - E23
])
S_NAMES = ("s1+", "s2+", "s3+", "s1-", "s2-", "s3-")
HALF = Fraction(1, 2)
HODGE_S = _num.array(np.diag([1, 1, 1, -1, -1, -1]))


def e_to_s(e):
    """E_i∧E_j coordinates -> s± coordinates (S S^T = 2 Id)."""
    return (S_BASIS @ np.asarray(e)) * HALF if _num.is_exact(e) else (
        _num.to_float(S_BASIS) @ np.asarray(e, dtype=float)) * 0.5


def s_to_e(s):
    if _num.is_exact(s):
        return S_BASIS.T @ np.asarray(s)
    return _num.to_float(S_BASIS).T @ np.asarray(s, dtype=float)


class Bivector:
    """Immutable element of Λ²R^4 holding both coordinate systems."""

    __slots__ = ("e", "s")

    def __init__(self, e=None, *, s=None):
        if (e is None) == (s is None):
            raise TypeError("give exactly one of e= or s=")
        if e is not None:
            e = _num.array(e) if not isinstance(e, np.ndarray) or e.dtype != float else e
            s = e_to_s(e)
        else:
            s = _num.array(s) if not isinstance(s, np.ndarray) or s.dtype != float else s
            e = s_to_e(s)
        for arr in (e, s):
            if arr.shape != (6,):
                raise ValueError("a bivector has 6 components")
            arr.flags.writeable = False
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "s", s)

    def __setattr__(self, name, value):
        raise AttributeError("Bivector is immutable")

    @classmethod
    def basis(cls, name: str) -> "Bivector":
        """``basis("s2-")`` or ``basis("E13")``."""
        if name in S_NAMES:
            s = [0] * 6
            s[S_NAMES.index(name)] = 1
            return cls(s=s)
        i, j = int(name[1]) - 1, int(name[2]) - 1
        e = [0] * 6
        if i < j:
            e[PAIR_INDEX[(i, j)]] = 1
        else:
            e[PAIR_INDEX[(j, i)]] = -1
        return cls(e)

    @property
    def plus(self):
        return self.s[:3]

    @property
    def minus(self):
        return self.s[3:]

    @property
    def exact(self) -> bool:
        return _num.is_exact(self.s)

    def full_matrix(self):
        """Antisymmetric 4x4 matrix A with A[i, j] = component on E_i∧E_j."""
        A = _num.zeros((4, 4), self.exact)
        for n, (i, j) in enumerate(PAIRS):
            A[i, j] = self.e[n]
            A[j, i] = -self.e[n]
        return A

    def __add__(self, other):
        return Bivector(s=self.s + other.s)

    def __sub__(self, other):
        return Bivector(s=self.s - other.s)

    def __neg__(self):
        return Bivector(s=-self.s)

    def __mul__(self, c):
        return Bivector(s=self.s * c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Bivector):
            return NotImplemented
        return bool(np.all(self.s == other.s))

    def __hash__(self):
        return hash(tuple(self.s))

    def isclose(self, other, tol=1e-12) -> bool:
        return _num.max_abs(self.s - other.s) <= tol

    def __repr__(self):
        return f"Bivector(s={[_num.fmt(x) for x in self.s]})"


def zero_bivector(exact: bool = True) -> Bivector:
    return Bivector(s=_num.zeros(6, exact))


def wedge(X, Y) -> Bivector:
    X, Y = np.asarray(X), np.asarray(Y)
    return Bivector([X[i] * Y[j] - X[j] * Y[i] for i, j in PAIRS])


def inner2(a: Bivector, b: Bivector):
    """Induced metric on Λ²; equals the Euclidean product of s-coordinates."""
    return sum((x * y for x, y in zip(a.s, b.s)), Fraction(0) if a.exact and b.exact else 0.0)


def hodge(a: Bivector) -> Bivector:
    return Bivector(s=np.concatenate([a.s[:3], -a.s[3:]]))


def sd_split(a: Bivector) -> tuple[Bivector, Bivector]:
    z = _num.zeros(3, a.exact)
    return Bivector(s=np.concatenate([a.s[:3], z])), Bivector(s=np.concatenate([z, a.s[3:]]))


FLOAT_TOL = 1e-10


def _negligible(part, scale, exact: bool) -> bool:
    if exact:
        return _num.all_zero(part)
    return _num.max_abs(part) <= FLOAT_TOL * (1.0 + scale)


def summand(a: Bivector) -> str | None:
    """'+', '-', '0' for the zero bivector, None for a mixed bivector.

    Float bivectors are compared against a relative round-off floor.
    """
    scale = _num.max_abs(a.s)
    p, m = _negligible(a.plus, scale, a.exact), _negligible(a.minus, scale, a.exact)
    if p and m:
        return "0"
    if m:
        return "+"
    if p:
        return "-"
    return None


def endo_of(a: Bivector) -> np.ndarray:
    """Skew matrix of K_a acting on column vectors: (K_a E_i)_j = a_ij."""
    return a.full_matrix().T.copy()


def bivector_of(K) -> Bivector:
    K = np.asarray(K)
    if K.shape != (4, 4):
        raise NotAntisymmetric("expected a 4x4 matrix")
    if _num.max_abs(K + K.T) > (1e-12 if K.dtype == float else 0):
        raise NotAntisymmetric("matrix is not antisymmetric")
    return Bivector([K[j, i] for i, j in PAIRS])


def endo_inner(P, Q):
    """G(P, Q) = -½ trace(PQ) on skew endomorphisms."""
    return -np.trace(np.asarray(P) @ np.asarray(Q)) * (HALF if _num.is_exact(P) and _num.is_exact(Q) else 0.5)


def cross3(u, v):
    exact = _num.is_exact(u) and _num.is_exact(v)
    return _num.like([u[1] * v[2] - u[2] * v[1],
                      u[2] * v[0] - u[0] * v[2],
                      u[0] * v[1] - u[1] * v[0]], exact)


def cross(a: Bivector, b: Bivector) -> Bivector:
    """Vector product inside Λ²+ or Λ²-, canonical orientation (s1, s2, s3)."""
    sa, sb = summand(a), summand(b)
    if "0" in (sa, sb):
        return zero_bivector(a.exact and b.exact)
    if sa is None or sb is None or sa != sb:
        raise MixedSummand(f"cross product of {sa!r} and {sb!r} bivectors")
    exact = a.exact and b.exact
    z = _num.zeros(3, exact)
    if sa == "+":
        return Bivector(s=np.concatenate([cross3(a.plus, b.plus), z]))
    return Bivector(s=np.concatenate([z, cross3(a.minus, b.minus)]))


def cayley_rotation(A) -> np.ndarray:
    """Rotation (I - A)(I + A)^-1 for skew A; rational whenever A is."""
    A = np.asarray(A)
    n = A.shape[0]
    exact = _num.is_exact(A)
    I = _num.eye(n, exact)
    return (I - A) @ _num.inv(I + A)
