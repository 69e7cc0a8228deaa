"""Scalar plumbing shared by every module.

Arrays are either numpy ``object`` arrays holding :class:`fractions.Fraction`
(the exact backend) or ordinary ``float64`` arrays.  Mixed input degrades to
float.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np


def exact(x):
    """Coerce ``x`` to a Fraction when that loses nothing, else to float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        return Fraction(int(x))
    if isinstance(x, (int, np.integer, Rational)):
        return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return float(x)


def is_exact_scalar(x) -> bool:
    return isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool)


def array(values) -> np.ndarray:
    """Build an exact object array if every entry is rational, else float64."""
    raw = np.asarray(values, dtype=object)
    flat = [exact(v) for v in raw.ravel()]
    if all(isinstance(v, Fraction) for v in flat):
        out = np.empty(raw.shape, dtype=object)
        for i, v in enumerate(flat):
            out.flat[i] = v
        return out
    return np.array([float(v) for v in flat], dtype=float).reshape(raw.shape)


def is_exact(a) -> bool:
    a = np.asarray(a)
    if a.dtype != object:
        return False
    return all(isinstance(v, (Fraction, int)) for v in a.ravel())


def zeros(shape, exact_mode: bool) -> np.ndarray:
    if exact_mode:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def eye(n: int, exact_mode: bool) -> np.ndarray:
    out = zeros((n, n), exact_mode)
    for i in range(n):
        out[i, i] = Fraction(1) if exact_mode else 1.0
    return out


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=object).astype(float)


def norm2(a):
    """Plain sum of squares (exact when the input is)."""
    a = np.asarray(a)
    total = Fraction(0) if a.dtype == object else 0.0
    for v in a.ravel():
        total = total + v * v
    return total


def fnorm(a) -> float:
    return math.sqrt(float(norm2(a)))


def max_abs(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return max(abs(float(v)) for v in a.ravel())


def all_zero(a) -> bool:
    return all(v == 0 for v in np.asarray(a).ravel())


def rational_sqrt(q):
    """Exact square root of a non-negative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def fmt(x) -> str | float:
    """Serialisable form: ``"p/q"`` strings for rationals, floats otherwise."""
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def fmt_array(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return fmt(a.item())
    return [fmt_array(row) for row in a]


def from_sympy(x):
    if x.is_Rational:
        return Fraction(int(x.p), int(x.q))
    return float(x)


def inv(M) -> np.ndarray:
    """Matrix inverse, exact for rational input."""
    M = np.asarray(M)
    if is_exact(M):
        import sympy

        Minv = sympy.Matrix(M.tolist()).inv()
        out = np.empty(M.shape, dtype=object)
        for i in range(M.shape[0]):
            for j in range(M.shape[1]):
                out[i, j] = from_sympy(Minv[i, j])
        return out
    return np.linalg.inv(M.astype(float))


def det(M):
    M = np.asarray(M)
    if is_exact(M):
        import sympy

        return from_sympy(sympy.Matrix(M.tolist()).det())
    return float(np.linalg.det(M.astype(float)))


def like(values, exact_mode: bool) -> np.ndarray:
    if exact_mode:
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = v
        return out
    return np.array([float(v) for v in values])
