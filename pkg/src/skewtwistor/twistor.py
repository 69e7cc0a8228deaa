"""Fibres of Z± and Z×Z, the fibre structures K_m, and Nijenhuis components.

A point of the twistor space over a fixed base point is a unit bivector
``sigma`` in Λ²+ or Λ²-; the complex structure it defines on T_pM is
``endo_of(sigma)``.  Vertical vectors are bivectors orthogonal to ``sigma``
in the same summand.

The curvature of the induced connection acts on a bivector sigma through the
derivation rule, i.e. by the commutator ``[R(X, Y), K_sigma]`` where
``R(X, Y) = ½ K_{R(X∧Y)}``.  For a pair ``J = (J1, J2)`` the action is taken
componentwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import numpy as np

from . import _num
from .bivector import (
    PAIRS, S_BASIS, Bivector, bivector_of, cross, endo_of, inner2, summand, wedge,
)
from .errors import NotVertical

K_SIGNS = {1: (1, 1), 2: (1, -1), 3: (-1, 1), 4: (-1, -1)}
SIGN = {"+": 1, "-": -1}
UNIT_TOL = 1e-12


def _summand_slice(tag: str) -> slice:
    return slice(0, 3) if tag == "+" else slice(3, 6)


@dataclass(frozen=True)
class TwistorPoint:
    sigma: Bivector
    tag: str

    def __post_init__(self):
        if self.tag not in SIGN:
            raise ValueError("summand tag must be '+' or '-'")
        n2 = inner2(self.sigma, self.sigma)
        if (n2 != 1) if self.sigma.exact else abs(float(n2) - 1.0) > UNIT_TOL:
            raise ValueError(f"twistor point must have unit norm, got |sigma|^2 = {n2}")
        if summand(self.sigma) != self.tag:
            raise ValueError(f"sigma does not lie in Λ²{self.tag}")

    @classmethod
    def from_coords(cls, tag: str, v) -> "TwistorPoint":
        z = [0, 0, 0]
        s = list(v) + z if tag == "+" else z + list(v)
        return cls(Bivector(s=s), tag)

    @property
    def endo(self) -> np.ndarray:
        return endo_of(self.sigma)

    @property
    def coords(self) -> np.ndarray:
        return self.sigma.s[_summand_slice(self.tag)]

    def vertical_basis(self) -> tuple[Bivector, Bivector]:
        """An orthonormal basis (V, J V) of the vertical space, exact at basis points."""
        v = self.coords
        exact = self.sigma.exact
        # pick the coordinate axis least aligned with sigma
        k = int(np.argmin([abs(float(x)) for x in v]))
        e = [0, 0, 0]
        e[k] = 1
        e = _num.like(e, exact)
        w = e - v * (v @ e)
        n2 = w @ w
        r = _num.rational_sqrt(n2) if exact else None
        if r is None:
            w = _num.to_float(w) / math.sqrt(float(n2))
        else:
            w = w / r
        z = _num.zeros(3, _num.is_exact(w))
        V = Bivector(s=np.concatenate([w, z]) if self.tag == "+" else np.concatenate([z, w]))
        return V, vertical_cs(self, V)


@dataclass(frozen=True)
class ProductFiberPoint:
    j1: TwistorPoint
    j2: TwistorPoint

    @property
    def components(self) -> str:
        return self.j1.tag + self.j2.tag


@dataclass(frozen=True)
class VerticalVector:
    v1: Bivector
    v2: Bivector

    def __neg__(self):
        return VerticalVector(-self.v1, -self.v2)

    def __add__(self, other):
        return VerticalVector(self.v1 + other.v1, self.v2 + other.v2)

    def __sub__(self, other):
        return VerticalVector(self.v1 - other.v1, self.v2 - other.v2)

    def isclose(self, other, tol=1e-12) -> bool:
        return self.v1.isclose(other.v1, tol) and self.v2.isclose(other.v2, tol)

    def max_abs(self) -> float:
        return max(_num.max_abs(self.v1.s), _num.max_abs(self.v2.s))

    def is_zero(self) -> bool:
        return _num.all_zero(self.v1.s) and _num.all_zero(self.v2.s)


def _check_vertical(p: TwistorPoint, V: Bivector) -> None:
    tag = summand(V)
    if tag not in ("0", p.tag):
        raise NotVertical(f"vector does not lie in Λ²{p.tag}")
    ip = inner2(V, p.sigma)
    if (ip != 0) if (V.exact and p.sigma.exact) else abs(float(ip)) > 1e-10:
        raise NotVertical("vector is not orthogonal to sigma")


def vertical_cs(p: TwistorPoint, V: Bivector) -> Bivector:
    """Complex structure of the fibre sphere: ±(sigma × V)."""
    _check_vertical(p, V)
    out = cross(p.sigma, V)
    return out if p.tag == "+" else -out


def k_m(m: int, J: ProductFiberPoint, V: VerticalVector) -> VerticalVector:
    """K1 V = (J1 V1, J2 V2), K2 V = (J1 V1, -J2 V2), K3 = -K2, K4 = -K1."""
    e1, e2 = K_SIGNS[m]
    return VerticalVector(vertical_cs(J.j1, V.v1) * e1, vertical_cs(J.j2, V.v2) * e2)


def horizontal_nijenhuis(T, J1: TwistorPoint, X, Y) -> np.ndarray:
    """T(X,Y) - T(J1X,J1Y) + J1 T(J1X,Y) + J1 T(X,J1Y).

    ``T`` is either a callable (X, Y) -> vector or an array
    ``T[a, b, c] = g(T(E_a, E_b), E_c)``.
    """
    if not callable(T):
        Tarr = np.asarray(T)

        def T(U, W):
            return np.einsum("a,b,abc->c", np.asarray(U), np.asarray(W), Tarr)

    K = J1.endo
    X, Y = np.asarray(X), np.asarray(Y)
    JX, JY = K @ X, K @ Y
    return T(X, Y) - T(JX, JY) + K @ T(JX, Y) + K @ T(X, JY)


def curvature_action(rd_op, X, Y, sigma: Bivector) -> Bivector:
    """R(X, Y) sigma for the connection whose curvature operator is ``rd_op``."""
    R_XY = Bivector(s=np.asarray(rd_op) @ wedge(X, Y).s)
    half = Fraction(1, 2) if R_XY.exact else 0.5
    A = endo_of(R_XY) * half
    K = endo_of(sigma)
    return bivector_of(A @ K - K @ A)


def _pair_action(rd_op, X, Y, J: ProductFiberPoint) -> VerticalVector:
    return VerticalVector(curvature_action(rd_op, X, Y, J.j1.sigma),
                          curvature_action(rd_op, X, Y, J.j2.sigma))


def vertical_nijenhuis(m: int, rd_op, J: ProductFiberPoint, X, Y) -> VerticalVector:
    """-R(X,Y)J + R(J1X,J1Y)J - K_m(R(J1X,Y)J + R(X,J1Y)J)."""
    K = J.j1.endo
    X, Y = np.asarray(X), np.asarray(Y)
    JX, JY = K @ X, K @ Y
    first = -_pair_action(rd_op, X, Y, J) + _pair_action(rd_op, JX, JY, J)
    inner = _pair_action(rd_op, JX, Y, J) + _pair_action(rd_op, X, JY, J)
    return first - k_m(m, J, inner)


def mixed_nijenhuis(m: int, J: ProductFiberPoint, V: VerticalVector, X) -> np.ndarray:
    """0 for m = 1, 2; 2 J1 V1 X for m = 3, 4 (J1 V1 is the composition K_sigma1 K_V1)."""
    _check_vertical(J.j1, V.v1)
    _check_vertical(J.j2, V.v2)
    X = np.asarray(X)
    if m in (1, 2):
        return X * 0
    return (J.j1.endo @ endo_of(V.v1) @ X) * 2


# ------------------------------------------------------------------ sampling

def _fibonacci_sphere(n: int) -> np.ndarray:
    if n <= 0:
        return np.zeros((0, 3))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = golden * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _random_rotation(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q


def signed_basis_points(exact: bool = True) -> list[np.ndarray]:
    pts = []
    for k in range(3):
        for s in (1, -1):
            v = [0, 0, 0]
            v[k] = s
            pts.append(_num.like(v, exact))
    return pts


def rational_unit(v, max_den: int = 64) -> np.ndarray:
    """A rational point of S² near the float unit vector v.

    Stereographic coordinates from the pole opposite the largest component
    are rounded to fractions and mapped back, so the result is exactly unit.
    """
    v = np.asarray(v, dtype=float)
    i = int(np.argmax(np.abs(v)))
    sgn = 1 if v[i] >= 0 else -1
    rest = [j for j in range(3) if j != i]
    a, b = (Fraction(v[j] / (1 + sgn * v[i])).limit_denominator(max_den) for j in rest)
    d = 1 + a * a + b * b
    out = [Fraction(0)] * 3
    out[rest[0]], out[rest[1]] = 2 * a / d, 2 * b / d
    out[i] = sgn * (1 - a * a - b * b) / d
    return _num.array(out)


def sample_fibers(n_per_sphere: int = 26, seed: int = 7,
                  exact: bool = False) -> dict[str, list[TwistorPoint]]:
    """The 6 signed basis points ±s_i followed by rotated Fibonacci-sphere points.

    With ``exact`` the extra points are snapped to nearby rational unit vectors.
    """
    return {t: list(v) for t, v in _sample_fibers(n_per_sphere, seed, exact).items()}


@lru_cache(maxsize=32)
def _sample_fibers(n_per_sphere: int, seed: int, exact: bool = False) -> dict[str, tuple[TwistorPoint, ...]]:
    if n_per_sphere < 6:
        raise ValueError("need at least the 6 signed basis points")
    extra = _fibonacci_sphere(n_per_sphere - 6) @ _random_rotation(seed).T
    extra = extra / np.linalg.norm(extra, axis=1, keepdims=True) if len(extra) else extra
    if exact:
        extra = [rational_unit(v) for v in extra]
    out = {}
    for tag in ("+", "-"):
        pts = [TwistorPoint.from_coords(tag, v) for v in signed_basis_points(True)]
        pts += [TwistorPoint.from_coords(tag, v) for v in extra]
        out[tag] = pts
    return {t: tuple(v) for t, v in out.items()}


# ------------------------------------------------------------------- oracle

@dataclass
class OracleResult:
    verdict: bool
    max_residual: float
    horizontal: float
    vertical: float
    mixed: float
    exact_checked: bool
    witness: dict | None = None


# The vectorised oracle runs either on float64 or on integer object arrays;
# integer mode only ever feeds exact zero tests, so positive factors are dropped.
_S_INT = np.array([[int(x) for x in row] for row in S_BASIS], dtype=object)


def _basis_matrices(integer: bool):
    if integer:
        return _S_INT, np.array([[int(i == j) for j in range(4)] for i in range(4)], dtype=object)
    return _num.to_float(S_BASIS), np.eye(4)


def _zeros(shape, integer: bool):
    return np.zeros(shape, dtype=int).astype(object) if integer else np.zeros(shape)


def _endo_stack(V) -> np.ndarray:
    """K_sigma for a stack of s-coordinate 6-vectors, shape (n, 4, 4)."""
    V = np.asarray(V)
    S, _ = _basis_matrices(V.dtype == object)
    E = V @ S                                        # E_i∧E_j components
    out = np.empty((V.shape[0], 4, 4), dtype=E.dtype)
    out[...] = 0
    for n, (i, j) in enumerate(PAIRS):
        out[:, j, i] = E[:, n]
        out[:, i, j] = -E[:, n]
    return out


def _wedge_s(X, Y) -> np.ndarray:
    """s-coordinates of X∧Y for stacks X, Y of shape (..., 4); doubled in integer mode."""
    integer = X.dtype == object
    e = np.stack([X[..., i] * Y[..., j] - X[..., j] * Y[..., i] for i, j in PAIRS], axis=-1)
    S, _ = _basis_matrices(integer)
    out = np.einsum("qp,...p->...q", S, e)
    return out if integer else out * 0.5


def _cross(u, v) -> np.ndarray:
    return np.stack([u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
                     u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
                     u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]], axis=-1)


def _abs_max(a) -> tuple[float, tuple]:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0, ()
    mag = np.abs(a.astype(float)) if a.dtype == object else np.abs(a)
    if mag.ndim > 0:
        mag = mag.reshape(mag.shape[:-1] + (-1,)).max(axis=-1) if mag.ndim > 1 else mag
    idx = np.unravel_index(int(np.argmax(mag)), mag.shape)
    return float(mag[idx]), tuple(int(i) for i in idx)


def _vertical_parts(rd_op, tags, s1, s2):
    """Vertical Nijenhuis components, vectorised over sigma1 x sigma2 x basis pairs, split by K_m sign.

    Uses R(X,Y) sigma = ±(R(X∧Y)_± × sigma) and J_sigma V = ±(sigma × V),
    which is the commutator form of :func:`curvature_action` rewritten in
    the s-basis.  Returns ``[(P1, Q1), (P2, Q2)]`` with component i of the
    Nijenhuis tensor equal to ``P_i + k_i Q_i`` for the K_m signs ``k_i``.
    """
    integer = rd_op.dtype == object
    _, I4 = _basis_matrices(integer)
    z = _zeros((len(s1), 3), integer)
    K1 = _endo_stack(np.concatenate([s1, z], axis=1) if tags[0] == "+" else np.concatenate([z, s1], axis=1))
    X = np.stack([I4[i] for i, _ in PAIRS])           # (6, 4)
    Y = np.stack([I4[j] for _, j in PAIRS])
    JX = np.einsum("nab,pb->npa", K1, X)              # (n1, 6, 4)
    JY = np.einsum("nab,pb->npa", K1, Y)
    Xb = np.broadcast_to(X, JX.shape)
    Yb = np.broadcast_to(Y, JY.shape)
    A = _wedge_s(Xb, Yb) - _wedge_s(JX, JY)
    B = _wedge_s(JX, Yb) + _wedge_s(Xb, JY)
    rA = np.einsum("ij,npj->npi", rd_op, A)
    rB = np.einsum("ij,npj->npi", rd_op, B)
    out = []
    for comp, (tag, sig) in enumerate(((tags[0], s1), (tags[1], s2))):
        e = SIGN[tag]
        sl = _summand_slice(tag)
        a, b = rA[..., sl], rB[..., sl]                       # (n1, 6, 3)
        if comp == 0:
            sg = sig[:, None, :]
        else:
            a, b = a[:, None], b[:, None]
            sg = sig[None, :, None, :]                         # (1, n2, 1, 3)
        act_a = _cross(a, sg) * e
        act_b = _cross(b, sg) * e
        out.append((-act_a, -(_cross(sg, act_b) * e)))
    return out


def _horizontal_residuals(T3, tag, s1):
    integer = T3.dtype == object
    z = _zeros((len(s1), 3), integer)
    K = _endo_stack(np.concatenate([s1, z], axis=1) if tag == "+" else np.concatenate([z, s1], axis=1))
    _, I4 = _basis_matrices(integer)
    T16 = T3.reshape(16, 4)

    def T(U, W):
        return (U[:, :, None] * W[:, None, :]).reshape(len(U), 16) @ T16

    res = []
    for i, j in PAIRS:
        JX, JY = K[:, :, i], K[:, :, j]
        Xn = np.broadcast_to(I4[i], JX.shape)
        Yn = np.broadcast_to(I4[j], JY.shape)
        inner = T(JX, Yn) + T(Xn, JY)
        h = T(Xn, Yn) - T(JX, JY) + np.einsum("nab,nb->na", K, inner)
        res.append(h)
    return np.stack(res, axis=1)                                # (n1, 6, 4)


def mixed_witness(J: ProductFiberPoint) -> tuple[float, dict]:
    """First non-zero 2 J1 V1 X over V1 in a vertical basis and X in the frame."""
    I4 = _num.eye(4, J.j1.sigma.exact)
    for vi, V1 in enumerate(J.j1.vertical_basis()):
        for a in range(4):
            out = mixed_nijenhuis(3, J, VerticalVector(V1, Bivector(s=V1.s * 0)), I4[a])
            if not _num.all_zero(out):
                return _num.max_abs(out), {"sigma1": [_num.fmt(x) for x in J.j1.sigma.s],
                                           "V1": [_num.fmt(x) for x in V1.s],
                                           "X": f"E{a + 1}",
                                           "value": [_num.fmt(x) for x in out]}
    return 0.0, {}


def _integerize(a) -> np.ndarray:
    """Positive multiple of a rational array with integer entries (zero pattern preserved)."""
    a = np.asarray(a, dtype=object)
    L = math.lcm(*[Fraction(x).denominator for x in a.ravel()]) if a.size else 1
    return np.array([int(Fraction(x) * L) for x in a.ravel()], dtype=object).reshape(a.shape)


class _OracleData:
    """Residual pieces shared by every m and component pair at one point."""

    def __init__(self, pc, samples):
        self.pc = pc
        self.samples = samples
        self._h: dict = {}
        self._v: dict = {}
        # integer basis points: exact zero tests run on cleared denominators
        self.basis = np.array([[int(x) for x in v] for v in signed_basis_points(True)], dtype=object)
        self.pts = {t: np.stack([_num.to_float(p.coords) for p in samples[t]]) for t in SIGN}

    def horizontal(self, tag, exact):
        key = (tag, exact)
        if key not in self._h:
            if exact:
                self._h[key] = _horizontal_residuals(_integerize(self.pc.torsion3), tag, self.basis)
            else:
                self._h[key] = _horizontal_residuals(_num.to_float(self.pc.torsion3), tag, self.pts[tag])
        return self._h[key]

    def vertical(self, m, tags, exact):
        key = (tags, exact)
        if key not in self._v:
            if exact:
                self._v[key] = _vertical_parts(_integerize(self.pc.rd_op), tags, self.basis, self.basis)
            else:
                self._v[key] = _vertical_parts(_num.to_float(self.pc.rd_op), tags,
                                               self.pts[tags[0]], self.pts[tags[1]])
        (P1, Q1), (P2, Q2) = self._v[key]
        k1, k2 = K_SIGNS[m]
        return P1 + Q1 * k1, P2 + Q2 * k2


def _oracle_one(data: _OracleData, m: int, components: str, tol: float, scale: float) -> OracleResult:
    pc, samples = data.pc, data.samples
    tags = (components[0], components[1])
    witness = None
    exact_ok = True
    if pc.exact:
        h = data.horizontal(tags[0], True)
        v1, v2 = data.vertical(m, tags, True)
        for name, arr in (("horizontal", h), ("vertical1", v1), ("vertical2", v2)):
            if not _num.all_zero(arr):
                exact_ok = False
                mag, idx = _abs_max(arr)
                witness = witness or {"part": name, "index": idx, "exact": True, "value": mag}

    h = data.horizontal(tags[0], False)
    v1, v2 = data.vertical(m, tags, False)
    hmax, hidx = _abs_max(h)
    v1max, v1idx = _abs_max(v1)
    v2max, v2idx = _abs_max(v2)
    hmax, v1max, v2max = hmax / scale, v1max / scale, v2max / scale
    vmax = max(v1max, v2max)

    mixed = 0.0
    if m in (3, 4):
        J = ProductFiberPoint(samples[tags[0]][0], samples[tags[1]][0])
        mixed, mw = mixed_witness(J)
        witness = witness or {"part": "mixed", **mw}

    worst = max(hmax, vmax, mixed)
    float_ok = max(hmax, vmax) <= tol and mixed == 0
    if witness is None and not float_ok:
        part, idx = max((("horizontal", hidx, hmax), ("vertical1", v1idx, v1max),
                         ("vertical2", v2idx, v2max)), key=lambda t: t[2])[:2]
        witness = {"part": part, "index": idx, "exact": False, "value": worst}
    if witness is not None and "index" in witness:
        witness = _describe_index(witness, samples, tags)
    return OracleResult(exact_ok and float_ok, worst, hmax, vmax, mixed, bool(pc.exact), witness)


def oracle_table(pc, samples=None, tol: float = 1e-9, ms=(1, 2, 3, 4),
                 components=("++", "+-", "-+", "--")) -> dict:
    """brute_force_check for several (m, components) at once, sharing the work."""
    if samples is None:
        samples = sample_fibers()
    data = _OracleData(pc, samples)
    scale = 1.0 + _num.fnorm(pc.rnabla_op)
    return {(m, c): _oracle_one(data, m, c, tol, scale) for m in ms for c in components}


def brute_force_check(m: int, components: str, pc, samples=None, tol: float = 1e-9) -> OracleResult:
    """Horizontal, vertical and mixed Nijenhuis parts over basis pairs and sampled fibre points.

    ``pc`` is a :class:`~skewtwistor.lie.PointCurvature`.  At the exact
    signed-basis fibre points of an exact geometry the residual must be
    exactly zero; elsewhere it is compared against ``tol`` after dividing
    by ``1 + |R^nabla|_F``.
    """
    return oracle_table(pc, samples, tol, (m,), (components,))[(m, components)]


def _describe_index(w: dict, samples, tags) -> dict:
    idx = w["index"]
    out = dict(w)
    if w["part"] in ("horizontal", "vertical1"):
        n1, p = idx[0], idx[1]
        out["sigma1"] = [_num.fmt(x) for x in samples[tags[0]][n1].sigma.s] if not w.get("exact") or n1 < 6 else None
        out["pair"] = f"E{PAIRS[p][0] + 1},E{PAIRS[p][1] + 1}"
    else:
        n1, n2, p = idx[0], idx[1], idx[2]
        out["sigma1"] = [_num.fmt(x) for x in samples[tags[0]][n1].sigma.s]
        out["sigma2"] = [_num.fmt(x) for x in samples[tags[1]][n2].sigma.s]
        out["pair"] = f"E{PAIRS[p][0] + 1},E{PAIRS[p][1] + 1}"
    out["index"] = list(idx)
    return out
