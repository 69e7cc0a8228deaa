"""Left-invariant geometry on 4-dimensional Lie groups.

Everything is evaluated at the identity in an oriented orthonormal frame
``(E1, ..., E4)``.  Index conventions for arrays in that frame:

* ``C[a, b, c] = g([E_a, E_b], E_c)``
* ``Gamma[a, b, c] = g(nabla_{E_a} E_b, E_c)``
* ``R[a, b, c, d] = g(R(E_a, E_b) E_c, E_d)`` with
  ``R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y]``
* ``ricci[b, c] = -sum_a g(R(E_a, E_b) E_c, E_a)``, the trace of
  ``X -> R(X, Y)Z`` taken with the sign that makes spheres positive.  With the
  curvature sign above, round spheres have positive scalar curvature and
  the solvable example g_lambda/g_1 has Ric(E1, E1) = -6.  Some published
  tables for that example use the opposite overall sign.

A curvature *operator* is a 6x6 matrix ``M`` in the s±-basis with
``M[i, j] = g(R(s_j), s_i)``.

The torsion 3-form of ``D = nabla + ½T`` is ``T3[a, b, c] = sum_d eps_abcd tau_d``,
i.e. T_123 = tau_4, T_124 = -tau_3, T_134 = tau_2, T_234 = -tau_1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import permutations

import numpy as np

from . import _num
from .bivector import PAIRS, S_BASIS, Bivector, cross
from .errors import JacobiViolation, NotPositiveDefinite


def _levi_civita_symbol() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4), dtype=int)
    for p in permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
        eps[p] = -1 if inversions % 2 else 1
    return eps


EPS = _levi_civita_symbol()


def _half(exact: bool):
    return Fraction(1, 2) if exact else 0.5


def _quarter(exact: bool):
    return Fraction(1, 4) if exact else 0.25


@dataclass(frozen=True)
class LieAlgebra4:
    """Structure constants ``c[i, j, k]`` with ``[e_i, e_j] = sum_k c[i, j, k] e_k``."""

    c: np.ndarray

    def __post_init__(self):
        c = _num.array(self.c)
        if c.shape != (4, 4, 4):
            raise ValueError("structure constants must have shape (4, 4, 4)")
        if _num.max_abs(c + c.transpose(1, 0, 2)) > (0 if _num.is_exact(c) else 1e-12):
            raise JacobiViolation("structure constants are not antisymmetric")
        object.__setattr__(self, "c", c)
        bad = self.jacobi_defect()
        if bad > (0 if self.exact else 1e-9):
            raise JacobiViolation(f"Jacobi identity fails (max defect {bad:g})")

    @property
    def exact(self) -> bool:
        return _num.is_exact(self.c)

    @classmethod
    def from_brackets(cls, brackets: dict[tuple[int, int], dict[int, object]]) -> "LieAlgebra4":
        """Build from ``{(i, j): {k: coeff}}`` with 1-based indices, i<j listed once."""
        c = np.empty((4, 4, 4), dtype=object)
        c.fill(Fraction(0))
        for (i, j), terms in brackets.items():
            for k, v in terms.items():
                v = _num.exact(v)
                c[i - 1, j - 1, k - 1] = v
                c[j - 1, i - 1, k - 1] = -v
        return cls(c)

    def bracket(self, X, Y):
        return np.einsum("i,j,ijk->k", np.asarray(X), np.asarray(Y), self.c)

    def jacobi_defect(self) -> float:
        c = self.c
        # [[e_i, e_j], e_k] + cyclic, component l
        jac = (np.einsum("ijm,mkl->ijkl", c, c)
               + np.einsum("jkm,mil->ijkl", c, c)
               + np.einsum("kim,mjl->ijkl", c, c))
        return _num.max_abs(jac)

    def is_unimodular(self) -> bool:
        return all(v == 0 for v in np.einsum("ijj->i", self.c))


@dataclass(frozen=True)
class InvariantGeometry:
    """Lie algebra + left-invariant metric + orientation + torsion 1-form.

    ``tau`` holds the coefficients of the torsion 1-form on the dual basis
    ``alpha^i`` of ``e_i``; ``gram[i, j] = g(e_i, e_j)``.
    """

    algebra: LieAlgebra4
    gram: np.ndarray
    orientation: int = 1
    tau: np.ndarray = field(default_factory=lambda: _num.zeros(4, True))
    name: str = ""

    def __post_init__(self):
        gram = _num.array(self.gram)
        tau = _num.array(self.tau)
        if gram.shape != (4, 4) or _num.max_abs(gram - gram.T) > 0:
            raise NotPositiveDefinite("gram matrix must be a symmetric 4x4 matrix")
        if tau.shape != (4,):
            raise ValueError("tau must have 4 components")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "tau", tau)

    @property
    def exact(self) -> bool:
        return self.algebra.exact and _num.is_exact(self.gram) and _num.is_exact(self.tau)

    def with_tau(self, tau) -> "InvariantGeometry":
        return InvariantGeometry(self.algebra, self.gram, self.orientation, tau, self.name)

    def with_gram(self, gram) -> "InvariantGeometry":
        return InvariantGeometry(self.algebra, gram, self.orientation, self.tau, self.name)

    def flipped(self) -> "InvariantGeometry":
        """Opposite orientation, same connection D (so tau changes sign)."""
        return InvariantGeometry(self.algebra, self.gram, -self.orientation, -self.tau, self.name)

    @cached_property
    def frame(self) -> "OrthonormalFrame":
        return orthonormal_frame(self)

    @cached_property
    def point(self) -> "PointCurvature":
        return point_curvature(self)


@dataclass(frozen=True)
class OrthonormalFrame:
    """Rows of ``F`` are the frame vectors E_a in e-coordinates."""

    F: np.ndarray
    Finv: np.ndarray
    C: np.ndarray          # C[a, b, c] = g([E_a, E_b], E_c)
    tau: np.ndarray        # tau(E_a)
    exact: bool


def _cholesky_upper(G):
    """Upper-triangular U with G = U^T U, exact when every pivot is a rational square."""
    exact = _num.is_exact(G)
    n = G.shape[0]
    U = _num.zeros((n, n), exact)
    for i in range(n):
        d = G[i, i] - sum((U[k, i] * U[k, i] for k in range(i)), Fraction(0) if exact else 0.0)
        if d <= 0:
            raise NotPositiveDefinite(f"gram matrix is not positive definite (pivot {i + 1})")
        r = _num.rational_sqrt(d) if exact else None
        if r is None:
            if exact:
                return _cholesky_upper(_num.to_float(G))
            r = float(np.sqrt(float(d)))
        U[i, i] = r
        for j in range(i + 1, n):
            U[i, j] = (G[i, j] - sum((U[k, i] * U[k, j] for k in range(i)),
                                     Fraction(0) if exact else 0.0)) / r
    return U


def orthonormal_frame(geom: InvariantGeometry) -> OrthonormalFrame:
    """Gram-Schmidt in basis order; last vector flipped for orientation -1.

    The frame stays rational when the Cholesky pivots of ``gram`` are
    rational squares (e.g. diagonal grams with square entries); otherwise
    the whole computation continues in floating point.
    """
    U = _cholesky_upper(geom.gram)
    exact = _num.is_exact(U) and geom.algebra.exact and _num.is_exact(geom.tau)
    Uinv = _num.inv(U)
    # columns of U^-1 are the Gram-Schmidt vectors
    F = Uinv.T.copy()
    if geom.orientation == -1:
        F[3] = -F[3]
    if not exact:
        F = _num.to_float(F)
    Finv = _num.inv(F)
    c = geom.algebra.c if exact else _num.to_float(geom.algebra.c)
    C = np.einsum("ai,bj,ijk,kc->abc", F, F, c, Finv)
    tau = F @ (geom.tau if exact else _num.to_float(geom.tau))
    return OrthonormalFrame(F, Finv, C, tau, exact)


# ---------------------------------------------------------------- connections

@dataclass(frozen=True)
class Connection:
    """Constant coefficients ``Gamma[a, b, c] = g(nabla_{E_a} E_b, E_c)``."""

    Gamma: np.ndarray
    torsion_free: bool
    exact: bool

    def torsion(self, C) -> np.ndarray:
        """T[a, b, c] = g(nabla_a E_b - nabla_b E_a - [E_a, E_b], E_c)."""
        return self.Gamma - self.Gamma.transpose(1, 0, 2) - C

    def metricity_defect(self) -> float:
        return _num.max_abs(self.Gamma + self.Gamma.transpose(0, 2, 1))


def levi_civita(frame: OrthonormalFrame) -> Connection:
    """Koszul formula for left-invariant orthonormal fields."""
    C = frame.C
    Gamma = (C - C.transpose(2, 0, 1) + C.transpose(1, 2, 0)) * _half(frame.exact)
    return Connection(Gamma, True, frame.exact)


def torsion_form(tau) -> np.ndarray:
    """Totally skew torsion tensor T3[a, b, c] = g(T(E_a, E_b), E_c) from tau."""
    return np.einsum("abcd,d->abc", EPS, np.asarray(tau))


def torsion_connection(lc: Connection, tau) -> Connection:
    """D = nabla + ½ T where T is the skew torsion with *T3 = tau."""
    T3 = torsion_form(tau)
    exact = lc.exact and _num.is_exact(tau)
    return Connection(lc.Gamma + T3 * _half(exact), _num.all_zero(T3), exact)


def curvature_tensor(conn: Connection, C) -> np.ndarray:
    """R[a, b, c, d] = g(R(E_a, E_b) E_c, E_d), R(X, Y) = D_[X,Y] - [D_X, D_Y].

    ``N[a][d, c] = Gamma[a, c, d]`` is the matrix of D_{E_a}; for invariant
    fields the curvature is algebraic in these matrices.
    """
    N = conn.Gamma.transpose(0, 2, 1)
    bracket_term = np.einsum("abm,mdc->abdc", C, N)
    NN = np.einsum("adk,bkc->abdc", N, N)
    Rmat = bracket_term - NN + NN.transpose(1, 0, 2, 3)     # [a, b, d, c]
    return Rmat.transpose(0, 1, 3, 2).copy()


def _pair_matrix(R) -> np.ndarray:
    """Rb[p, q] = R[i_p, j_p, k_q, l_q] over ordered pairs i<j."""
    idx = np.array(PAIRS)
    return R[idx[:, 0][:, None], idx[:, 1][:, None], idx[:, 0][None, :], idx[:, 1][None, :]]


def curvature_operator(R) -> np.ndarray:
    """6x6 operator M[i, j] = g(R(s_j), s_i) in the s± basis."""
    S = S_BASIS if _num.is_exact(R) else _num.to_float(S_BASIS)
    return S @ _pair_matrix(R).T @ S.T


def ricci_scalar(R) -> tuple[np.ndarray, object]:
    ric = -np.einsum("abca->bc", R)
    return ric, np.trace(ric)


def nabla_tau_table(lc: Connection, tau) -> np.ndarray:
    """nt[a, b] = (nabla_{E_a} tau)(E_b) = -tau(nabla_{E_a} E_b)."""
    return -np.einsum("abc,c->ab", lc.Gamma, np.asarray(tau))


def nabla_torsion_form(lc: Connection, T3) -> np.ndarray:
    """(nabla_{E_a} T3)(E_b, E_c, E_d), computed from the 3-form directly."""
    G = lc.Gamma
    return -(np.einsum("abe,ecd->abcd", G, T3)
             + np.einsum("ace,bed->abcd", G, T3)
             + np.einsum("ade,bce->abcd", G, T3))


def ext_d(C, omega) -> np.ndarray:
    """d of an invariant 1-form: (d omega)(E_a, E_b) = -omega([E_a, E_b])."""
    return -np.einsum("abc,c->ab", C, np.asarray(omega))


def codiff(lc: Connection, omega):
    """delta omega = -sum_a (nabla_{E_a} omega)(E_a)."""
    return -np.trace(nabla_tau_table(lc, omega))


def eval_two_form(omega, a: Bivector):
    """omega(A∧B + C∧D) := omega(A, B) + omega(C, D), i.e. sum_{i<j} a_ij omega_ij."""
    return sum((a.e[n] * omega[i, j] for n, (i, j) in enumerate(PAIRS)),
               Fraction(0) if _num.is_exact(omega) and a.exact else 0.0)


def two_form_on_s(omega) -> np.ndarray:
    """Values of a 2-form on (s1+, s2+, s3+, s1-, s2-, s3-)."""
    exact = _num.is_exact(omega)
    return _num.like([eval_two_form(omega, Bivector.basis(n)) for n in
                      ("s1+", "s2+", "s3+", "s1-", "s2-", "s3-")], exact)


def curvature_via_formula(R_lc, T3, nabla_tau) -> np.ndarray:
    """R^D from R^nabla, the torsion 3-form and the table nabla tau.

    g(R^D(X,Y)Z,U) = g(R(X,Y)Z,U) - ½[(nabla_X T)(Y,Z,U) - (nabla_Y T)(X,Z,U)]
                     + ¼ sum_i [T(X,U,E_i) T(Y,Z,E_i) - T(X,Z,E_i) T(Y,U,E_i)]

    with nabla T rebuilt from nabla tau since the volume form is parallel.
    """
    exact = _num.is_exact(R_lc) and _num.is_exact(T3) and _num.is_exact(nabla_tau)
    nT = np.einsum("bcde,ae->abcd", EPS, np.asarray(nabla_tau))
    first = nT - nT.transpose(1, 0, 2, 3)
    quad = np.einsum("adi,bci->abcd", T3, T3) - np.einsum("aci,bdi->abcd", T3, T3)
    return R_lc - first * _half(exact) + quad * _quarter(exact)


# ----------------------------------------------------------- point curvature

@dataclass(frozen=True)
class PointCurvature:
    """All curvature data of one geometry at one point (orthonormal frame)."""

    rnabla_op: np.ndarray
    rd_op: np.ndarray
    ricci: np.ndarray
    scalar_curv: object
    nabla_tau: np.ndarray
    delta_tau: object
    dtau: np.ndarray
    tau_norm2: object
    tau: np.ndarray
    torsion3: np.ndarray
    exact: bool
    rnabla: np.ndarray | None = None
    rd: np.ndarray | None = None
    orientation: int = 1

    @property
    def dtau_on_s(self) -> np.ndarray:
        return two_form_on_s(self.dtau)

    def rd_times(self, a: Bivector) -> Bivector:
        return Bivector(s=self.rd_op @ a.s)

    def torsion_vector(self, X, Y) -> np.ndarray:
        """T(X, Y) as a vector, from the skew torsion 3-form."""
        return np.einsum("a,b,abc->c", np.asarray(X), np.asarray(Y), self.torsion3)


def point_curvature(geom: InvariantGeometry) -> PointCurvature:
    fr = geom.frame
    lc = levi_civita(fr)
    D = torsion_connection(lc, fr.tau)
    Rl = curvature_tensor(lc, fr.C)
    Rd = curvature_tensor(D, fr.C)
    ric, s = ricci_scalar(Rl)
    nt = nabla_tau_table(lc, fr.tau)
    return PointCurvature(
        rnabla_op=curvature_operator(Rl),
        rd_op=curvature_operator(Rd),
        ricci=ric,
        scalar_curv=s,
        nabla_tau=nt,
        delta_tau=-np.trace(nt),
        dtau=ext_d(fr.C, fr.tau),
        tau_norm2=_num.norm2(fr.tau),
        tau=fr.tau,
        torsion3=torsion_form(fr.tau),
        exact=fr.exact,
        rnabla=Rl,
        rd=Rd,
        orientation=geom.orientation,
    )


def coframe_differentials(geom: InvariantGeometry) -> list[np.ndarray]:
    """d(alpha^i) as matrices in the *original* basis e: d alpha^i(e_j, e_k)."""
    c = geom.algebra.c
    return [-c[:, :, i] for i in range(4)]


def lie_codiff(geom: InvariantGeometry, omega) -> object:
    """Codifferential of an invariant 1-form given on the dual basis alpha^i."""
    fr = geom.frame
    om = fr.F @ (_num.array(omega) if fr.exact else _num.to_float(_num.array(omega)))
    return codiff(levi_civita(fr), om)


def basis_ricci(geom: InvariantGeometry) -> np.ndarray:
    """Ricci tensor on the original basis: Ric(e_i, e_j)."""
    fr = geom.frame
    return fr.Finv @ geom.point.ricci @ fr.Finv.T


def rd_plus_block(pc: PointCurvature) -> np.ndarray:
    """Predicted (+,+) block of R^D from R^nabla, |tau|², delta tau and d tau.

    Entry [b, a] = g(R^D(s_a), s_b): the diagonal is shifted by
    -¼|tau|² - ½ delta tau and the off-diagonal gains ½ (d tau)(s_a × s_b).
    """
    exact = pc.exact
    names = ("s1+", "s2+", "s3+")
    out = pc.rnabla_op[:3, :3].copy()
    shift = -pc.tau_norm2 * _quarter(exact) - pc.delta_tau * _half(exact)
    for a in range(3):
        for b in range(3):
            if a == b:
                out[b, a] = out[b, a] + shift
            else:
                c = cross(Bivector.basis(names[a]), Bivector.basis(names[b]))
                out[b, a] = out[b, a] + eval_two_form(pc.dtau, c) * _half(exact)
    return out
