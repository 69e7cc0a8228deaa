"""Example geometries and the solvers for their special torsion loci."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy as sp
from scipy.optimize import least_squares

from . import _num
from .errors import NoSolution, NotOrthogonalComplexStructure
from .lie import InvariantGeometry, LieAlgebra4, levi_civita

ZERO4 = (0, 0, 0, 0)


def g_lambda_algebra(lam=0) -> LieAlgebra4:
    """[e1,e2] = e2 - λe3, [e1,e3] = λe2 + e3, [e1,e4] = 2e4, [e2,e3] = -e4."""
    lam = _num.exact(lam)
    return LieAlgebra4.from_brackets({
        (1, 2): {2: 1, 3: -lam},
        (1, 3): {2: lam, 3: 1},
        (1, 4): {4: 2},
        (2, 3): {4: -1},
    })


def make_g_lambda(lam=0, k=1, tau=ZERO4, orientation: int = 1) -> InvariantGeometry:
    """The solvable group G_λ with g_k: (e1/k, e2, e3, e4) orthonormal."""
    k = _num.exact(k)
    if k <= 0:
        raise ValueError("k must be positive")
    gram = _num.array(np.diag([k * k, 1, 1, 1]).astype(object))
    return InvariantGeometry(g_lambda_algebra(lam), gram, orientation, tau,
                             name=f"g_lambda(lambda={_num.fmt(_num.exact(lam))}, k={_num.fmt(k)})")


def make_flat(tau=ZERO4, orientation: int = 1) -> InvariantGeometry:
    return InvariantGeometry(LieAlgebra4.from_brackets({}), _num.eye(4, True), orientation, tau,
                             name="flat")


def make_hopf(tau=ZERO4, orientation: int = 1) -> InvariantGeometry:
    """su(2) ⊕ R with [e1,e2] = 2e3 cyclically: unit S³ times a line."""
    alg = LieAlgebra4.from_brackets({(1, 2): {3: 2}, (2, 3): {1: 2}, (3, 1): {2: 2}})
    return InvariantGeometry(alg, _num.eye(4, True), orientation, tau, name="hopf")


def hopf_complex_structure() -> np.ndarray:
    """J e1 = e2, J e4 = e3 (columns are images of basis vectors)."""
    J = _num.zeros((4, 4), True)
    J[1, 0], J[0, 1] = Fraction(1), Fraction(-1)
    J[2, 3], J[3, 2] = Fraction(1), Fraction(-1)
    return J


# ------------------------------------------------------------------ Lee form

def lee_form(geom: InvariantGeometry, J) -> np.ndarray:
    """theta = (delta Omega)∘J with Omega(X, Y) = g(X, JY), on the dual basis alpha^i.

    ``J`` acts on column vectors of e-coordinates.
    """
    J = _num.array(J)
    G = geom.gram
    exact = geom.exact and _num.is_exact(J)
    if not exact:
        J, G = _num.to_float(J), _num.to_float(G)
    I = _num.eye(4, exact)
    if not (_num.all_zero(J @ J + I) if exact else _num.max_abs(J @ J + I) < 1e-12):
        raise NotOrthogonalComplexStructure("J^2 != -Id")
    if not (_num.all_zero(J.T @ G @ J - G) if exact else _num.max_abs(J.T @ G @ J - G) < 1e-12):
        raise NotOrthogonalComplexStructure("J is not g-orthogonal")
    fr = geom.frame
    F, Finv = fr.F, fr.Finv
    if not exact:
        F, Finv = _num.to_float(F), _num.to_float(Finv)
    # v_e = F^T w_frame, so J in the frame is F^-T J F^T
    Jf = Finv.T @ J @ F.T
    Omega = Jf.copy()                       # Omega[a, b] = g(E_a, J E_b) = Jf[a, b]
    Gam = levi_civita(fr).Gamma
    if not exact:
        Gam = _num.to_float(Gam)
    # (nabla_a Omega)(b, c) = -Omega(nabla_a E_b, E_c) - Omega(E_b, nabla_a E_c)
    nO = -(np.einsum("abd,dc->abc", Gam, Omega) + np.einsum("acd,bd->abc", Gam, Omega))
    delta = -np.einsum("aab->b", nO)        # (delta Omega)(E_b)
    theta_frame = Jf.T @ delta              # theta(E_a) = deltaOmega(J E_a)
    return Finv @ theta_frame


def exterior_d_basis(geom: InvariantGeometry, omega) -> np.ndarray:
    """(d omega)(e_i, e_j) = -omega([e_i, e_j]) on the original basis."""
    return -np.einsum("ijk,k->ij", geom.algebra.c, _num.array(omega))


# ------------------------------------------------------------------ conf locus

@dataclass
class ConfLocus:
    symbols: tuple
    polynomial: sp.Expr
    roots: list = field(default_factory=list)     # univariate case: exact roots

    def __str__(self):
        return f"{sp.expand(self.polynomial)} = 0"


def _sym(x):
    return sp.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else sp.Float(x)


def _direction_name(d, i: int) -> str:
    nz = [j for j, x in enumerate(d) if x != 0]
    if len(nz) == 1 and d[nz[0]] == 1:
        return f"mu{nz[0] + 1}"
    return f"t{i + 1}"


def conf_polynomial(geom: InvariantGeometry, directions, base=ZERO4, names=None):
    """s - 3/2|tau|² - 3 delta tau for tau = base + sum_i mu_i directions[i]."""
    names = names or [_direction_name(d, i) for i, d in enumerate(directions)]
    mus = sp.symbols(names, real=True)
    g0 = geom.with_tau(ZERO4)
    fr = g0.frame
    F = fr.F
    lc = levi_civita(fr)
    s = g0.point.scalar_curv
    tau_alpha = [_sym(_num.exact(b)) + sum(mu * _sym(_num.exact(d[i])) for mu, d in zip(mus, directions))
                 for i, b in enumerate(base)]
    Fs = sp.Matrix(4, 4, lambda a, i: _sym(F[a, i]))
    tau_f = Fs * sp.Matrix(tau_alpha)
    Gs = sp.Array([[[_sym(lc.Gamma[a, b, c]) for c in range(4)] for b in range(4)] for a in range(4)])
    delta = sum(Gs[a, a, c] * tau_f[c] for a in range(4) for c in range(4))   # -trace(-Gamma tau)
    norm2 = (tau_f.T * tau_f)[0, 0]
    poly = sp.expand(_sym(s) - sp.Rational(3, 2) * norm2 - 3 * delta)
    return mus, poly


def _real_locus_empty(poly, mus) -> bool:
    """A real quadratic is empty iff it is definite and never reaches zero."""
    P = sp.Poly(poly, *mus)
    if P.total_degree() <= 0:
        return poly != 0
    n = len(mus)
    H = sp.hessian(poly, mus) / 2
    b = sp.Matrix([sp.diff(poly, m).subs({x: 0 for x in mus}) for m in mus])
    eig = [sp.nsimplify(e) for e in H.eigenvals(multiple=True)]
    if all(e == 0 for e in eig):
        return all(v == 0 for v in b) and poly.subs({x: 0 for x in mus}) != 0
    if any(e > 0 for e in eig) and any(e < 0 for e in eig):
        return False
    sign = 1 if any(e > 0 for e in eig) else -1
    try:
        x0 = -(H.pinv() * b) / 2
    except Exception:
        return False
    if (H * x0 + b / 2).norm() != 0:
        return False                              # linear direction escapes the kernel
    val = sp.nsimplify(poly.subs(dict(zip(mus, list(x0)))))
    return sign * val > 0 if n else val != 0


def solve_conf_locus(geom: InvariantGeometry, directions, base=ZERO4, names=None) -> ConfLocus:
    """Condition (conf) along an affine torsion family; exact roots when univariate."""
    mus, poly = conf_polynomial(geom, directions, base, names)
    if _real_locus_empty(poly, mus):
        raise NoSolution(f"{poly} = 0 has no real solution")
    roots = []
    if len(mus) == 1:
        roots = sorted(sp.solve(poly, mus[0]), key=lambda r: float(r))
    return ConfLocus(tuple(mus), poly, roots)


# ------------------------------------------------------------------ EW scan

@dataclass
class EWScanResult:
    passing: list                 # grid points with residual < tol
    minima: list                  # (point, residual) from local minimisation
    best_residual: float
    grid_size: int


def _ew_vectorized(geom: InvariantGeometry):
    """Return f(T) -> max-abs residual of the Ricci identity for a stack T of taus (alpha basis)."""
    g0 = geom.with_tau(ZERO4)
    fr = g0.frame
    pc = g0.point
    F = _num.to_float(fr.F)
    Gam = _num.to_float(levi_civita(fr).Gamma)
    ric = _num.to_float(pc.ricci)
    s = float(pc.scalar_curv)
    scale = 1.0 + _num.fnorm(pc.rnabla_op)
    I = np.eye(4)

    def residual(T):
        T = np.atleast_2d(np.asarray(T, dtype=float))
        tf = T @ F.T                                           # frame components
        nt = -np.einsum("abc,nc->nab", Gam, tf)
        delta = -np.einsum("naa->n", nt)
        norm2 = np.einsum("na,na->n", tf, tf)
        rhs = (0.5 * (nt + nt.transpose(0, 2, 1)) - 0.5 * np.einsum("na,nb->nab", tf, tf)
               + I * ((2 * s + 2 * delta + norm2) / 8.0)[:, None, None])
        return (ric - rhs) / scale

    return residual


def einstein_weyl_scan(geom: InvariantGeometry, values=None, tol: float = 1e-9,
                       refine: int = 8) -> EWScanResult:
    """Grid search plus local least-squares over left-invariant tau for the Einstein-Weyl identity.

    The local search is confined to the box spanned by the grid values.
    """
    if values is None:
        values = [Fraction(i, 2) - 2 for i in range(9)]
    values = list(values)
    resid = _ew_vectorized(geom)
    if not values:
        return EWScanResult([], [], float("inf"), 0)
    vf = np.array([float(v) for v in values])
    grid = np.stack(np.meshgrid(vf, vf, vf, vf, indexing="ij"), axis=-1).reshape(-1, 4)
    r = np.abs(resid(grid)).reshape(len(grid), -1).max(axis=1)
    idx = np.flatnonzero(r < tol)
    exact_vals = np.array(values, dtype=object)
    shape = (len(values),) * 4
    passing = [tuple(exact_vals[list(np.unravel_index(i, shape))]) for i in idx]

    minima = []
    lo, hi = float(vf.min()), float(vf.max())
    order = np.argsort(r, kind="stable")[:refine]
    for i in order:
        if lo == hi:
            break
        sol = least_squares(lambda t: resid(t).ravel(), grid[i], bounds=(lo, hi),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        val = float(np.abs(resid(sol.x)).max())
        if val < tol and not any(np.allclose(sol.x, p, atol=1e-6) for p, _ in minima):
            minima.append((tuple(float(x) for x in sol.x), val))
    return EWScanResult(passing, minima, float(r.min()), len(grid))


# ------------------------------------------------------------------ registry

def by_name(name: str, params: dict | None = None, tau=ZERO4, orientation: int = 1) -> InvariantGeometry:
    params = dict(params or {})
    if name == "flat":
        return make_flat(tau, orientation)
    if name == "hopf":
        return make_hopf(tau, orientation)
    if name == "g_lambda":
        return make_g_lambda(params.get("lambda", 0), params.get("k", 1), tau, orientation)
    raise KeyError(f"unknown catalog entry {name!r}")


CATALOG_NAMES = ("flat", "hopf", "g_lambda")
