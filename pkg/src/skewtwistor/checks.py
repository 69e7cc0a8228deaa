"""Theorem-level integrability deciders for J^1..J^4 on Z±×Z±.

Every check is written for the summand Λ²+ of a point's own orientation.
The Λ²- cases are obtained by reversing the orientation of the frame
(E4 -> -E4), which keeps the connection D and therefore changes the sign of
tau.  In terms of the original tau this turns the scalar condition of the
(-,-) case into ``s = 3/2|tau|² - 3 delta tau`` and the Ricci identity of
the (-,+) case into its version with ``-tau``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import _num
from .bivector import PAIRS, S_BASIS
from .decomposition import decompose as _decompose_op
from .lie import PointCurvature
from .twistor import ProductFiberPoint, mixed_witness, oracle_table, sample_fibers

COMPONENTS = ("++", "+-", "-+", "--")
DEFAULT_TOL = 1e-9


# ------------------------------------------------------------ orientation

_FLIP_SIGN = np.array([1, 1, 1, -1])


def _flip_q(exact: bool) -> np.ndarray:
    lam = _num.like([-1 if 3 in pq else 1 for pq in PAIRS], exact)
    S = S_BASIS if exact else _num.to_float(S_BASIS)
    half = Fraction(1, 2) if exact else 0.5
    return (S * lam) @ S.T * half          # columns: new s-basis in old s-coordinates


def _signs(rank: int) -> np.ndarray:
    out = np.ones((4,) * rank, dtype=int)
    for axis in range(rank):
        shape = [1] * rank
        shape[axis] = 4
        out = out * _FLIP_SIGN.reshape(shape)
    return out


def flip_point(pc: PointCurvature) -> PointCurvature:
    """The same point seen in the frame (E1, E2, E3, -E4) with reversed orientation."""
    Q = _flip_q(pc.exact)
    s2, s3, s4 = _signs(2), _signs(3), _signs(4)

    def op(M):
        return Q.T @ M @ Q

    def four(R):
        return None if R is None else R * s4

    return PointCurvature(
        rnabla_op=op(pc.rnabla_op), rd_op=op(pc.rd_op), ricci=pc.ricci * s2,
        scalar_curv=pc.scalar_curv, nabla_tau=-(pc.nabla_tau * s2), delta_tau=-pc.delta_tau,
        dtau=-(pc.dtau * s2), tau_norm2=pc.tau_norm2, tau=-(pc.tau * _FLIP_SIGN),
        torsion3=pc.torsion3 * s3,
        exact=pc.exact, rnabla=four(pc.rnabla), rd=four(pc.rd), orientation=-pc.orientation,
    )


_FLIP_CACHE: dict[int, tuple[PointCurvature, PointCurvature]] = {}


def oriented_for(pc: PointCurvature, tag: str) -> PointCurvature:
    if tag == "+":
        return pc
    hit = _FLIP_CACHE.get(id(pc))
    if hit is None or hit[0] is not pc:
        hit = (pc, flip_point(pc))
        if len(_FLIP_CACHE) > 64:
            _FLIP_CACHE.clear()
        _FLIP_CACHE[id(pc)] = hit
    return hit[1]


# ------------------------------------------------------------ reports

@dataclass
class Condition:
    name: str
    residual: float
    ok: bool
    value: object = None

    def as_dict(self) -> dict:
        out = {"residual": self.residual, "ok": self.ok}
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass
class IntegrabilityReport:
    m: int
    components: str
    conditions: list[Condition]
    tol: float
    backend: str
    note: str = ""
    witness: dict | None = None
    verdict: bool = field(init=False)

    def __post_init__(self):
        self.verdict = all(c.ok for c in self.conditions)

    def as_dict(self) -> dict:
        out = {"m": self.m, "components": self.components, "verdict": self.verdict,
               "breakdown": {c.name: c.as_dict() for c in self.conditions},
               "tol": self.tol, "backend": self.backend}
        if self.note:
            out["note"] = self.note
        if self.witness:
            out["witness"] = self.witness
        return out


def _scale(pc: PointCurvature) -> float:
    return 1.0 + _num.fnorm(pc.rnabla_op)


def _condition(name: str, quantity, pc: PointCurvature, tol: float, value=None) -> Condition:
    res = _num.fnorm(np.atleast_1d(np.asarray(quantity, dtype=object if pc.exact else float))) / _scale(pc)
    if pc.exact:
        ok = _num.all_zero(np.atleast_1d(np.asarray(quantity, dtype=object)))
    else:
        ok = res <= tol
    return Condition(name, res, bool(ok), value)


def decompose(q: PointCurvature, tol: float = DEFAULT_TOL):
    """Curvature decomposition with the consistency tolerance of the checks."""
    t = None if q.exact else tol * _scale(q)
    return _decompose_op(q.rnabla_op, q.ricci, q.scalar_curv, tol=t)


def _backend(pc: PointCurvature) -> str:
    return "exact" if pc.exact else "float"


# ------------------------------------------------------------ quantities

def conf_residual(pc: PointCurvature):
    """s - 3/2 |tau|² - 3 delta tau (zero is condition (conf))."""
    th = Fraction(3, 2) if pc.exact else 1.5
    return pc.scalar_curv - th * pc.tau_norm2 - 3 * pc.delta_tau


def ricci_identity_residual(pc: PointCurvature) -> np.ndarray:
    """rho - [S(nabla tau) - ½ tau⊗tau + ⅛(2s + 2 delta tau + |tau|²) g]."""
    exact = pc.exact
    half = Fraction(1, 2) if exact else 0.5
    eighth = Fraction(1, 8) if exact else 0.125
    nt = pc.nabla_tau
    rhs = ((nt + nt.T) * half - np.outer(pc.tau, pc.tau) * half
           + _num.eye(4, exact) * ((2 * pc.scalar_curv + 2 * pc.delta_tau + pc.tau_norm2) * eighth))
    return pc.ricci - rhs


def block_pp(rd_op):
    """Frobenius norm of the (+,+) block g(R^D(a), b), a, b in Λ²+."""
    return _num.fnorm(np.asarray(rd_op)[:3, :3])


def block_mixed(rd_op):
    """Frobenius norm of the block g(R^D(s_i^+), s_j^-)."""
    return _num.fnorm(np.asarray(rd_op)[3:, :3])


def _block_condition(name, block, pc, tol) -> Condition:
    return _condition(name, block, pc, tol)


# ------------------------------------------------------------ checkers

def check_ahs(pc: PointCurvature, tag: str = "+", tol: float = DEFAULT_TOL) -> IntegrabilityReport:
    """Z± integrable iff W± vanishes; tau plays no role."""
    q = oriented_for(pc, tag)
    dec = decompose(q, tol)
    cond = _condition("weyl_" + ("plus" if tag == "+" else "minus"), dec.wplus, q, tol)
    return IntegrabilityReport(1, tag, [cond], tol, _backend(pc))


def check_pp(pc: PointCurvature, m: int = 1, components: str = "++",
             tol: float = DEFAULT_TOL) -> IntegrabilityReport:
    if m not in (1, 2) or components not in ("++", "--"):
        raise ValueError("check_pp handles m = 1, 2 on (+,+) or (-,-)")
    q = oriented_for(pc, components[0])
    dec = decompose(q, tol)
    conf = conf_residual(q)
    conds = [
        _condition("weyl", dec.wplus, q, tol),
        _condition("conf", conf, q, tol, value=_num.fmt(conf)),
        _condition("dtau_duality", q.dtau_on_s[:3], q, tol,
                   value=[_num.fmt(x) for x in q.dtau_on_s[:3]]),
    ]
    return IntegrabilityReport(m, components, conds, tol, _backend(pc))


def check_pm(pc: PointCurvature, m: int = 1, components: str = "+-",
             tol: float = DEFAULT_TOL) -> IntegrabilityReport:
    if m not in (1, 2) or components not in ("+-", "-+"):
        raise ValueError("check_pm handles m = 1, 2 on (+,-) or (-,+)")
    q = oriented_for(pc, components[0])
    dec = decompose(q, tol)
    conds = [
        _condition("weyl", dec.wplus, q, tol),
        _condition("ricci_identity", ricci_identity_residual(q), q, tol),
    ]
    return IntegrabilityReport(m, components, conds, tol, _backend(pc))


def check_m34(pc: PointCurvature, m: int = 3, components: str = "++",
              tol: float = DEFAULT_TOL) -> IntegrabilityReport:
    """Never integrable: N(X^h, V) = 2 (J1 V1 X)^h is non-zero."""
    if m not in (3, 4) or components not in COMPONENTS:
        raise ValueError("check_m34 handles m = 3, 4")
    pts = sample_fibers(6)
    J = ProductFiberPoint(pts[components[0]][0], pts[components[1]][0])
    mag, wit = mixed_witness(J)
    cond = Condition("mixed_obstruction", float(mag), mag == 0)
    return IntegrabilityReport(m, components, [cond], tol, _backend(pc), witness=wit)


def check(pc: PointCurvature, m: int, components: str, tol: float = DEFAULT_TOL) -> IntegrabilityReport:
    if m in (3, 4):
        return check_m34(pc, m, components, tol)
    if components in ("++", "--"):
        return check_pp(pc, m, components, tol)
    return check_pm(pc, m, components, tol)


def block_verdict(pc: PointCurvature, m: int, components: str, tol: float = DEFAULT_TOL) -> bool:
    """Curvature-block form: Weyl flag together with the (+,+) or mixed R^D block on the oriented point."""
    if m in (3, 4):
        return False
    q = oriented_for(pc, components[0])
    dec = decompose(q, tol)
    block = q.rd_op[:3, :3] if components in ("++", "--") else q.rd_op[3:, :3]
    return (_condition("weyl", dec.wplus, q, tol).ok
            and _block_condition("block", block, q, tol).ok)


# ------------------------------------------------------------ audit

@dataclass
class AuditRow:
    label: str
    m: int
    components: str
    theorem: bool
    blocks: bool
    oracle: bool
    oracle_residual: float
    witness: dict | None

    @property
    def agree(self) -> bool:
        return self.theorem == self.blocks == self.oracle

    def as_dict(self) -> dict:
        out = {"label": self.label, "m": self.m, "components": self.components,
               "theorem": self.theorem, "blocks": self.blocks, "oracle": self.oracle,
               "oracle_residual": float(f"{self.oracle_residual:.6e}"), "agree": self.agree}
        if self.witness is not None and (not self.agree or self.m in (3, 4)):
            out["witness"] = self.witness
        return out


def audit_equivalence(pc: PointCurvature, samples=None, tol: float = DEFAULT_TOL,
                      label: str = "") -> list[AuditRow]:
    """Three-way table: theorem conditions, curvature blocks, sampled Nijenhuis tensor."""
    if samples is None:
        samples = sample_fibers()
    table = oracle_table(pc, samples, tol)
    rows = []
    for m in (1, 2, 3, 4):
        for comps in COMPONENTS:
            rep = check(pc, m, comps, tol)
            orc = table[(m, comps)]
            witness = orc.witness if orc.witness else rep.witness
            rows.append(AuditRow(label, m, comps, rep.verdict, block_verdict(pc, m, comps, tol),
                                 orc.verdict, orc.max_residual, witness))
    return rows


def corrupt(pc: PointCurvature, entry=(0, 1), amount=1) -> PointCurvature:
    """Fault injection: add ``amount`` to one entry of R^D (the (+,+) block by default)."""
    rd = pc.rd_op.copy()
    rd[entry] = rd[entry] + (_num.exact(amount) if pc.exact else float(amount))
    return replace(pc, rd_op=rd)
