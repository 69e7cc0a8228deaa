"""Assembly and rendering of analysis, scan and audit reports."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import _num
from .catalog import (
    hopf_complex_structure, lee_form, make_flat, make_g_lambda, make_hopf, solve_conf_locus,
)
from .chart import curvature_at
from .checks import (
    COMPONENTS, DEFAULT_TOL, audit_equivalence, check, conf_residual, corrupt, decompose,
)
from .decomposition import CHART_TOL, is_asd, is_einstein, is_sd
from .document import Target
from .errors import NoSolution
from .lie import basis_ricci
from .twistor import sample_fibers
from .weyl import conformal_scalar, conf_weyl, einstein_weyl_of, einstein_weyl_residual


def _num_out(x):
    """Rationals as 'p/q', floats rounded to 12 significant digits for stable output."""
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return _num.fmt(x)
    return float(f"{float(x):.12g}")


def _arr_out(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return _num_out(a.item())
    return [_arr_out(x) for x in a]


def point_of(target: Target):
    if target.kind == "lie":
        return target.geometry.point
    return curvature_at(target.chart, target.point)


def default_tol(target: Target) -> float:
    return DEFAULT_TOL if target.kind == "lie" else CHART_TOL


def analyze(target: Target, tol: float | None = None, seed: int = 7, samples: int = 26,
            with_audit: bool = True) -> dict:
    tol = default_tol(target) if tol is None else tol
    pc = point_of(target)
    dec = decompose(pc, tol)
    scale_tol = tol * (1.0 + _num.fnorm(pc.rnabla_op))
    curvature = {
        "ricci": _arr_out(pc.ricci),
        "scalar": _num_out(pc.scalar_curv),
        "wplus_norm2": _num_out(dec.wplus_norm2),
        "wminus_norm2": _num_out(dec.wminus_norm2),
        "b_norm2": _num_out(dec.b_norm2),
        "einstein": is_einstein(dec, scale_tol),
        "self_dual": is_sd(dec, scale_tol),
        "anti_self_dual": is_asd(dec, scale_tol),
    }
    out = {"geometry": dict(target.echo)}
    if target.kind == "lie":
        geom = target.geometry
        out["geometry"]["name"] = geom.name
        curvature["basis_ricci"] = _arr_out(basis_ricci(geom))
        out["torsion"] = {
            "tau_frame": _arr_out(pc.tau),
            "tau_norm2": _num_out(pc.tau_norm2),
            "delta_tau": _num_out(pc.delta_tau),
            "dtau_on_s": _arr_out(pc.dtau_on_s),
        }
        ew = einstein_weyl_residual(einstein_weyl_of(geom))
        out["weyl"] = {"conf_scalar": _num_out(conformal_scalar(conf_weyl(geom))),
                       "ew_residual": _num_out(_num.max_abs(ew) if not _num.is_exact(ew)
                                               else max((abs(x) for x in ew.ravel()), default=0))}
    else:
        out["weyl"] = {"conf_scalar": _num_out(conf_residual(pc)),
                       "ew_residual": _num_out(_num.max_abs(pc.ricci - np.eye(4) * pc.scalar_curv / 4))}
    out["curvature"] = curvature
    out["checks"] = [check(pc, m, c, tol).as_dict() for m in (1, 2, 3, 4) for c in COMPONENTS]
    if with_audit:
        rows = audit_equivalence(pc, sample_fibers(samples, seed), tol)
        out["audit"] = {"agree": all(r.agree for r in rows), "rows": [r.as_dict() for r in rows]}
    out["tolerance"] = tol
    out["backend"] = "exact" if pc.exact else "float"
    return out


# ------------------------------------------------------------------ scan

SCAN_PARAMS = ("k", "lambda", "mu1", "mu2", "mu3", "mu4")


def scan(param: str, values, k=1, lam=0, tau=(0, 0, 0, 0), tol: float = DEFAULT_TOL) -> list[dict]:
    """One row per parameter value on the g_lambda family, in the given order."""
    if param not in SCAN_PARAMS:
        raise ValueError(f"unknown scan parameter {param!r}")
    rows = []
    for v in values:
        kk, ll, tt = k, lam, list(tau)
        if param == "k":
            kk = v
        elif param == "lambda":
            ll = v
        else:
            tt[int(param[2]) - 1] = v
        geom = make_g_lambda(ll, kk, tt)
        pc = geom.point
        dec = decompose(pc, tol)
        st = tol * (1.0 + _num.fnorm(pc.rnabla_op))
        rows.append({
            param: _num_out(v),
            "scalar": _num_out(pc.scalar_curv),
            "wplus_zero": is_asd(dec, st),
            "wminus_zero": is_sd(dec, st),
            "einstein": is_einstein(dec, st),
            "conf_residual": _num_out(conf_residual(pc)),
            "pp": check(pc, 1, "++", tol).verdict,
            "pm": check(pc, 1, "+-", tol).verdict,
        })
    return rows


# ------------------------------------------------------------------ audit

def _corners(value=2):
    v = Fraction(value)
    return [tuple(v if (n >> i) & 1 else -v for i in range(4)) for n in range(16)]


def catalog_targets() -> list[tuple[str, object]]:
    """Every catalog geometry with tau in {0, conf roots along alpha^1, grid corners}."""
    out = []
    out.append(("flat tau=0", make_flat()))
    out += [(f"flat tau={_label(t)}", make_flat(t)) for t in _corners()]
    hopf = make_hopf()
    lee = tuple(lee_form(hopf, hopf_complex_structure()))
    out.append(("hopf tau=0", hopf))
    out.append((f"hopf tau=lee={_label(lee)}", make_hopf(lee)))
    out += [(f"hopf tau={_label(t)}", make_hopf(t)) for t in _corners()]
    for k in (Fraction(1, 2), 1, 2, 3):
        g = make_g_lambda(0, k)
        out.append((f"g_lambda k={_num.fmt(Fraction(k))} tau=0", g))
        try:
            roots = solve_conf_locus(g, [[1, 0, 0, 0]]).roots
        except NoSolution:
            roots = []
        for r in roots:
            val = Fraction(int(r.p), int(r.q)) if r.is_Rational else float(r)
            out.append((f"g_lambda k={_num.fmt(Fraction(k))} tau=({_num_out(val)},0,0,0)",
                        make_g_lambda(0, k, (val, 0, 0, 0))))
        out += [(f"g_lambda k={_num.fmt(Fraction(k))} tau={_label(t)}", make_g_lambda(0, k, t))
                for t in _corners()]
    return out


def _label(t) -> str:
    return "(" + ",".join(str(_num_out(x)) for x in t) + ")"


def audit(targets, samples: int = 26, seed: int = 7, tol: float | None = None,
          fault: bool = False) -> dict:
    fibers = sample_fibers(samples, seed)
    rows = []
    for label, obj in targets:
        pc = obj.point if hasattr(obj, "point") and not isinstance(obj, Target) else point_of(obj)
        t = tol if tol is not None else (DEFAULT_TOL if pc.exact or not isinstance(obj, Target)
                                         or obj.kind == "lie" else CHART_TOL)
        if fault:
            pc = corrupt(pc)
            label = label + " [fault injected]"
        rows += [r.as_dict() for r in audit_equivalence(pc, fibers, t, label)]
    bad = [r for r in rows if not r["agree"]]
    m34_ok = all(not r["theorem"] and "witness" in r for r in rows if r["m"] in (3, 4))
    return {"samples": samples, "seed": seed, "rows": rows,
            "disagreements": len(bad), "m34_uniformly_false": m34_ok,
            "agree": not bad}


# ------------------------------------------------------------------ text rendering

def _yn(b) -> str:
    return "yes" if b else "no"


def render_analysis(rep: dict) -> str:
    g = rep["geometry"]
    c = rep["curvature"]
    lines = [f"geometry: {g.get('name') or g.get('metric') or g.get('kind')}",
             f"backend: {rep['backend']}  tolerance: {rep['tolerance']:g}",
             f"scalar curvature: {c['scalar']}",
             f"|W+|^2 = {c['wplus_norm2']}   |W-|^2 = {c['wminus_norm2']}   |B|^2 = {c['b_norm2']}",
             f"einstein: {_yn(c['einstein'])}  self-dual: {_yn(c['self_dual'])}  "
             f"anti-self-dual: {_yn(c['anti_self_dual'])}"]
    if "basis_ricci" in c:
        lines.append("Ric(e_i, e_j) diagonal: " + ", ".join(str(c["basis_ricci"][i][i]) for i in range(4)))
    if "torsion" in rep:
        t = rep["torsion"]
        lines.append(f"|tau|^2 = {t['tau_norm2']}   delta tau = {t['delta_tau']}")
    w = rep["weyl"]
    lines.append(f"conformal scalar (theta = tau): {w['conf_scalar']}   "
                 f"Einstein-Weyl residual (theta = -tau): {w['ew_residual']}")
    lines.append("")
    lines.append("m  comp  verdict  conditions")
    for ch in rep["checks"]:
        conds = ", ".join(f"{k}={'ok' if v['ok'] else 'FAIL'}" for k, v in ch["breakdown"].items())
        lines.append(f"{ch['m']}  {ch['components']:4}  {_yn(ch['verdict']):7}  {conds}")
    if "audit" in rep:
        lines.append("")
        lines.append(f"three-way audit: {'agree' if rep['audit']['agree'] else 'DISAGREE'}")
        for r in rep["audit"]["rows"]:
            if not r["agree"]:
                lines.append(f"  m={r['m']} {r['components']}: theorem={r['theorem']} "
                             f"blocks={r['blocks']} oracle={r['oracle']} witness={r.get('witness')}")
    return "\n".join(lines) + "\n"


def render_scan(param: str, rows: list[dict]) -> str:
    head = [param, "scalar", "wplus_zero", "wminus_zero", "einstein", "conf_residual", "pp", "pm"]
    lines = ["\t".join(head)]
    for r in rows:
        lines.append("\t".join(str(r[h]) for h in head))
    return "\n".join(lines) + "\n"


def render_audit(rep: dict) -> str:
    lines = [f"audit: samples={rep['samples']} seed={rep['seed']}"]
    for r in rep["rows"]:
        flag = "ok  " if r["agree"] else "FAIL"
        lines.append(f"{flag} {r['label']}  m={r['m']} {r['components']}  theorem={_yn(r['theorem'])} "
                     f"blocks={_yn(r['blocks'])} oracle={_yn(r['oracle'])} "
                     f"residual={r['oracle_residual']:.3e}")
        if not r["agree"] and "witness" in r:
            lines.append(f"     witness: {r['witness']}")
    lines.append(f"rows: {len(rep['rows'])}  disagreements: {rep['disagreements']}  "
                 f"m=3,4 uniformly false: {_yn(rep['m34_uniformly_false'])}")
    return "\n".join(lines) + "\n"
