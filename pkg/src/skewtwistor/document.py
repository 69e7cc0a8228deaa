"""Geometry documents (JSON) and the chart-metric expression language.

A document is a JSON object with ``"kind"`` one of ``lie_group``, ``catalog``
or ``chart``.  Rationals are written as strings ``"p/q"`` so that exactness
survives the round trip; plain JSON integers are accepted too.

Chart metrics are written as expressions::

    euclidean
    round_sphere(2)
    conformal(round_sphere(1), x1/2 + log(1 + r2))

where the conformal exponent may use ``x1..x4``, ``r2`` (= |x|²), numbers,
``+ - * / ^`` and the functions ``exp``, ``log``, ``sqrt``.
"""

from __future__ import annotations

import ast
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _num
from .catalog import CATALOG_NAMES, by_name
from .chart import ChartMetric, conformal_rescale, euclidean, round_sphere
from .errors import GeometryError, ParseError
from .lie import InvariantGeometry, LieAlgebra4

KINDS = ("lie_group", "catalog", "chart")


@dataclass
class Target:
    kind: str                                # "lie" or "chart"
    geometry: InvariantGeometry | None = None
    chart: ChartMetric | None = None
    point: np.ndarray | None = None
    echo: dict = field(default_factory=dict)


# ------------------------------------------------------------------ helpers

def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _rational(value, fld: str, text: str):
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, str)):
            return Fraction(value.strip() if isinstance(value, str) else value)
        if isinstance(value, float):
            return value
    except (ValueError, ZeroDivisionError):
        pass
    raise ParseError(f"{fld}: expected a rational 'p/q' or a number, got {value!r}",
                     field=fld, line=_line_of(text, fld.split("[")[0].split(".")[-1]))


def _array(value, shape: tuple, fld: str, text: str) -> np.ndarray:
    arr = np.asarray(value, dtype=object)
    if arr.shape != shape:
        raise ParseError(f"{fld}: expected shape {shape}, got {arr.shape}", field=fld,
                         line=_line_of(text, fld))
    vals = [_rational(v, fld, text) for v in arr.ravel()]
    return _num.array(np.array(vals, dtype=object).reshape(shape))


def _orientation(doc: dict, text: str) -> int:
    o = doc.get("orientation", 1)
    if o not in (1, -1) or isinstance(o, bool):
        raise ParseError("orientation: expected 1 or -1", field="orientation",
                         line=_line_of(text, "orientation"))
    return o


# ------------------------------------------------------------------ documents

def parse_document(text: str) -> Target:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", field=None, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object", field=None, line=1)
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ParseError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}", field="kind",
                         line=_line_of(text, "kind"))
    orientation = _orientation(doc, text)
    tau = _array(doc.get("tau", [0, 0, 0, 0]), (4,), "tau", text)
    try:
        if kind == "lie_group":
            if "structure_constants" not in doc:
                raise ParseError("structure_constants: missing", field="structure_constants", line=None)
            c = _array(doc["structure_constants"], (4, 4, 4), "structure_constants", text)
            gram = _array(doc.get("gram", np.eye(4, dtype=int).tolist()), (4, 4), "gram", text)
            geom = InvariantGeometry(LieAlgebra4(c), gram, orientation, tau, name=doc.get("name", ""))
            echo = {"kind": kind, "structure_constants": _num.fmt_array(c), "gram": _num.fmt_array(gram),
                    "orientation": orientation, "tau": _num.fmt_array(tau)}
            return Target("lie", geometry=geom, echo=echo)
        if kind == "catalog":
            name = doc.get("name")
            if name not in CATALOG_NAMES:
                raise ParseError(f"name: expected one of {', '.join(CATALOG_NAMES)}, got {name!r}",
                                 field="name", line=_line_of(text, "name"))
            params = {k: _rational(v, f"params.{k}", text) for k, v in doc.get("params", {}).items()}
            geom = by_name(name, params, tau, orientation)
            echo = {"kind": kind, "name": name, "params": {k: _num.fmt(v) for k, v in params.items()},
                    "orientation": orientation, "tau": _num.fmt_array(tau)}
            return Target("lie", geometry=geom, echo=echo)
        # chart
        expr = doc.get("metric")
        if not isinstance(expr, str):
            raise ParseError("metric: expected an expression string", field="metric",
                             line=_line_of(text, "metric"))
        metric = parse_chart(expr)
        if "fd_step" in doc:
            metric = metric.with_step(float(doc["fd_step"]))
        point = np.array([float(_rational(v, "point", text)) for v in doc.get("point", [0, 0, 0, 0])])
        if point.shape != (4,):
            raise ParseError("point: expected 4 coordinates", field="point", line=_line_of(text, "point"))
        echo = {"kind": kind, "metric": expr, "point": [repr(float(x)) for x in point],
                "fd_step": metric.fd_step}
        return Target("chart", chart=metric, point=point, echo=echo)
    except ParseError:
        raise
    except GeometryError as exc:
        raise ParseError(f"{type(exc).__name__}: {exc}", field=None, line=None) from exc
    except (ValueError, KeyError) as exc:
        raise ParseError(str(exc), field=None, line=None) from exc


# ------------------------------------------------------------------ chart expressions

_FUNCS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt}
_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b,
           ast.Div: lambda a, b: a / b, ast.Pow: lambda a, b: a ** b}


def _compile_scalar(node: ast.AST, src: str):
    """Turn a whitelisted expression tree into a function of x (4-vector)."""
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        v = float(node.value)
        return lambda x: v
    if isinstance(node, ast.Name):
        if node.id == "r2":
            return lambda x: float(x @ x)
        m = re.fullmatch(r"x([1-4])", node.id)
        if m:
            i = int(m.group(1)) - 1
            return lambda x: float(x[i])
        if node.id in ("pi", "e"):
            v = math.pi if node.id == "pi" else math.e
            return lambda x: v
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        f = _compile_scalar(node.operand, src)
        return (lambda x: -f(x)) if isinstance(node.op, ast.USub) else f
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        fa, fb = _compile_scalar(node.left, src), _compile_scalar(node.right, src)
        return lambda x: op(fa(x), fb(x))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
            and len(node.args) == 1 and not node.keywords):
        fn, fa = _FUNCS[node.func.id], _compile_scalar(node.args[0], src)
        return lambda x: float(fn(fa(x)))
    raise ParseError(f"metric: unsupported expression {ast.get_source_segment(src, node) or ast.dump(node)!r}",
                     field="metric", line=None)


def _compile_metric(node: ast.AST, src: str) -> ChartMetric:
    if isinstance(node, ast.Name) and node.id == "euclidean":
        return euclidean()
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        name, args = node.func.id, node.args
        if name == "round_sphere" and len(args) <= 1:
            r = _compile_scalar(args[0], src)(np.zeros(4)) if args else 1.0
            if r <= 0:
                raise ParseError("metric: round_sphere radius must be positive", field="metric", line=None)
            return round_sphere(r)
        if name == "conformal" and len(args) == 2:
            base = _compile_metric(args[0], src)
            f = _compile_scalar(args[1], src)
            return conformal_rescale(base, f, name=f"conformal({base.name}, {ast.get_source_segment(src, args[1])})")
    raise ParseError(f"metric: expected euclidean, round_sphere(r) or conformal(base, f), got "
                     f"{ast.get_source_segment(src, node)!r}", field="metric", line=None)


def _normalise(expr: str) -> str:
    return expr.replace("|x|²", "r2").replace("|x|^2", "r2").replace("^", "**")


def parse_chart(expr: str) -> ChartMetric:
    src = _normalise(expr)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"metric: syntax error in {expr!r}", field="metric", line=None) from exc
    return _compile_metric(tree.body, src)


def parse_scalar_function(expr: str):
    src = _normalise(expr)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"syntax error in {expr!r}", field=None, line=None) from exc
    return _compile_scalar(tree.body, src)
