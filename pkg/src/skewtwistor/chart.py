"""Floating-point backend: metrics on an open subset of R^4 given by component functions.

Metric derivatives come from central differences; Christoffel symbols and the
Riemann tensor are then assembled analytically from those derivatives, so the
truncation error is O(h^2).  Curvature is reported in the oriented orthonormal
frame obtained by Gram-Schmidt on the coordinate vectors, with the same sign
conventions as :mod:`skewtwistor.lie`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainViolation, NotPositiveDefinite
from .lie import PointCurvature, curvature_operator, ricci_scalar

DEFAULT_STEP = 1e-4

MetricFn = Callable[[np.ndarray], np.ndarray]
ScalarFn = Callable[[np.ndarray], float]


def _everywhere(x) -> bool:
    return True


@dataclass(frozen=True)
class ChartMetric:
    fn: MetricFn
    fd_step: float = DEFAULT_STEP
    domain: Callable[[np.ndarray], bool] = field(default=_everywhere)
    name: str = ""

    def __call__(self, x) -> np.ndarray:
        g = np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (g + g.T)

    def with_step(self, h: float) -> "ChartMetric":
        return ChartMetric(self.fn, h, self.domain, self.name)


def euclidean() -> ChartMetric:
    return ChartMetric(lambda x: np.eye(4), name="euclidean")


def round_sphere(r: float = 1.0) -> ChartMetric:
    """Stereographic chart of the round 4-sphere of radius r (s = 12/r^2)."""
    return ChartMetric(lambda x: np.eye(4) * (4.0 * r * r / (1.0 + x @ x) ** 2),
                       name=f"round_sphere({r:g})")


def conformal_rescale(metric: ChartMetric, f: ScalarFn, name: str | None = None) -> ChartMetric:
    """e^f g, pointwise."""
    return ChartMetric(lambda x: math.exp(f(x)) * metric(x), metric.fd_step, metric.domain,
                       name or f"conformal({metric.name})")


def _check_point(metric: ChartMetric, x: np.ndarray) -> None:
    h = metric.fd_step
    probes = [x] + [x + s * h * e for e in np.eye(4) for s in (-2, 2)]
    for p in probes:
        if not metric.domain(p):
            raise DomainViolation(f"point {p} outside the chart domain")
    try:
        np.linalg.cholesky(metric(x))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"metric not positive definite at {x}") from exc


def metric_jet(metric: ChartMetric, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """g, dg[m] = d_m g, ddg[m, n] = d_m d_n g by central differences."""
    x = np.asarray(x, dtype=float)
    h = metric.fd_step
    E = np.eye(4) * h
    g0 = metric(x)
    dg = np.array([(metric(x + E[m]) - metric(x - E[m])) / (2 * h) for m in range(4)])
    ddg = np.empty((4, 4, 4, 4))
    for m in range(4):
        ddg[m, m] = (metric(x + E[m]) - 2 * g0 + metric(x - E[m])) / (h * h)
        for n in range(m + 1, 4):
            v = (metric(x + E[m] + E[n]) - metric(x + E[m] - E[n])
                 - metric(x - E[m] + E[n]) + metric(x - E[m] - E[n])) / (4 * h * h)
            ddg[m, n] = ddg[n, m] = v
    return g0, dg, ddg


def christoffel(g, dg) -> np.ndarray:
    """Gamma[l, i, j] = Γ^l_ij."""
    ginv = np.linalg.inv(g)
    low = 0.5 * (np.einsum("isj->sij", dg) + np.einsum("jsi->sij", dg) - np.einsum("sij->sij", dg))
    return np.einsum("ls,sij->lij", ginv, low)


def coordinate_riemann(g, dg, ddg) -> tuple[np.ndarray, np.ndarray]:
    """R[i, j, k, l] = g(R(d_i, d_j) d_k, d_l) with R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y]."""
    ginv = np.linalg.inv(g)
    Gam = christoffel(g, dg)
    low = 0.5 * (np.einsum("isj->sij", dg) + np.einsum("jsi->sij", dg) - np.einsum("sij->sij", dg))
    dlow = 0.5 * (np.einsum("misj->msij", ddg) + np.einsum("mjsi->msij", ddg)
                  - np.einsum("msij->msij", ddg))
    dginv = -np.einsum("la,mab,bs->mls", ginv, dg, ginv)
    dGam = np.einsum("mls,sij->mlij", dginv, low) + np.einsum("ls,msij->mlij", ginv, dlow)
    # standard R^l_{kij}-style pieces: d_i Γ^l_jk - d_j Γ^l_ik + Γ^m_jk Γ^l_im - Γ^m_ik Γ^l_jm
    Rstd = (np.einsum("iljk->ijkl", dGam) - np.einsum("jlik->ijkl", dGam)
            + np.einsum("mjk,lim->ijkl", Gam, Gam) - np.einsum("mik,ljm->ijkl", Gam, Gam))
    R = -np.einsum("ijkp,pl->ijkl", Rstd, g)
    return R, Gam


def gram_schmidt_frame(g) -> np.ndarray:
    """Rows are an oriented orthonormal frame in coordinate components."""
    F = np.zeros((4, 4))
    for a in range(4):
        v = np.eye(4)[a].copy()
        for b in range(a):
            v = v - (F[b] @ g @ v) * F[b]
        F[a] = v / math.sqrt(v @ g @ v)
    if np.linalg.det(F) < 0:
        F[3] = -F[3]
    return F


def curvature_at(metric: ChartMetric, point) -> PointCurvature:
    x = np.asarray(point, dtype=float)
    _check_point(metric, x)
    g, dg, ddg = metric_jet(metric, x)
    R, _ = coordinate_riemann(g, dg, ddg)
    F = gram_schmidt_frame(g)
    Ron = np.einsum("ai,bj,ck,dl,ijkl->abcd", F, F, F, F, R)
    op = curvature_operator(Ron)
    ric, s = ricci_scalar(Ron)
    z4 = np.zeros(4)
    return PointCurvature(
        rnabla_op=op, rd_op=op.copy(), ricci=ric, scalar_curv=float(s),
        nabla_tau=np.zeros((4, 4)), delta_tau=0.0, dtau=np.zeros((4, 4)),
        tau_norm2=0.0, tau=z4, torsion3=np.zeros((4, 4, 4)), exact=False,
        rnabla=Ron, rd=Ron,
    )


def gradient(f: ScalarFn, x, h: float = DEFAULT_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    E = np.eye(4) * h
    return np.array([(f(x + E[m]) - f(x - E[m])) / (2 * h) for m in range(4)])


def weyl_scalar(metric: ChartMetric, theta: Callable[[np.ndarray], np.ndarray], point) -> float:
    """Conformal scalar curvature s - 3/2 |theta|^2 - 3 delta theta at a point.

    ``theta`` returns the coordinate components of a 1-form.
    """
    x = np.asarray(point, dtype=float)
    _check_point(metric, x)
    g, dg, ddg = metric_jet(metric, x)
    R, Gam = coordinate_riemann(g, dg, ddg)
    ginv = np.linalg.inv(g)
    ric = -np.einsum("abca->bc", np.einsum("abcd,de->abce", R, ginv))
    s = float(np.einsum("bc,bc->", ginv, ric))
    h = metric.fd_step
    E = np.eye(4) * h
    th = np.asarray(theta(x), dtype=float)
    dth = np.array([(np.asarray(theta(x + E[i])) - np.asarray(theta(x - E[i]))) / (2 * h)
                    for i in range(4)])                              # dth[i, j] = d_i theta_j
    nabla = dth - np.einsum("kij,k->ij", Gam, th)
    delta = -float(np.einsum("ij,ij->", ginv, nabla))
    norm2 = float(th @ ginv @ th)
    return s - 1.5 * norm2 - 3.0 * delta


def gauge_transform(metric: ChartMetric, theta, f: ScalarFn):
    """(g, theta) -> (e^f g, theta + df)."""
    h = metric.fd_step

    def new_theta(x):
        return np.asarray(theta(x), dtype=float) + gradient(f, x, h)

    return conformal_rescale(metric, f), new_theta
