"""Frenet apparatus from unit-speed jets, and reparametrization by arc length."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import jets
from .curves import CurveSpec, SampledCurve, eval_curve_jets, speeds
from .jets import Jet, VecJet

KAPPA_MIN = 1e-8
SPEED_TOL = 1e-9
REGULAR_MIN = 1e-8
QUAD_TOL = 1e-13
GL_X, GL_W = np.polynomial.legendre.leggauss(16)


class VanishingCurvature(ArithmeticError):
    def __init__(self, kappa: float, s: Optional[float] = None):
        where = "" if s is None else f" at s={float(s):.17g}"
        super().__init__(f"curvature {kappa:.3g} below threshold{where}; Frenet frame undefined")
        self.kappa = kappa


class NotUnitSpeed(ValueError):
    def __init__(self, deviation: float):
        super().__init__(f"input is not unit speed: ||alpha'| - 1| = {deviation:.3g}")
        self.deviation = deviation


class IrregularCurve(ArithmeticError):
    pass


@dataclass(frozen=True)
class FrenetFrame:
    T: tuple
    N: tuple
    B: tuple

    def as_array(self) -> np.ndarray:
        return np.array([self.T, self.N, self.B])


@dataclass(frozen=True)
class FrenetData:
    """Frame, curvature, torsion and their arc-length derivatives at one sample."""

    s: float
    frame: FrenetFrame
    kappa: float
    kappa1: float
    kappa2: float
    kappa3: float
    tau: float
    tau1: float
    tau2: float
    sigma: float

    def kappa_jet(self) -> Jet:
        return Jet.from_derivatives((self.kappa, self.kappa1, self.kappa2, self.kappa3))

    def tau_jet(self) -> Jet:
        return Jet.from_derivatives((self.tau, self.tau1, self.tau2))


def sigma_invariant(fd: FrenetData) -> float:
    """Slant-helix invariant ``k^2 (t/k)' / (k^2 + t^2)^(3/2)``."""
    w = fd.kappa**2 + fd.tau**2
    if w <= 0:
        raise ValueError("sigma undefined for kappa = tau = 0")
    return (fd.tau1 * fd.kappa - fd.tau * fd.kappa1) / w**1.5


def frenet_apparatus(
    vj: VecJet, s: float = 0.0, kappa_min: float = KAPPA_MIN, speed_tol: float = SPEED_TOL
) -> FrenetData:
    """Frenet data from an order-5 arc-length jet.

    kappa = |alpha''| is evaluated as an order-3 jet and
    tau = det(alpha', alpha'', alpha''') / kappa^2 as an order-2 jet, which
    yields kappa', kappa'', kappa''' and tau', tau'' without differencing.
    """
    if vj.order < 5:
        raise ValueError(f"need an order-5 jet, got order {vj.order}")
    d1 = vj.diff()
    dev = abs(math.sqrt(d1.dot(d1).value) - 1.0)
    if dev > speed_tol:
        raise NotUnitSpeed(dev)
    d2 = d1.diff()
    d3 = d2.diff()
    kappa = jets.sqrt(d2.dot(d2)) if d2.dot(d2).value > 0 else None
    if kappa is None or kappa.value <= kappa_min:
        raise VanishingCurvature(0.0 if kappa is None else kappa.value, s)
    tau = jets.triple(d1.truncate(2), d2.truncate(2), d3) / (kappa * kappa).truncate(2)
    T = np.array(d1.derivative(0))
    N = np.array(d2.derivative(0)) / kappa.value
    B = np.cross(T, N)
    k = kappa.derivatives()
    t = tau.derivatives()
    fd = FrenetData(
        s=s,
        frame=FrenetFrame(*(tuple(float(x) for x in v) for v in (T, N, B))),
        kappa=k[0],
        kappa1=k[1],
        kappa2=k[2],
        kappa3=k[3],
        tau=t[0],
        tau1=t[1],
        tau2=t[2],
        sigma=0.0,
    )
    return replace(fd, sigma=sigma_invariant(fd))


# arc-length reparametrization --------------------------------------------


def _arclength_jet(spec: CurveSpec, t0: float) -> tuple:
    """Jets ``t(s)`` and ``alpha(t(s))`` at the sample with parameter ``t0``.

    ``t' = 1 / |alpha'(t)|`` is solved in jet arithmetic by Picard iteration:
    every pass integrates the composed right-hand side and gains one order.
    """
    alpha = eval_curve_jets(spec, t0)
    dalpha = alpha.diff()
    tj = Jet.constant(t0, 0)
    for m in range(1, jets.MAX_ORDER + 1):
        d = dalpha.truncate(m - 1).compose(tj)
        sp2 = d.dot(d)
        if sp2.value <= REGULAR_MIN**2:
            raise IrregularCurve(f"|alpha'| = {math.sqrt(sp2.value):.3g} at t={t0}")
        tj = (1.0 / jets.sqrt(sp2)).integrate(t0)
    return tj, alpha.compose(tj)


def _gauss(spec: CurveSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """16-point Gauss-Legendre estimates of the arc length over each ``[a_i, b_i]``."""
    mid, half = (a + b) / 2, (b - a) / 2
    nodes = mid[:, None] + half[:, None] * GL_X
    sp = speeds(spec, nodes)
    if sp.min() <= REGULAR_MIN:
        i = np.unravel_index(np.argmin(sp), sp.shape)
        raise IrregularCurve(f"|alpha'| = {sp[i]:.3g} at t={nodes[i]:.17g}")
    return half * (sp @ GL_W)


def _arclength_table(spec: CurveSpec, t_lo: float, t_hi: float, max_panels: int = 2**15) -> tuple:
    """Panel edges and cumulative arc length at each edge.

    Composite Gauss-Legendre; the panel count doubles until two successive
    totals agree to ``QUAD_TOL`` relative.
    """
    panels, previous = 32, None
    while True:
        edges = np.linspace(t_lo, t_hi, panels + 1)
        cum = np.concatenate(([0.0], np.cumsum(_gauss(spec, edges[:-1], edges[1:]))))
        if previous is not None and abs(cum[-1] - previous) <= QUAD_TOL * max(1.0, cum[-1]):
            return edges, cum
        if panels >= max_panels:
            raise IrregularCurve(f"arc length quadrature did not converge with {panels} panels")
        previous, panels = cum[-1], 2 * panels


def _invert_arclength(spec: CurveSpec, targets: np.ndarray, edges: np.ndarray, cum: np.ndarray) -> np.ndarray:
    """Parameters ``t_i`` with ``s(t_i) = targets[i]``, by safeguarded Newton on all targets at once."""
    k = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(edges) - 2)
    lo, hi = edges[k].copy(), edges[k + 1].copy()
    t = np.interp(targets, cum, edges)
    for _ in range(60):
        f = cum[k] + _gauss(spec, edges[k], t) - targets
        if np.all(np.abs(f) <= QUAD_TOL * np.maximum(1.0, targets)):
            break
        hi = np.where(f > 0, t, hi)
        lo = np.where(f > 0, lo, t)
        step = t - f / speeds(spec, t)
        t = np.where((lo < step) & (step < hi), step, 0.5 * (lo + hi))
    return t


def arclength_grid(spec: CurveSpec, n: int = 200) -> tuple:
    """Uniform arc-length grid ``s`` and the matching parameters ``t`` (equal for unit-speed specs)."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    if spec.unit_speed:
        s = np.linspace(*spec.domain, n)
        return s, s.copy()
    t_lo, t_hi = spec.domain
    edges, cum = _arclength_table(spec, t_lo, t_hi)
    s = np.linspace(0.0, cum[-1], n)
    t = _invert_arclength(spec, s[1:-1], edges, cum)
    return s, np.concatenate(([t_lo], t, [t_hi]))


def arclength_jets(spec: CurveSpec, t: float) -> VecJet:
    """Order-5 jet with respect to arc length at the point with parameter ``t``."""
    if spec.unit_speed:
        return eval_curve_jets(spec, t)
    return _arclength_jet(spec, t)[1]


def reparametrize_by_arclength(spec: CurveSpec, n: int = 200) -> SampledCurve:
    """Sample ``spec`` on a uniform arc-length grid of ``n`` points with unit-speed jets.

    Works for any regular spec, including ones already flagged unit-speed.
    """
    s, t = arclength_grid(spec, n)
    vjs = tuple(arclength_jets(spec, ti) for ti in t)
    dev = max(abs(math.hypot(*v.derivative(1)) - 1.0) for v in vjs)
    if dev > SPEED_TOL:
        raise NotUnitSpeed(dev)
    positions = np.array([v.derivative(0) for v in vjs])
    return SampledCurve(s=s, positions=positions, provenance="analytic", t=t, jets=vjs)
