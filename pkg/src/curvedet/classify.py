"""Determinant family det(a^(k), a^(k+1), a^(k+2)), its kappa-tau factorization, and curve classification.

Background for the residuals computed here, for an arc-length curve with
curvature k and torsion t:

* D1 = k^2 t vanishes exactly on plane curves,
* D2 = k^5 (t/k)' vanishes exactly on general helices,
* D3 = k^4 det(M) with the matrix M of :class:`KappaTauMatrix`,
* for a spherical curve centred at the origin D0 = 0 singles out great circles.

For constant curvature, D3 = 0 reduces to the ODE
``2 t'' (k^2 + t^2) - 3 t' (k^2 + t^2)' = 0`` (see :func:`ode_residual`).  A
variant with ``t`` instead of ``t'`` in the second term circulates in the
literature; it does not follow from the determinant and is *not* solved by
the torsion family ``(b s + c) / sqrt(1 - (b s + c)^2)``.  It is available as
:func:`ode_residual_tau_variant` for comparison only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analyze import DegenerateError, estimate_axis, fit_sphere
from .curves import CurveEvalError, CurveSpec
from .frenet import (
    KAPPA_MIN,
    FrenetData,
    VanishingCurvature,
    arclength_grid,
    arclength_jets,
    frenet_apparatus,
)
from .jets import JetDomainError, VecJet

DEFAULT_TOL = 1e-7
EPS_SCALE = 1e-30
MAX_FAILED_FRACTION = 0.10

FLAG_ORDER = (
    "degenerate",
    "great-circle-on-sphere",
    "slant-helix-salkowski",
    "general-helix",
    "planar",
    "unit-curvature",
    "constant-curvature",
)


class NonConstantCurvature(ValueError):
    pass


class ClassificationError(ArithmeticError):
    pass


def det3(u, v, w) -> float:
    """Scalar triple product ``u . (v x w)``."""
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


def det_family(vj: VecJet, k: int) -> float:
    """``D_k = det(alpha^(k), alpha^(k+1), alpha^(k+2))``."""
    if not 0 <= k <= 3:
        raise ValueError("k must be in 0..3")
    if vj.order < k + 2:
        raise ValueError(f"D_{k} needs a jet of order {k + 2}")
    return det3(vj.derivative(k), vj.derivative(k + 1), vj.derivative(k + 2))


def normalized_det(vj: VecJet, k: int, eps_scale: float = EPS_SCALE) -> float:
    """``D_k`` divided by the product of the three row norms (floored at ``eps_scale``)."""
    rows = [vj.derivative(k + i) for i in range(3)]
    scale = math.prod(math.hypot(*r) for r in rows)
    return det3(*rows) / max(scale, eps_scale)


@dataclass(frozen=True)
class KappaTauMatrix:
    phi1: float
    phi2: float
    phi3: float
    kappa: float
    kappa1: float
    kappa2: float
    tau: float
    tau1: float
    tau2: float

    @classmethod
    def from_frenet(cls, fd: FrenetData) -> "KappaTauMatrix":
        if fd.kappa <= KAPPA_MIN:
            raise VanishingCurvature(fd.kappa, fd.s)
        kappa = fd.kappa_jet()
        inv = 1.0 / kappa
        w = (kappa * kappa).truncate(2) + fd.tau_jet() * fd.tau_jet()
        iw = inv.truncate(2) * w
        return cls(
            phi1=-inv.derivative(1),
            phi2=-inv.derivative(2) - iw.value,
            phi3=-inv.derivative(3) - iw.derivative(1) - w.derivative(1) / (2 * fd.kappa),
            kappa=fd.kappa,
            kappa1=fd.kappa1,
            kappa2=fd.kappa2,
            tau=fd.tau,
            tau1=fd.tau1,
            tau2=fd.tau2,
        )

    def rows(self) -> tuple:
        return (
            (self.phi1, self.phi2, self.phi3),
            (self.kappa, self.kappa1, self.kappa2),
            (self.tau, self.tau1, self.tau2),
        )

    def det(self) -> float:
        return det3(*self.rows())


def kt_det(fd: FrenetData) -> float:
    """``kappa^4 det(M)``, which equals ``D_3`` computed from the curve directly."""
    return fd.kappa**4 * KappaTauMatrix.from_frenet(fd).det()


def _check_constant_curvature(fd: FrenetData, tol: float) -> None:
    scale = max(1.0, fd.kappa)
    if abs(fd.kappa1) > tol * scale or abs(fd.kappa2) > tol * scale:
        raise NonConstantCurvature(
            f"kappa' = {fd.kappa1:.3g}, kappa'' = {fd.kappa2:.3g} at s={float(fd.s):.17g}; curvature is not constant"
        )


def ode_residual(fd: FrenetData, tol: float = DEFAULT_TOL) -> float:
    """``2 t'' (k^2 + t^2) - 3 t' (k^2 + t^2)'`` for constant curvature ``k``.

    Equals ``2 * kt_det(fd)`` when ``k == 1``.
    """
    _check_constant_curvature(fd, tol)
    w = fd.kappa**2 + fd.tau**2
    dw = 2 * fd.tau * fd.tau1
    return 2 * fd.tau2 * w - 3 * fd.tau1 * dw


def ode_residual_tau_variant(fd: FrenetData, tol: float = DEFAULT_TOL) -> float:
    """``2 t'' (k^2 + t^2) - 3 t (k^2 + t^2)'``: the variant with ``t`` in the second term."""
    _check_constant_curvature(fd, tol)
    w = fd.kappa**2 + fd.tau**2
    dw = 2 * fd.tau * fd.tau1
    return 2 * fd.tau2 * w - 3 * fd.tau * dw


def factorization_gap(vj: VecJet, fd: FrenetData, floor: float = 1e-6) -> float:
    """Relative mismatch between ``D_3`` and ``kt_det``.

    The denominator is ``max(|D_3|, floor * max(1, |a3| |a4| |a5|))`` with ``ak``
    the k-th derivative: where ``D_3`` vanishes, the comparison is made against
    the size of the derivatives entering it, since cancellation noise scales
    with them.
    """
    d3 = det_family(vj, 3)
    rows = math.prod(math.hypot(*vj.derivative(k)) for k in (3, 4, 5))
    return abs(kt_det(fd) - d3) / max(abs(d3), floor * max(1.0, rows))


# classification -----------------------------------------------------------


def _stats(values) -> dict:
    vals = [abs(v) for v in values if v is not None]
    if not vals:
        return {"max": None, "rms": None, "count": 0}
    arr = np.array(vals)
    return {"max": float(arr.max()), "rms": float(np.sqrt(np.mean(arr**2))), "count": len(vals)}


def _flag(value: bool, witness: dict, threshold: float) -> dict:
    return {"value": bool(value), "witness": witness, "threshold": threshold}


@dataclass
class ClassificationReport:
    """Per-sample residuals, aggregate statistics and category flags for one curve."""

    s: list
    residuals: dict
    stats: dict
    flags: dict
    tolerances: dict
    sphere_fit: Optional[dict] = None
    axis: Optional[dict] = None
    frenet: list = field(default_factory=list, repr=False)
    jets: list = field(default_factory=list, repr=False)

    @property
    def categories(self) -> list:
        return [name for name in FLAG_ORDER if self.flags[name]["value"]]

    def flag(self, name: str) -> bool:
        return self.flags[name]["value"]

    def to_json(self) -> dict:
        return {
            "flags": self.flags,
            "categories": self.categories,
            "residuals": self.residuals,
            "stats": self.stats,
            "tolerances": self.tolerances,
            "sphere_fit": self.sphere_fit,
            "axis": self.axis,
            "samples": self.s,
        }

    def dumps(self) -> str:
        return json.dumps(_clean(self.to_json()), indent=2) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def classify_curve(
    spec: CurveSpec,
    n: int = 200,
    tol: float = DEFAULT_TOL,
    kappa_min: float = KAPPA_MIN,
) -> ClassificationReport:
    """Sample ``spec`` (by arc length) and evaluate every determinant condition.

    Flags: ``planar`` iff max normalized |D1| <= tol; ``general-helix`` iff
    max normalized |D2| <= tol; ``slant-helix-salkowski`` iff max normalized
    |D3| <= tol and the curvature is constant; ``great-circle-on-sphere`` iff
    max normalized |D0| <= tol and the curve lies on a sphere centred at the
    origin.  Curves satisfying every condition (lines, circles) are also
    marked ``degenerate``.
    """
    if n < 16:
        raise ValueError("classification needs at least 16 samples")
    s_grid, t_grid = arclength_grid(spec, n)
    samples, failures = [], []
    for s, t in zip(s_grid, t_grid):
        try:
            samples.append((float(s), arclength_jets(spec, float(t))))
        except (JetDomainError, CurveEvalError, ArithmeticError) as exc:
            failures.append((float(s), str(exc)))
    if len(failures) > MAX_FAILED_FRACTION * n:
        raise ClassificationError(
            f"{len(failures)} of {n} samples failed; first: s={failures[0][0]}: {failures[0][1]}"
        )

    s_list = [s for s, _ in samples]
    D = {f"D{k}": [normalized_det(vj, k) for _, vj in samples] for k in range(4)}

    frenet: list = []
    for s, vj in samples:
        try:
            frenet.append(frenet_apparatus(vj, s, kappa_min=kappa_min))
        except VanishingCurvature:
            frenet.append(None)
    defined = [fd for fd in frenet if fd is not None]
    all_defined = len(defined) == len(frenet) and len(defined) > 0

    kappas = np.array([fd.kappa for fd in defined]) if defined else np.array([])
    if all_defined:
        kmean = float(kappas.mean())
        kspread = float(kappas.max() - kappas.min())
        constant_k = kspread <= tol * max(1.0, kmean)
    else:
        kmean, kspread, constant_k = None, None, False
    unit_k = constant_k and abs(kmean - 1.0) <= tol

    ode = []
    for fd in frenet:
        if fd is None or not constant_k:
            ode.append(None)
            continue
        try:
            ode.append(ode_residual(fd, tol=max(tol, 1e-6)))
        except NonConstantCurvature:
            ode.append(None)

    gaps = []
    for (s, vj), fd in zip(samples, frenet):
        if fd is None:
            continue
        gaps.append(factorization_gap(vj, fd))

    stats = {k: _stats(v) for k, v in D.items()}
    stats["ode"] = _stats(ode)
    stats["factorization_gap"] = _stats(gaps)
    sigmas = np.array([fd.sigma for fd in defined]) if defined else np.array([])
    stats["kappa"] = {
        "mean": kmean,
        "spread": kspread,
        "min": float(kappas.min()) if defined else None,
        "max": float(kappas.max()) if defined else None,
    }
    stats["sigma"] = {
        "mean": float(sigmas.mean()) if defined else None,
        "std": float(sigmas.std(ddof=1)) if len(defined) > 1 else None,
    }
    stats["samples"] = {
        "requested": n,
        "evaluated": len(samples),
        "failed": len(failures),
        "vanishing_curvature": len(frenet) - len(defined),
    }

    maxD = {k: stats[k]["max"] for k in D}

    # spherical test: D0 refers to the origin, so the relevant sphere is centred there
    P = np.array([vj.derivative(0) for _, vj in samples])
    radii = np.linalg.norm(P, axis=1)
    r_mean = float(radii.mean())
    radial_rms = float(np.sqrt(np.mean((radii - r_mean) ** 2)))
    origin_rel = radial_rms / r_mean if r_mean > 0 else math.inf
    try:
        sphere_fit = fit_sphere(P).to_json()
    except DegenerateError as exc:
        sphere_fit = {"degenerate": True, "reason": str(exc)}
    sphere_fit["origin_sphere"] = {"radius": r_mean, "rms": radial_rms, "relative_rms": origin_rel}

    axis = None
    if all_defined and len(defined) >= 8:
        try:
            axis = estimate_axis([fd.frame.N for fd in defined]).to_json()
        except (DegenerateError, ValueError) as exc:
            axis = {"error": str(exc)}

    planar = maxD["D1"] <= tol
    helix = maxD["D2"] <= tol
    flags = {
        "great-circle-on-sphere": _flag(
            maxD["D0"] <= tol and origin_rel <= tol,
            {"max|D0|": maxD["D0"], "origin_sphere_relative_rms": origin_rel},
            tol,
        ),
        "slant-helix-salkowski": _flag(
            maxD["D3"] <= tol and constant_k,
            {"max|D3|": maxD["D3"], "kappa_spread": kspread, "sigma_std": stats["sigma"]["std"]},
            tol,
        ),
        "general-helix": _flag(helix, {"max|D2|": maxD["D2"]}, tol),
        "planar": _flag(planar, {"max|D1|": maxD["D1"]}, tol),
        "unit-curvature": _flag(unit_k, {"kappa_mean": kmean}, tol),
        "constant-curvature": _flag(constant_k, {"kappa_spread": kspread}, tol),
    }
    degenerate = not defined or (planar and constant_k)
    flags["degenerate"] = _flag(
        degenerate,
        {"vanishing_curvature_samples": len(frenet) - len(defined), "planar": planar, "constant_curvature": constant_k},
        tol,
    )
    flags = {name: flags[name] for name in FLAG_ORDER}

    return ClassificationReport(
        s=s_list,
        residuals={**D, "ode": ode},
        stats=stats,
        flags=flags,
        tolerances={"classification": tol, "kappa_min": kappa_min, "eps_scale": EPS_SCALE},
        sphere_fit=sphere_fit,
        axis=axis,
        frenet=frenet,
        jets=[vj for _, vj in samples],
    )
