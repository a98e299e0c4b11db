"""Built-in fixtures and the identity suite behind ``curvedet report``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .analyze import estimate_axis
from .classify import (
    classify_curve,
    det_family,
    factorization_gap,
    kt_det,
    normalized_det,
    ode_residual,
    ode_residual_tau_variant,
)
from .curves import CurveSpec, eval_curve_jets
from .frenet import arclength_grid, arclength_jets, frenet_apparatus
from .generate import SalkowskiParams, integrate_frenet, intrinsic_from_spec


def salkowski_spec(b: float, c: float = 0.0, a: float = 1.0, domain=None) -> CurveSpec:
    p = SalkowskiParams(a=a, b=b, c=c)
    return CurveSpec.family_curve(
        "salkowski-generated", domain or p.admissible_domain(), a=a, b=b, c=c
    )


def fixtures() -> dict:
    """Named witness curves, one or more per classification category."""
    return {
        "line": CurveSpec.expression("s", "2*s", "3", (0.0, 1.0)),
        "parabola": CurveSpec.family_curve("planar-polynomial", (-1.0, 1.0), c2=1.0),
        "circle": CurveSpec.family_curve("circle", (0.0, 2 * math.pi)),
        "great-circle": CurveSpec.family_curve("great-circle", (0.0, 2 * math.pi), incline=0.6),
        "helix": CurveSpec.family_curve("circular-helix", (0.0, 10.0), a=3.0, b=4.0),
        "salkowski": salkowski_spec(1.0, domain=(-0.9, 0.9)),
        "takenaka": CurveSpec.family_curve(
            "salkowski-generated", (-1.0, 1.0), a=1.2, b=0.1, c=0.0
        ),
        "control": CurveSpec.intrinsic_curve("1", "s^2", (-0.9, 0.9)),
    }


# expected flags per witness (None = not asserted)
EXPECTED_FLAGS = {
    "great-circle": {"great-circle-on-sphere": True, "planar": True},
    "parabola": {"planar": True, "general-helix": True, "slant-helix-salkowski": False, "great-circle-on-sphere": False},
    "helix": {"general-helix": True, "planar": False, "slant-helix-salkowski": True, "great-circle-on-sphere": False},
    "salkowski": {"slant-helix-salkowski": True, "general-helix": False, "planar": False},
    "control": {"slant-helix-salkowski": False, "general-helix": False, "planar": False},
    "line": {"degenerate": True},
}

SALKOWSKI_GRID = [(b, c) for b in (0.5, 1.0, 2.0) for c in (0.0, 0.1)]


_X_TERMS = [
    "{a}*s + {b}*cos({w}*s + {p})",
    "{a}*s + {b}*sin({w}*s)",
    "{a}*s + {b}*atan({w}*s - {p})",
]
_Y_TERMS = [
    "{a}*s^2 + {b}*sin({w}*s + {p})",
    "{a}*exp({b}*s) + {p}*s",
    "{a}*log(2 + {b}*s) + {w}*s^2",
]
_Z_TERMS = [
    "{a}*s^3 + {b}*cos({w}*s)",
    "{a}*sqrt(1 + {b}*s^2) + {p}*s",
    "{a}*s^3 - {b}*s^2 + {w}*s",
]


def random_curve(rng: np.random.Generator) -> CurveSpec:
    """Random expression curve on ``[0, 1]`` built from elementary templates."""

    def fill(template):
        vals = {
            "a": rng.uniform(0.5, 2.0),
            "b": rng.uniform(0.3, 1.5),
            "w": rng.uniform(0.5, 3.0),
            "p": rng.uniform(-1.0, 1.0),
        }
        return template.format(**{k: f"{v:.6f}" for k, v in vals.items()})

    return CurveSpec.expression(
        fill(_X_TERMS[rng.integers(len(_X_TERMS))]),
        fill(_Y_TERMS[rng.integers(len(_Y_TERMS))]),
        fill(_Z_TERMS[rng.integers(len(_Z_TERMS))]),
        (0.0, 1.0),
    )


def random_regular_curves(count: int, seed: int = 0, kappa_floor: float = 1e-4, n: int = 24) -> list:
    """``count`` random curves, each with ``kappa > kappa_floor`` on an ``n``-point grid.

    Returns ``(spec, [(t, arc-length jet, FrenetData), ...])`` pairs.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        spec = random_curve(rng)
        try:
            s, t = arclength_grid(spec, n)
            samples = []
            for ti in t:
                vj = arclength_jets(spec, float(ti))
                samples.append((float(ti), vj, frenet_apparatus(vj, float(ti))))
        except ArithmeticError:
            continue
        if min(fd.kappa for _, _, fd in samples) <= kappa_floor:
            continue
        out.append((spec, samples))
    return out


def classical_d1_d2(spec: CurveSpec, t: float) -> tuple:
    """``kappa^2 tau`` and ``kappa^5 (tau/kappa)'`` from the general-parameter formulas.

    Uses ``kappa = |r' x r''| / |r'|^3`` and ``tau = det(r', r'', r''') / |r' x r''|^2``
    in the original parameter, with d/ds = (1/|r'|) d/dt; no arc-length jets involved.
    """
    alpha = eval_curve_jets(spec, t)
    r1 = alpha.diff().truncate(1)
    r2 = alpha.diff().diff().truncate(1)
    r3 = alpha.diff().diff().diff().truncate(1)
    c = r1.cross(r2)
    cc = c.dot(c)
    sp = jets.sqrt(r1.dot(r1))
    kappa = jets.sqrt(cc) / (sp * sp * sp)
    tau = jets.triple(r1, r2, r3) / cc
    ratio = tau / kappa
    k, tv = kappa.value, tau.value
    return k * k * tv, k**5 * ratio.derivative(1) / sp.value


# identity suite -------------------------------------------------------------


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    mode: str  # "<=" or ">="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value <= self.threshold if self.mode == "<=" else self.value >= self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<52} {self.value:.3e} {self.mode} {self.threshold:.3g}"


def _rel(a: float, b: float, floor: float) -> float:
    return abs(a - b) / max(abs(b), floor)


def check_factorization(specs: dict, random_curves: list, n: int = 64) -> Check:
    worst = 0.0
    for spec in specs.values():
        report = classify_curve(spec, n)
        for vj, fd in zip(report.jets, report.frenet):
            if fd is not None:
                worst = max(worst, factorization_gap(vj, fd))
    for _, samples in random_curves:
        for _, vj, fd in samples:
            worst = max(worst, factorization_gap(vj, fd))
    return Check("D3 = kappa^4 det(kappa-tau matrix)", worst, 1e-8, "<=")


def check_classical(random_curves: list) -> list:
    w1 = w2 = 0.0
    for spec, samples in random_curves:
        for t, vj, fd in samples:
            if fd.kappa <= 1e-6:
                continue
            c1, c2 = classical_d1_d2(spec, t)
            w1 = max(w1, _rel(det_family(vj, 1), c1, 1e-300))
            w2 = max(w2, _rel(det_family(vj, 2), c2, 1e-300))
    return [
        Check("D1 = kappa^2 tau (classical oracle)", w1, 1e-9, "<="),
        Check("D2 = kappa^5 (tau/kappa)' (classical oracle)", w2, 1e-9, "<="),
    ]


def _unit_curvature_frenet(spec: CurveSpec, n: int) -> list:
    report = classify_curve(spec, n)
    return [fd for fd in report.frenet if fd is not None]


def ode_scale(fd) -> float:
    """Magnitude of the terms of the ODE residual; the yardstick when the residual cancels to zero."""
    return abs(fd.tau2) * (fd.kappa**2 + fd.tau**2) + 3 * abs(fd.tau) * fd.tau1**2


def check_ode(n: int = 64) -> list:
    worst_eq = 0.0
    specs = [salkowski_spec(b, c) for b, c in SALKOWSKI_GRID] + [fixtures()["control"]]
    for spec in specs:
        for fd in _unit_curvature_frenet(spec, n):
            kt = kt_det(fd)
            worst_eq = max(worst_eq, abs(kt - ode_residual(fd) / 2) / max(abs(kt), ode_scale(fd)))
    variant = max(
        abs(ode_residual_tau_variant(fd)) for fd in _unit_curvature_frenet(salkowski_spec(1.0), n)
    )
    return [
        Check("kt_det = ode_residual / 2 (kappa = 1)", worst_eq, 1e-10, "<="),
        Check("tau-variant ODE fails on (b s + c) torsion", variant, 1e-2, ">="),
    ]


def check_salkowski(n: int = 64) -> list:
    worst = 0.0
    axis_std = 0.0
    theta_err = 0.0
    for b, c in SALKOWSKI_GRID:
        report = classify_curve(salkowski_spec(b, c), n)
        worst = max(worst, report.stats["D3"]["max"])
        axis = estimate_axis([fd.frame.N for fd in report.frenet])
        axis_std = max(axis_std, axis.std_dot)
        theta_err = max(theta_err, abs(axis.theta - math.atan(1.0 / abs(b))))
    fx = fixtures()
    takenaka = classify_curve(fx["takenaka"], n).stats["D3"]["max"]
    control = classify_curve(fx["control"], n).stats["D3"]["max"]
    return [
        Check("max |D3| on (b s + c) torsion curves", worst, 1e-6, "<="),
        Check("max |D3| on a = 1.2 torsion curve", takenaka, 1e-6, "<="),
        Check("max |D3| on control tau = s^2", control, 1e-3, ">="),
        Check("std <N, d> on Salkowski curves", axis_std, 1e-6, "<="),
        Check("|theta - atan(1/b)|", theta_err, 1e-4, "<="),
    ]


def check_indicatrix(n: int = 64) -> list:
    norm_err = 0.0
    worst = 0.0
    for b, c in SALKOWSKI_GRID:
        spec = salkowski_spec(b, c)
        curve = intrinsic_from_spec(spec)
        sc = curve.sampled
        norm_err = max(norm_err, float(np.abs(np.linalg.norm(sc.tangents, axis=1) - 1).max()))
        for s in np.linspace(*spec.domain, n):
            worst = max(worst, abs(normalized_det(curve.indicatrix_jets(float(s)), 2)))
    return [
        Check("tangent indicatrix | |T| - 1 |", norm_err, 1e-10, "<="),
        Check("tangent indicatrix max |D2|", worst, 1e-6, "<="),
    ]


def helix_reference(a: float = 3.0, b: float = 4.0) -> tuple:
    c = math.hypot(a, b)
    frame = np.array([[0.0, a / c, b / c], [-1.0, 0.0, 0.0], [0.0, -b / c, a / c]])

    def exact(s):
        return np.stack((a * np.cos(s / c), a * np.sin(s / c), b * s / c), axis=-1)

    return a / c**2, b / c**2, frame, np.array([a, 0.0, 0.0]), exact


def rk4_errors(h: float, which: str = "helix", length: float = 10.0) -> float:
    """Max position error of the integrator against the closed form on ``[0, length]``."""
    if which == "circle":
        k, t, frame, origin = 1.0, 0.0, np.eye(3), np.zeros(3)

        def exact(s):
            return np.stack((np.sin(s), 1 - np.cos(s), 0 * s), axis=-1)

    else:
        k, t, frame, origin, exact = helix_reference()
    sc = integrate_frenet(lambda s: k + 0.0 * s, lambda s: t + 0.0 * s, (0.0, length), h, frame, origin)
    return float(np.abs(sc.positions - exact(sc.s)).max())


def check_rk4() -> list:
    ratio = math.inf
    for which in ("circle", "helix"):
        e1, e2 = rk4_errors(1 / 8, which), rk4_errors(1 / 16, which)
        ratio = min(ratio, e1 / e2)
    err = max(rk4_errors(1 / 256, w) for w in ("circle", "helix"))
    return [
        Check("RK4 error ratio when h halves", ratio, 12.0, ">="),
        Check("RK4 max error at h = 1/256", err, 1e-7, "<="),
    ]


def check_witnesses(n: int = 64) -> list:
    fx = fixtures()
    checks = [
        Check("great circle max |D0|", classify_curve(fx["great-circle"], n).stats["D0"]["max"], 1e-12, "<="),
        Check("parabola max |D1|", classify_curve(fx["parabola"], n).stats["D1"]["max"], 1e-10, "<="),
        Check("helix max |D2|", classify_curve(fx["helix"], n).stats["D2"]["max"], 1e-10, "<="),
    ]
    mismatches = 0
    for name, expected in EXPECTED_FLAGS.items():
        report = classify_curve(fx[name], n)
        mismatches += sum(report.flag(k) != v for k, v in expected.items())
    checks.append(Check("fixture flag mismatches", float(mismatches), 0.0, "<="))
    return checks


SUITE: list = [
    ("witnesses", check_witnesses),
    ("ode", check_ode),
    ("salkowski", check_salkowski),
    ("indicatrix", check_indicatrix),
    ("rk4", check_rk4),
]


def run_suite(seed: int = 0, n_random: int = 20) -> list:
    curves = random_regular_curves(n_random, seed)
    checks = [check_factorization(fixtures(), curves)]
    checks += check_classical(curves)
    for _, fn in SUITE:
        checks += fn()
    return checks


def format_table(checks: list) -> str:
    lines = [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
