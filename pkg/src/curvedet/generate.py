"""Curves from curvature and torsion: Salkowski torsion laws and Frenet-Serret integration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional

import numpy as np

from . import expr, jets
from .curves import CurveSpec, SampledCurve
from .jets import Jet, JetDomainError, VecJet

DEFAULT_DELTA = 1e-3
STANDARD_FRAME = np.eye(3)

ScalarLaw = Callable  # float | Jet -> float | Jet


@dataclass(frozen=True)
class Law:
    """A scalar law of ``s`` with an optional vectorized (value, derivative) form.

    ``fn`` takes floats and jets; ``dual`` maps an array of ``s`` to the arrays
    of values and first derivatives and spares per-sample jet evaluation.
    """

    fn: Callable
    dual: Optional[Callable] = None

    def __call__(self, s):
        return self.fn(s)


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class SalkowskiParams:
    """Constant curvature ``a`` and torsion ``a^3 u / sqrt(1 - a^4 u^2)`` with ``u = b s + c``.

    Passing ``phi`` fixes ``b = 1 / tan(phi)`` and requires ``c = 0``.  Only the
    ``+`` branch is produced; the ``-`` branch is ``SalkowskiParams(a, -b, -c)``.
    """

    a: float = 1.0
    b: Optional[float] = None
    c: float = 0.0
    phi: Optional[float] = None
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.phi is not None:
            if self.c != 0:
                raise ValueError("c must be 0 when phi is given")
            b = 1.0 / math.tan(self.phi)
            if self.b is not None and abs(self.b * math.tan(self.phi) - 1.0) > 1e-12:
                raise ValueError(f"b={self.b} inconsistent with phi={self.phi}")
            object.__setattr__(self, "b", b)
        if self.b is None:
            object.__setattr__(self, "b", 1.0)
        if self.b == 0:
            raise ValueError("b must be non-zero")
        if self.a <= 0:
            raise ValueError("curvature a must be positive")
        if not 0 <= self.delta < 1:
            raise ValueError("margin delta must lie in [0, 1)")

    @classmethod
    def from_mapping(cls, p: Mapping) -> "SalkowskiParams":
        return cls(
            a=p.get("a", 1.0),
            b=p.get("b"),
            c=p.get("c", 0.0),
            phi=p.get("phi"),
            delta=p.get("delta", DEFAULT_DELTA),
        )

    def margin(self, s: float) -> float:
        u = self.b * s + self.c
        return 1.0 - self.a**4 * u * u

    def admissible_domain(self) -> tuple:
        """Largest interval on which ``a^4 (b s + c)^2 <= 1 - delta``."""
        r = math.sqrt(1.0 - self.delta) / self.a**2
        lo, hi = sorted(((-r - self.c) / self.b, (r - self.c) / self.b))
        return lo, hi

    def check_domain(self, domain) -> None:
        # u is affine in s, so the endpoints bound the margin
        for s in domain:
            if self.margin(s) < self.delta - 1e-12:
                raise JetDomainError(
                    "salkowski_torsion",
                    f"s={float(s):.17g} violates a^4 (b s + c)^2 <= 1 - {self.delta}",
                )


def salkowski_torsion(s, p: SalkowskiParams):
    """Torsion ``a^3 (b s + c) / sqrt(1 - a^4 (b s + c)^2)`` at ``s`` (float, array or Jet)."""
    if isinstance(s, np.ndarray):
        margin = p.margin(s)
        if margin.min() < p.delta - 1e-12:
            raise JetDomainError(
                "salkowski_torsion", f"1 - a^4 (b s + c)^2 = {margin.min():.3g} below margin {p.delta}"
            )
        u = p.b * s + p.c
        return p.a**3 * u / np.sqrt(margin)
    margin = p.margin(jets.value(s))
    if margin < p.delta - 1e-12:
        raise JetDomainError(
            "salkowski_torsion", f"1 - a^4 (b s + c)^2 = {margin:.3g} below margin {p.delta}"
        )
    u = s * p.b + p.c
    return p.a**3 * u / jets.sqrt(1.0 - p.a**4 * u * u)


# Frenet-Serret integration ----------------------------------------------


# The state is a flat 12-tuple (alpha, T, N, B); plain floats beat numpy at this size.


def _derivative(k: float, t: float, S) -> tuple:
    # (alpha, T, N, B)' = (T, kN, -kT + tB, -tN)
    return (
        S[3], S[4], S[5],
        k * S[6], k * S[7], k * S[8],
        t * S[9] - k * S[3], t * S[10] - k * S[4], t * S[11] - k * S[5],
        -t * S[6], -t * S[7], -t * S[8],
    )  # fmt: skip


def _orthonormalize(S) -> tuple:
    """Gram-Schmidt on T, then N; B = T x N."""
    tx, ty, tz = S[3:6]
    r = 1.0 / math.sqrt(tx * tx + ty * ty + tz * tz)
    tx, ty, tz = tx * r, ty * r, tz * r
    nx, ny, nz = S[6:9]
    p = nx * tx + ny * ty + nz * tz
    nx, ny, nz = nx - p * tx, ny - p * ty, nz - p * tz
    r = 1.0 / math.sqrt(nx * nx + ny * ny + nz * nz)
    nx, ny, nz = nx * r, ny * r, nz * r
    return (
        S[0], S[1], S[2], tx, ty, tz, nx, ny, nz,
        ty * nz - tz * ny, tz * nx - tx * nz, tx * ny - ty * nx,
    )  # fmt: skip


def _rk4_step(laws: tuple, h: float, S) -> tuple:
    """One RK4 step; ``laws`` holds (kappa, tau) at s, s + h/2 and s + h."""
    (k0, t0), (km, tm), (k1, t1) = laws
    d1 = _derivative(k0, t0, S)
    d2 = _derivative(km, tm, [a + h / 2 * b for a, b in zip(S, d1)])
    d3 = _derivative(km, tm, [a + h / 2 * b for a, b in zip(S, d2)])
    d4 = _derivative(k1, t1, [a + h * b for a, b in zip(S, d3)])
    return _orthonormalize(
        [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(S, d1, d2, d3, d4)]
    )


def _tabulate(fn: ScalarLaw, points: np.ndarray) -> np.ndarray:
    """``fn`` on an array of points; one vectorized call when the law supports it."""
    if getattr(fn, "dual", None) is not None:
        return np.asarray(fn.dual(points)[0], dtype=float)
    try:
        values = np.asarray(fn(points), dtype=float)
        if values.shape == points.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(v))) for v in points])


def _frame_state(frame, origin) -> np.ndarray:
    F = np.asarray(STANDARD_FRAME if frame is None else frame, dtype=float)
    if F.shape != (3, 3):
        raise ValueError("initial frame must be a 3x3 array with rows T, N, B")
    if np.abs(F @ F.T - np.eye(3)).max() > 1e-9 or np.linalg.det(F) < 0:
        raise ValueError("initial frame must be orthonormal and right-handed")
    x0 = np.zeros(3) if origin is None else np.asarray(origin, dtype=float)
    return tuple(float(v) for v in np.concatenate((x0, F.ravel())))


def _sigmas(kappa_fn, tau_fn, s: np.ndarray) -> np.ndarray:
    duals = [getattr(f, "dual", None) for f in (kappa_fn, tau_fn)]
    if None in duals:
        return np.array([_sigma(kappa_fn, tau_fn, float(v)) for v in s])
    (kv, k1), (tv, t1) = (d(s) for d in duals)
    return (t1 * kv - tv * k1) / (kv * kv + tv * tv) ** 1.5


def _sigma(kappa_fn, tau_fn, s: float) -> float:
    k = kappa_fn(Jet.variable(s, 1))
    t = tau_fn(Jet.variable(s, 1))
    k = k if isinstance(k, Jet) else Jet.constant(k, 1)
    t = t if isinstance(t, Jet) else Jet.constant(t, 1)
    kv, k1 = k.value, k.derivative(1)
    tv, t1 = t.value, t.derivative(1)
    return (t1 * kv - tv * k1) / (kv * kv + tv * tv) ** 1.5


def integrate_frenet(
    kappa_fn: ScalarLaw,
    tau_fn: ScalarLaw,
    domain,
    h: float,
    frame=None,
    origin=None,
) -> SampledCurve:
    """Integrate T' = kN, N' = -kT + tB, B' = -tN, alpha' = T with classical RK4.

    The frame is re-orthonormalized (Gram-Schmidt on T then N, B = T x N) after
    every step.  The grid is uniform; when ``h`` does not divide the domain the
    step is shrunk to the next divisor.  ``kappa_fn`` and ``tau_fn`` must accept
    floats and :class:`~curvedet.jets.Jet` values.
    """
    lo, hi = (float(v) for v in domain)
    length = hi - lo
    if not (h > 0 and math.isfinite(h)) or h > length / 64 * (1 + 1e-12):
        raise StepSizeError(f"step h={h} must be positive and at most (domain length)/64")
    n = math.ceil(length / h - 1e-9)
    step = length / n
    S = _frame_state(frame, origin)
    s = lo + step * np.arange(n + 1)
    s[-1] = hi
    mid = (s[:-1] + s[1:]) / 2
    kappa, tau = _tabulate(kappa_fn, s), _tabulate(tau_fn, s)
    kappa_mid, tau_mid = _tabulate(kappa_fn, mid), _tabulate(tau_fn, mid)
    k_list, t_list = kappa.tolist(), tau.tolist()
    km_list, tm_list, s_list = kappa_mid.tolist(), tau_mid.tolist(), s.tolist()
    states = [S]
    for i in range(n):
        laws = ((k_list[i], t_list[i]), (km_list[i], tm_list[i]), (k_list[i + 1], t_list[i + 1]))
        S = _rk4_step(laws, s_list[i + 1] - s_list[i], S)
        states.append(S)
    states = np.array(states).reshape(-1, 4, 3)
    sigma = _sigmas(kappa_fn, tau_fn, s)
    return SampledCurve(
        s=s,
        positions=states[:, 0].copy(),
        provenance="integrated",
        frames=states[:, 1:].copy(),
        kappa=kappa,
        tau=tau,
        sigma=sigma,
    )


def frame_derivatives(kappa: Jet, tau: Jet, count: int) -> list:
    """Frame coordinates of ``T, T', T'', ...`` (``count`` vectors).

    Each entry is a triple of jets ``(p, q, r)`` meaning ``p T + q N + r B``;
    differentiation uses ``(p, q, r)' = (p' - k q, k p + q' - t r, t q + r')``.
    """
    order = min(kappa.order, tau.order)
    one, zero = Jet.constant(1.0, order), Jet.constant(0.0, order)
    out = [(one, zero, zero)]
    for _ in range(count - 1):
        p, q, r = out[-1]
        k, t = kappa.truncate(p.order - 1), tau.truncate(p.order - 1)
        out.append((p.diff() - k * q, k * p + q.diff() - t * r, t * q + r.diff()))
    return out


def _as_jet(v, order: int) -> Jet:
    return v if isinstance(v, Jet) else Jet.constant(float(v), order)


@dataclass(frozen=True)
class IntrinsicCurve:
    """A curve determined by its curvature and torsion laws plus an initial frame."""

    kappa_fn: ScalarLaw
    tau_fn: ScalarLaw
    domain: tuple
    h: float
    frame: Optional[tuple] = None
    origin: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def sampled(self) -> SampledCurve:
        if "sampled" not in self._cache:
            self._cache["sampled"] = integrate_frenet(
                self.kappa_fn,
                self.tau_fn,
                self.domain,
                self.h,
                None if self.frame is None else np.array(self.frame),
                self.origin,
            )
        return self._cache["sampled"]

    def state_at(self, s: float) -> tuple:
        """Position and frame at ``s``: nearest lower grid sample plus one RK4 sub-step."""
        sc = self.sampled
        i = int(np.searchsorted(sc.s, s, side="right")) - 1
        i = min(max(i, 0), len(sc.s) - 1)
        ds = s - sc.s[i]
        if abs(ds) <= 1e-15 * max(1.0, abs(s)):
            return sc.positions[i], sc.frames[i]
        S = tuple(np.concatenate((sc.positions[i], sc.frames[i].ravel())).tolist())
        s0 = float(sc.s[i])
        laws = tuple(
            (float(self.kappa_fn(v)), float(self.tau_fn(v))) for v in (s0, s0 + ds / 2, s0 + ds)
        )
        X = np.array(_rk4_step(laws, float(ds), S)).reshape(4, 3)
        return X[0], X[1:]

    def laws(self, s: float, order: int = jets.MAX_ORDER) -> tuple:
        var = Jet.variable(s, order)
        return _as_jet(self.kappa_fn(var), order), _as_jet(self.tau_fn(var), order)

    def jets(self, s: float) -> VecJet:
        """Order-5 jet of the position from the exact (kappa, tau) jets and the integrated frame."""
        pos, F = self.state_at(s)
        kappa, tau = self.laws(s, jets.MAX_ORDER - 1)
        vectors = [pos] + [
            p.value * F[0] + q.value * F[1] + r.value * F[2]
            for p, q, r in frame_derivatives(kappa, tau, jets.MAX_ORDER)
        ]
        return VecJet(*(Jet.from_derivatives([v[i] for v in vectors]) for i in range(3)))

    def indicatrix_jets(self, s: float) -> VecJet:
        """Order-4 jet of the tangent indicatrix ``s -> T(s)``."""
        _, F = self.state_at(s)
        kappa, tau = self.laws(s, jets.MAX_ORDER - 1)
        vectors = [
            p.value * F[0] + q.value * F[1] + r.value * F[2]
            for p, q, r in frame_derivatives(kappa, tau, jets.MAX_ORDER)
        ]
        return VecJet(*(Jet.from_derivatives([v[i] for v in vectors]) for i in range(3)))


def default_step(domain) -> float:
    return (domain[1] - domain[0]) / 8192


def salkowski_curve(p: SalkowskiParams, domain=None, h: Optional[float] = None, **kw) -> IntrinsicCurve:
    domain = tuple(domain) if domain is not None else p.admissible_domain()
    p.check_domain(domain)
    return IntrinsicCurve(
        kappa_fn=Law(lambda s, a=p.a: a + 0.0 * s, lambda s, a=p.a: (a + 0.0 * s, 0.0 * s)),
        tau_fn=Law(lambda s: salkowski_torsion(s, p), lambda s: _salkowski_dual(s, p)),
        domain=domain,
        h=h if h is not None else default_step(domain),
        **kw,
    )


def _salkowski_dual(s: np.ndarray, p: SalkowskiParams) -> tuple:
    # tau' = a^3 b (1 - a^4 u^2)^(-3/2)
    tau = salkowski_torsion(s, p)
    return tau, p.a**3 * p.b * p.margin(s) ** -1.5


def _expression_law(ast, params: dict) -> Law:
    return Law(
        lambda s: expr.evaluate(ast, s, params),
        lambda s: expr.evaluate_dual(ast, s, params),
    )


@lru_cache(maxsize=128)
def intrinsic_from_spec(spec: CurveSpec) -> IntrinsicCurve:
    """The integrated curve behind a ``salkowski-generated`` or ``intrinsic`` spec (cached)."""
    p = spec.param_dict()
    if spec.family == "salkowski-generated":
        sp = SalkowskiParams.from_mapping(p)
        return salkowski_curve(sp, spec.domain, p.get("step"))
    if spec.intrinsic is None:
        raise ValueError("spec is not a generated curve")
    k_ast, t_ast = spec._asts
    return IntrinsicCurve(
        kappa_fn=_expression_law(k_ast, p),
        tau_fn=_expression_law(t_ast, p),
        domain=spec.domain,
        h=p.get("step", default_step(spec.domain)),
    )


def tangent_indicatrix(curve: SampledCurve) -> SampledCurve:
    """The spherical curve ``s -> T(s)`` with its own Frenet frames.

    The indicatrix has speed ``kappa``; its curvature and torsion (with respect to
    its own arc length) are ``sqrt(k^2 + t^2) / k`` and ``sigma sqrt(k^2 + t^2) / k``.
    The parameter ``s`` is shared with the source curve, and equals the
    indicatrix arc length exactly when ``kappa == 1``.
    """
    if curve.frames is None or curve.kappa is None or curve.tau is None:
        raise ValueError("tangent indicatrix needs frames, kappa and tau")
    T, N, B = curve.tangents, curve.normals, curve.binormals
    k = curve.kappa[:, None]
    t = curve.tau[:, None]
    w = np.sqrt(k * k + t * t)
    N2 = (-k * T + t * B) / w
    B2 = (t * T + k * B) / w
    frames = np.stack((N, N2, B2), axis=1)
    kappa2 = (w / k).ravel()
    tau2 = None if curve.sigma is None else curve.sigma * kappa2
    return SampledCurve(
        s=curve.s.copy(),
        positions=T.copy(),
        provenance="analytic",
        frames=frames,
        kappa=kappa2,
        tau=tau2,
        sigma=None,
    )
