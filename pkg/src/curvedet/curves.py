"""Curve definitions: built-in families, expression curves and intrinsic (kappa, tau) curves."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import jsonschema
import numpy as np

from . import expr, jets
from .jets import Jet, VecJet

FAMILIES = (
    "line",
    "planar-polynomial",
    "circle",
    "great-circle",
    "circular-helix",
    "salkowski-generated",
)

_FAMILY_DEFAULTS = {
    "line": {"x0": 0.0, "y0": 0.0, "z0": 0.0, "dx": 1.0, "dy": 0.0, "dz": 0.0},
    "planar-polynomial": {"c0": 0.0, "c1": 0.0, "c2": 1.0},
    "circle": {"r": 1.0, "cx": 0.0, "cy": 0.0, "cz": 0.0},
    "great-circle": {"r": 1.0, "incline": 0.0},
    "circular-helix": {"a": 1.0, "b": 1.0},
    "salkowski-generated": {"a": 1.0, "c": 0.0},
}

_DOMAIN_SCHEMA = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}
_PARAMS_SCHEMA = {"type": "object", "additionalProperties": {"type": "number"}}

SPEC_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "family": {"enum": list(FAMILIES)},
                "params": _PARAMS_SCHEMA,
                "domain": _DOMAIN_SCHEMA,
            },
            "required": ["family", "domain"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "expr": {
                    "type": "object",
                    "properties": {c: {"type": "string"} for c in "xyz"},
                    "required": ["x", "y", "z"],
                    "additionalProperties": False,
                },
                "params": _PARAMS_SCHEMA,
                "domain": _DOMAIN_SCHEMA,
                "unit_speed": {"type": "boolean"},
            },
            "required": ["expr", "domain"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "intrinsic": {
                    "type": "object",
                    "properties": {"kappa": {"type": "string"}, "tau": {"type": "string"}},
                    "required": ["kappa", "tau"],
                    "additionalProperties": False,
                },
                "params": _PARAMS_SCHEMA,
                "domain": _DOMAIN_SCHEMA,
            },
            "required": ["intrinsic", "domain"],
            "additionalProperties": False,
        },
    ]
}


class SpecError(ValueError):
    """Malformed curve specification."""


class CurveEvalError(ArithmeticError):
    """A jet domain error raised while evaluating one coordinate of a curve."""

    def __init__(self, coord: str, s: float, cause: Exception):
        super().__init__(f"coordinate {coord} at s={float(s):.17g}: {cause}")
        self.coord = coord
        self.s = s
        self.cause = cause


@dataclass(frozen=True)
class CurveSpec:
    """Immutable curve description.

    Exactly one of ``family``, ``exprs`` (x, y, z strings) or ``intrinsic``
    (kappa, tau strings) is set.  ``params`` is stored as a sorted tuple of
    ``(name, value)`` pairs so that specs are hashable.
    """

    domain: tuple
    family: Optional[str] = None
    exprs: Optional[tuple] = None
    intrinsic: Optional[tuple] = None
    params: tuple = ()
    unit_speed: bool = False
    _asts: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        kinds = [self.family is not None, self.exprs is not None, self.intrinsic is not None]
        if sum(kinds) != 1:
            raise SpecError("exactly one of family, exprs, intrinsic must be given")
        lo, hi = (float(v) for v in self.domain)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise SpecError(f"domain must satisfy s_min < s_max, got {self.domain}")
        object.__setattr__(self, "domain", (lo, hi))
        p = dict(self.params)
        for name, v in p.items():
            if not math.isfinite(v):
                raise SpecError(f"parameter {name} is not finite")
        if self.family is not None:
            if self.family not in FAMILIES:
                raise SpecError(f"unknown family {self.family!r}")
            unknown = set(p) - set(_FAMILY_DEFAULTS[self.family]) - _family_extra(self.family)
            if unknown and self.family != "planar-polynomial":
                raise SpecError(f"unknown parameters for {self.family}: {sorted(unknown)}")
            _validate_family(self.family, self.param_dict(), self.domain)
            object.__setattr__(self, "unit_speed", _family_unit_speed(self.family, self.param_dict()))
        else:
            texts = self.exprs if self.exprs is not None else self.intrinsic
            names = set(p)
            asts = []
            for text in texts:
                asts.append(expr.parse_expression(text, names))
            object.__setattr__(self, "_asts", tuple(asts))
            if self.intrinsic is not None:
                object.__setattr__(self, "unit_speed", True)

    # constructors -----------------------------------------------------

    @classmethod
    def family_curve(cls, tag: str, domain, **params) -> "CurveSpec":
        return cls(domain=tuple(domain), family=tag, params=_freeze(params))

    @classmethod
    def expression(cls, x: str, y: str, z: str, domain, params=None, unit_speed=False) -> "CurveSpec":
        return cls(
            domain=tuple(domain), exprs=(x, y, z), params=_freeze(params or {}), unit_speed=unit_speed
        )

    @classmethod
    def intrinsic_curve(cls, kappa: str, tau: str, domain, params=None) -> "CurveSpec":
        return cls(domain=tuple(domain), intrinsic=(kappa, tau), params=_freeze(params or {}))

    @classmethod
    def from_json(cls, doc: Mapping) -> "CurveSpec":
        schema = SPEC_SCHEMA
        if isinstance(doc, Mapping):
            # validate against the branch named by the discriminating key for a sharper message
            for branch, key in zip(SPEC_SCHEMA["oneOf"], ("family", "expr", "intrinsic")):
                if key in doc:
                    schema = branch
                    break
        try:
            jsonschema.validate(doc, schema)
        except jsonschema.ValidationError as exc:
            raise SpecError(f"invalid curve spec: {exc.message}") from None
        params = doc.get("params", {})
        if "family" in doc:
            return cls.family_curve(doc["family"], doc["domain"], **params)
        if "expr" in doc:
            e = doc["expr"]
            return cls.expression(
                e["x"], e["y"], e["z"], doc["domain"], params, doc.get("unit_speed", False)
            )
        i = doc["intrinsic"]
        return cls.intrinsic_curve(i["kappa"], i["tau"], doc["domain"], params)

    @classmethod
    def load(cls, path) -> "CurveSpec":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SpecError(f"{path}: {exc}") from None
        return cls.from_json(doc)

    def to_json(self) -> dict:
        doc: dict = {}
        if self.family is not None:
            doc["family"] = self.family
        elif self.exprs is not None:
            doc["expr"] = dict(zip("xyz", self.exprs))
        else:
            doc["intrinsic"] = {"kappa": self.intrinsic[0], "tau": self.intrinsic[1]}
        doc["params"] = self.param_dict()
        doc["domain"] = list(self.domain)
        if self.exprs is not None:
            doc["unit_speed"] = self.unit_speed
        return doc

    def param_dict(self) -> dict:
        if self.family == "planar-polynomial" and self.params:
            return dict(self.params)
        if self.family is not None:
            out = dict(_FAMILY_DEFAULTS[self.family])
            out.update(self.params)
            return out
        return dict(self.params)

    @property
    def kind(self) -> str:
        if self.family is not None:
            return "family"
        return "expr" if self.exprs is not None else "intrinsic"

    @property
    def generated(self) -> bool:
        return self.intrinsic is not None or self.family == "salkowski-generated"


def _freeze(params: Mapping) -> tuple:
    return tuple(sorted((str(k), float(v)) for k, v in params.items()))


def _family_extra(tag: str) -> set:
    if tag == "salkowski-generated":
        return {"b", "phi", "step", "delta"}
    return set()


def _family_unit_speed(tag: str, p: dict) -> bool:
    if tag == "line":
        return abs(math.hypot(p["dx"], p["dy"], p["dz"]) - 1.0) <= 1e-12
    return tag != "planar-polynomial"


def _validate_family(tag: str, p: dict, domain) -> None:
    if tag == "line" and math.hypot(p["dx"], p["dy"], p["dz"]) == 0:
        raise SpecError("line direction must be non-zero")
    if tag == "planar-polynomial":
        for name in p:
            if not (name.startswith("c") and name[1:].isdigit()):
                raise SpecError(f"planar-polynomial parameters are c0, c1, ...; got {name!r}")
    if tag in ("circle", "great-circle") and p["r"] <= 0:
        raise SpecError("radius must be positive")
    if tag == "circular-helix" and (p["a"] <= 0 or p["b"] == 0):
        raise SpecError("circular-helix needs radius a > 0 and pitch b != 0")
    if tag == "salkowski-generated":
        from .generate import SalkowskiParams

        SalkowskiParams.from_mapping(p).check_domain(domain)


# evaluation ---------------------------------------------------------


def _trig_jet(amp: float, freq: float, phase: float, s: float, order: int) -> Jet:
    """Jet of ``amp * cos(freq * s + phase)`` from the closed-form derivatives."""
    return Jet.from_derivatives(
        [amp * freq**k * math.cos(freq * s + phase + k * math.pi / 2) for k in range(order + 1)]
    )


def _poly_jet(coeffs: list, s: float, order: int) -> Jet:
    """Taylor coefficients at ``s`` of ``sum(coeffs[j] * x**j)``."""
    n = len(coeffs)
    return Jet(
        sum(math.comb(j, k) * coeffs[j] * s ** (j - k) for j in range(k, n)) if k < n else 0.0
        for k in range(order + 1)
    )


def _family_jets(tag: str, p: dict, s: float, order: int) -> VecJet:
    half = math.pi / 2
    if tag == "line":
        return VecJet(
            _poly_jet([p["x0"], p["dx"]], s, order),
            _poly_jet([p["y0"], p["dy"]], s, order),
            _poly_jet([p["z0"], p["dz"]], s, order),
        )
    if tag == "planar-polynomial":
        n = max(int(k[1:]) for k in p)
        coeffs = [p.get(f"c{k}", 0.0) for k in range(n + 1)]
        return VecJet(
            _poly_jet([0.0, 1.0], s, order),
            _poly_jet(coeffs, s, order),
            Jet.constant(0.0, order),
        )
    if tag == "circle":
        r = p["r"]
        return VecJet(
            _trig_jet(r, 1 / r, 0.0, s, order) + p["cx"],
            _trig_jet(r, 1 / r, -half, s, order) + p["cy"],
            Jet.constant(p["cz"], order),
        )
    if tag == "great-circle":
        r, inc = p["r"], p["incline"]
        sin_part = _trig_jet(r, 1 / r, -half, s, order)
        return VecJet(
            _trig_jet(r, 1 / r, 0.0, s, order),
            sin_part * math.cos(inc),
            sin_part * math.sin(inc),
        )
    if tag == "circular-helix":
        a, b = p["a"], p["b"]
        c = math.hypot(a, b)
        return VecJet(
            _trig_jet(a, 1 / c, 0.0, s, order),
            _trig_jet(a, 1 / c, -half, s, order),
            _poly_jet([0.0, b / c], s, order),
        )
    raise SpecError(f"family {tag!r} has no closed form")


def eval_curve_jets(spec: CurveSpec, s: float, order: int = jets.MAX_ORDER) -> VecJet:
    """Jets ``alpha^(0..order)`` of the curve at parameter ``s``."""
    lo, hi = spec.domain
    slack = 1e-12 * max(1.0, hi - lo)
    if not lo - slack <= s <= hi + slack:
        raise ValueError(f"s={float(s):.17g} outside domain [{lo}, {hi}]")
    if spec.generated:
        from .generate import intrinsic_from_spec

        return intrinsic_from_spec(spec).jets(s).truncate(order)
    if spec.family is not None:
        return _family_jets(spec.family, spec.param_dict(), s, order)
    params = spec.param_dict()
    var = Jet.variable(s, order)
    comps = []
    for name, ast in zip("xyz", spec._asts):
        try:
            v = expr.evaluate(ast, var, params)
        except (jets.JetDomainError, ZeroDivisionError, OverflowError) as exc:
            raise CurveEvalError(name, s, exc) from exc
        comps.append(v if isinstance(v, Jet) else Jet.constant(float(v), order))
    return VecJet(*comps)


def speed(spec: CurveSpec, t: float) -> float:
    return math.hypot(*eval_curve_jets(spec, t, order=1).derivative(1))


def speeds(spec: CurveSpec, t) -> np.ndarray:
    """``|alpha'(t)|`` over an array; vectorized for expression curves."""
    t = np.asarray(t, dtype=float)
    if spec.exprs is None:
        return np.array([speed(spec, float(v)) for v in t.ravel()]).reshape(t.shape)
    params = spec.param_dict()
    d = []
    for name, ast in zip("xyz", spec._asts):
        try:
            d.append(expr.evaluate_dual(ast, t, params)[1])
        except jets.JetDomainError:
            # the scalar path pinpoints the offending parameter value
            for v in t.ravel():
                speed(spec, float(v))
            raise
    out = np.sqrt(d[0] ** 2 + d[1] ** 2 + d[2] ** 2)
    if not np.all(np.isfinite(out)):
        i = int(np.argmax(~np.isfinite(out.ravel())))
        raise CurveEvalError("xyz", t.ravel()[i], ValueError("non-finite speed"))
    return out


@dataclass(frozen=True)
class SampledCurve:
    """A curve sampled on a strictly increasing grid.

    ``frames`` has shape (n, 3, 3) with rows T, N, B.  ``t`` holds the original
    parameter values when the curve was reparametrized, and ``jets`` the
    arc-length jets at each sample, when they are known.
    """

    s: np.ndarray
    positions: np.ndarray
    provenance: str
    frames: Optional[np.ndarray] = None
    kappa: Optional[np.ndarray] = None
    tau: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    t: Optional[np.ndarray] = None
    jets: Optional[tuple] = None

    def __post_init__(self):
        if len(self.s) < 2 or np.any(np.diff(self.s) <= 0):
            raise ValueError("sample grid must be strictly increasing")

    def __len__(self):
        return len(self.s)

    @property
    def tangents(self) -> np.ndarray:
        return self.frames[:, 0, :]

    @property
    def normals(self) -> np.ndarray:
        return self.frames[:, 1, :]

    @property
    def binormals(self) -> np.ndarray:
        return self.frames[:, 2, :]

