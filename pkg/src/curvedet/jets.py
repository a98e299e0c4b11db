"""Truncated Taylor jets.

A :class:`Jet` stores normalized Taylor coefficients ``c[k] = f^(k)(t0) / k!``
of a scalar function around some point ``t0``.  Arithmetic and the
elementary functions propagate the coefficients exactly (up to floating
rounding) with the usual convolution recurrences.

The elementary functions exported here (``sqrt``, ``sin``, ...) accept plain
floats as well, so the same code can evaluate a formula pointwise or as a jet.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, Union

MAX_ORDER = 5

Number = Union[int, float]


class JetDomainError(ArithmeticError):
    """Raised when an operation leaves its domain (e.g. ``sqrt`` of a negative)."""

    def __init__(self, op: str, message: str):
        super().__init__(f"{op}: {message}")
        self.op = op


def _check(op: str, coeffs: Sequence[float]) -> tuple:
    out = tuple(map(float, coeffs))
    # a finite sum proves every term finite; only a suspicious sum needs the full scan
    if not math.isfinite(sum(out)) and not all(math.isfinite(c) for c in out):
        raise JetDomainError(op, "non-finite coefficient")
    return out


class Jet:
    """Immutable truncated Taylor jet of order ``len(coeffs) - 1`` (at most 5)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float]):
        c = _check("jet", coeffs)
        if not 1 <= len(c) <= MAX_ORDER + 1:
            raise ValueError(f"jet order must be 0..{MAX_ORDER}, got {len(c) - 1}")
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @classmethod
    def constant(cls, value: float, order: int = MAX_ORDER) -> "Jet":
        return cls((value,) + (0.0,) * order)

    @classmethod
    def variable(cls, t0: float, order: int = MAX_ORDER) -> "Jet":
        if order == 0:
            return cls((t0,))
        return cls((t0, 1.0) + (0.0,) * (order - 1))

    @classmethod
    def from_derivatives(cls, derivs: Sequence[float]) -> "Jet":
        return cls(d / math.factorial(k) for k, d in enumerate(derivs))

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def value(self) -> float:
        return self._c[0]

    def derivative(self, k: int) -> float:
        """k-th derivative ``k! * c_k``."""
        if not 0 <= k <= self.order:
            raise ValueError(f"derivative order {k} exceeds jet order {self.order}")
        return math.factorial(k) * self._c[k]

    def derivatives(self) -> tuple:
        return tuple(self.derivative(k) for k in range(self.order + 1))

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self._c[: order + 1])

    def diff(self) -> "Jet":
        """Jet of the derivative function; the order drops by one."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet((k + 1) * self._c[k + 1] for k in range(self.order))

    def integrate(self, c0: float = 0.0) -> "Jet":
        """Jet of the antiderivative with value ``c0``; the order grows by one."""
        return Jet((c0,) + tuple(self._c[k] / (k + 1) for k in range(min(self.order + 1, MAX_ORDER))))

    def __repr__(self):
        return f"Jet({', '.join(f'{c:.6g}' for c in self._c)})"

    def __eq__(self, other):
        return isinstance(other, Jet) and self._c == other._c

    def __hash__(self):
        return hash(self._c)

    # arithmetic -------------------------------------------------------

    def __neg__(self):
        return Jet(-c for c in self._c)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            n = min(self.order, other.order) + 1
            return Jet(a + b for a, b in zip(self._c[:n], other._c[:n]))
        if isinstance(other, (int, float)):
            return Jet((self._c[0] + other,) + self._c[1:])
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (Jet, int, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = min(self.order, other.order) + 1
            a, b = self._c, other._c
            return Jet(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n))
        if isinstance(other, (int, float)):
            return Jet(c * other for c in self._c)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            if other == 0:
                raise JetDomainError("div", "division by zero")
            return Jet(c / other for c in self._c)
        if not isinstance(other, Jet):
            return NotImplemented
        return _div(self, other)

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return _div(Jet.constant(float(other), self.order), self)
        return NotImplemented

    def __pow__(self, p):
        return pow_(self, p)

    def __rpow__(self, base):
        if isinstance(base, (int, float)):
            if base <= 0:
                raise JetDomainError("pow", f"base {base} must be positive for a jet exponent")
            return exp(self * math.log(base))
        return NotImplemented


def _make(coeffs: tuple) -> Jet:
    # coefficients already validated by _check
    j = object.__new__(Jet)
    object.__setattr__(j, "_c", coeffs)
    return j


def _div(a: Jet, b: Jet) -> Jet:
    n = min(a.order, b.order) + 1
    if b._c[0] == 0.0:
        raise JetDomainError("div", "denominator value is zero")
    x, y = a._c, b._c
    c: list = []
    for k in range(n):
        c.append((x[k] - sum(y[i] * c[k - i] for i in range(1, k + 1))) / y[0])
    return _make(_check("div", c))


# elementary functions ----------------------------------------------


def sqrt(u):
    if not isinstance(u, Jet):
        if u < 0:
            raise JetDomainError("sqrt", f"negative argument {u}")
        return math.sqrt(u)
    a = u.coeffs
    if a[0] <= 0:
        raise JetDomainError("sqrt", f"argument value {a[0]} is not positive")
    r = [math.sqrt(a[0])]
    for k in range(1, u.order + 1):
        r.append((a[k] - sum(r[i] * r[k - i] for i in range(1, k))) / (2 * r[0]))
    return _make(_check("sqrt", r))


def exp(u):
    if not isinstance(u, Jet):
        try:
            return math.exp(u)
        except OverflowError:
            raise JetDomainError("exp", f"overflow at {u}") from None
    a = u.coeffs
    try:
        e = [math.exp(a[0])]
    except OverflowError:
        raise JetDomainError("exp", f"overflow at {a[0]}") from None
    for k in range(1, u.order + 1):
        e.append(sum(i * a[i] * e[k - i] for i in range(1, k + 1)) / k)
    return _make(_check("exp", e))


def log(u):
    if not isinstance(u, Jet):
        if u <= 0:
            raise JetDomainError("log", f"non-positive argument {u}")
        return math.log(u)
    a = u.coeffs
    if a[0] <= 0:
        raise JetDomainError("log", f"argument value {a[0]} is not positive")
    g = [math.log(a[0])]
    for k in range(1, u.order + 1):
        g.append((a[k] - sum(i * g[i] * a[k - i] for i in range(1, k)) / k) / a[0])
    return _make(_check("log", g))


def _sincos(u: Jet) -> tuple:
    a = u.coeffs
    s = [math.sin(a[0])]
    c = [math.cos(a[0])]
    for k in range(1, u.order + 1):
        s.append(sum(i * a[i] * c[k - i] for i in range(1, k + 1)) / k)
        c.append(-sum(i * a[i] * s[k - i] for i in range(1, k + 1)) / k)
    return Jet(s), Jet(c)


def sin(u):
    if not isinstance(u, Jet):
        return math.sin(u)
    return _sincos(u)[0]


def cos(u):
    if not isinstance(u, Jet):
        return math.cos(u)
    return _sincos(u)[1]


def tan(u):
    if not isinstance(u, Jet):
        if math.cos(u) == 0.0:
            raise JetDomainError("tan", f"pole at {u}")
        return math.tan(u)
    s, c = _sincos(u)
    if c.value == 0.0:
        raise JetDomainError("tan", f"pole at {u.value}")
    return s / c


def atan(u):
    if not isinstance(u, Jet):
        return math.atan(u)
    if u.order == 0:
        return Jet((math.atan(u.value),))
    return (u.diff() / (1.0 + u * u).truncate(u.order - 1)).integrate(math.atan(u.value))


def _int_pow(u, n: int):
    if n < 0:
        return 1.0 / _int_pow(u, -n)
    result = Jet.constant(1.0, u.order) if isinstance(u, Jet) else 1.0
    base = u
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def pow_(u, p):
    """``u ** p``; integer exponents use repeated multiplication, others need ``u > 0``."""
    if isinstance(p, Jet):
        if isinstance(u, Jet):
            value = u.value
        else:
            value = u
        if value <= 0:
            raise JetDomainError("pow", f"base value {value} must be positive for a jet exponent")
        return exp(p * log(u))
    if float(p).is_integer() and abs(p) <= 64:
        if p < 0 and (u.value if isinstance(u, Jet) else u) == 0:
            raise JetDomainError("pow", "zero base with negative exponent")
        return _int_pow(u, int(p))
    if not isinstance(u, Jet):
        if u <= 0:
            raise JetDomainError("pow", f"base {u} must be positive for exponent {p}")
        return u ** p
    a = u.coeffs
    if a[0] <= 0:
        raise JetDomainError("pow", f"base value {a[0]} must be positive for exponent {p}")
    y = [a[0] ** p]
    for k in range(1, u.order + 1):
        y.append(sum(((p + 1) * i - k) * a[i] * y[k - i] for i in range(1, k + 1)) / (k * a[0]))
    return _make(_check("pow", y))


def compose(outer: Jet, inner: Jet) -> Jet:
    """Jet of ``f(g(s))`` from the jet of ``f`` at ``g(s0)`` and the jet of ``g`` at ``s0``."""
    delta = inner - inner.value
    n = min(outer.order, inner.order)
    result = Jet.constant(outer.coeffs[n], n)
    for k in range(n - 1, -1, -1):
        result = result * delta.truncate(n) + outer.coeffs[k]
    return result


def value(x) -> float:
    return x.value if isinstance(x, Jet) else float(x)


# vector jets ---------------------------------------------------------


class VecJet:
    """Jet of a 3-vector valued function ``(x(t), y(t), z(t))``."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x: Jet, y: Jet, z: Jet):
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def __setattr__(self, name, value):
        raise AttributeError("VecJet is immutable")

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __repr__(self):
        return f"VecJet({self.x!r}, {self.y!r}, {self.z!r})"

    def __eq__(self, other):
        return isinstance(other, VecJet) and tuple(self) == tuple(other)

    @property
    def order(self) -> int:
        return min(c.order for c in self)

    def derivative(self, k: int) -> tuple:
        """The vector ``alpha^(k)`` as a tuple of floats."""
        return (self.x.derivative(k), self.y.derivative(k), self.z.derivative(k))

    def derivatives(self) -> list:
        return [self.derivative(k) for k in range(self.order + 1)]

    def diff(self) -> "VecJet":
        return VecJet(self.x.diff(), self.y.diff(), self.z.diff())

    def truncate(self, order: int) -> "VecJet":
        return VecJet(self.x.truncate(order), self.y.truncate(order), self.z.truncate(order))

    def compose(self, inner: Jet) -> "VecJet":
        return VecJet(compose(self.x, inner), compose(self.y, inner), compose(self.z, inner))

    def dot(self, other: "VecJet") -> Jet:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "VecJet") -> "VecJet":
        return VecJet(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def scale(self, f) -> "VecJet":
        return VecJet(self.x * f, self.y * f, self.z * f)

    def __add__(self, other: "VecJet") -> "VecJet":
        return VecJet(self.x + other.x, self.y + other.y, self.z + other.z)


def triple(u: VecJet, v: VecJet, w: VecJet) -> Jet:
    """Scalar triple product ``u . (v x w)`` in jet arithmetic."""
    return u.dot(v.cross(w))


ELEMENTARY = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sqrt": sqrt,
    "exp": exp,
    "log": log,
    "atan": atan,
}


def jet_elementary(op: str, *operands):
    """Apply an elementary operation by tag; the uniform entry point used by the CLI/tests."""
    binary = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
        "pow": pow_,
    }
    if op in binary:
        if len(operands) != 2:
            raise TypeError(f"{op} takes 2 operands")
        return binary[op](*operands)
    if op == "negate":
        (a,) = operands
        return -a
    if op in ELEMENTARY:
        (a,) = operands
        return ELEMENTARY[op](a)
    raise ValueError(f"unknown op-tag {op!r}")


def jet_derivative(j: Jet, k: int) -> float:
    return j.derivative(k)
