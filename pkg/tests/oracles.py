"""Independent reference computations for the test suite.

Nothing here touches the jet engine: derivatives come from mpmath finite
differences at 50 significant digits, curve geometry from the classical
general-parameter formulas.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

from curvedet import expr, jets

mp.mp.dps = 50

MP_FUNCS = {
    "sin": mp.sin,
    "cos": mp.cos,
    "tan": mp.tan,
    "sqrt": mp.sqrt,
    "exp": mp.exp,
    "log": mp.log,
    "atan": mp.atan,
}

UNARY = ("sin", "cos", "tan", "sqrt", "exp", "log", "atan", "negate")
BINARY = ("add", "sub", "mul", "div", "pow")


# random elementary compositions -------------------------------------------------


def random_tree(rng: np.random.Generator, depth: int = 3):
    """Nested tuples: ("var",), ("const", c), (unary, child), (binary, left, right)."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.6:
            return ("var",)
        return ("const", float(rng.uniform(-2.0, 2.0)))
    if rng.random() < 0.5:
        return (UNARY[rng.integers(len(UNARY))], random_tree(rng, depth - 1))
    op = BINARY[rng.integers(len(BINARY))]
    if op == "pow":
        exponent = float(rng.choice([2.0, 3.0, -1.0, 0.5, 1.5, -0.7]))
        return ("pow", random_tree(rng, depth - 1), ("const", exponent))
    return (op, random_tree(rng, depth - 1), random_tree(rng, depth - 1))


def eval_tree_jet(tree, t0: float):
    tag = tree[0]
    if tag == "var":
        return jets.Jet.variable(t0)
    if tag == "const":
        return jets.Jet.constant(tree[1])
    if tag == "pow":
        return jets.jet_elementary("pow", eval_tree_jet(tree[1], t0), tree[2][1])
    return jets.jet_elementary(tag, *(eval_tree_jet(c, t0) for c in tree[1:]))


class Unsafe(Exception):
    pass


def eval_tree_mp(tree, t):
    """mpmath value; raises :class:`Unsafe` near poles, branch points or overflow."""
    tag = tree[0]
    if tag == "var":
        return t
    if tag == "const":
        return mp.mpf(tree[1])
    args = [eval_tree_mp(c, t) for c in tree[1:]]
    a = args[0]
    if tag == "negate":
        r = -a
    elif tag == "add":
        r = a + args[1]
    elif tag == "sub":
        r = a - args[1]
    elif tag == "mul":
        r = a * args[1]
    elif tag == "div":
        if abs(args[1]) < 0.2:
            raise Unsafe
        r = a / args[1]
    elif tag == "pow":
        p = args[1]
        if p != int(p) and a < 0.2:
            raise Unsafe
        if p < 0 and abs(a) < 0.2:
            raise Unsafe
        r = a ** int(p) if p == int(p) else a**p
    elif tag in ("sqrt", "log"):
        if a < 0.2:
            raise Unsafe
        r = MP_FUNCS[tag](a)
    elif tag == "tan":
        if abs(mp.cos(a)) < 0.2:
            raise Unsafe
        r = mp.tan(a)
    elif tag == "exp":
        if a > 5:
            raise Unsafe
        r = mp.exp(a)
    else:
        r = MP_FUNCS[tag](a)
    if abs(r) > 1e4:
        raise Unsafe
    return r


def is_safe(tree, t0: float, radius: float = 0.05) -> bool:
    """Safe on a neighbourhood wide enough for the finite-difference stencil."""
    try:
        for dt in (-radius, 0.0, radius):
            eval_tree_mp(tree, mp.mpf(t0) + dt)
    except Unsafe:
        return False
    return True


def derivative_errors(tree, t0: float) -> list:
    """Relative error of jet derivatives 1..5 against the finite-difference oracle.

    Exact zeros (``atan(tan(s))``, high derivatives of a cubic) have no relative
    scale; there the denominator is floored at 1e-8 times the largest derivative
    of any subexpression or outer function, i.e. the size of the terms that had to cancel.
    """
    j = eval_tree_jet(tree, t0)
    f = lambda x: eval_tree_mp(tree, x)  # noqa: E731
    ref = [fd_derivative(f, t0, k) for k in range(1, 6)]
    floor = mp.mpf("1e-8") * max(1.0, subexpression_scale(tree, t0))
    return [
        float(abs(mp.mpf(j.derivative(k)) - r) / max(abs(r), floor))
        for k, r in zip(range(1, 6), ref)
    ]


def subexpression_scale(tree, t0: float) -> float:
    """Largest |derivative| of orders 1..5 among all subexpressions of ``tree``
    and the outer functions applied at each node (``1/v`` for a quotient,
    ``f(v)`` for a unary call, ``v**p`` for a power)."""
    node = eval_tree_jet(tree, t0)
    scale = max(abs(d) for d in node.derivatives()[1:])
    tag = tree[0]
    if tag not in ("var", "const", "add", "sub", "mul", "negate"):
        arg = tree[2] if tag == "div" else tree[1]
        v = jets.Jet.variable(eval_tree_jet(arg, t0).value)
        if tag == "div":
            outer = 1.0 / v
        elif tag == "pow":
            outer = jets.pow_(v, tree[2][1])
        else:
            outer = jets.jet_elementary(tag, v)
        scale = max([scale] + [abs(d) for d in outer.derivatives()[1:]])
    for child in tree[1:]:
        if isinstance(child, tuple):
            scale = max(scale, subexpression_scale(child, t0))
    return scale


def fd_derivative(f, t0: float, k: int):
    """Central finite difference of order ``k`` with step ``h = eps^(1/(k+2))``."""
    h = mp.eps ** (mp.mpf(1) / (k + 2))
    return mp.diff(f, mp.mpf(t0), k, h=h)


def random_compositions(count: int, seed: int):
    """``count`` (tree, t0) pairs with every node safe around ``t0``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        tree = random_tree(rng)
        t0 = float(rng.uniform(-1.5, 1.5))
        if "var" in repr(tree) and is_safe(tree, t0):
            out.append((tree, t0))
    return out


# expression curves in mpmath ------------------------------------------------------


def mp_expr(node, params=None):
    """Compile an expression AST to an mpmath function of ``s``."""
    params = params or {}

    def ev(n, s):
        if isinstance(n, expr.Num):
            return mp.mpf(n.value)
        if isinstance(n, expr.Var):
            return s
        if isinstance(n, expr.Name):
            if n.name in params:
                return mp.mpf(params[n.name])
            return {"pi": mp.pi, "e": mp.e}[n.name]
        if isinstance(n, expr.Neg):
            return -ev(n.operand, s)
        if isinstance(n, expr.Call):
            return MP_FUNCS[n.func](ev(n.args[0], s))
        a, b = ev(n.left, s), ev(n.right, s)
        if n.op == "+":
            return a + b
        if n.op == "-":
            return a - b
        if n.op == "*":
            return a * b
        if n.op == "/":
            return a / b
        return a ** int(b) if b == int(b) else a**b

    return lambda s: ev(node, s)


def mp_curve_derivatives(spec, t: float, order: int = 4) -> list:
    """Derivatives r^(0..order)(t) of an expression curve as mpmath 3-vectors."""
    funcs = [mp_expr(ast, spec.param_dict()) for ast in spec._asts]
    cols = [mp.taylor(f, mp.mpf(t), order) for f in funcs]
    return [mp.matrix([cols[c][k] * mp.factorial(k) for c in range(3)]) for k in range(order + 1)]


def _cross(u, v):
    return mp.matrix([u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def classical_invariants(spec, t: float) -> dict:
    """kappa, tau, kappa^2 tau and kappa^5 (tau/kappa)' (arc-length derivative) at ``t``.

    Uses only the general-parameter formulas
    kappa = |r' x r''| / |r'|^3 and tau = det(r', r'', r''') / |r' x r''|^2.
    """
    r1, r2, r3, r4 = mp_curve_derivatives(spec, t, 4)[1:]
    c = _cross(r1, r2)
    cc = _dot(c, c)
    sp = mp.sqrt(_dot(r1, r1))
    g = _dot(c, r3)  # det(r', r'', r''')
    kappa = mp.sqrt(cc) / sp**3
    tau = g / cc
    # t-derivatives of the pieces
    dc = _cross(r1, r3)
    dcc = 2 * _dot(c, dc)
    dsp = _dot(r1, r2) / sp
    dg = _dot(c, r4)
    dkappa = (dcc / (2 * mp.sqrt(cc))) / sp**3 - 3 * mp.sqrt(cc) * dsp / sp**4
    dtau = dg / cc - g * dcc / cc**2
    ratio_t = (dtau * kappa - tau * dkappa) / kappa**2
    return {
        "kappa": kappa,
        "tau": tau,
        "d1": kappa**2 * tau,
        "d2": kappa**5 * ratio_t / sp,
    }


def rel_err(value, reference, floor: float = 0.0) -> float:
    return float(abs(mp.mpf(value) - reference) / max(abs(reference), floor))


def planar_curvature(t: float) -> float:
    """Curvature of the parabola (t, t^2, 0)."""
    return 2.0 / (1.0 + 4.0 * t * t) ** 1.5


__all__ = [name for name in dir() if not name.startswith("_")] + ["math"]
