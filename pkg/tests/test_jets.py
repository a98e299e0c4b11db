
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedet import jets
from curvedet.jets import Jet, JetDomainError, VecJet, jet_derivative, jet_elementary

import oracles


def approx_coeffs(j, expected, tol=1e-12):
    assert len(j.coeffs) == len(expected)
    for a, b in zip(j.coeffs, expected):
        assert a == pytest.approx(b, abs=tol, rel=tol)


def test_constant_and_variable():
    approx_coeffs(Jet.constant(2.5), (2.5, 0, 0, 0, 0, 0))
    approx_coeffs(Jet.variable(0.3), (0.3, 1, 0, 0, 0, 0))


def test_square_of_variable():
    s = Jet.variable(0.0)
    approx_coeffs(jet_elementary("mul", s, s), (0, 0, 1, 0, 0, 0))


def test_sin_maclaurin():
    approx_coeffs(jet_elementary("sin", Jet.variable(0.0)), (0, 1, 0, -1 / 6, 0, 1 / 120))


def test_reciprocal_against_finite_differences():
    s = Jet.variable(0.5)
    j = jet_elementary("div", Jet.constant(1.0), 1.0 - s * s)
    assert j.value == pytest.approx(1 / 0.75, rel=1e-14)
    assert j.coeffs[1] == pytest.approx(1.777778, abs=1e-6)
    f = lambda x: 1 / (1 - x * x)  # noqa: E731
    for k in range(1, 6):
        fd = oracles.fd_derivative(f, 0.5, k)
        assert oracles.rel_err(j.derivative(k), fd) <= 1e-12


def test_jet_derivative_examples():
    s = Jet.variable(2.0)
    assert jet_derivative(s * s * s, 1) == pytest.approx(12.0)
    j = jets.exp(s)
    assert jet_derivative(j, 0) == j.coeffs[0]
    assert jet_derivative(jets.sin(Jet.variable(0.0)), 5) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "op, arg",
    [("sqrt", -1.0), ("log", 0.0), ("log", -2.0)],
)
def test_domain_errors_name_the_op(op, arg):
    with pytest.raises(JetDomainError) as info:
        jet_elementary(op, Jet.variable(arg))
    assert info.value.op == op


def test_division_by_zero_value():
    with pytest.raises(JetDomainError) as info:
        jet_elementary("div", Jet.constant(1.0), Jet.variable(0.0))
    assert info.value.op == "div"


def test_non_integer_power_needs_positive_base():
    with pytest.raises(JetDomainError):
        jet_elementary("pow", Jet.variable(-0.5), 0.5)
    j = jet_elementary("pow", Jet.variable(-0.5), 3)
    approx_coeffs(j, (-0.125, 0.75, -1.5, 1.0, 0.0, 0.0))


def test_unknown_op_tag():
    with pytest.raises(ValueError):
        jet_elementary("cosh", Jet.variable(0.0))


def test_jets_are_immutable():
    j = Jet.variable(1.0)
    with pytest.raises(AttributeError):
        j.foo = 1


def test_diff_integrate_truncate():
    j = jets.exp(Jet.variable(0.0))
    d = j.diff()
    assert d.order == 4
    approx_coeffs(d, j.coeffs[:5])
    approx_coeffs(d.integrate(1.0), j.coeffs)
    assert j.truncate(2).coeffs == j.coeffs[:3]


def test_compose_matches_direct_evaluation():
    inner = jets.sin(Jet.variable(0.7))
    outer = jets.exp(Jet.variable(inner.value))
    approx_coeffs(jets.compose(outer, inner), jets.exp(inner).coeffs, tol=1e-13)


def test_vecjet_cross_and_triple():
    s = Jet.variable(0.4)
    u = VecJet(jets.cos(s), jets.sin(s), s)
    v = u.diff()
    w = v.diff()
    u4, v4, w4 = u.truncate(3), v.truncate(3), w.truncate(3)
    lhs = jets.triple(u4, v4, w4)
    rhs = u4.dot(v4.cross(w4))
    approx_coeffs(lhs, rhs.coeffs)


finite = st.floats(-3, 3, allow_nan=False)


def jet_strategy(min_value=-3.0):
    return st.lists(st.floats(min_value, 3, allow_nan=False), min_size=6, max_size=6).map(Jet)


@settings(max_examples=200, deadline=None)
@given(jet_strategy(), jet_strategy(), jet_strategy())
def test_mul_commutative_associative(a, b, c):
    scale = 1 + max(abs(x) for x in a.coeffs + b.coeffs + c.coeffs) ** 3
    for x, y in zip((a * b).coeffs, (b * a).coeffs):
        assert abs(x - y) <= 1e-15 * scale
    for x, y in zip(((a * b) * c).coeffs, (a * (b * c)).coeffs):
        assert abs(x - y) <= 1e-13 * scale


@settings(max_examples=200, deadline=None)
@given(jet_strategy(), jet_strategy(), st.floats(0.5, 3), st.booleans())
def test_div_undoes_mul(a, b, b0, negative):
    b = Jet((-b0 if negative else b0,) + b.coeffs[1:])
    back = (a * b) / b
    scale = 1 + max(abs(x) for x in a.coeffs)
    for x, y in zip(back.coeffs, a.coeffs):
        assert abs(x - y) <= 1e-12 * scale * (1 + max(abs(v) for v in b.coeffs) / b0) ** 5


@settings(max_examples=200, deadline=None)
@given(jet_strategy())
def test_sin_squared_plus_cos_squared(u):
    one = jets.sin(u) * jets.sin(u) + jets.cos(u) * jets.cos(u)
    scale = (1 + max(abs(x) for x in u.coeffs[1:])) ** 5
    assert abs(one.coeffs[0] - 1) <= 1e-12
    for c in one.coeffs[1:]:
        assert abs(c) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.4, 1.4), st.integers(0, 2**32 - 1))
def test_random_composition_matches_mpmath(t0, seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    tree = oracles.random_tree(rng)
    if "var" not in repr(tree) or not oracles.is_safe(tree, t0):
        return
    assert max(oracles.derivative_errors(tree, t0)) <= 1e-5
