import glob
import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylbridge.chart import metric_jets, parse_metric
from weylbridge.errors import ChartSyntaxError, EvaluationDomainError
from weylbridge.expr import Bin, Call, Neg, Num, Var, evaluate, parse_expr, to_text
from weylbridge.jets import JetOps, seed
from weylbridge.registry import builtin, sample_points

from conftest import DATA

COORDS = ("r", "x", "y", "z")
BUILTINS = ("flat", "paper-example", "product(1,1)", "product(2,-1)", "space-form(1)",
            "space-form(-2)", "lorentz-flat")


def value(text, point):
    env = dict(zip(COORDS, seed(point)))
    return evaluate(parse_expr(text, COORDS), env, JetOps).value


def test_precedence_and_power():
    assert value("1 + 2*3^2", [0, 0, 0, 0]) == 19
    assert value("-2^2", [0, 0, 0, 0]) == -4
    assert value("2^3^2", [0, 0, 0, 0]) == 512
    assert value("(2*x)^(-3)", [0, 1, 0, 0]) == 0.125
    assert math.isclose(value("sqrt(r)*exp(0)", [4, 0, 0, 0]), 2.0)


@pytest.mark.parametrize("text", ["foo(x)", "x +", "(x", "x y", "w", "2 $ 3", "sin x", ""])
def test_bad_expressions(text):
    with pytest.raises(ChartSyntaxError):
        parse_expr(text, COORDS)


@pytest.mark.parametrize("text,point", [("log(x)", [0, -1, 0, 0]), ("1/x", [0, 0, 0, 0]),
                                        ("x^0.5", [0, -1, 0, 0]), ("sqrt(x)", [0, -4, 0, 0])])
def test_domain_errors(text, point):
    with pytest.raises(EvaluationDomainError):
        value(text, point)


def exprs(depth=3):
    leaf = st.one_of(st.builds(Num, st.floats(0, 1e3, allow_nan=False)), st.sampled_from(COORDS).map(Var))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Neg, sub),
            st.builds(Bin, st.sampled_from("+-*/^"), sub, sub),
            st.builds(Call, st.sampled_from(["sin", "exp", "log", "sqrt"]), sub),
        ),
        max_leaves=12,
    )


@given(exprs())
def test_print_parse_round_trip(e):
    assert parse_expr(to_text(e), COORDS) == e


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(DATA, "valid", "*.toml"))))
def test_valid_corpus(path):
    chart = parse_metric(open(path).read())
    assert parse_metric(chart.to_text()).components == chart.components


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(DATA, "malformed", "*.toml"))))
def test_malformed_corpus(path):
    with pytest.raises(ChartSyntaxError):
        parse_metric(open(path).read())


def test_unknown_function_message():
    with pytest.raises(ChartSyntaxError, match="unknown function 'foo'"):
        parse_metric(open(os.path.join(DATA, "malformed", "unknown_function.toml")).read())


def test_paper_example_jets():
    g, dg, ddg = metric_jets(builtin("paper-example"), [0, 1, 0, 0])
    assert g[0, 0] == 8.0
    assert dg[1, 0, 0] == 24.0
    # d/dx (2x)^-3 = -6 (2x)^-4
    assert dg[1, 2, 2] == -0.375
    assert ddg[1, 1, 0, 0] == 48.0


def test_flat_jets_vanish():
    _, dg, ddg = metric_jets(builtin("flat"), [0.3, -1, 2, 5])
    assert not dg.any() and not ddg.any()


def test_paper_example_domain():
    with pytest.raises(EvaluationDomainError):
        metric_jets(builtin("paper-example"), [0, -1, 0, 0])


def finite_differences(chart, p, h=1e-4):
    def g(q):
        return metric_jets(chart, q, check=False)[0]

    dg = np.empty((4, 4, 4))
    ddg = np.empty((4, 4, 4, 4))
    I = np.eye(4) * h
    for k in range(4):
        dg[k] = (g(p + I[k]) - g(p - I[k])) / (2 * h)
        for l in range(4):
            ddg[k, l] = (g(p + I[k] + I[l]) - g(p + I[k] - I[l]) - g(p - I[k] + I[l])
                         + g(p - I[k] - I[l])) / (4 * h * h)
    return dg, ddg


@pytest.mark.parametrize("name", BUILTINS)
def test_jets_match_finite_differences(name):
    chart = builtin(name)
    rng = np.random.default_rng(7)
    for p in sample_points(name, 100, rng):
        _, dg, ddg = metric_jets(chart, p)
        fdg, fddg = finite_differences(chart, p)
        scale1 = max(1.0, np.max(np.abs(dg)))
        scale2 = max(1.0, np.max(np.abs(ddg)))
        assert np.max(np.abs(dg - fdg)) <= 1e-5 * scale1
        assert np.max(np.abs(ddg - fddg)) <= 1e-5 * scale2
        assert np.array_equal(ddg, np.transpose(ddg, (1, 0, 2, 3)))
        assert np.array_equal(dg, np.transpose(dg, (0, 2, 1)))


@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_composite_chain_rule(a, b):
    # d/dx of sin(x*y)^2 / sqrt(x) at (x, y) = (a, b)
    env = dict(zip(COORDS, seed([0.0, a, b, 0.0])))
    jet = evaluate(parse_expr("sin(x*y)^2 / sqrt(x)", COORDS), env, JetOps)
    expect = (2 * math.sin(a * b) * math.cos(a * b) * b) / math.sqrt(a) - 0.5 * math.sin(a * b) ** 2 * a**-1.5
    assert math.isclose(jet.grad[1], expect, rel_tol=1e-9, abs_tol=1e-12)
    assert np.array_equal(jet.hess, jet.hess.T)
