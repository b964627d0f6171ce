import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylbridge.chart import bridge_metric, conformal_rescale, metric_at, metric_jets
from weylbridge.curvature import (
    christoffel,
    curvature_at,
    frame_components,
    kulkarni_nomizu,
    orthonormal_frame,
    ricci_scalar,
    riemann,
)
from weylbridge.errors import ContractViolation, EvaluationDomainError
from weylbridge.registry import builtin, sample_points

RIEMANNIAN = ("flat", "paper-example", "product(1,1)", "product(2,-0.5)", "product(-1,0)",
              "space-form(1)", "space-form(-3)")
ALL = RIEMANNIAN + ("lorentz-flat",)


def sym(rng):
    X = rng.normal(size=(4, 4))
    return X + X.T


def test_christoffel_flat_and_paper_example():
    g, dg, _ = metric_jets(builtin("flat"), [1, 2, 3, 4])
    assert not christoffel(g, dg).any()
    g, dg, _ = metric_jets(builtin("paper-example"), [0, 1, 0, 0])
    assert christoffel(g, dg)[1, 0, 0] == pytest.approx(-12.0, rel=1e-14)


def test_christoffel_singular_metric():
    with pytest.raises(EvaluationDomainError):
        christoffel(np.zeros((4, 4)), np.zeros((4, 4, 4)))


def test_christoffel_round_sphere_factor():
    # du^2 + sin(u)^2 dv^2: Gamma^u_vv = -sin cos, Gamma^v_uv = cot
    u = 0.7
    g, dg, _ = metric_jets(builtin("product(1,1)"), [u, 0.1, 0.5, 0.2])
    gam = christoffel(g, dg)
    assert gam[0, 1, 1] == pytest.approx(-np.sin(u) * np.cos(u), rel=1e-13)
    assert gam[1, 0, 1] == pytest.approx(np.cos(u) / np.sin(u), rel=1e-13)


@pytest.mark.parametrize("name", ALL)
def test_christoffel_metric_compatibility(name):
    chart = builtin(name)
    for p in sample_points(name, 20, np.random.default_rng(3)):
        g, dg, _ = metric_jets(chart, p)
        gam = christoffel(g, dg)
        assert np.array_equal(gam, np.transpose(gam, (0, 2, 1)))
        rhs = np.einsum("lki,lj->kij", gam, g) + np.einsum("lkj,il->kij", gam, g)
        assert np.max(np.abs(dg - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(dg)))


def test_flat_curvature_vanishes():
    pc = curvature_at(builtin("flat"), [0.1, 0.2, 0.3, 0.4])
    assert not pc.riemann.comps.any()
    assert pc.scal == 0.0 and not pc.ricci.any()


def test_sphere_factor_sign_and_scalar():
    chart = builtin("product(1,1)")
    p = [0.8, 0.3, 1.1, -0.4]
    pc = curvature_at(chart, p)
    Rf = frame_components(pc.riemann, orthonormal_frame(chart, p).vectors)
    assert Rf[0, 1, 1, 0] == pytest.approx(1.0, rel=1e-12)
    assert pc.scal == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("k", [1.0, -2.0, 0.5])
def test_space_form_is_einstein_and_conformally_flat(k):
    name = f"space-form({k:g})"
    chart = builtin(name)
    for p in sample_points(name, 10, np.random.default_rng(5)):
        pc = curvature_at(chart, p)
        assert pc.scal == pytest.approx(12 * k, rel=1e-10)
        assert np.allclose(pc.ricci, pc.scal / 4 * pc.g, atol=1e-10 * abs(pc.scal))
        assert pc.weyl.norm() <= 1e-10 * pc.riemann.norm()


@pytest.mark.parametrize("name", ALL)
def test_symmetries_and_trace_free(name):
    chart = builtin(name)
    for p in sample_points(name, 100, np.random.default_rng(11)):
        pc = curvature_at(chart, p)
        scale = pc.riemann.norm()
        assert pc.riemann.symmetry_residual() <= 1e-9
        assert pc.weyl.symmetry_residual(scale) <= 1e-9
        assert pc.weyl.trace_residual(pc.g, scale) <= 1e-9
        assert np.allclose(pc.ricci, pc.ricci.T)


def test_kulkarni_nomizu_examples(rng):
    g = np.eye(4)
    gg = kulkarni_nomizu(g, g).comps
    # sign convention: positive on (i, j, j, i), like the curvature of the unit sphere
    expect = 2 * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))
    assert np.array_equal(gg, expect)
    h = np.diag([1.0, 0, 0, 0])
    assert kulkarni_nomizu(h, h).comps[0, 1, 0, 1] == 0.0
    assert not kulkarni_nomizu(h, h).comps.any()
    h, k = sym(rng), sym(rng)
    assert np.allclose(kulkarni_nomizu(2 * h, k).comps, 2 * kulkarni_nomizu(h, k).comps)


@given(st.integers(0, 2**32 - 1))
def test_kulkarni_nomizu_properties(seed):
    rng = np.random.default_rng(seed)
    h, k, m = sym(rng), sym(rng), sym(rng)
    hk = kulkarni_nomizu(h, k)
    assert np.allclose(hk.comps, kulkarni_nomizu(k, h).comps)
    assert np.allclose(kulkarni_nomizu(h + m, k).comps, hk.comps + kulkarni_nomizu(m, k).comps)
    assert hk.symmetry_residual() <= 1e-12


def test_paper_example_weyl_operator_entries():
    chart = builtin("paper-example")
    for x in (0.5, 1.0, 2.5):
        p = [0.3, x, -0.2, 1.0]
        Wf = frame_components(curvature_at(chart, p).weyl, orthonormal_frame(chart, p).vectors)
        k = 3 / (2 * x * x)
        assert Wf[0, 1, 0, 1] == pytest.approx(0.0, abs=1e-12 * k)
        assert Wf[0, 2, 0, 2] == pytest.approx(-k, rel=1e-12)
        assert Wf[0, 3, 0, 3] == pytest.approx(k, rel=1e-12)


@pytest.mark.parametrize("c1,c2", [(1, 1), (2, -0.5), (-1, 3)])
def test_product_weyl_formula(c1, c2):
    name = f"product({c1},{c2})"
    chart = builtin(name)
    g1, g2 = np.diag([1.0, 1, 0, 0]), np.diag([0.0, 0, 1, 1])
    kn = kulkarni_nomizu
    expect = (c1 + c2) / 6 * (kn(g1, g1).comps - kn(g1, g2).comps + kn(g2, g2).comps)
    for p in sample_points(name, 10, np.random.default_rng(2)):
        Wf = frame_components(curvature_at(chart, p).weyl, orthonormal_frame(chart, p).vectors)
        assert np.max(np.abs(Wf - expect)) <= 1e-10


@given(st.floats(-np.pi, np.pi))
def test_product_non_example(theta):
    c1, c2 = 2.0, -0.5
    chart = builtin(f"product({c1},{c2})")
    p = [0.7, 0.2, 0.9, -0.3]
    Wf = frame_components(curvature_at(chart, p).weyl, orthonormal_frame(chart, p).vectors)
    a, b = np.cos(theta), np.sin(theta)
    T = np.array([a, 0, b, 0])
    val = np.einsum("i,ijkl,l->jk", T, Wf, T)[0, 0]
    assert val == pytest.approx((c1 + c2) / 6 * (-b * b), abs=1e-12)


@pytest.mark.parametrize("name", RIEMANNIAN)
def test_conformal_covariance(name):
    chart = builtin(name)
    rescaled = conformal_rescale(chart, chart.coords[1])
    for p in sample_points(name, 10, np.random.default_rng(9)):
        W = curvature_at(chart, p).weyl.comps
        W2 = curvature_at(rescaled, p).weyl.comps
        assert np.max(np.abs(W2 - np.exp(2 * p[1]) * W)) <= 1e-8 * max(1.0, np.max(np.abs(W2)))


def test_frames():
    fb = orthonormal_frame(builtin("flat"), [0, 0, 0, 0])
    assert np.array_equal(fb.vectors, np.eye(4))
    fb = orthonormal_frame(builtin("paper-example"), [0, 1, 0, 0])
    assert np.allclose(fb.vectors, np.diag([1 / np.sqrt(8), 1, np.sqrt(8), 1]), atol=1e-15)
    fb = orthonormal_frame(builtin("lorentz-flat"), [0, 0, 0, 0])
    assert np.array_equal(fb.vectors, np.eye(4))
    assert fb.frame.timelike_index == 0


def test_frame_orientation_swap():
    chart = builtin("flat")
    flipped = type(chart)(chart.coords, chart.signature, chart.components, -1)
    fb = orthonormal_frame(flipped, [0, 0, 0, 0])
    assert np.linalg.det(fb.vectors) < 0


def test_frame_signature_mismatch():
    g = np.diag([-1.0, 1, 1, 1])
    from weylbridge.curvature import orthonormal_basis
    with pytest.raises(ContractViolation):
        orthonormal_basis(g, "riemannian")


def test_bridge_metric_examples(rng):
    flat = builtin("flat")
    L = bridge_metric(flat, ["1", "0", "0", "0"], check_points=[[0, 0, 0, 0]])
    assert L.signature == "lorentzian"
    assert np.array_equal(metric_at(L, [0, 0, 0, 0]), np.diag([-1.0, 1, 1, 1]))
    back = bridge_metric(L, ["1", "0", "0", "0"], check_points=[[0, 0, 0, 0]])
    assert np.array_equal(metric_at(back, [0.5, 0, 0, 0]), np.eye(4))
    with pytest.raises(ContractViolation):
        bridge_metric(flat, ["2", "0", "0", "0"], check_points=[[0, 0, 0, 0]])


def test_bridge_metric_paper_example(rng):
    chart = builtin("paper-example")
    T = ["1/sqrt(16*x^3)", "1/sqrt(2)", "0", "0"]
    pts = sample_points("paper-example", 5, rng)
    L = bridge_metric(chart, T, check_points=pts)
    back = bridge_metric(L, T, check_points=pts)
    for p in pts:
        g = metric_at(chart, p)
        t = np.array([1 / np.sqrt(16 * p[1] ** 3), 1 / np.sqrt(2), 0, 0])
        gl = metric_at(L, p)
        for v in rng.normal(size=(5, 4)):
            assert v @ gl @ v == pytest.approx(v @ g @ v - 2 * (t @ g @ v) ** 2, abs=1e-12 * (1 + v @ g @ v))
        assert np.allclose(metric_at(back, p), g, atol=1e-12)


def test_riemann_direct_call_matches_pipeline():
    chart = builtin("product(1,1)")
    p = [0.5, 0.1, 0.6, 0.2]
    g, dg, ddg = metric_jets(chart, p)
    Rm = riemann(g, dg, ddg)
    ric, scal = ricci_scalar(Rm, g)
    assert np.array_equal(Rm.comps, curvature_at(chart, p).riemann.comps)
    assert scal == pytest.approx(4.0)
