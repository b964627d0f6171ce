import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylbridge.annihilator import (
    EQUATION_SIGNS,
    PAIRS,
    NormalFormParams,
    SolverConfig,
    exclusion_certificate,
    solve_frame_tensor,
    solve_lorentzian,
    solve_riemannian,
    ten_equation_residual,
)
from weylbridge.curvature import kulkarni_nomizu
from weylbridge.errors import ContractViolation
from weylbridge.petrov import normal_form_fixture
from weylbridge.weylop import annihilates

R2 = 1 / np.sqrt(2)
EVEN_FLIPS = [np.array(s) for s in itertools.product((1, -1), repeat=4) if np.prod(s) == 1]
seeds = st.integers(0, 2**32 - 1)


def random_params(rng):
    lam, mu = rng.normal(size=(2, 3))
    return NormalFormParams(lam - lam.mean(), mu - mu.mean())


def same_line(u, v, tol=1e-8):
    return abs(abs(float(np.dot(u, v))) - 1) < tol


def test_params_validation():
    with pytest.raises(ContractViolation):
        NormalFormParams((1, 0, 0), (0, 0, 0))
    with pytest.raises(ContractViolation):
        NormalFormParams((1, -1), (0, 0, 0))
    p = NormalFormParams((1, -1, 0), (0, 2, -2))
    assert p.operator_matrix().shape == (6, 6)


def test_ten_equations_examples():
    k = 1.5
    p = NormalFormParams((0, -k, k), (0, 0, 0))
    assert np.allclose(ten_equation_residual(p, np.array([1, 1, 0, 0]) * R2), 0, atol=1e-15)
    res = ten_equation_residual(p, [1, 0, 0, 0])
    assert res[PAIRS.index((2, 2))] == -k
    m1, m2 = 0.3, -1.1
    q = NormalFormParams((-m1 - 2 * m2, 2 * m1 + m2, m2 - m1), (m1, m2, -m1 - m2))
    assert np.allclose(ten_equation_residual(q, [0.5, 0.5, 0.5, 0.5]), 0, atol=1e-15)


def test_ten_equations_match_contraction():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        p = random_params(rng)
        c = rng.normal(size=(4, 100))
        direct = np.einsum("ib,ijkl,lb->jkb", c, p.tensor(), c)
        direct = np.stack([direct[j, k] for j, k in PAIRS])
        worst = max(worst, np.max(np.abs(ten_equation_residual(p, c) - EQUATION_SIGNS[:, None] * direct)))
    assert worst <= 1e-12 * 50


def test_paper_example_solutions():
    sols = solve_riemannian(NormalFormParams((0, -1, 1), (0, 0, 0)))
    want = [np.array(v) * R2 for v in ((1, 1, 0, 0), (1, -1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1))]
    assert len(sols) == 4 and not sols.continuum
    for w in want:
        assert any(same_line(s.c, w) for s in sols)
    assert max(s.residual for s in sols) <= 1e-10


def test_corollary_family_and_empty_case():
    rng = np.random.default_rng(1)
    m1, m2 = rng.normal(size=2)
    p = NormalFormParams((-m1 - 2 * m2, 2 * m1 + m2, m2 - m1), (m1, m2, -m1 - m2))
    sols = solve_riemannian(p)
    for f in ((1, 1, 1, 1), (-1, -1, 1, 1), (-1, 1, -1, 1), (-1, 1, 1, -1)):
        assert any(same_line(s.c, np.array(f) / 2) for s in sols)
    assert solve_riemannian(NormalFormParams((-2, 1, 1), (0.4, -0.2, -0.2))) == []


@given(seeds)
def test_solutions_annihilate_and_are_sign_closed(seed):
    rng = np.random.default_rng(seed)
    if seed % 2:
        p = random_params(rng)
    else:
        m1, m2 = rng.normal(size=2)
        p = NormalFormParams((-m1 - 2 * m2, 2 * m1 + m2, m2 - m1), (m1, m2, -m1 - m2))
    sols = solve_riemannian(p, SolverConfig(starts=128))
    assert not sols.continuum
    Wf = p.tensor()
    for s in sols:
        assert np.linalg.norm(s.c) == pytest.approx(1.0)
        chk = annihilates(Wf, s.c, np.eye(4), 1e-8)
        assert chk, chk.residual
        for f in EVEN_FLIPS:
            assert any(same_line(f * s.c, t.c, 1e-6) for t in sols)


def test_continuum_detected():
    h = np.diag([0.0, 0.0, 1.0, 1.0])
    sols = solve_frame_tensor(kulkarni_nomizu(h, h).comps, "riemannian", config=SolverConfig(starts=256))
    assert sols.continuum
    for s in sols:
        assert abs(s.c[2]) < 1e-6 and abs(s.c[3]) < 1e-6


def test_zero_tensor_is_continuum():
    assert solve_frame_tensor(np.zeros((4, 4, 4, 4))).continuum


@pytest.mark.parametrize("t,lam", [("III", None), ("II", 0.25), ("II", -1.3), ("N", None)])
def test_no_timelike_annihilator(t, lam):
    op = normal_form_fixture(t, lam, 0.4 if t == "II" else None)
    assert solve_lorentzian(op, True) == []


def test_timelike_annihilator_found_for_type_one():
    # A = O gives e1 as annihilator: pure-mu Type I with distinct mus
    op = normal_form_fixture("I", (0, 0, 0), (1.0, 2.0, -3.0))
    sols = solve_lorentzian(op, True)
    assert any(same_line(s.c, [1, 0, 0, 0]) for s in sols)
    assert all(s.causal == "timelike" for s in sols)


def test_require_timelike_needs_lorentzian():
    with pytest.raises(ContractViolation):
        solve_frame_tensor(np.zeros((4, 4, 4, 4)) + 1.0, "riemannian", True)
    with pytest.raises(ContractViolation):
        from weylbridge.weylop import WeylOperator6
        solve_lorentzian(WeylOperator6(np.eye(6), "riemannian"))


@pytest.mark.parametrize("t,lam", [("III", None), ("N", None), ("II", 0.25)])
def test_exclusion_certificates(t, lam):
    cert = exclusion_certificate(t, lam, grid=2**13)
    assert cert.ok, "\n".join(cert.lines())
    text = "\n".join(cert.lines())
    if t == "III":
        assert "(c1 - c3)^2" in text and cert.timelike_margin >= 0.5
    elif t == "N":
        assert "(c1 - c2)^2 = 0" in text
    else:
        assert "c3 = 0 branch" in text and "c4 = 0 branch" in text


def test_exclusion_certificate_rejects_other_types():
    with pytest.raises(ContractViolation):
        exclusion_certificate("I")
