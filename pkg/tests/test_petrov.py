import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylbridge.bivector import complexify, ggL_complex, is_decomposable
from weylbridge.errors import ContractViolation
from weylbridge.petrov import (
    canonical_eigenplanes,
    classify,
    normal_form_fixture,
    normal_form_matrix,
    random_fixture_params,
)
from weylbridge.weylop import random_lorentz, reframe, synthetic_weyl_matrix

TYPES = ("I", "D", "II", "N", "III")
seeds = st.integers(0, 2**32 - 1)


def fixture(t, rng, frame=True):
    lam, mu, sc = random_fixture_params(t, rng)
    M = normal_form_matrix(t, lam, mu, sc)
    return reframe(M, "lorentzian", random_lorentz(rng)) if frame else M


def test_type_one_matrix():
    M = normal_form_matrix("I", (1, 2, -3), (0, 0, 0))
    assert np.array_equal(M, np.block([[np.diag([1.0, 2, -3]), np.zeros((3, 3))],
                                       [np.zeros((3, 3)), np.diag([1.0, 2, -3])]]))
    cw = classify(M)
    assert cw.petrov == "I" and not cw.borderline
    assert sorted(cw.invariants["lambda"]) == pytest.approx([-3, 1, 2])


def test_examples():
    assert classify(normal_form_fixture("N")).petrov == "N"
    assert classify(normal_form_fixture("III")).petrov == "III"
    assert classify(normal_form_fixture("D", (-2, 1, 1), (0, 0, 0))).petrov == "D"
    assert classify(normal_form_fixture("II", 0.25, 0.0)).petrov == "II"
    assert classify(np.zeros((6, 6))).petrov == "O"


def test_type_three_components():
    from weylbridge.weylop import tensor_from_operator
    Wf = tensor_from_operator(normal_form_matrix("III"), "lorentzian")
    s = 1 / np.sqrt(2)
    assert Wf[0, 1, 0, 2] == pytest.approx(-s)
    assert Wf[0, 2, 1, 2] == pytest.approx(s)
    assert Wf[0, 3, 3, 1] == pytest.approx(s)
    assert Wf[2, 3, 3, 1] == pytest.approx(s)
    listed = {(0, 1, 0, 2), (0, 2, 1, 2), (0, 3, 3, 1), (2, 3, 3, 1)}
    pairs = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)]
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs[a:], a):
            if (i, j, k, l) not in listed:
                assert Wf[i, j, k, l] == 0.0


def test_fixture_contract_errors():
    with pytest.raises(ContractViolation):
        normal_form_matrix("I", (1, 1, 1), (0, 0, 0))
    with pytest.raises(ContractViolation):
        normal_form_matrix("I", (1, 1, -2), (0, 0, 0))  # repeated: that is D
    with pytest.raises(ContractViolation):
        normal_form_matrix("N", 0.5, 0.0)
    with pytest.raises(ContractViolation):
        normal_form_matrix("X")
    with pytest.raises(ContractViolation):
        classify(np.diag([1.0, 1, 1]))


def test_eigenplanes_type_one():
    cw = classify(normal_form_fixture("I", (1, 2, -3), (0.5, -1, 0.5)))
    planes = canonical_eigenplanes(cw)
    assert [p.causal for p in planes] == ["spacelike"] * 3
    for a, p in enumerate(planes):
        assert is_decomposable(p.bivector)
        for b, q in enumerate(planes):
            want = 1.0 if a == b else 0.0
            assert abs(ggL_complex(p.complex_coords, q.complex_coords) - want) < 1e-10


def test_eigenplanes_type_three():
    planes = canonical_eigenplanes(classify(normal_form_fixture("III")))
    assert len(planes) == 1 and planes[0].causal == "lightlike"
    assert is_decomposable(planes[0].bivector)


def test_eigenplanes_type_n():
    planes = canonical_eigenplanes(classify(normal_form_fixture("N")))
    assert sorted(p.causal for p in planes) == ["lightlike", "spacelike"]
    z, w = (p.complex_coords for p in planes)
    assert abs(ggL_complex(z, w)) < 1e-10
    for p in planes:
        assert is_decomposable(p.bivector)


@pytest.mark.parametrize("t", TYPES)
def test_round_trip_many_draws(t):
    rng = np.random.default_rng(TYPES.index(t))
    for _ in range(1000):
        M = fixture(t, rng, frame=False)
        cw = classify(M)
        assert cw.petrov == t and not cw.borderline


@pytest.mark.parametrize("t", TYPES)
def test_round_trip_in_random_frames(t):
    rng = np.random.default_rng(17)
    for _ in range(200):
        cw = classify(fixture(t, rng))
        assert cw.petrov == t


@given(seeds, st.sampled_from(TYPES))
def test_perturbation_stability(seed, t):
    rng = np.random.default_rng(seed)
    lam, mu, sc = random_fixture_params(t, rng)
    M = normal_form_matrix(t, lam, mu, sc)
    ev = np.linalg.eigvals(complexify(M))
    gaps = [abs(a - b) for i, a in enumerate(ev) for b in ev[i + 1:] if abs(a - b) > 1e-6]
    if gaps and min(gaps) < 1e-3 * np.linalg.norm(M):
        return
    C = complexify(M)
    P = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    P = P + P.T
    P -= np.trace(P) / 3 * np.eye(3)
    P *= 1e-10 * np.linalg.norm(C) / np.linalg.norm(P)
    assert classify(C + P).petrov == t


@given(seeds)
def test_complexified_operators_are_ggl_symmetric(seed):
    rng = np.random.default_rng(seed)
    from weylbridge.weylop import operator_from_frame_tensor, tensor_from_operator
    Wf = tensor_from_operator(synthetic_weyl_matrix(rng, a_zero=True), "riemannian")
    C = complexify(operator_from_frame_tensor(Wf, "lorentzian"))
    z, w = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    assert abs(ggL_complex(C @ z, w) - ggL_complex(z, C @ w)) <= 1e-10 * np.linalg.norm(C) * 10
    assert classify(C).ggl_symmetry_residual() <= 1e-10


@given(seeds, st.sampled_from(("II", "N", "III")))
def test_null_principal_eigenvector(seed, t):
    rng = np.random.default_rng(seed)
    cw = classify(fixture(t, rng))
    top = max(cw.clusters, key=lambda c: c.algebraic)
    assert top.algebraic >= 2
    # the lightlike eigenline is the one without a Jordan partner in the eigenspace
    xi = [p for p in canonical_eigenplanes(cw) if p.causal == "lightlike"]
    assert len(xi) == 1
    z = xi[0].complex_coords
    assert abs(ggL_complex(z, z)) <= 1e-9


def test_single_eigenvalue_forced_to_zero():
    for t in ("N", "III"):
        cw = classify(normal_form_fixture(t, scale=2.0))
        assert abs(cw.clusters[0].eigenvalue) < 1e-12
