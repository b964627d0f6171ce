"""Self-checks run by ``petrov verify``: deterministic, seeded, pass/fail per check."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .annihilator import NormalFormParams, exclusion_certificate, solve_lorentzian, solve_riemannian
from .bivector import star_commutator
from .curvature import curvature_at, frame_components, orthonormal_frame
from .petrov import classify, normal_form_matrix, random_fixture_params
from .quadform import berger_thorpe_normal_form
from .registry import builtin, paper_example, sample_points
from .weylop import (
    WeylOperator6,
    annihilates,
    bridge_operator,
    build_operator,
    curvature_operator,
    lambda2_action,
    operator_from_frame_tensor,
    random_lorentz,
    random_rotation,
    random_traceless_symmetric,
    reframe,
    tensor_from_operator,
    weyl_from_curvature_operator,
)

SUITES = ("paper-example", "corollary", "exclusion", "bridge", "normal-form")
WNEW_BUILTINS = ("flat", "paper-example", "product(1,1)", "product(1,-0.5)", "product(-2,0)",
                 "space-form(1)", "space-form(-3)")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"suite": self.suite, "passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


def golden_matrix(x: float) -> np.ndarray:
    k = 3.0 / (2.0 * x * x)
    return k * np.diag([0.0, -1.0, 1.0, 0.0, -1.0, 1.0])


def paper_example_suite(n: int = 50, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    chart = paper_example()
    worst = 0.0
    for p in sample_points("paper-example", n, rng):
        pc = curvature_at(chart, p)
        op = build_operator(pc.weyl, orthonormal_frame(chart, p))
        G = golden_matrix(p[1])
        scale = np.where(G != 0, np.abs(G), np.max(np.abs(G)))
        worst = max(worst, float(np.max(np.abs(op.mat - G) / scale)))
    checks = [CheckResult("golden Weyl matrix", worst <= 1e-9, f"{n} points, max relative error {worst:.2e}")]
    k = 1.5
    sols = solve_riemannian(NormalFormParams((0.0, -k, k), (0.0, 0.0, 0.0)))
    r2 = 1 / np.sqrt(2.0)
    want = [np.array(v) * r2 for v in ((1, 1, 0, 0), (1, -1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1))]
    got = [s.c for s in sols]
    match = len(got) == 4 and all(any(abs(abs(float(g @ w)) - 1) < 1e-9 for g in got) for w in want)
    res = max((s.residual for s in sols), default=0.0)
    checks.append(CheckResult("annihilator solutions", match and res <= 1e-10 and not sols.continuum,
                              f"{len(got)} pairs, max residual {res:.1e}"))
    return checks


def corollary_suite(n: int = 200, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    flips = [np.array(v) / 2.0 for v in ((1, 1, 1, 1), (-1, -1, 1, 1), (-1, 1, -1, 1), (-1, 1, 1, -1))]
    missing = 0
    for _ in range(n):
        m1, m2 = rng.normal(size=2)
        p = NormalFormParams((-m1 - 2 * m2, 2 * m1 + m2, m2 - m1), (m1, m2, -m1 - m2))
        got = [s.c for s in solve_riemannian(p)]
        missing += sum(not any(abs(abs(float(g @ f)) - 1) < 1e-8 for g in got) for f in flips)
    checks = [CheckResult("sign-flip family present", missing == 0, f"{n} draws, {missing} missing vectors")]
    nonempty = 0
    for _ in range(n):
        a, b = rng.normal(size=2)
        p = NormalFormParams((-2 * a, a, a), (-2 * b, b, b))
        nonempty += len(solve_riemannian(p)) > 0
    checks.append(CheckResult("mu2 = mu3, lam2 = lam3 gives no solution", nonempty == 0,
                              f"{n} draws, {nonempty} non-empty"))
    return checks


def exclusion_suite(n: int = 1000, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    found = 0
    for i in range(n):
        t = ("II", "N", "III")[i % 3]
        lam, mu, sc = random_fixture_params(t, rng)
        M = reframe(normal_form_matrix(t, lam, mu, sc), "lorentzian", random_lorentz(rng))
        found += len(solve_lorentzian(WeylOperator6(M, "lorentzian"), True)) > 0
    checks = [CheckResult("no timelike annihilator for II/N/III", found == 0,
                          f"{n - found}/{n} fixtures with empty timelike solution set")]
    for t, lam in (("III", None), ("N", None), ("II", 0.25)):
        cert = exclusion_certificate(t, lam)
        checks.append(CheckResult(f"exclusion certificate {t}", cert.ok,
                                  f"{len(cert.steps)} steps, timelike margin {cert.timelike_margin:.3f}"))
    return checks


def planted_bridge_operator(rng, B=None):
    """Lorentzian bridge operator of a rotated ``[[O, B], [B, O]]`` tensor, with T = the rotated e_1."""
    B = random_traceless_symmetric(rng) if B is None else B
    Wf = tensor_from_operator(np.block([[np.zeros((3, 3)), B], [B, np.zeros((3, 3))]]), "riemannian")
    R = random_rotation(rng)
    Wr = frame_components(Wf, R)
    T = R.T[:, 0]
    return bridge_operator(Wr, np.eye(4), T, "riemannian")[0]


def bridge_suite(n: int = 1000, points: int = 100, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    bad = 0
    for i in range(n):
        B = np.diag([1.0, 1.0, -2.0]) * rng.uniform(0.2, 3.0) if i % 10 == 0 else None
        cw = classify(planted_bridge_operator(rng, B))
        bad += cw.petrov not in ("I", "D") or cw.borderline
    checks = [CheckResult("annihilated tensors are Type I or D", bad == 0, f"{n - bad}/{n}")]
    worst = 0.0
    for name in WNEW_BUILTINS:
        chart = builtin(name)
        for p in sample_points(name, points, rng):
            pc = curvature_at(chart, p)
            fb = orthonormal_frame(chart, p)
            W1 = build_operator(pc.weyl, fb).mat
            W2 = weyl_from_curvature_operator(curvature_operator(pc.riemann, fb), pc.scal)
            worst = max(worst, float(np.max(np.abs(W1 - W2)) / max(1.0, np.max(np.abs(W2)))))
    checks.append(CheckResult("Weyl operator two routes", worst <= 1e-9, f"max error {worst:.1e}"))
    return checks


def normal_form_suite(n: int = 500, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    ev_err = rec_err = 0.0
    for _ in range(n):
        B = random_traceless_symmetric(rng)
        M = np.block([[np.zeros((3, 3)), B], [B, np.zeros((3, 3))]])
        L = lambda2_action(random_rotation(rng))
        Mc = L @ M @ L.T
        f = berger_thorpe_normal_form(Mc, pairing="opposite")
        want = np.sort(np.linalg.eigvalsh(B))
        ev_err = max(ev_err, float(np.max(np.abs(np.sort(f.params.mu) - want))), float(np.max(np.abs(f.params.lam))))
        rec_err = max(rec_err, float(np.linalg.norm(f.reconstruct() - Mc)))
    return [
        CheckResult("planted eigenvalues recovered", ev_err <= 1e-8, f"max error {ev_err:.1e}"),
        CheckResult("reconstruction", rec_err <= 1e-8, f"max error {rec_err:.1e}"),
    ]


def commutation_equivalence(n: int = 10000, seed: int = 0, tol: float = 1e-9) -> tuple:
    """Disagreements between ``annihilates(W, e_1)`` and star-commutation on random tensors."""
    rng = np.random.default_rng(seed)
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    disagree = 0
    for i in range(n):
        B = random_traceless_symmetric(rng)
        mode = i % 3
        A = np.zeros((3, 3)) if mode == 0 else random_traceless_symmetric(rng, 1.0 if mode == 1 else 1e-3)
        Wf = tensor_from_operator(np.block([[A, B], [B, A]]), "riemannian")
        ann = bool(annihilates(Wf, e1, np.eye(4), tol))
        comm = star_commutator(operator_from_frame_tensor(Wf, "lorentzian"), "lorentzian") <= tol
        disagree += ann != comm
    return disagree, n


def run_suite(name: str, seed: int = 0, scale: float = 1.0) -> SuiteResult:
    """Run one suite; ``scale`` shrinks the sample sizes (1.0 = full size)."""
    def k(v):
        return max(1, int(round(v * scale)))

    t0 = time.perf_counter()
    if name == "paper-example":
        checks = paper_example_suite(k(50), seed)
    elif name == "corollary":
        checks = corollary_suite(k(200), seed)
    elif name == "exclusion":
        checks = exclusion_suite(k(1000), seed)
    elif name == "bridge":
        checks = bridge_suite(k(1000), k(100), seed)
        d, m = commutation_equivalence(k(10000), seed)
        checks.append(CheckResult("annihilation iff star-commutation", d == 0, f"{d} disagreements in {m}"))
    elif name == "normal-form":
        checks = normal_form_suite(k(500), seed)
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    res = SuiteResult(name, checks)
    res.seconds = time.perf_counter() - t0
    return res

