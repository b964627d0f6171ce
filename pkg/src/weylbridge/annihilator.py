"""Solving ``W(T, ., ., T) = 0`` for a unit vector T.

With ``T = sum c_i e_i`` every component ``W(T, e_j, e_k, T)`` is a quadratic
form in ``c``, so the condition is ten homogeneous quadrics (one per ``j <= k``).
They are solved by batched Levenberg-Marquardt from quasi-random starts, either
on the Euclidean unit sphere or on the unit timelike hyperboloid.

In normal form (``A = diag(lam)``, ``B = diag(mu)``) the quadrics have the closed
form returned by :func:`ten_equation_residual`.  That closed form is the
contraction ``sum_il c_i c_l W_ijkl`` with the sign of the four ``j == k`` rows
reversed (``EQUATION_SIGNS``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .bivector import check_kind
from .errors import ContractViolation
from .lm import batched_lm
from .petrov import normal_form_matrix
from .weylop import WeylOperator6, tensor_from_operator

PAIRS = tuple((j, k) for j in range(4) for k in range(j, 4))
EQUATION_SIGNS = np.array([-1.0 if j == k else 1.0 for j, k in PAIRS])
MAX_RAPIDITY = 6.0


@dataclass(frozen=True)
class NormalFormParams:
    lam: tuple
    mu: tuple

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        mu = tuple(float(v) for v in self.mu)
        if len(lam) != 3 or len(mu) != 3:
            raise ContractViolation("normal-form parameters need three lambdas and three mus")
        scale = max(1.0, max(abs(v) for v in lam + mu))
        if abs(sum(lam)) > 1e-12 * scale or abs(sum(mu)) > 1e-12 * scale:
            raise ContractViolation(f"lambda and mu must each sum to zero, got {lam} and {mu}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    def operator_matrix(self) -> np.ndarray:
        """Riemannian ``[[diag lam, diag mu], [diag mu, diag lam]]``."""
        L, M = np.diag(self.lam), np.diag(self.mu)
        return np.block([[L, M], [M, L]])

    def tensor(self) -> np.ndarray:
        """Frame components of the Weyl tensor in normal form."""
        return tensor_from_operator(self.operator_matrix(), "riemannian")

    def norm(self) -> float:
        return float(np.linalg.norm(self.operator_matrix()))


@dataclass(frozen=True)
class AnnihilatorSolution:
    c: np.ndarray  # Euclidean-unit frame coefficients of T, sign-canonical
    residual: float  # max |W(T, e_j, e_k, T)| at the reported normalization
    causal: str = "unknown"

    def as_tuple(self):
        return tuple(float(v) for v in self.c)


class SolutionList(list):
    """List of :class:`AnnihilatorSolution` that also records whether a continuum was detected."""

    def __init__(self, items=(), continuum: bool = False, converged: int = 0):
        super().__init__(items)
        self.continuum = continuum
        self.converged = converged


def ten_equation_residual(p: NormalFormParams, c) -> np.ndarray:
    """The ten normal-form polynomials, ordered by ``(j, k)`` = (1,1), (1,2), ..., (4,4)."""
    l1, l2, l3 = p.lam
    m1, m2, m3 = p.mu
    c1, c2, c3, c4 = np.asarray(c, dtype=float)
    return np.array([
        c2**2 * l1 + c3**2 * l2 + c4**2 * l3,
        c1 * c2 * l1 + c3 * c4 * (m2 - m3),
        c1 * c3 * l2 + c2 * c4 * (m3 - m1),
        c1 * c4 * l3 + c2 * c3 * (m1 - m2),
        c1**2 * l1 + c4**2 * l2 + c3**2 * l3,
        c2 * c3 * l3 + c1 * c4 * (m1 - m2),
        c2 * c4 * l2 + c1 * c3 * (m3 - m1),
        c4**2 * l1 + c1**2 * l2 + c2**2 * l3,
        c3 * c4 * l1 + c1 * c2 * (m2 - m3),
        c3**2 * l1 + c2**2 * l2 + c1**2 * l3,
    ])


def contraction(Wf, c) -> np.ndarray:
    """``sum_il c_i c_l W_ijkl`` for the ten pairs ``j <= k``."""
    N = np.einsum("i,ijkl,l->jk", np.asarray(c, dtype=float), np.asarray(Wf), np.asarray(c, dtype=float))
    return np.array([N[j, k] for j, k in PAIRS])


def quadrics(Wf) -> np.ndarray:
    """``Q[m]`` symmetric 4x4 with ``c^T Q[m] c = W(T, e_j, e_k, T)`` for pair ``m``."""
    Wf = np.asarray(Wf, dtype=float)
    Q = np.stack([Wf[:, j, k, :] for j, k in PAIRS])
    return 0.5 * (Q + np.transpose(Q, (0, 2, 1)))


def _lm(Q, x, to_c, extra=None, iters=80, radius=None):
    """Least squares on the quadrics ``c^T Q_m c`` through the chart ``to_c``."""

    Qflat = Q.reshape(-1, Q.shape[2])

    def fun(x):
        c, dc = to_c(x)  # (B, 4), (B, 4, n)
        Qc = (c @ Qflat.T).reshape(len(c), Q.shape[0], Q.shape[1])
        r = np.einsum("bi,bmi->bm", c, Qc)
        J = 2.0 * Qc @ dc
        if extra is not None:
            r2, J2 = extra(c, dc)
            r = np.concatenate([r, r2], axis=1)
            J = np.concatenate([J, J2], axis=1)
        return r, J

    return batched_lm(fun, x, iters, radius)[0]


def _sphere_chart(x):
    nrm = np.linalg.norm(x, axis=1, keepdims=True)
    c = x / nrm
    dc = (np.eye(4)[None] - np.einsum("bi,bj->bij", c, c)) / nrm[:, :, None]
    return c, dc


def _hyperboloid_chart(y):
    t = np.sqrt(1.0 + np.sum(y * y, axis=1))
    c = np.concatenate([t[:, None], y], axis=1)
    dc = np.concatenate([(y / t[:, None])[:, None, :], np.broadcast_to(np.eye(3), (len(y), 3, 3))], axis=1)
    return c, dc


def _canonical(c):
    c = c / np.linalg.norm(c)
    k = int(np.argmax(np.abs(c) > 1e-9))
    return (-c if c[k] < 0 else c) + 0.0


def _dedup(points, radius):
    kept = []
    for c in points:
        if all(np.arccos(min(1.0, abs(float(c @ d)))) > radius for d in kept):
            kept.append(c)
    return kept


def _sorted(sols):
    return sorted(sols, key=lambda s: tuple(-np.round(s.c, 9)))


@dataclass
class SolverConfig:
    starts: int = 512
    iters: int = 80
    tol: float = 1e-9  # relative to |W|
    dedup: float = 1e-4
    continuum: int = 32
    seed: int = 0
    max_rapidity: float = MAX_RAPIDITY
    extra_starts: list = field(default_factory=list)


def _starts(n, dim, seed):
    return qmc.Sobol(dim, scramble=True, seed=seed).random(n)


def solve_frame_tensor(Wf, kind: str = "riemannian", require_timelike: bool = False,
                       config: SolverConfig | None = None) -> SolutionList:
    """All unit solutions of ``W(T, e_j, e_k, T) = 0`` for frame components ``Wf``.

    ``kind`` only matters for the normalization: Riemannian and non-timelike
    searches use ``|c| = 1``; a timelike search uses ``<T, T>_L = -1`` with
    ``e_1`` timelike and rapidity at most ``config.max_rapidity``.
    """
    cfg = config or SolverConfig()
    check_kind(kind)
    if require_timelike and kind != "lorentzian":
        raise ContractViolation("a timelike search needs a Lorentzian frame")
    Q = quadrics(Wf)
    scale = float(np.linalg.norm(Wf))
    if scale == 0.0:
        return SolutionList([], continuum=True)
    Q = Q / scale
    u = _starts(cfg.starts, 4 if not require_timelike else 3, cfg.seed)
    if require_timelike:
        rho = cfg.max_rapidity * u[:, 0]
        z = 2.0 * u[:, 1] - 1.0
        phi = 2.0 * np.pi * u[:, 2]
        s = np.sqrt(1.0 - z * z)
        omega = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
        x0 = np.sinh(rho)[:, None] * omega
        x = _lm(Q, x0, _hyperboloid_chart, iters=cfg.iters, radius=np.sinh(cfg.max_rapidity))
        c, _ = _hyperboloid_chart(x)
    else:
        x0 = np.sqrt(2.0) * _erfinv_normal(u)
        x0 = np.vstack([x0] + [np.asarray(s, dtype=float)[None] for s in cfg.extra_starts])

        def unit(c, dc):
            return (np.sum(c * c, axis=1) - 1.0)[:, None], 2.0 * np.einsum("bi,bin->bn", c, dc)[:, None, :]

        x = _lm(Q, x0, _sphere_chart, extra=unit, iters=cfg.iters)
        c, _ = _sphere_chart(x)
    res = np.max(np.abs(np.einsum("bi,mij,bj->bm", c, Q, c)), axis=1)
    good = c[res <= cfg.tol]
    kept = _dedup([_canonical(v) for v in good], cfg.dedup)
    eta = np.array([-1.0, 1.0, 1.0, 1.0]) if kind == "lorentzian" else np.ones(4)
    sols = []
    for v in kept:
        norm = float(v @ (eta * v))
        if kind == "riemannian":
            causal = "spacelike"
        else:
            causal = "lightlike" if abs(norm) <= 1e-9 else ("timelike" if norm < 0 else "spacelike")
        w = v / np.sqrt(abs(norm)) if require_timelike else v
        r = float(np.max(np.abs(contraction(Wf, w))))
        sols.append(AnnihilatorSolution(v, r, causal))
    return SolutionList(_sorted(sols), continuum=len(kept) >= cfg.continuum, converged=int(len(good)))


def _erfinv_normal(u):
    from scipy.special import erfinv
    return erfinv(np.clip(2.0 * u - 1.0, -1 + 1e-12, 1 - 1e-12))


def solve_riemannian(p: NormalFormParams, config: SolverConfig | None = None) -> SolutionList:
    """Unit solutions for a Riemannian Weyl tensor in normal form."""
    cfg = config or SolverConfig()
    if not cfg.extra_starts:
        # the sign-flip family is a natural seed set; it costs nothing
        flips = [np.array(s, dtype=float) / 2.0 for s in
                 ((1, 1, 1, 1), (-1, -1, 1, 1), (-1, 1, -1, 1), (-1, 1, 1, -1))]
        cfg = SolverConfig(**{**cfg.__dict__, "extra_starts": flips})
    return solve_frame_tensor(p.tensor(), "riemannian", config=cfg)


def solve_lorentzian(op: WeylOperator6, require_timelike: bool = True,
                     config: SolverConfig | None = None) -> SolutionList:
    """Solutions for a Lorentzian operator whose frame has ``e_1`` timelike."""
    if op.induced_kind != "lorentzian":
        raise ContractViolation("solve_lorentzian needs an operator built with the Lorentzian inner product")
    Wf = tensor_from_operator(op.mat, "lorentzian")
    return solve_frame_tensor(Wf, "lorentzian", require_timelike, config)


def params_from_operator(op: WeylOperator6, tol: float = 1e-9) -> NormalFormParams:
    """Read ``(lam, mu)`` off a Riemannian operator that is already in normal form."""
    if op.induced_kind != "riemannian":
        raise ContractViolation("normal-form parameters are read from a Riemannian operator")
    M = op.mat
    A, B = M[:3, :3], M[:3, 3:]
    off = max(np.max(np.abs(A - np.diag(np.diag(A)))), np.max(np.abs(B - np.diag(np.diag(B)))))
    n = max(np.linalg.norm(M), 1e-300)
    if off > tol * n:
        raise ContractViolation("operator is not in normal form", residual=off / n)
    lam, mu = np.diag(A).copy(), np.diag(B).copy()
    return NormalFormParams(lam - lam.mean(), mu - mu.mean())


# Exclusion certificates for the non-diagonalizable Lorentzian types.

@dataclass(frozen=True)
class Step:
    claim: str
    error: float
    ok: bool


@dataclass(frozen=True)
class ExclusionCertificate:
    ptype: str
    params: tuple
    steps: tuple
    grid_min_residual: float  # min over the timelike grid of max |eq| / |W|
    near_solutions: int  # Euclidean-grid points where the cited equations nearly vanish
    timelike_margin: float  # min |<T, T>_L + 1| over those near-solutions
    multistart_empty: bool

    @property
    def ok(self) -> bool:
        return (all(s.ok for s in self.steps) and self.multistart_empty
                and self.timelike_margin >= 0.5 and self.grid_min_residual > 0.0)

    def lines(self):
        out = [f"Petrov type {self.ptype}, params {self.params}"]
        out += [f"  [{'ok' if s.ok else 'FAIL'}] {s.claim} (max error {s.error:.1e})" for s in self.steps]
        out.append(f"  timelike grid: min residual/|W| = {self.grid_min_residual:.3e}")
        out.append(f"  unit-sphere near-solutions: {self.near_solutions}, "
                   f"min |<T,T>_L + 1| = {self.timelike_margin:.3f}")
        out.append(f"  multistart timelike search empty: {self.multistart_empty}")
        return out


def covariant_equations(Wf, c) -> dict:
    """``W(T, e_j, e_k, T)`` keyed by 1-based ``(j, k)``, with ``c_i = <T, e_i>_L``.

    Raising the index with ``eta = diag(-1, 1, 1, 1)`` turns these into vector
    coefficients, i.e. only the sign of ``c_1`` changes.
    """
    c = np.asarray(c, dtype=float)
    v = c * np.array([-1.0, 1.0, 1.0, 1.0])[:, None] if c.ndim == 2 else c * np.array([-1.0, 1, 1, 1])
    N = np.einsum("i...,ijkl,l...->jk...", v, np.asarray(Wf), v)
    return {(j + 1, k + 1): N[j, k] for j, k in PAIRS}


def _identity(claim, lhs, rhs, scale):
    err = float(np.max(np.abs(lhs - rhs))) / scale
    return Step(claim, err, err <= 1e-12)


def _sphere_grid(n, seed):
    u = qmc.Sobol(4, scramble=True, seed=seed).random(n)
    x = _erfinv_normal(u)
    return (x / np.linalg.norm(x, axis=1, keepdims=True)).T


def _timelike_grid(n_rho, n_dir, max_rapidity):
    rho = np.linspace(0.0, max_rapidity, n_rho)
    d = qmc.Sobol(3, scramble=False).random(n_dir)
    d = np.vstack([d, np.full((1, 3), 0.5)])
    x = _erfinv_normal(np.clip(d, 1e-9, 1 - 1e-9))
    nrm = np.linalg.norm(x, axis=1, keepdims=True)
    omega = np.where(nrm > 1e-12, x / np.maximum(nrm, 1e-300), np.array([1.0, 0.0, 0.0]))
    R, O = np.meshgrid(rho, np.arange(len(omega)), indexing="ij")
    R, O = R.ravel(), O.ravel()
    vec = np.concatenate([np.cosh(R)[None], np.sinh(R)[None] * omega[O].T], axis=0)
    return vec * np.array([-1.0, 1.0, 1.0, 1.0])[:, None]  # covariant


def exclusion_certificate(ptype: str, lam: float | None = None, mu: float | None = None,
                          grid: int = 2**15, near_tol: float = 1e-2, seed: int = 0) -> ExclusionCertificate:
    """Machine check of why a Type II, N or III operator has no unit timelike annihilator.

    Each step is a polynomial identity between frame contractions (checked at
    random points) or a branch of the case analysis.  The grid sections check
    that the cited equations stay away from zero on unit timelike vectors and
    that their near-zeros on the unit sphere are far from timelike.
    """
    if ptype not in ("II", "N", "III"):
        raise ContractViolation(f"exclusion certificates exist for II, N and III, not {ptype!r}")
    if ptype == "II" and lam is None:
        lam = 0.25
    M = normal_form_matrix(ptype, lam, mu)
    Wf = tensor_from_operator(M, "lorentzian")
    scale = float(np.linalg.norm(Wf))
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(4, 200))
    E = covariant_equations(Wf, c)
    c1, c2, c3, c4 = c
    steps = []
    if ptype == "III":
        cited = [(1, 2), (2, 3)]
        s = np.sqrt(2.0)
        steps.append(_identity("W(T,e1,e2,T) = -(c3^2 - c1 c3 - c4^2)/sqrt2", E[(1, 2)],
                               -(c3**2 - c1 * c3 - c4**2) / s, scale))
        steps.append(_identity("W(T,e2,e3,T) = (c1^2 - c1 c3 + c4^2)/sqrt2", E[(2, 3)],
                               (c1**2 - c1 * c3 + c4**2) / s, scale))
        steps.append(_identity("W(T,e2,e3,T) - W(T,e1,e2,T) = (c1 - c3)^2/sqrt2, forcing c1 = c3 (not timelike)",
                               E[(2, 3)] - E[(1, 2)], (c1 - c3) ** 2 / s, scale))
    else:
        lam = float(lam or 0.0)
        mu = float(mu or 0.0)
        cited = [(3, 4), (3, 3), (2, 4), (4, 4), (2, 3), (2, 2)]
        steps.append(_identity("W(T,e3,e4,T) = -2 lam c3 c4", E[(3, 4)], -2 * lam * c3 * c4, scale))
        E0 = covariant_equations(tensor_from_operator(_kerr2(0.0, mu), "lorentzian"), c)
        steps.append(_identity("lam = 0 branch: W(T,e3,e3,T) = -(c1 - c2)^2 / 2, so c1 = c2 (not timelike)",
                               E0[(3, 3)], -0.5 * (c1 - c2) ** 2, scale))
        if ptype == "II":
            cz = c.copy()
            cz[2] = 0.0
            Ez = covariant_equations(Wf, cz)
            a, b = cz[0], cz[1]
            steps.append(_identity("c3 = 0 branch: W(T,e2,e4,T) = c4 (c1 + (2 lam - 1) c2) / 2",
                                   Ez[(2, 4)], 0.5 * cz[3] * (a + (2 * lam - 1) * b), scale))
            steps.append(_identity("c3 = 0 branch: W(T,e4,e4,T) = (c1 - c2)((2 lam + 1) c1 + (2 lam - 1) c2) / 2",
                                   Ez[(4, 4)], 0.5 * (a - b) * ((2 * lam + 1) * a + (2 * lam - 1) * b), scale))
            czz = cz.copy()
            czz[3] = 0.0
            Ezz = covariant_equations(Wf, czz)
            steps.append(_identity("then c4 = 0 and W(T,e2,e2,T) = -2 lam c1^2, so c1 = 0 (not timelike)",
                                   Ezz[(2, 2)], -2 * lam * czz[0] ** 2, scale))
            cw = c.copy()
            cw[3] = 0.0
            Ew = covariant_equations(Wf, cw)
            a, b = cw[0], cw[1]
            steps.append(_identity("c4 = 0 branch: W(T,e2,e3,T) = -c3 (c1 - (2 lam + 1) c2) / 2",
                                   Ew[(2, 3)], -0.5 * cw[2] * (a - (2 * lam + 1) * b), scale))
            steps.append(_identity("c4 = 0 branch: W(T,e3,e3,T) = -(c1 - c2)((1 - 2 lam) c1 - (1 + 2 lam) c2) / 2",
                                   Ew[(3, 3)], -0.5 * (a - b) * ((1 - 2 * lam) * a - (1 + 2 * lam) * b), scale))
            steps.append(_identity("then c3 = 0 and W(T,e2,e2,T) = -2 lam c1^2, so c1 = 0 (not timelike)",
                                   Ezz[(2, 2)], -2 * lam * czz[0] ** 2, scale))
        else:
            steps.append(_identity("(c1 - c2)^2 = 0 from W(T,e3,e3,T) with lam = mu = 0",
                                   E[(3, 3)], -0.5 * (c1 - c2) ** 2, scale))
    # grid checks on the cited equations
    tg = _timelike_grid(64, 2048, MAX_RAPIDITY)
    Et = covariant_equations(Wf, tg)
    rt = np.max(np.abs(np.stack([Et[k] for k in cited])), axis=0) / scale
    sg = _sphere_grid(grid, seed)
    Es = covariant_equations(Wf, sg)
    rs = np.max(np.abs(np.stack([Es[k] for k in cited])), axis=0) / scale
    near = rs <= near_tol
    ip = -sg[0] ** 2 + sg[1] ** 2 + sg[2] ** 2 + sg[3] ** 2
    margin = float(np.min(np.abs(ip[near] + 1.0))) if np.any(near) else float("inf")
    empty = len(solve_lorentzian(WeylOperator6(M, "lorentzian"), True, SolverConfig(starts=256, seed=seed))) == 0
    params = (ptype,) if ptype in ("III", "N") else (lam, mu)
    return ExclusionCertificate(ptype, params, tuple(steps), float(np.min(rt)), int(np.sum(near)), margin, empty)


def _kerr2(lam, mu):
    return normal_form_matrix("II", lam, mu) if (lam or mu) else normal_form_matrix("N")
