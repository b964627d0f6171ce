"""Quadratic forms of the Weyl operator on 2-planes, their critical points and normal forms.

Riemannian: ``P -> <W P, P>`` on unit decomposable bivectors.  Lorentzian:
``P -> eps(P) <W P, P>_L`` on non-null planes, with ``eps = sign <P, P>_L``.
A plane is critical exactly when ``W P = a P + b *P`` for reals ``a, b``; for a
star-commuting Lorentzian operator that is a complex eigenline of the 3x3 map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.spatial.transform import Rotation
from scipy.stats import qmc

from .annihilator import NormalFormParams
from .bivector import (
    BASIS_PAIRS,
    hodge_matrix,
    ip_lambda2,
    plucker,
    self_dual_basis,
    signature,
    star_commutator,
    to_complex,
    wedge,
)
from .errors import ContractViolation
from .lm import batched_lm
from .petrov import ComplexWeyl3, canonical_eigenplanes, classify
from .weylop import WeylOperator6, lambda2_action

INF = math.inf


def _matrix(op):
    return op.mat if isinstance(op, WeylOperator6) else np.asarray(op, dtype=float)


def _check_plane(P, tol):
    P = np.asarray(P, dtype=float)
    n2 = float(P @ P)
    if P.shape != (6,) or n2 == 0.0:
        raise ContractViolation("a 2-plane is a nonzero 6-component bivector")
    if abs(plucker(P)) > tol * n2:
        raise ContractViolation(f"bivector is not decomposable (Plucker residual {abs(plucker(P)) / n2:.3e})")
    return P


def riemannian_form(op, P, tol: float = 1e-9) -> float:
    """``<W P, P>`` for the plane ``P`` (rescaled to unit length)."""
    if isinstance(op, WeylOperator6) and op.induced_kind != "riemannian":
        raise ContractViolation("riemannian_form needs a Riemannian operator")
    P = _check_plane(P, tol)
    P = P / math.sqrt(float(P @ P))
    return float(P @ _matrix(op) @ P)


def lorentz_form(op, P, tol: float = 1e-9) -> float:
    """``eps(P) <W P, P>_L`` for a non-null plane, rescaled so ``|<P, P>_L| = 1``."""
    if isinstance(op, WeylOperator6) and op.induced_kind != "lorentzian":
        raise ContractViolation("lorentz_form needs a Lorentzian operator")
    P = _check_plane(P, tol)
    q = ip_lambda2(P, P, "lorentzian")
    if abs(q) <= tol * float(P @ P):
        raise ContractViolation("lightlike (degenerate) plane: the Lorentzian form is undefined there")
    P = P / math.sqrt(abs(q))
    return float(np.sign(q) * (P @ (signature("lorentzian") * (_matrix(op) @ P))))


def causal_class(P, tol: float = 1e-9) -> str:
    P = np.asarray(P, dtype=float)
    q = ip_lambda2(P, P, "lorentzian")
    if abs(q) <= tol * float(P @ P):
        return "lightlike"
    return "spacelike" if q > 0 else "timelike"


def lagrange_fit(M, P, kind: str = "lorentzian"):
    """Least-squares ``(a, b)`` in ``M P = a P + b *P`` and the residual norm."""
    M = np.asarray(M, dtype=float)
    P = np.asarray(P, dtype=float)
    S = hodge_matrix(kind)
    basis = np.column_stack([P, S @ P])
    target = M @ P
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return float(coef[0]), float(coef[1]), float(np.linalg.norm(target - basis @ coef))


@dataclass(frozen=True)
class CriticalPoint:
    plane: np.ndarray
    value: float
    lagrange: tuple
    causal: str
    residual: float = 0.0


def critical_point(op: WeylOperator6, P, tol: float = 1e-7) -> CriticalPoint:
    """Package ``P`` as a critical point, checking the characterization ``W P = a P + b *P``."""
    M = _matrix(op)
    kind = op.induced_kind if isinstance(op, WeylOperator6) else "lorentzian"
    P = np.asarray(P, dtype=float)
    if kind == "lorentzian":
        q = ip_lambda2(P, P, kind)
        P = P / math.sqrt(abs(q)) if q != 0 else P
        value = lorentz_form(op, P) if abs(q) > 1e-9 * float(P @ P) else float("nan")
    else:
        P = P / math.sqrt(float(P @ P))
        value = riemannian_form(op, P)
    a, b, res = lagrange_fit(M, P, kind)
    if res > tol * max(np.linalg.norm(M), 1e-300):
        raise ContractViolation("plane is not critical", residual=res)
    return CriticalPoint(P, value, (a, b), causal_class(P) if kind == "lorentzian" else "spacelike", res)


@dataclass(frozen=True)
class CriticalCount:
    count: float  # 0, 1, 3 or math.inf
    witnesses: tuple
    petrov: str
    borderline: bool
    oracle: float | None = None

    @property
    def label(self) -> str:
        return "inf" if self.count == INF else str(int(self.count))

    @property
    def agrees(self) -> bool:
        return self.oracle is None or self.oracle == self.count


def count_spacelike_critical_points(op: WeylOperator6, oracle: bool = False, seed: int = 0,
                                    commute_tol: float = 1e-9, cw: ComplexWeyl3 | None = None) -> CriticalCount:
    """Number of spacelike critical planes of the Lorentzian form, counted as complex eigenlines.

    A cluster whose eigenspace has dimension >= 2 and contains a spacelike
    direction gives infinitely many; a one-dimensional spacelike eigenline gives one.
    """
    if op.induced_kind != "lorentzian":
        raise ContractViolation("critical-point counting needs a Lorentzian operator")
    r = star_commutator(op.mat, "lorentzian")
    if r > commute_tol:
        raise ContractViolation("operator does not commute with the Lorentzian Hodge star", residual=r)
    cw = cw or classify(op)
    planes = canonical_eigenplanes(cw)
    count = 0.0
    witnesses = []
    for c in cw.clusters:
        mine = [p for p in planes if p.eigenvalue == c.eigenvalue]
        space = [p for p in mine if p.causal == "spacelike"]
        if not space:
            continue
        count += INF if c.geometric >= 2 else 1
        witnesses += [critical_point(op, p.bivector) for p in space]
    found = search_critical_points(op, seed=seed) if oracle else None
    return CriticalCount(count, tuple(witnesses), cw.petrov, cw.borderline, found)


def search_critical_points(op: WeylOperator6, starts: int = 256, seed: int = 0, max_norm: float = 1e3,
                           tol: float = 1e-9, null_tol: float = 1e-6) -> float:
    """Independent count by multistart search over ``<P, P>_L = 1``, ``<P, *P>_L = 0``.

    Unknowns are ``(P, a, b)``; residual rows are ``M P - a P - b *P`` and the
    two constraints.  Planes with Euclidean norm above ``max_norm`` are ignored.
    """
    M = np.asarray(op.mat, dtype=float)
    n = float(np.linalg.norm(M))
    if n <= 1e-12:
        return INF
    M = M / n
    S = hodge_matrix("lorentzian")
    sig = signature("lorentzian")
    SP = sig[:, None] * S  # <x, *y>_L = x @ SP @ y, symmetric
    eye6 = np.eye(6)

    def fun(x):
        P, a, b = x[:, :6], x[:, 6], x[:, 7]
        SPv = P @ S.T
        r1 = P @ M.T - a[:, None] * P - b[:, None] * SPv
        q1 = np.sum(sig * P * P, axis=1) - 1.0
        q2 = np.einsum("bi,ij,bj->b", P, SP, P)
        r = np.concatenate([r1, q1[:, None], q2[:, None]], axis=1)
        J = np.zeros((len(x), 8, 8))
        J[:, :6, :6] = M[None] - a[:, None, None] * eye6 - b[:, None, None] * S[None]
        J[:, :6, 6] = -P
        J[:, :6, 7] = -SPv
        J[:, 6, :6] = 2.0 * sig * P
        J[:, 7, :6] = 2.0 * P @ SP
        return r, J

    u = qmc.Sobol(8, scramble=True, seed=seed).random(starts)
    x0 = 4.0 * u - 2.0
    x, cost = batched_lm(fun, x0, iters=120)
    P = x[:, :6]
    ok = (cost <= tol**2) & (np.linalg.norm(P, axis=1) <= max_norm)
    lines = []
    for p, (a, b) in zip(P[ok], x[ok, 6:8]):
        z = to_complex(p)
        if abs(np.sum(z * z)) <= null_tol * float(np.vdot(z, z).real):
            continue
        z = z / np.linalg.norm(z)
        if all(abs(np.vdot(w, z)) < 1 - 1e-6 for w, _ in lines):
            lines.append((z, complex(a, b)))
    # two independent lines sharing an eigenvalue span a whole family
    for i, (z, k) in enumerate(lines):
        for w, k2 in lines[i + 1:]:
            if abs(k - k2) <= 1e-6:
                return INF
    return float(len(lines))


# Berger-Thorpe normal form.

_SKEW = [(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (3, 2)]


def _derivation(Y) -> np.ndarray:
    """Matrix of ``v ^ w -> Yv ^ w + v ^ Yw`` on the ordered bivector basis."""
    D = np.empty((6, 6))
    e = np.eye(4)
    for b, (k, l) in enumerate(BASIS_PAIRS):
        D[:, b] = wedge(Y[:, k], e[:, l]) + wedge(e[:, k], Y[:, l])
    return D


def _so3_coords(S):
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def _lift_matrix():
    """Linear map from so(4) coordinates to the (so(3) + so(3)) coordinates of its Lambda^2 action."""
    U = self_dual_basis()
    cols = []
    for i, j in _SKEW:
        Y = np.zeros((4, 4))
        Y[i, j], Y[j, i] = 1.0, -1.0
        D = U.T @ _derivation(Y) @ U
        cols.append(np.concatenate([_so3_coords(D[:3, :3]), _so3_coords(D[3:, 3:])]))
    return np.column_stack(cols)


_LIFT = _lift_matrix()


def lift_rotations(Rp, Rm) -> np.ndarray:
    """A rotation ``Q`` of R^4 whose induced action is ``Rp`` on self-dual and ``Rm`` on anti-self-dual bivectors."""
    wp = Rotation.from_matrix(Rp).as_rotvec()
    wm = Rotation.from_matrix(Rm).as_rotvec()
    y = np.linalg.solve(_LIFT, np.concatenate([wp, wm]))
    Y = np.zeros((4, 4))
    for (i, j), v in zip(_SKEW, y):
        Y[i, j], Y[j, i] = v, -v
    return expm(Y)


def _eigh_rotation(S, descending=True):
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(-w if descending else w, kind="stable")
    w, V = w[order], V[:, order]
    flip = 1
    if np.linalg.det(V) < 0:
        V[:, 2] = -V[:, 2]
        flip = -1
    return w, V, flip


@dataclass(frozen=True)
class BergerThorpeForm:
    rotation: np.ndarray  # 4x4, columns are the normal-form frame in the old frame
    params: NormalFormParams
    plane_signs: tuple  # sign flips applied to the third eigenvector of W+ and W-
    alpha: np.ndarray  # eigenvalues of W+, in pairing order
    beta: np.ndarray  # eigenvalues of W-, in pairing order
    normal: np.ndarray  # conjugated 6x6 operator
    pattern_residual: float = 0.0
    notes: tuple = field(default_factory=tuple)

    def reconstruct(self) -> np.ndarray:
        L = lambda2_action(self.rotation)
        return L @ self.params.operator_matrix() @ L.T


def berger_thorpe_normal_form(op, pairing: str = "descending", tol: float = 1e-9) -> BergerThorpeForm:
    """Rotate the frame so a star-commuting Riemannian operator becomes ``[[diag lam, diag mu], [diag mu, diag lam]]``.

    ``pairing`` chooses which eigenvalue of W- goes with each eigenvalue of W+:
    ``"descending"`` sorts both descending, ``"opposite"`` sorts W- ascending.
    """
    if isinstance(op, WeylOperator6) and op.induced_kind != "riemannian":
        raise ContractViolation("the Berger-Thorpe form needs a Riemannian operator")
    M = _matrix(op)
    if M.shape != (6, 6):
        raise ContractViolation(f"expected a 6x6 operator, got {M.shape}")
    if pairing not in ("descending", "opposite"):
        raise ContractViolation(f"pairing must be 'descending' or 'opposite', got {pairing!r}")
    r = star_commutator(M, "riemannian")
    if r > tol:
        raise ContractViolation("operator does not commute with the Riemannian Hodge star", residual=r)
    n = float(np.linalg.norm(M))
    if n > 0 and np.linalg.norm(M - M.T) > tol * n:
        raise ContractViolation("operator is not self-adjoint", residual=float(np.linalg.norm(M - M.T) / n))
    U = self_dual_basis()
    D = U.T @ M @ U
    alpha, Rp, sp = _eigh_rotation(D[:3, :3], True)
    beta, Rm, sm = _eigh_rotation(D[3:, 3:], pairing == "descending")
    Q = lift_rotations(Rp, Rm)
    L = lambda2_action(Q)
    N = L.T @ M @ L
    lam = 0.5 * (alpha + beta)
    mu = 0.5 * (alpha - beta)
    params = NormalFormParams(lam - lam.mean(), mu - mu.mean())
    scale = max(n, 1e-300)
    pattern = float(np.linalg.norm(N - params.operator_matrix()) / scale) if n > 0 else 0.0
    return BergerThorpeForm(Q, params, (sp, sm), alpha, beta, N, pattern)


@dataclass(frozen=True)
class BridgeRecovery:
    form: BergerThorpeForm
    a_block_residual: float
    reconstruction_error: float


def lorentz_weyl_via_riemann_bridge(opT, tol: float = 1e-8) -> BridgeRecovery:
    """Normal form of a Lorentzian Weyl tensor read through its Riemannian bridge operator.

    ``opT`` is ``[[A, B], [B, -A]]`` in a frame starting with the annihilating T.
    ``A = O`` is required; the W+ and W- spectra are then opposite, and pairing
    them oppositely keeps ``A = O`` in the normal form.
    """
    M = _matrix(opT)
    n = float(np.linalg.norm(M))
    a = float(np.linalg.norm(M[:3, :3]) / n) if n > 0 else 0.0
    if a > tol:
        raise ContractViolation("A-block is nonzero: T does not annihilate the Weyl tensor", residual=a)
    form = berger_thorpe_normal_form(M, pairing="opposite", tol=max(tol, 1e-9))
    err = float(np.linalg.norm(form.reconstruct() - M) / n) if n > 0 else 0.0
    a_out = float(np.max(np.abs(form.normal[:3, :3])) / n) if n > 0 else 0.0
    return BridgeRecovery(form, a_out, err)
