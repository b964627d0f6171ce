"""The Weyl tensor as a 6x6 endomorphism of bivectors.

``build_operator`` uses the inner product of the requested kind:
``<W_hat(E_b), E_a> = W(E_b, E_a)``, so entry ``(a, b)`` is ``sigma_a W(E_a, E_b)``.
A Riemannian Weyl tensor gives ``[[A, B], [B, A]]`` under the Riemannian product
and ``[[-A, -B], [B, A]]`` under the Lorentzian one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.stats import special_ortho_group

from .bivector import (
    BASIS_PAIRS,
    DEFAULT_TOL,
    check_kind,
    hodge_matrix,
    self_dual_basis,
    signature,
    star_commutator,
)
from .curvature import FrameBundle, bridge_at, frame_components, orthonormal_basis
from .errors import ContractViolation


@dataclass(frozen=True)
class WeylOperator6:
    mat: np.ndarray
    induced_kind: str
    frame: FrameBundle | None = None

    def __post_init__(self):
        m = np.array(self.mat, dtype=float)
        if m.shape != (6, 6):
            raise ContractViolation(f"operator must be 6x6, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        check_kind(self.induced_kind)

    def self_adjoint_residual(self) -> float:
        S = np.diag(signature(self.induced_kind)) @ self.mat
        n = np.linalg.norm(self.mat)
        return float(np.linalg.norm(S - S.T) / n) if n else 0.0

    def trace(self) -> float:
        return float(np.trace(self.mat))


def operator_from_frame_tensor(Wf, kind: str) -> np.ndarray:
    """6x6 matrix from frame components ``Wf[a, b, c, d]``."""
    Wf = np.asarray(Wf, dtype=float)
    sigma = signature(kind)
    M = np.empty((6, 6))
    for a, (i, j) in enumerate(BASIS_PAIRS):
        for b, (k, l) in enumerate(BASIS_PAIRS):
            M[a, b] = sigma[a] * Wf[i, j, k, l]
    return M


def tensor_from_operator(M, kind: str) -> np.ndarray:
    """Frame components of the (0,4) tensor whose operator is ``M``."""
    M = np.asarray(M, dtype=float)
    sigma = signature(kind)
    W = np.zeros((4, 4, 4, 4))
    for a, (i, j) in enumerate(BASIS_PAIRS):
        for b, (k, l) in enumerate(BASIS_PAIRS):
            v = sigma[a] * M[a, b]
            W[i, j, k, l] = v
            W[j, i, k, l] = -v
            W[i, j, l, k] = -v
            W[j, i, l, k] = v
    return W


def build_operator(W, fb: FrameBundle, kind: str | None = None) -> WeylOperator6:
    """Operator of the coordinate tensor ``W`` on the bivector basis of ``fb``."""
    kind = check_kind(kind or fb.kind)
    if fb.kind != kind:
        raise ContractViolation(f"frame is {fb.kind} but a {kind} operator was requested")
    Wf = frame_components(np.asarray(W), fb.vectors)
    return WeylOperator6(operator_from_frame_tensor(Wf, kind), kind, fb)


def blocks(op: WeylOperator6):
    """``(A, B)`` read from the top block row according to the operator's kind."""
    M = op.mat
    if op.induced_kind == "riemannian":
        return M[:3, :3].copy(), M[:3, 3:].copy()
    return -M[:3, :3], -M[:3, 3:]


@dataclass(frozen=True)
class Check:
    ok: bool
    residual: float
    scale: float = 1.0

    def __bool__(self):
        return self.ok


def annihilates(W, T, g, tol: float = DEFAULT_TOL) -> Check:
    """Test ``W(T, ., ., T) = 0``.

    ``residual`` is ``max |W(T, e_j, e_k, T)|`` over an orthonormal frame of ``g``;
    the test passes when it is at most ``tol * |W| * |g(T, T)|``.
    """
    g = np.asarray(g, dtype=float)
    T = np.asarray(T, dtype=float)
    neg = int(np.sum(np.linalg.eigvalsh(g) < 0))
    E = orthonormal_basis(g, "riemannian" if neg == 0 else "lorentzian")
    Wf = frame_components(np.asarray(W), E)
    c = np.linalg.solve(E, T)
    N = np.einsum("i,ijkl,l->jk", c, Wf, c)
    residual = float(np.max(np.abs(N)))
    scale = float(np.linalg.norm(Wf)) * abs(float(T @ g @ T))
    return Check(residual <= tol * scale, residual, scale)


def annihilation_residual_frame(Wf, c) -> np.ndarray:
    """4x4 matrix ``W(T, e_j, e_k, T)`` for frame components and frame coefficients ``c``."""
    c = np.asarray(c, dtype=float)
    return np.einsum("i,ijkl,l->jk", c, np.asarray(Wf), c)


def commutes_with_star(op: WeylOperator6, tol: float = DEFAULT_TOL) -> Check:
    r = star_commutator(op.mat, op.induced_kind)
    return Check(r <= tol, r)


def wplus_wminus(op: WeylOperator6):
    """Restrictions to the self-dual and anti-self-dual halves, on the bases (E_k +- E_{k+3})/sqrt 2."""
    if op.induced_kind != "riemannian":
        raise ContractViolation("W+ / W- split needs a Riemannian operator")
    U = self_dual_basis()
    D = U.T @ op.mat @ U
    return D[:3, :3], D[3:, 3:]


def curvature_operator(Rm, fb: FrameBundle, kind: str | None = None) -> np.ndarray:
    """6x6 matrix of the curvature operator, same pairing as :func:`build_operator`."""
    return build_operator(Rm, fb, kind).mat


def weyl_from_curvature_operator(R6, scal: float, kind: str = "riemannian") -> np.ndarray:
    """``1/2 (R + star R star^-1) + scal/12 I``; for Riemannian kind ``star^-1 = star``."""
    S = hodge_matrix(kind)
    Sinv = S if check_kind(kind) == "riemannian" else -S
    R6 = np.asarray(R6, dtype=float)
    return 0.5 * (R6 + S @ R6 @ Sinv) + (scal / 12.0) * np.eye(6)


# Synthetic tensors for property tests.

def random_traceless_symmetric(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(size=(3, 3)) * scale
    X = 0.5 * (X + X.T)
    return X - np.trace(X) / 3.0 * np.eye(3)


def synthetic_weyl_matrix(rng: np.random.Generator, a_zero: bool = False, A=None, B=None) -> np.ndarray:
    """Riemannian ``[[A, B], [B, A]]`` with A, B symmetric and trace-free."""
    if A is None:
        A = np.zeros((3, 3)) if a_zero else random_traceless_symmetric(rng)
    if B is None:
        B = random_traceless_symmetric(rng)
    return np.block([[A, B], [B, A]])


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return special_ortho_group.rvs(4, random_state=rng)


def random_lorentz(rng: np.random.Generator, rapidity: float = 1.0) -> np.ndarray:
    """Proper orthochronous Lorentz transformation for diag(-1, 1, 1, 1).

    A random spatial rotation followed by a boost along a random direction with
    rapidity uniform in ``[0, rapidity]``; the condition number is at most ``e^(2 rapidity)``.
    """
    eta = rapidity * rng.uniform()
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    K = np.zeros((4, 4))
    K[0, 1:] = n
    K[1:, 0] = n
    R = np.eye(4)
    R[1:, 1:] = special_ortho_group.rvs(3, random_state=rng)
    return expm(eta * K) @ R


def lambda2_action(Q) -> np.ndarray:
    """6x6 matrix of the induced map ``v ^ w -> Qv ^ Qw`` on the ordered basis."""
    Q = np.asarray(Q, dtype=float)
    L = np.empty((6, 6))
    for b, (k, l) in enumerate(BASIS_PAIRS):
        u, v = Q[:, k], Q[:, l]
        for a, (i, j) in enumerate(BASIS_PAIRS):
            L[a, b] = u[i] * v[j] - u[j] * v[i]
    return L


def reframe(M, kind: str, L) -> np.ndarray:
    """Operator matrix after changing frame to the columns of ``L`` (written in the old frame)."""
    Wf = frame_components(tensor_from_operator(M, kind), np.asarray(L, dtype=float))
    return operator_from_frame_tensor(Wf, kind)


def bridge_operator(W, g, T, kind: str, orientation: int = 1):
    """Operator of ``W`` under the signature-flipped metric built from the unit vector ``T``.

    Returns ``(op, g_flipped, E)`` where ``E`` is orthonormal for the flipped
    metric with ``e_1 = T``.  ``kind`` is the signature of ``g``.
    """
    g = np.asarray(g, dtype=float)
    T = np.asarray(T, dtype=float)
    target = 1.0 if check_kind(kind) == "riemannian" else -1.0
    norm = float(T @ g @ T)
    if abs(norm - target) > 1e-9 * max(1.0, float(T @ T)):
        raise ContractViolation(f"T must satisfy g(T, T) = {target:+g}, got {norm:.12g}",
                                residual=abs(norm - target))
    other = "lorentzian" if kind == "riemannian" else "riemannian"
    gb = bridge_at(g, T, kind)
    E = orthonormal_basis(gb, other, first=T, orientation=orientation)
    Wf = frame_components(np.asarray(W), E)
    return WeylOperator6(operator_from_frame_tensor(Wf, other), other), gb, E
