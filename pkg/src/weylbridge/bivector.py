"""Linear algebra of the six-dimensional space of bivectors of a 4-space.

Every 6-vector and 6x6 matrix in the package is written on the ordered basis

    e1^e2, e1^e3, e1^e4, e3^e4, e4^e2, e2^e3

of an orthonormal frame ``{e1, e2, e3, e4}``.  For a Lorentzian frame ``e1`` is
the timelike vector, so the first three basis bivectors are timelike planes.

Complex structure
-----------------
When ``kind == "lorentzian"`` the Hodge star squares to ``-1`` and makes the
bivectors a 3-dimensional complex space with ``i * xi := star(xi)``.  Complex
coordinates are taken on the first basis triple ``E1, E2, E3``: a real bivector

    xi = sum_k a_k E_k + sum_k b_k star(E_k)

has coordinates ``z_k = a_k + i b_k``.  Because ``star(E_k) = -E_{k+3}`` the
second real triple enters with a sign flip: ``z = xi[:3] - 1j * xi[3:]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ContractViolation

Kind = Literal["riemannian", "lorentzian"]
KINDS = ("riemannian", "lorentzian")

#: Index pairs (0-based) of the ordered bivector basis.
BASIS_PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))

DEFAULT_TOL = 1e-9
DEGENERATE = 0

_O = np.zeros((3, 3))
_I = np.eye(3)
STAR_R = np.block([[_O, _I], [_I, _O]])
STAR_L = np.block([[_O, _I], [-_I, _O]])
SIGMA_R = np.ones(6)
SIGMA_L = np.array([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0])


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ContractViolation(f"unknown metric kind {kind!r}; expected one of {KINDS}")
    return kind


def signature(kind: str) -> np.ndarray:
    """Diagonal of the induced inner product on the ordered basis."""
    return (SIGMA_R if check_kind(kind) == "riemannian" else SIGMA_L).copy()


def vector_signature(kind: str) -> np.ndarray:
    return np.array([1.0, 1, 1, 1]) if check_kind(kind) == "riemannian" else np.array([-1.0, 1, 1, 1])


def hodge_matrix(kind: str) -> np.ndarray:
    return (STAR_R if check_kind(kind) == "riemannian" else STAR_L).copy()


def ip_lambda2(xi, eta, kind: str) -> float:
    """Induced inner product of two bivectors written on the same frame."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return float(np.sum(signature(kind) * xi * eta))


def hodge(xi, kind: str) -> np.ndarray:
    return hodge_matrix(kind) @ np.asarray(xi, dtype=float)


def sd_split(xi):
    """Split into self-dual and anti-self-dual parts (Riemannian star)."""
    xi = np.asarray(xi, dtype=float)
    star = STAR_R @ xi
    return 0.5 * (xi + star), 0.5 * (xi - star)


def self_dual_basis() -> np.ndarray:
    """Orthogonal 6x6 matrix whose columns span Lambda+ (first 3) and Lambda- (last 3)."""
    s = 1.0 / np.sqrt(2.0)
    return np.block([[s * _I, s * _I], [s * _I, -s * _I]])


def wedge(u, v) -> np.ndarray:
    """Components of ``u ^ v`` for frame-coefficient vectors ``u, v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.array([u[i] * v[j] - u[j] * v[i] for i, j in BASIS_PAIRS])


def plucker(xi) -> float:
    """Plucker quadric; zero exactly on decomposable bivectors (xi ^ xi = 2 * plucker * dV)."""
    xi = np.asarray(xi, dtype=float)
    return float(xi[0] * xi[3] + xi[1] * xi[4] + xi[2] * xi[5])


def is_decomposable(xi, tol: float = DEFAULT_TOL) -> bool:
    xi = np.asarray(xi, dtype=float)
    return abs(plucker(xi)) <= tol * max(float(xi @ xi), 1e-300)


def to_complex(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return xi[:3] - 1j * xi[3:]


def from_complex(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, -z.imag])


def ggL(xi, eta) -> complex:
    """Complex scalar product <xi, eta>_L - i <xi, star_L eta>_L.

    Complex bilinear (not Hermitian).  In complex coordinates it is minus the
    plain bilinear dot product, which is what this evaluates.
    """
    return complex(-np.sum(to_complex(xi) * to_complex(eta)))


def ggL_complex(z, w) -> complex:
    """``ggL`` evaluated directly on complex coordinate vectors."""
    return complex(-np.sum(np.asarray(z) * np.asarray(w)))


def star_commutator(M, kind: str = "lorentzian") -> float:
    """Relative Frobenius norm of ``M star - star M``."""
    M = np.asarray(M, dtype=float)
    S = hodge_matrix(kind)
    norm = np.linalg.norm(M)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(M @ S - S @ M) / norm)


def complexify(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """3x3 complex matrix of a real 6x6 map commuting with the Lorentzian star.

    A map commuting with ``star_L`` has the block form ``[[P, Q], [-Q, P]]`` and
    acts on complex coordinates as ``P + iQ``.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (6, 6):
        raise ContractViolation(f"expected a 6x6 matrix, got shape {M.shape}")
    residual = star_commutator(M)
    if residual > tol:
        raise ContractViolation(
            f"matrix does not commute with the Lorentzian Hodge star (relative residual {residual:.3e})",
            residual=residual,
        )
    P = 0.5 * (M[:3, :3] + M[3:, 3:])
    Q = 0.5 * (M[:3, 3:] - M[3:, :3])
    return P + 1j * Q


def realify(C) -> np.ndarray:
    """Inverse of :func:`complexify`."""
    C = np.asarray(C, dtype=complex)
    P, Q = C.real, C.imag
    return np.block([[P, Q], [-Q, P]])


def plane_sign(P, kind: str, tol: float = DEFAULT_TOL) -> int:
    """Sign of a 2-plane: +1 spacelike, -1 timelike, ``DEGENERATE`` (0) lightlike."""
    P = np.asarray(P, dtype=float)
    if not is_decomposable(P, tol):
        raise ContractViolation(f"bivector is not decomposable (plucker residual {plucker(P):.3e})")
    norm2 = float(P @ P)
    if norm2 == 0.0:
        raise ContractViolation("zero bivector is not a plane")
    q = ip_lambda2(P, P, kind) / norm2
    if check_kind(kind) == "lorentzian":
        cross = ip_lambda2(P, hodge(P, kind), kind) / norm2
        if abs(q) <= tol and abs(cross) <= tol:
            return DEGENERATE
    return 1 if q > 0 else -1


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame; ``vectors[:, a]`` is ``e_{a+1}`` in chart coordinates.

    For ``kind == "lorentzian"`` the timelike vector is ``vectors[:, 0]``.
    """

    vectors: np.ndarray
    kind: str = "riemannian"
    timelike_index: int | None = None

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=float)
        if vecs.shape != (4, 4):
            raise ContractViolation(f"a frame needs 4 vectors in 4 coordinates, got {vecs.shape}")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        check_kind(self.kind)
        if self.kind == "lorentzian":
            object.__setattr__(self, "timelike_index", 0)

    def gram(self, g) -> np.ndarray:
        return self.vectors.T @ np.asarray(g, dtype=float) @ self.vectors

    def gram_residual(self, g) -> float:
        return float(np.max(np.abs(self.gram(g) - np.diag(vector_signature(self.kind)))))

    def check(self, g, orientation: int = 1, tol: float = 1e-10) -> None:
        """Raise unless the frame is orthonormal for ``g`` and oriented."""
        res = self.gram_residual(g)
        if res > tol:
            raise ContractViolation(f"frame is not orthonormal (Gram residual {res:.3e})", residual=res)
        if np.sign(np.linalg.det(self.vectors)) != np.sign(orientation):
            raise ContractViolation("frame is not oriented")

    def with_kind(self, kind: str) -> "Frame":
        return Frame(self.vectors, kind)

    def bivector_basis(self) -> np.ndarray:
        """6 x 4 x 4 array: the ordered basis bivectors as antisymmetric coordinate tensors."""
        E = self.vectors
        out = np.empty((6, 4, 4))
        for a, (i, j) in enumerate(BASIS_PAIRS):
            out[a] = np.outer(E[:, i], E[:, j]) - np.outer(E[:, j], E[:, i])
        return out
