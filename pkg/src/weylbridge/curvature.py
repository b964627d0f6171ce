"""Pointwise curvature: Christoffel symbols, Riemann, Ricci, Kulkarni-Nomizu, Weyl.

Sign conventions
----------------
``Rm(v, w, x, y) = g(R(v, w) x, y)`` with ``R(v, w) = [nabla_v, nabla_w] - nabla_[v,w]``,
so ``Rm(v, w, w, v)`` is the sectional curvature of an orthonormal pair.  The
Kulkarni-Nomizu product is

    (h o k)_ijkl = h_il k_jk + h_jk k_il - h_ik k_jl - h_jl k_ik,

which gives ``Rm = (K/2) g o g`` in constant curvature ``K`` and makes
``W = Rm - 1/2 Ric o g + scal/12 g o g`` vanish there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bivector import Frame, check_kind
from .chart import MetricChart, bridge_metric, metric_jets  # noqa: F401  (re-exported)
from .errors import ContractViolation, EvaluationDomainError


@dataclass(frozen=True)
class Curvature4Tensor:
    """Dense (0,4) tensor; ``kind`` is one of ``riemann``, ``weyl``, ``kn-product``."""

    comps: np.ndarray
    kind: str = "riemann"

    def __array__(self, dtype=None, copy=None):
        return self.comps if dtype is None else self.comps.astype(dtype)

    def norm(self) -> float:
        return float(np.linalg.norm(self.comps))

    def symmetry_residual(self, scale: float = 0.0) -> float:
        """Largest violation of antisymmetry, pair symmetry and first Bianchi.

        Relative to ``max(norm, scale)``; pass the Riemann norm as ``scale`` when
        this tensor may vanish up to roundoff.
        """
        R = self.comps
        ref = max(self.norm(), scale)
        bianchi = R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))
        worst = max(
            np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3)))),
            np.max(np.abs(R + np.transpose(R, (0, 1, 3, 2)))),
            np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))),
            np.max(np.abs(bianchi)),
        )
        return float(worst / ref) if ref > 0 else 0.0

    def trace_residual(self, g, scale: float = 0.0) -> float:
        """Largest metric contraction over any index pair, relative to ``max(norm, scale)``."""
        ginv = np.linalg.inv(np.asarray(g, dtype=float))
        R = self.comps
        traces = [
            np.einsum("ik,ijkl->jl", ginv, R),
            np.einsum("il,ijkl->jk", ginv, R),
            np.einsum("jk,ijkl->il", ginv, R),
            np.einsum("jl,ijkl->ik", ginv, R),
        ]
        worst = max(np.max(np.abs(t)) for t in traces)
        ref = max(self.norm(), scale)
        return float(worst / ref) if ref > 0 else 0.0


@dataclass(frozen=True)
class FrameBundle:
    """An orthonormal frame at a point, with the metric it is orthonormal for."""

    point: np.ndarray
    frame: Frame
    g: np.ndarray

    @property
    def kind(self):
        return self.frame.kind

    @property
    def vectors(self):
        return self.frame.vectors


def christoffel(g, dg) -> np.ndarray:
    """``Gamma[k, i, j]`` = Christoffel symbol of the second kind."""
    g = np.asarray(g, dtype=float)
    if abs(np.linalg.det(g)) < 1e-12:
        raise EvaluationDomainError("singular metric")
    ginv = np.linalg.inv(g)
    first = 0.5 * (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg)
    return np.einsum("kl,lij->kij", ginv, first)


def _christoffel_derivative(g, dg, ddg):
    """``dGamma[m, k, i, j] = d_m Gamma^k_ij``."""
    ginv = np.linalg.inv(g)
    first = 0.5 * (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg)
    dfirst = 0.5 * (
        np.einsum("milj->mlij", ddg) + np.einsum("mjli->mlij", ddg) - ddg
    )
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    return np.einsum("mkl,lij->mkij", dginv, first) + np.einsum("kl,mlij->mkij", ginv, dfirst)


def riemann(g, dg, ddg) -> Curvature4Tensor:
    g = np.asarray(g, dtype=float)
    gam = christoffel(g, dg)
    dgam = _christoffel_derivative(g, dg, ddg)
    # R[i, j, k, l] = R_ijk^l for R(d_i, d_j) d_k
    R = (
        np.einsum("iljk->ijkl", dgam)
        - np.einsum("jlik->ijkl", dgam)
        + np.einsum("mjk,lim->ijkl", gam, gam)
        - np.einsum("mik,ljm->ijkl", gam, gam)
    )
    return Curvature4Tensor(np.einsum("lm,ijkm->ijkl", g, R), "riemann")


def ricci_scalar(Rm, g):
    g = np.asarray(g, dtype=float)
    ginv = np.linalg.inv(g)
    ric = np.einsum("il,ijkl->jk", ginv, np.asarray(Rm))
    ric = 0.5 * (ric + ric.T)
    return ric, float(np.einsum("jk,jk->", ginv, ric))


def kulkarni_nomizu(h, k) -> Curvature4Tensor:
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    out = (
        np.einsum("il,jk->ijkl", h, k)
        + np.einsum("jk,il->ijkl", h, k)
        - np.einsum("ik,jl->ijkl", h, k)
        - np.einsum("jl,ik->ijkl", h, k)
    )
    return Curvature4Tensor(out, "kn-product")


def weyl(Rm, Ric, scal, g) -> Curvature4Tensor:
    g = np.asarray(g, dtype=float)
    W = (
        np.asarray(Rm)
        - 0.5 * kulkarni_nomizu(Ric, g).comps
        + (scal / 12.0) * kulkarni_nomizu(g, g).comps
    )
    return Curvature4Tensor(W, "weyl")


@dataclass(frozen=True)
class PointCurvature:
    point: np.ndarray
    g: np.ndarray
    christoffel: np.ndarray
    riemann: Curvature4Tensor
    ricci: np.ndarray
    scal: float
    weyl: Curvature4Tensor


def curvature_at(chart: MetricChart, point) -> PointCurvature:
    """Run the whole pipeline at one point."""
    g, dg, ddg = metric_jets(chart, point)
    Rm = riemann(g, dg, ddg)
    ric, scal = ricci_scalar(Rm, g)
    return PointCurvature(np.asarray(point, dtype=float), g, christoffel(g, dg), Rm, ric, scal, weyl(Rm, ric, scal, g))


def orthonormal_basis(g, kind, first=None, orientation=1) -> np.ndarray:
    """Gram-Schmidt on the coordinate basis; columns are the frame vectors.

    Lorentzian frames start from a timelike vector: ``first`` if given, else
    the first coordinate vector with ``g_ii < 0``, else a negative eigenvector
    of ``g``.  Orientation is fixed by swapping the last two vectors.
    """
    g = np.asarray(g, dtype=float)
    check_kind(kind)
    target = [1.0, 1.0, 1.0, 1.0] if kind == "riemannian" else [-1.0, 1.0, 1.0, 1.0]
    cands = [np.eye(4)[:, i] for i in range(4)]
    start = None
    if first is not None:
        start = np.asarray(first, dtype=float)
    elif kind == "lorentzian":
        neg = [i for i in range(4) if g[i, i] < 0]
        if neg:
            start = cands[neg[0]].copy()
        else:
            w, v = np.linalg.eigh(g)
            start = v[:, 0]
    if start is not None:
        cands = [start] + cands
    scale = max(np.max(np.abs(g)), 1e-300)
    basis = []
    for v in cands:
        if len(basis) == 4:
            break
        u = v.copy()
        for e, s in zip(basis, target):
            u = u - s * (e @ g @ u) * e
        n2 = float(u @ g @ u)
        if abs(n2) <= 1e-10 * scale * float(u @ u) or float(u @ u) < 1e-24:
            if v is start:
                raise ContractViolation("requested first frame vector is null or zero")
            continue
        want = target[len(basis)]
        if np.sign(n2) != np.sign(want):
            if v is start or kind == "riemannian" or len(basis) > 0:
                raise ContractViolation(
                    f"signature mismatch while normalizing frame vector {len(basis) + 1} (g(u,u) = {n2:.3e})"
                )
            continue
        basis.append(u / np.sqrt(abs(n2)))
    if len(basis) != 4:
        raise ContractViolation("could not build an orthonormal frame (degenerate metric?)")
    E = np.column_stack(basis)
    if np.sign(np.linalg.det(E)) != np.sign(orientation):
        E[:, [2, 3]] = E[:, [3, 2]]
    return E


def orthonormal_frame(chart: MetricChart, point, first=None, kind=None) -> FrameBundle:
    """Oriented orthonormal frame of ``chart`` at ``point``; ``first`` optionally becomes ``e1``."""
    kind = kind or chart.signature
    g = metric_jets(chart, point)[0]
    E = orthonormal_basis(g, kind, first, chart.orientation)
    frame = Frame(E, kind)
    frame.check(g, chart.orientation)
    return FrameBundle(np.asarray(point, dtype=float), frame, g)


def frame_components(W, E) -> np.ndarray:
    """Components of a (0,4) tensor on the frame whose vectors are the columns of ``E``."""
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", np.asarray(W), E, E, E, E, optimize=True)


def bridge_at(g, T, kind) -> np.ndarray:
    """Pointwise bridge: ``g -+ 2 T_flat T_flat`` with ``T_flat = g T``."""
    g = np.asarray(g, dtype=float)
    flat = g @ np.asarray(T, dtype=float)
    sign = -2.0 if check_kind(kind) == "riemannian" else 2.0
    return g + sign * np.outer(flat, flat)
