"""Petrov classification of a Weyl operator viewed as a complex 3x3 map.

The type is fixed by the number of linearly independent eigenvectors and the
number of distinct eigenvalues::

    I  = (3, 3)    D = (3, 2)    II = (2, 2)    N = (2, 1)    III = (1, 1)

plus ``O`` for the zero operator.

Jordan structure is discontinuous, so every decision is made against explicit
thresholds.  Eigenvalues returned by a dense eigensolver split a size-k Jordan
block by roughly ``eps**(1/k) * |M|``, which is far wider than any sensible
clustering radius.  Two eigenvalues are therefore merged when they are within
``cluster_radius`` *or* when the Cayley-Hamilton residual of the merged
multiplicities, ``|prod_c (M - mean_c)^(m_c)| / |M|^3``, is below ``ch_tol``.
Geometric multiplicity is ``3 - rank(M - mean)`` at singular-value threshold
``rank_tol * |M|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .bivector import complexify, from_complex, ggL_complex, realify
from .errors import ContractViolation
from .weylop import WeylOperator6

TYPES = ("I", "D", "II", "N", "III", "O")
ZERO_NORM = 1e-12
CH_TOL = 1e-8
RANK_TOL = 1e-7

_TABLE = {(3, 3): "I", (3, 2): "D", (2, 2): "II", (2, 1): "N", (1, 1): "III"}


@dataclass(frozen=True)
class Cluster:
    eigenvalue: complex
    algebraic: int
    geometric: int
    eigenspace: np.ndarray  # 3 x geometric, complex coordinates


@dataclass(frozen=True)
class ComplexWeyl3:
    mat: np.ndarray
    eigenvalues: np.ndarray
    clusters: tuple
    petrov: str
    borderline: bool = False
    notes: tuple = ()
    invariants: dict = field(default_factory=dict)

    @property
    def independent_eigenvectors(self) -> int:
        return sum(c.geometric for c in self.clusters)

    @property
    def distinct_eigenvalues(self) -> int:
        return len(self.clusters)

    def ggl_symmetry_residual(self) -> float:
        n = np.linalg.norm(self.mat)
        return float(np.linalg.norm(self.mat - self.mat.T) / n) if n else 0.0


def _ch_residual(M, groups, ev, n):
    P = np.eye(3, dtype=complex)
    for grp in groups:
        mu = np.mean(ev[list(grp)])
        F = M - mu * np.eye(3)
        for _ in grp:
            P = P @ F
    return float(np.linalg.norm(P) / n**3)


def _partition(M, ev, n, cluster_radius, ch_tol):
    """Coarsest admissible grouping of eigenvalue indices, plus a borderline flag."""
    borderline = False
    candidates = [((0, 1, 2),)] + [((i, j), (k,)) for (i, j), k in
                                   (((0, 1), 2), ((0, 2), 1), ((1, 2), 0))]
    accepted = []
    for groups in candidates:
        merged = [g for g in groups if len(g) > 1]
        spread = max(max(abs(ev[a] - ev[b]) for a, b in combinations(g, 2)) for g in merged)
        r = _ch_residual(M, groups, ev, n)
        if spread <= cluster_radius or r <= ch_tol:
            accepted.append((len(groups), r, groups))
        if spread > cluster_radius and 0.1 * ch_tol < r < 10 * ch_tol:
            borderline = True
    if accepted:
        accepted.sort(key=lambda t: (t[0], t[1]))
        return accepted[0][2], borderline
    return ((0,), (1,), (2,)), borderline


def classify(M, cluster_radius: float | None = None, rank_tol: float = RANK_TOL,
             ch_tol: float = CH_TOL) -> ComplexWeyl3:
    """Petrov type of a complex 3x3 matrix, or of a real 6x6 Lorentzian operator."""
    if isinstance(M, WeylOperator6):
        M = M.mat
    M = np.asarray(M)
    if M.shape == (6, 6):
        M = complexify(M)
    M = np.asarray(M, dtype=complex)
    if M.shape != (3, 3):
        raise ContractViolation(f"expected a 3x3 complex or 6x6 real matrix, got {M.shape}")
    n = float(np.linalg.norm(M))
    if not np.isfinite(n):
        raise ContractViolation("matrix has non-finite entries")
    if n <= ZERO_NORM:
        basis = np.eye(3, dtype=complex)
        return ComplexWeyl3(M, np.zeros(3, dtype=complex), (Cluster(0j, 3, 3, basis),), "O",
                            invariants={"lambda": 0.0, "mu": 0.0})
    notes = []
    if abs(np.trace(M)) > 1e-9 * n:
        raise ContractViolation(f"matrix is not trace-free (|tr| = {abs(np.trace(M)):.3e})")
    radius = cluster_radius if cluster_radius is not None else max(1e-8, 1e-6 * n)
    ev = np.linalg.eigvals(M)
    groups, borderline = _partition(M, ev, n, radius, ch_tol)
    clusters = []
    for grp in groups:
        mu = complex(np.mean(ev[list(grp)]))
        _, s, vh = np.linalg.svd(M - mu * np.eye(3))
        thresh = rank_tol * n
        geo = int(np.sum(s <= thresh))
        if np.any((s > 0.1 * thresh) & (s < 10 * thresh)):
            borderline = True
        geo = max(1, min(geo, len(grp)))
        basis = vh[3 - geo:].conj().T
        clusters.append(Cluster(mu, len(grp), geo, basis))
    clusters.sort(key=lambda c: (-c.algebraic, c.eigenvalue.real, c.eigenvalue.imag))
    key = (sum(c.geometric for c in clusters), len(clusters))
    tag = _TABLE.get(key)
    if tag is None:
        borderline = True
        notes.append(f"eigenstructure {key} matches no Petrov type; reporting the closest")
        tag = "I" if key[1] == 3 else ("D" if key[0] == 3 else "III")
    invariants = _invariants(tag, clusters)
    if tag in ("N", "III"):
        notes.append(f"single eigenvalue {clusters[0].eigenvalue:.3e} (forced to 0 by trace-freeness)")
    return ComplexWeyl3(M, ev, tuple(clusters), tag, borderline, tuple(notes), invariants)


def _invariants(tag, clusters):
    if tag in ("I", "D"):
        vals = sorted((c.eigenvalue for c in clusters for _ in range(c.algebraic)),
                      key=lambda z: (z.real, z.imag))
        return {"lambda": [z.real for z in vals], "mu": [z.imag for z in vals]}
    z = clusters[0].eigenvalue
    return {"lambda": z.real, "mu": z.imag}


@dataclass(frozen=True)
class EigenPlane:
    bivector: np.ndarray
    causal: str  # "spacelike" or "lightlike"
    eigenvalue: complex
    complex_coords: np.ndarray


def _ggl_orthogonal_basis(V, null_tol):
    """Split the span of ``V`` into ggL-orthonormal non-null vectors and a null remainder."""
    vecs = [V[:, k] / np.linalg.norm(V[:, k]) for k in range(V.shape[1])]
    spacelike = []
    while vecs:
        trial = vecs + [a + b for a, b in combinations(vecs, 2)] + [a + 1j * b for a, b in combinations(vecs, 2)]
        norms = [abs(ggL_complex(v, v)) / np.vdot(v, v).real for v in trial]
        best = int(np.argmax(norms))
        if norms[best] <= null_tol:
            break
        v = trial[best] / np.sqrt(ggL_complex(trial[best], trial[best]) + 0j)
        spacelike.append(v)
        rank = len(vecs) - 1
        if rank == 0:
            return spacelike, []
        rest = np.column_stack([w - ggL_complex(w, v) * v for w in vecs])
        u, _, _ = np.linalg.svd(rest, full_matrices=False)
        vecs = [u[:, k] for k in range(rank)]
    return spacelike, vecs


def canonical_eigenplanes(cw: ComplexWeyl3, null_tol: float = 1e-9) -> list:
    """Eigen-2-planes: non-null eigenlines scaled so ``ggL = +1``; null ones unit-normalized."""
    out = []
    for c in cw.clusters:
        space, null = _ggl_orthogonal_basis(c.eigenspace, null_tol)
        for z in space:
            out.append(EigenPlane(from_complex(z), "spacelike", c.eigenvalue, z))
        for z in null:
            z = z / np.linalg.norm(z)
            out.append(EigenPlane(from_complex(z), "lightlike", c.eigenvalue, z))
    return out


def _check_sum(name, vals):
    if abs(sum(vals)) > 1e-12 * max(1.0, max(abs(v) for v in vals)):
        raise ContractViolation(f"{name} must sum to zero, got {list(vals)}")


def normal_form_matrix(ptype: str, lam=None, mu=None, scale: float = 1.0) -> np.ndarray:
    """Real 6x6 normal form of a Lorentzian Weyl operator of the given Petrov type."""
    if ptype in ("I", "D"):
        lam = np.asarray(lam if lam is not None else (1.0, 2.0, -3.0), dtype=float)
        mu = np.asarray(mu if mu is not None else (0.0, 0.0, 0.0), dtype=float)
        _check_sum("lambda", lam)
        _check_sum("mu", mu)
        z = lam + 1j * mu
        distinct = len({complex(round(v.real, 12), round(v.imag, 12)) for v in z})
        if ptype == "D" and not (lam[1] == lam[2] and mu[1] == mu[2] and distinct == 2):
            raise ContractViolation("type D needs lambda2 = lambda3, mu2 = mu3 and a nonzero operator")
        if ptype == "I" and distinct != 3:
            raise ContractViolation("type I needs three distinct eigenvalues lambda_k + i mu_k")
        L, Mu = np.diag(lam), np.diag(mu)
        return scale * np.block([[L, Mu], [-Mu, L]])
    if ptype in ("II", "N"):
        lam = float(lam or 0.0)
        mu = float(mu or 0.0)
        if ptype == "N" and (lam != 0.0 or mu != 0.0):
            raise ContractViolation("type N needs lambda = mu = 0")
        if ptype == "II" and lam == 0.0 and mu == 0.0:
            raise ContractViolation("type II needs (lambda, mu) != (0, 0)")
        h = 0.5
        M = np.array([
            [-2 * lam, 0, 0, -2 * mu, 0, 0],
            [0, lam - h, 0, 0, mu, -h],
            [0, 0, lam + h, 0, -h, mu],
            [2 * mu, 0, 0, -2 * lam, 0, 0],
            [0, -mu, h, 0, lam - h, 0],
            [0, h, -mu, 0, 0, lam + h],
        ])
        return scale * M
    if ptype == "III":
        M = np.array([
            [0, 1, 0, 0, 0, 0],
            [1, 0, 0, 0, 0, -1],
            [0, 0, 0, 0, -1, 0],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 1, 1, 0, 0],
            [0, 1, 0, 0, 0, 0],
        ], dtype=float)
        return scale * M / np.sqrt(2.0)
    if ptype == "O":
        return np.zeros((6, 6))
    raise ContractViolation(f"unknown Petrov type {ptype!r}")


def normal_form_fixture(ptype: str, lam=None, mu=None, scale: float = 1.0) -> WeylOperator6:
    return WeylOperator6(normal_form_matrix(ptype, lam, mu, scale), "lorentzian")


def random_fixture_params(ptype: str, rng: np.random.Generator):
    """Random admissible ``(lam, mu, scale)`` for :func:`normal_form_matrix`."""
    if ptype == "I":
        lam = rng.normal(size=3)
        mu = rng.normal(size=3)
        return lam - lam.mean(), mu - mu.mean(), 1.0
    if ptype == "D":
        a, b = rng.normal(size=2)
        return np.array([-2 * a, a, a]), np.array([-2 * b, b, b]), 1.0
    if ptype == "II":
        lam, mu = rng.normal(size=2)
        return lam, mu, float(rng.uniform(0.2, 3.0))
    return None, None, float(rng.uniform(0.2, 3.0))


def complex_matrix(op) -> np.ndarray:
    M = op.mat if isinstance(op, WeylOperator6) else np.asarray(op)
    return complexify(M)


def real_matrix(C) -> np.ndarray:
    return realify(C)
