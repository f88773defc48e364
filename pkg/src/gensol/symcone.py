"""Small symmetric-matrix algebra: eigendecompositions, signed parts,
matrix norms with duals, and convex matrix cones with projections.

Everything here is dimension d in {1, 2, 3} and deterministic.  The
eigendecomposition kernel is self-contained (closed form for d <= 2,
cyclic Jacobi for d = 3) so that repeated runs produce bit-identical
decompositions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "SymMat",
    "EigenDecomp",
    "MatNormKind",
    "MatCone",
    "ConePredicate",
    "sym_split",
    "mat_norm",
    "dual_norm_kind",
    "project_cone",
    "polar_cone",
    "cone_contains",
    "sample_cone",
    "batch_eigvals_sym",
    "batch_spectral_bounds",
]

# Off-diagonal stopping threshold for the 3x3 Jacobi sweep.
_JACOBI_TOL = 1e-13
_MAX_DIM = 3

_TRI_INDEX = {
    1: ((0, 0),),
    2: ((0, 0), (0, 1), (1, 1)),
    3: ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)),
}


class MatNormKind(enum.Enum):
    """Norm tags on symmetric matrices, each a closed form in eigenvalues."""

    SPECTRAL = "spectral"
    TRACE = "trace"
    FROBENIUS = "frobenius"
    MMAX = "mmax"      # max(trace/2, spectral)
    MDUAL = "mdual"    # 2*spectral + trace


class MatCone(enum.Enum):
    """Closed convex cones of symmetric matrices."""

    PSD = "psd"
    NSD = "nsd"
    IDENTITY_RAY = "identity_ray"   # {a*I : a >= 0}
    FULL_SYM = "full_sym"


@dataclass(frozen=True)
class ConePredicate:
    """Membership-predicate cone for polars that are not enum peers."""

    name: str
    contains: Callable[["SymMat", float], bool]

    def __repr__(self) -> str:
        return f"ConePredicate({self.name})"


@dataclass(frozen=True)
class SymMat:
    """Dense symmetric matrix stored as its upper triangle, d in {1, 2, 3}."""

    dim: int
    entries: tuple

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be in 1..3, got {self.dim}")
        n = self.dim * (self.dim + 1) // 2
        ent = tuple(float(v) for v in self.entries)
        if len(ent) != n:
            raise ValueError(f"expected {n} upper-triangle entries, got {len(ent)}")
        if not all(math.isfinite(v) for v in ent):
            raise ValueError("non-finite entry in symmetric matrix")
        object.__setattr__(self, "entries", ent)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "SymMat":
        return cls(dim, (0.0,) * (dim * (dim + 1) // 2))

    @classmethod
    def identity(cls, dim: int) -> "SymMat":
        return cls.diag(*([1.0] * dim))

    @classmethod
    def diag(cls, *values: float) -> "SymMat":
        dim = len(values)
        ent = [0.0] * (dim * (dim + 1) // 2)
        for k, (i, j) in enumerate(_TRI_INDEX[dim]):
            if i == j:
                ent[k] = float(values[i])
        return cls(dim, tuple(ent))

    @classmethod
    def from_matrix(cls, a, tol: float = 1e-12) -> "SymMat":
        """Build from a square array; rejects visible asymmetry."""
        arr = np.asarray(a, dtype=float)
        dim = arr.shape[0]
        if arr.shape != (dim, dim):
            raise ValueError("matrix must be square")
        scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 1.0)
        if float(np.max(np.abs(arr - arr.T))) > tol * scale:
            raise ValueError("matrix is not symmetric")
        sym = 0.5 * (arr + arr.T)
        return cls(dim, tuple(sym[i, j] for i, j in _TRI_INDEX[dim]))

    @classmethod
    def sym_part(cls, a) -> "SymMat":
        """The symmetric part (A + A^T)/2 of a general square matrix."""
        arr = np.asarray(a, dtype=float)
        dim = arr.shape[0]
        if arr.shape != (dim, dim):
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite entry")
        sym = 0.5 * (arr + arr.T)
        return cls(dim, tuple(sym[i, j] for i, j in _TRI_INDEX[dim]))

    @classmethod
    def outer(cls, v: Sequence[float]) -> "SymMat":
        """Rank-one matrix v v^T."""
        v = [float(x) for x in v]
        dim = len(v)
        return cls(dim, tuple(v[i] * v[j] for i, j in _TRI_INDEX[dim]))

    # -- basic algebra -------------------------------------------------

    def entry(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        return self.entries[_TRI_INDEX[self.dim].index((i, j))]

    def to_array(self) -> np.ndarray:
        out = np.empty((self.dim, self.dim))
        for k, (i, j) in enumerate(_TRI_INDEX[self.dim]):
            out[i, j] = self.entries[k]
            out[j, i] = self.entries[k]
        return out

    def __add__(self, other: "SymMat") -> "SymMat":
        self._check_peer(other)
        return SymMat(self.dim, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "SymMat") -> "SymMat":
        self._check_peer(other)
        return SymMat(self.dim, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __mul__(self, s: float) -> "SymMat":
        return SymMat(self.dim, tuple(float(s) * a for a in self.entries))

    __rmul__ = __mul__

    def __neg__(self) -> "SymMat":
        return self * -1.0

    def _check_peer(self, other: "SymMat"):
        if not isinstance(other, SymMat) or other.dim != self.dim:
            raise ValueError("dimension mismatch")

    @property
    def trace(self) -> float:
        return sum(self.entries[k] for k, (i, j) in enumerate(_TRI_INDEX[self.dim]) if i == j)

    def dot(self, other: "SymMat") -> float:
        """Frobenius product A:B."""
        self._check_peer(other)
        total = 0.0
        for k, (i, j) in enumerate(_TRI_INDEX[self.dim]):
            w = 1.0 if i == j else 2.0
            total += w * self.entries[k] * other.entries[k]
        return total

    def frobenius(self) -> float:
        return math.sqrt(self.dot(self))

    def eig(self) -> "EigenDecomp":
        return _eigh(self)

    def eigenvalues(self) -> tuple:
        return self.eig().values

    def is_psd(self, tol: float = 1e-10) -> bool:
        return self.eigenvalues()[-1] >= -tol

    def is_nsd(self, tol: float = 1e-10) -> bool:
        return self.eigenvalues()[0] <= tol


@dataclass(frozen=True)
class EigenDecomp:
    """Eigenvalues sorted descending with matching orthonormal eigenvectors."""

    values: tuple
    vectors: tuple   # vectors[i] is the unit eigenvector for values[i]

    def reconstruct(self) -> SymMat:
        dim = len(self.values)
        acc = SymMat.zero(dim)
        for lam, vec in zip(self.values, self.vectors):
            acc = acc + lam * SymMat.outer(vec)
        return acc


def _sign_normalize(vec: Sequence[float]) -> tuple:
    v = tuple(float(x) for x in vec)
    for x in v:
        if x != 0.0:
            return v if x > 0.0 else tuple(-y for y in v)
    return v


def _order_pairs(pairs, tie_tol: float = 0.0):
    # descending eigenvalues; equal eigenvalues ordered by eigenvector
    # (first-nonzero-positive normalized, ascending lexicographic)
    pairs = [(lam, _sign_normalize(vec)) for lam, vec in pairs]
    pairs.sort(key=lambda p: p[1])
    pairs.sort(key=lambda p: -p[0])
    return pairs


def _eigh(m: SymMat) -> EigenDecomp:
    if m.dim == 1:
        return EigenDecomp((m.entries[0],), ((1.0,),))
    if m.dim == 2:
        a, b, c = m.entries
        half_diff = 0.5 * (a - c)
        disc = math.hypot(half_diff, b)
        mean = 0.5 * (a + c)
        lam1, lam2 = mean + disc, mean - disc
        theta = 0.5 * math.atan2(2.0 * b, a - c)
        ct, st = math.cos(theta), math.sin(theta)
        pairs = _order_pairs([(lam1, (ct, st)), (lam2, (-st, ct))])
        return EigenDecomp(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
    return _jacobi3(m)


def _jacobi3(m: SymMat) -> EigenDecomp:
    a = [[m.entry(i, j) for j in range(3)] for i in range(3)]
    v = [[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)]
    scale = max(1.0, max(abs(x) for row in a for x in row))
    for _ in range(64):
        off = math.sqrt(a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2)
        if off <= _JACOBI_TOL * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p][q]
            if apq == 0.0:
                continue
            # classic two-sided Jacobi rotation annihilating a[p][q]
            tau = (a[q][q] - a[p][p]) / (2.0 * apq)
            t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            app, aqq = a[p][p], a[q][q]
            a[p][p] = app - t * apq
            a[q][q] = aqq + t * apq
            a[p][q] = a[q][p] = 0.0
            for k in range(3):
                if k != p and k != q:
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = a[p][k] = c * akp - s * akq
                    a[k][q] = a[q][k] = s * akp + c * akq
            for k in range(3):
                vkp, vkq = v[k][p], v[k][q]
                v[k][p] = c * vkp - s * vkq
                v[k][q] = s * vkp + c * vkq
    pairs = _order_pairs([(a[i][i], (v[0][i], v[1][i], v[2][i])) for i in range(3)])
    return EigenDecomp(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


# -- operations ---------------------------------------------------------


def sym_split(a) -> tuple:
    """Split a square matrix into PSD, NSD and trace-free parts of (A)_sym.

    Returns (pos, neg, dev) with pos + neg = (A)_sym, pos made of the
    nonnegative eigenvalues, neg of the nonpositive ones, and
    dev = (A)_sym - (tr(A)/d) I.
    """
    sym = a if isinstance(a, SymMat) else SymMat.sym_part(a)
    dec = sym.eig()
    pos = SymMat.zero(sym.dim)
    neg = SymMat.zero(sym.dim)
    for lam, vec in zip(dec.values, dec.vectors):
        if lam > 0.0:
            pos = pos + lam * SymMat.outer(vec)
        elif lam < 0.0:
            neg = neg + lam * SymMat.outer(vec)
    dev = sym - (sym.trace / sym.dim) * SymMat.identity(sym.dim)
    return pos, neg, dev


def mat_norm(m: SymMat, kind: MatNormKind) -> float:
    """Evaluate the tagged norm from the eigenvalues of m."""
    if kind is MatNormKind.FROBENIUS:
        return m.frobenius()
    vals = m.eigenvalues()
    spectral = max(abs(v) for v in vals)
    trace_norm = sum(abs(v) for v in vals)
    if kind is MatNormKind.SPECTRAL:
        return spectral
    if kind is MatNormKind.TRACE:
        return trace_norm
    if kind is MatNormKind.MMAX:
        return max(0.5 * trace_norm, spectral)
    if kind is MatNormKind.MDUAL:
        return 2.0 * spectral + trace_norm
    raise ValueError(f"unknown norm kind {kind}")


_DUAL = {
    MatNormKind.SPECTRAL: MatNormKind.TRACE,
    MatNormKind.TRACE: MatNormKind.SPECTRAL,
    MatNormKind.FROBENIUS: MatNormKind.FROBENIUS,
    MatNormKind.MMAX: MatNormKind.MDUAL,
    MatNormKind.MDUAL: MatNormKind.MMAX,
}


def dual_norm_kind(kind: MatNormKind) -> MatNormKind:
    return _DUAL[kind]


def project_cone(m: SymMat, cone: MatCone) -> SymMat:
    """Frobenius-nearest point of the cone."""
    if cone is MatCone.FULL_SYM:
        return m
    if cone is MatCone.IDENTITY_RAY:
        alpha = max(m.trace / m.dim, 0.0)
        return alpha * SymMat.identity(m.dim)
    pos, neg, _ = sym_split(m)
    if cone is MatCone.PSD:
        return pos
    if cone is MatCone.NSD:
        return neg
    raise ValueError(f"unknown cone {cone}")


def _zero_contains(m: SymMat, tol: float = 1e-10) -> bool:
    return m.frobenius() <= tol


def _trace_nonpos_contains(m: SymMat, tol: float = 1e-10) -> bool:
    return m.trace <= tol


def polar_cone(cone: MatCone):
    """Polar (normal) cone: all matrices pairing nonpositively with the cone.

    PSD and NSD map to each other; the remaining polars are predicate
    cones since they are not representable by the enum tags.
    """
    if cone is MatCone.PSD:
        return MatCone.NSD
    if cone is MatCone.NSD:
        return MatCone.PSD
    if cone is MatCone.FULL_SYM:
        return ConePredicate("zero", _zero_contains)
    if cone is MatCone.IDENTITY_RAY:
        return ConePredicate("trace_nonpositive", _trace_nonpos_contains)
    raise ValueError(f"unknown cone {cone}")


def cone_contains(cone, m: SymMat, tol: float = 1e-10) -> bool:
    """Membership test for enum cones and predicate cones."""
    if isinstance(cone, ConePredicate):
        return cone.contains(m, tol)
    if cone is MatCone.PSD:
        return m.is_psd(tol)
    if cone is MatCone.NSD:
        return m.is_nsd(tol)
    if cone is MatCone.FULL_SYM:
        return True
    if cone is MatCone.IDENTITY_RAY:
        off = m - (m.trace / m.dim) * SymMat.identity(m.dim)
        return off.frobenius() <= tol and m.trace >= -tol
    raise ValueError(f"unknown cone {cone}")


def sample_cone(rng: np.random.Generator, dim: int, cone) -> SymMat:
    """Draw a random member of the cone (used by duality sampling)."""
    if cone is MatCone.PSD or cone is MatCone.NSD:
        out = SymMat.zero(dim)
        for _ in range(dim):
            v = rng.standard_normal(dim)
            out = out + float(rng.uniform(0.0, 1.0)) * SymMat.outer(v)
        return out if cone is MatCone.PSD else -out
    if cone is MatCone.IDENTITY_RAY:
        return float(rng.uniform(0.0, 1.0)) * SymMat.identity(dim)
    if cone is MatCone.FULL_SYM:
        return SymMat.sym_part(rng.standard_normal((dim, dim)))
    if isinstance(cone, ConePredicate):
        if cone.name == "zero":
            return SymMat.zero(dim)
        if cone.name == "trace_nonpositive":
            m = SymMat.sym_part(rng.standard_normal((dim, dim)))
            shift = max(m.trace, 0.0) / dim + float(rng.uniform(0.0, 0.5))
            return m - shift * SymMat.identity(dim)
    raise ValueError(f"cannot sample from {cone}")


# -- vectorized eigenvalue helpers for per-cell fields -------------------


def batch_eigvals_sym(mats: np.ndarray) -> np.ndarray:
    """Eigenvalues (descending) of a stack of symmetric matrices (n, d, d).

    Closed forms: exact for d <= 2, trigonometric (Cardano) for d = 3.
    Intended for bulk field checks at ~1e-10 tolerances.
    """
    mats = np.asarray(mats, dtype=float)
    n, d = mats.shape[0], mats.shape[1]
    if d == 1:
        return mats[:, 0, 0][:, None]
    if d == 2:
        a, b, c = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 1]
        mean = 0.5 * (a + c)
        disc = np.hypot(0.5 * (a - c), b)
        return np.stack([mean + disc, mean - disc], axis=1)
    if d == 3:
        q = np.trace(mats, axis1=1, axis2=2) / 3.0
        ident = np.eye(3)[None, :, :]
        b_mat = mats - q[:, None, None] * ident
        p2 = np.einsum("nij,nij->n", b_mat, b_mat) / 6.0
        p = np.sqrt(np.maximum(p2, 0.0))
        eig = np.empty((n, 3))
        small = p < 1e-300
        eig[small] = q[small, None]
        if np.any(~small):
            bn = b_mat[~small] / p[~small, None, None]
            detb = np.linalg.det(bn)
            r = np.clip(detb / 2.0, -1.0, 1.0)
            phi = np.arccos(r) / 3.0
            qn = q[~small]
            pn = p[~small]
            l1 = qn + 2.0 * pn * np.cos(phi)
            l3 = qn + 2.0 * pn * np.cos(phi + 2.0 * np.pi / 3.0)
            l2 = 3.0 * qn - l1 - l3
            eig[~small] = np.stack([l1, l2, l3], axis=1)
        return -np.sort(-eig, axis=1)
    raise ValueError("batch eigenvalues support d in 1..3 only")


def batch_spectral_bounds(mats: np.ndarray) -> tuple:
    """(lambda_max, lambda_min) arrays for a stack of symmetric matrices."""
    vals = batch_eigvals_sym(mats)
    return vals[:, 0], vals[:, -1]
