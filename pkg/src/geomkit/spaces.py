"""Norms, metrics and inner products on vectors, matrices, point sets and
sampled functions, plus Gram-Schmidt and small tensor contractions."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegeneracyError, InvalidArgument

DEFAULT_TOL = 1e-9
GS_RESIDUAL_TOL = 1e-12


def _check_p(p: float) -> None:
    if not (p >= 1):
        raise InvalidArgument(f"p = {p} does not define a norm (need p >= 1)")


def lp_norm(v, p: float = 2) -> float:
    _check_p(p)
    a = np.abs(np.asarray(v).ravel())
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.sum())
    scale = a.max()
    if scale == 0:
        return 0.0
    # scaled so |v|^p neither overflows nor underflows
    if p == 2:
        return float(scale * np.sqrt(np.sum((a / scale) ** 2)))
    return float(scale * np.sum((a / scale) ** p) ** (1.0 / p))


def lp_distance(u, v, p: float = 2) -> float:
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise InvalidArgument(f"dimension mismatch: {u.shape} vs {v.shape}")
    return lp_norm(u - v, p)


# ---------------------------------------------------------------------------
# sampled functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridFunction:
    """Uniform samples of a function on ``[a, b]``.

    Periodic grids omit the right endpoint. ``normalization`` selects the
    integration measure: ``"plain"`` is dx, ``"circle"`` is dx / 2π.
    """

    a: float
    b: float
    samples: np.ndarray
    periodic: bool = False
    normalization: str = "plain"

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 1 or s.size < 2:
            raise InvalidArgument("GridFunction needs a 1-D array of at least 2 samples")
        if not self.b > self.a:
            raise InvalidArgument("need b > a")
        if self.normalization not in ("plain", "circle"):
            raise InvalidArgument(f"unknown normalization {self.normalization!r}")
        if not np.iscomplexobj(s):
            s = s.astype(float)
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, fn: Callable, a: float, b: float, n: int,
                      periodic: bool = False, normalization: str = "plain") -> "GridFunction":
        x = grid_nodes(a, b, n, periodic)
        return cls(a, b, np.asarray(fn(x)), periodic, normalization)

    @classmethod
    def on_circle(cls, fn: Callable, n: int) -> "GridFunction":
        """Periodic samples on [-π, π) with the 1/2π measure."""
        return cls.from_function(fn, -np.pi, np.pi, n, periodic=True, normalization="circle")

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return grid_nodes(self.a, self.b, self.n, self.periodic)

    @property
    def spacing(self) -> float:
        intervals = self.n if self.periodic else self.n - 1
        return (self.b - self.a) / intervals

    def weights(self) -> np.ndarray:
        """Quadrature weights including the normalization factor."""
        w = np.full(self.n, self.spacing)
        if not self.periodic:
            w[0] *= 0.5
            w[-1] *= 0.5
        if self.normalization == "circle":
            w /= 2 * np.pi
        return w

    def with_samples(self, samples) -> "GridFunction":
        return GridFunction(self.a, self.b, samples, self.periodic, self.normalization)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.n == other.n and self.periodic == other.periodic
                and self.normalization == other.normalization
                and math.isclose(self.a, other.a) and math.isclose(self.b, other.b))

    def integrate(self, values=None) -> complex | float:
        v = self.samples if values is None else np.asarray(values)
        total = np.sum(self.weights() * v)
        return complex(total) if np.iscomplexobj(total) else float(total)


def grid_nodes(a: float, b: float, n: int, periodic: bool) -> np.ndarray:
    if periodic:
        return a + (b - a) * np.arange(n) / n
    return np.linspace(a, b, n)


def function_lp_norm(f: GridFunction, p: float = 2) -> float:
    _check_p(p)
    a = np.abs(f.samples)
    if math.isinf(p):
        return float(a.max())
    return float(f.integrate(a ** p)) ** (1.0 / p)


def _require_same_grid(f: GridFunction, g: GridFunction) -> None:
    if not f.same_grid(g):
        raise InvalidArgument("grid functions live on different grids")


def grid_inner(f: GridFunction, g: GridFunction) -> complex:
    """``∫ f conj(g)`` under the grid's quadrature and normalization."""
    _require_same_grid(f, g)
    return complex(np.sum(f.weights() * f.samples * np.conj(g.samples)))


# ---------------------------------------------------------------------------
# point sets
# ---------------------------------------------------------------------------

def _as_pointset(A) -> np.ndarray:
    P = np.asarray(A, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2 or P.shape[0] == 0:
        raise InvalidArgument("point set must be a non-empty list of points")
    return P


def _directed_nearest(A: np.ndarray, B: np.ndarray, p: float) -> np.ndarray:
    """For each a in A, the distance to its nearest point in B."""
    diff = np.abs(A[:, None, :] - B[None, :, :])
    if math.isinf(p):
        d = diff.max(axis=2)
    elif p == 2:
        d = np.sqrt(np.sum(diff ** 2, axis=2))
    else:
        d = np.sum(diff ** p, axis=2) ** (1.0 / p)
    return d.min(axis=1)


def _pair(A, B, p):
    _check_p(p)
    A, B = _as_pointset(A), _as_pointset(B)
    if A.shape[1] != B.shape[1]:
        raise InvalidArgument("point sets have different dimensions")
    return A, B


def hausdorff(A, B, p: float = 2) -> float:
    A, B = _pair(A, B, p)
    return float(max(_directed_nearest(A, B, p).max(), _directed_nearest(B, A, p).max()))


def chamfer(A, B, p: float = 2) -> float:
    """Hausdorff with the outer sup replaced by a mean over each set."""
    A, B = _pair(A, B, p)
    return float(max(_directed_nearest(A, B, p).mean(), _directed_nearest(B, A, p).mean()))


@dataclass(frozen=True)
class MetricReport:
    nonnegativity: bool
    symmetry: bool
    identity: bool
    triangle: bool
    relaxation: float
    violations: int
    first_violation: Optional[tuple[str, tuple[int, ...]]] = None

    @property
    def ok(self) -> bool:
        return self.nonnegativity and self.symmetry and self.identity and self.triangle


def check_metric_axioms(points: Sequence, d: Callable, C: float = 1.0, tol: float = DEFAULT_TOL) -> MetricReport:
    """Exhaustive metric-axiom check over a finite sample.

    The triangle inequality is tested in its relaxed form
    ``d(u, w) <= C (d(u, v) + d(v, w))``; ``C = 1`` is an ordinary metric.
    Tolerances are absolute.
    """
    if C < 1:
        raise InvalidArgument("relaxation constant must be >= 1")
    pts = list(points)
    n = len(pts)
    D = np.array([[d(pts[i], pts[j]) for j in range(n)] for i in range(n)], dtype=float)
    flags = {"nonnegativity": True, "symmetry": True, "identity": True, "triangle": True}
    violations = 0
    first = None

    def flag(name, idx):
        nonlocal violations, first
        flags[name] = False
        violations += 1
        if first is None:
            first = (name, idx)

    for i, j in itertools.product(range(n), repeat=2):
        if D[i, j] < -tol:
            flag("nonnegativity", (i, j))
        if abs(D[i, j] - D[j, i]) > tol:
            flag("symmetry", (i, j))
        same = np.array_equal(np.asarray(pts[i]), np.asarray(pts[j]))
        if same and abs(D[i, j]) > tol:
            flag("identity", (i, j))
        if not same and D[i, j] <= 0:
            flag("identity", (i, j))
    # D[u, w] <= C (D[u, v] + D[v, w]) for all (u, v, w)
    bound = C * (D[:, :, None] + D[None, :, :])
    bad = np.argwhere(D[:, None, :] > bound + tol)
    for u, v, w in bad:
        flag("triangle", (int(u), int(v), int(w)))
    return MetricReport(relaxation=C, violations=violations, first_violation=first, **flags)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def inner(u, v):
    """Standard inner product, conjugate-linear in the second argument."""
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise InvalidArgument(f"shape mismatch: {u.shape} vs {v.shape}")
    out = np.sum(u * np.conj(v))
    return complex(out) if np.iscomplexobj(out) else float(out)


def matrix_inner(A, B) -> float:
    """Frobenius inner product ``trace(A B^T)``."""
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape or A.ndim != 2:
        raise InvalidArgument("matrices must have the same 2-D shape")
    return float(np.trace(A @ B.T))


def cosine_angle(u, v) -> float:
    nu, nv = lp_norm(u, 2), lp_norm(v, 2)
    if nu == 0 or nv == 0:
        raise InvalidArgument("angle undefined for the zero vector")
    c = np.real(inner(u, v)) / (nu * nv)
    return float(min(1.0, max(-1.0, c)))


def parallelogram_defect(norm: Callable, u, v) -> float:
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return abs(2 * norm(u) ** 2 + 2 * norm(v) ** 2 - norm(u + v) ** 2 - norm(u - v) ** 2)


def check_parallelogram(norm: Callable, samples: Sequence[tuple], tol: float = DEFAULT_TOL) -> bool:
    """True iff the parallelogram law holds on every sampled pair."""
    return all(parallelogram_defect(norm, u, v) <= tol for u, v in samples)


def polarization_inner(norm: Callable) -> Callable:
    """Real inner product recovered from a norm via polarization."""
    def ip(u, v):
        u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
        return (norm(u + v) ** 2 - norm(u - v) ** 2) / 4.0

    return ip


def gram_schmidt(vectors: Sequence) -> list[np.ndarray]:
    """Orthonormalize linearly independent vectors (modified Gram-Schmidt)."""
    basis: list[np.ndarray] = []
    for k, v in enumerate(vectors):
        w = np.array(v, dtype=complex if np.iscomplexobj(v) else float)
        for e in basis:
            w = w - inner(w, e) * e
        r = np.linalg.norm(w)
        if r < GS_RESIDUAL_TOL:
            raise DegeneracyError(f"vector {k} is linearly dependent on its predecessors")
        basis.append(w / r)
    return basis


def linear_independence(vectors: Sequence, tol: float = 1e-12) -> tuple[bool, int]:
    """``(independent, rank)`` from the singular values of the stacked vectors."""
    from .spectral import svd

    vs = list(vectors)
    if not vs:
        return True, 0
    M = np.atleast_2d(np.array(vs))
    rank = svd(M, tol=tol).rank
    return rank == len(vs), rank


def contract(T, v, index: int = -1) -> np.ndarray | float:
    """Contract one index of a vector, matrix or order-3 tensor with ``v``.

    ``contract(T, v, 1)`` on an order-3 tensor is ``Σ_j T[i, j, k] v[j]``.
    """
    T = np.asarray(T)
    v = np.asarray(v)
    if T.ndim not in (1, 2, 3):
        raise InvalidArgument("only tensors of order 1 to 3 are supported")
    if v.ndim != 1:
        raise InvalidArgument("can only contract with a vector")
    axis = index % T.ndim
    if T.shape[axis] != v.size:
        raise InvalidArgument(f"index {axis} has length {T.shape[axis]}, vector has {v.size}")
    out = np.tensordot(T, v, axes=([axis], [0]))
    return out.item() if out.ndim == 0 else out
