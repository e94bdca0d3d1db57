"""Unit-sphere exponential/logarithmic maps, geodesics, tangent projection
and distances on products of spheres and Euclidean spaces.

Points on S^n are unit vectors in R^(n+1); tangent vectors at p are
ambient vectors orthogonal to p.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, InvalidArgument, NonUniqueGeodesicError

UNIT_TOL = 1e-9
TANGENT_TOL = 1e-9
ANTIPODAL_TOL = 1e-9
DRIFT_TOL = 1e-6


def _unit(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or abs(np.linalg.norm(p) - 1.0) > UNIT_TOL:
        raise InvalidArgument("point is not on the unit sphere")
    return p


def sphere_point(coords) -> np.ndarray:
    """Normalize ``coords`` onto the sphere."""
    c = np.asarray(coords, dtype=float)
    r = np.linalg.norm(c)
    if r == 0:
        raise InvalidArgument("cannot normalize the zero vector")
    return c / r


def sphere_exp(p, v) -> np.ndarray:
    """Endpoint of the great circle leaving p with initial velocity v."""
    p = _unit(p)
    v = np.asarray(v, dtype=float)
    if v.shape != p.shape:
        raise InvalidArgument("tangent vector and base point have different dimensions")
    if abs(v @ p) > TANGENT_TOL:
        raise InvalidArgument(f"vector is not tangent at p (<v, p> = {v @ p:.3g})")
    r = np.linalg.norm(v)
    if r == 0:
        return p.copy()
    q = np.cos(r) * p + np.sin(r) * (v / r)
    drift = abs(np.linalg.norm(q) - 1.0)
    if drift > DRIFT_TOL:
        raise ConsistencyError(f"exp map left the sphere by {drift:.3g}")
    return q / np.linalg.norm(q)


def _split(p, q) -> tuple[np.ndarray, float, float]:
    c = float(p @ q)
    w = q - c * p
    return w, c, float(np.linalg.norm(w))


def sphere_log(p, q) -> np.ndarray:
    """Tangent vector at p whose exponential is q."""
    p, q = _unit(p), _unit(q)
    if p.shape != q.shape:
        raise InvalidArgument("points have different dimensions")
    w, c, s = _split(p, q)
    if c <= -1.0 + ANTIPODAL_TOL:
        raise NonUniqueGeodesicError("points are antipodal; the geodesic is not unique")
    if s == 0:
        return np.zeros_like(p)
    theta = np.arctan2(s, c)
    return theta * w / s


def sphere_distance(p, q) -> float:
    """Great-circle distance in [0, π].

    Evaluated as ``atan2(|q - <p,q> p|, <p,q>)``, which equals
    ``arccos(<p,q>)`` but stays accurate for nearly coincident points.
    """
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if np.array_equal(p, q):
        return 0.0
    _, c, s = _split(p, q)
    return float(np.arctan2(s, np.clip(c, -1.0, 1.0)))


def tangent_project(p, w) -> np.ndarray:
    p = _unit(p)
    w = np.asarray(w, dtype=float)
    return w - (w @ p) * p


def geodesic_point(p, q, t: float) -> np.ndarray:
    """Point a fraction t of the way along the shortest arc from p to q."""
    return sphere_exp(p, t * sphere_log(p, q))


# ---------------------------------------------------------------------------
# product manifolds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Factor:
    """One factor of a product: ``sphere`` of intrinsic dim n (R^(n+1)) or ``euclidean`` R^n."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("sphere", "euclidean"):
            raise InvalidArgument(f"unknown factor kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidArgument("factor dimension must be positive")

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1 if self.kind == "sphere" else self.dim

    def distance(self, x, y) -> float:
        if self.kind == "sphere":
            return sphere_distance(x, y)
        return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))


@dataclass(frozen=True, eq=False)
class ProductPoint:
    signature: tuple[Factor, ...]
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        sig = tuple(self.signature)
        comps = tuple(np.asarray(c, dtype=float) for c in self.components)
        if len(sig) != len(comps):
            raise InvalidArgument("one component per factor required")
        for f, c in zip(sig, comps):
            if c.shape != (f.ambient_dim,):
                raise InvalidArgument(f"{f.kind} factor of dim {f.dim} needs {f.ambient_dim} coordinates")
            if f.kind == "sphere":
                _unit(c)
        object.__setattr__(self, "signature", sig)
        object.__setattr__(self, "components", comps)

    def tangent_concat(self, vectors: Sequence) -> np.ndarray:
        """Direct sum of per-factor tangent vectors, as one concatenated array."""
        if len(vectors) != len(self.signature):
            raise InvalidArgument("one tangent vector per factor required")
        parts = []
        for f, c, v in zip(self.signature, self.components, vectors):
            v = np.asarray(v, dtype=float)
            if f.kind == "sphere" and abs(v @ c) > TANGENT_TOL:
                raise InvalidArgument("vector is not tangent to its sphere factor")
            parts.append(v)
        return np.concatenate(parts)

    def to_json(self) -> str:
        return json.dumps({
            "signature": [{"kind": f.kind, "dim": f.dim} for f in self.signature],
            "components": [c.tolist() for c in self.components],
        })

    @classmethod
    def from_json(cls, text: str) -> "ProductPoint":
        data = json.loads(text)
        sig = tuple(Factor(s["kind"], int(s["dim"])) for s in data["signature"])
        return cls(sig, tuple(data["components"]))


def product_distance(x: ProductPoint, y: ProductPoint) -> float:
    """Root-sum-square of the per-factor distances."""
    if x.signature != y.signature:
        raise InvalidArgument("product points have different signatures")
    sq = sum(f.distance(a, b) ** 2 for f, a, b in zip(x.signature, x.components, y.components))
    return float(np.sqrt(sq))
