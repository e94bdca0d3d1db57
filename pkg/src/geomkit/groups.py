"""Finite groups, group actions, invariance/equivariance checks and
discrete group convolution.

Group elements are dense integer indices; the Cayley table
``cayley[a, b] = a∘b`` is the canonical representation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgument, SizeLimitError

# S_8 would need a 40320 x 40320 table (> 6 GB); S_7 is the largest built.
MAX_SYMMETRIC_DEGREE = 7
DEFAULT_TOL = 1e-9


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteGroup:
    cayley: np.ndarray
    labels: tuple[str, ...]
    identity: int
    inverses: np.ndarray

    @classmethod
    def from_table(cls, cayley, labels: Optional[Sequence[str]] = None, verify: bool = True) -> "FiniteGroup":
        """Build a group from a Cayley table, locating identity and inverses.

        Raises InvalidArgument if the table fails any group axiom. Generated
        tables known to be groups may pass ``verify=False`` to skip the
        O(n^3) associativity sweep.
        """
        table = np.asarray(cayley, dtype=np.int64)
        n = table.shape[0]
        if verify:
            report = check_group_axioms(table)
            if not report.ok:
                raise InvalidArgument(f"table is not a group: {report.failures()}")
            e = report.identity_index
        else:
            e = int(np.flatnonzero(np.all(table == np.arange(n), axis=1))[0])
        inverses = np.argmax(table == e, axis=1)
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise InvalidArgument("one label per element required")
        table.setflags(write=False)
        inverses.setflags(write=False)
        return cls(table, tuple(labels), int(e), inverses)

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    def __len__(self) -> int:
        return self.order

    def elements(self) -> range:
        return range(self.order)

    def compose(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inverses[a])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def is_subgroup(self, elements: Sequence[int]) -> bool:
        """Closure, identity and inverse check on the induced sub-table."""
        sub = sorted(set(int(a) for a in elements))
        if not sub or self.identity not in sub:
            return False
        members = set(sub)
        induced = self.cayley[np.ix_(sub, sub)]
        if not set(induced.ravel().tolist()) <= members:
            return False
        return all(self.inverse(a) in members for a in sub)

    def same_structure(self, other: "FiniteGroup") -> bool:
        return self is other or np.array_equal(self.cayley, other.cayley)


def make_cyclic(n: int) -> FiniteGroup:
    """Cyclic group C_n; element k is the rotation by k*360/n degrees."""
    if n < 1:
        raise InvalidArgument("cyclic group needs n >= 1")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    labels = [f"{_fmt_angle(360.0 * k / n)}deg" for k in range(n)]
    return FiniteGroup.from_table(table, labels)


def _fmt_angle(deg: float) -> str:
    return str(int(deg)) if float(deg).is_integer() else f"{deg:g}"


def make_symmetric(n: int) -> FiniteGroup:
    """Symmetric group S_n over all n! permutations in lexicographic order.

    Composition is ``(a∘b)(i) = a(b(i))``.
    """
    if n < 1:
        raise InvalidArgument("symmetric group needs n >= 1")
    if n > MAX_SYMMETRIC_DEGREE:
        raise SizeLimitError(f"S_{n} has {math.factorial(n)} elements; limit is S_{MAX_SYMMETRIC_DEGREE}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    m = len(perms)
    # base-n keys of lexicographically ordered permutations are increasing
    radix = n ** np.arange(n - 1, -1, -1)
    keys = perms @ radix
    table = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        table[a] = np.searchsorted(keys, perms[a][perms] @ radix)
    labels = ["".join(map(str, p)) for p in perms]
    group = FiniteGroup.from_table(table, labels, verify=n <= 5)
    object.__setattr__(group, "_perms", perms)
    return group


def symmetric_permutations(group: FiniteGroup) -> np.ndarray:
    """One-line permutation arrays of a group built by make_symmetric."""
    perms = getattr(group, "_perms", None)
    if perms is None:
        raise InvalidArgument("group was not built by make_symmetric")
    return perms


def trivial_group() -> FiniteGroup:
    return make_cyclic(1)


@dataclass(frozen=True)
class AxiomReport:
    order: int
    closure: bool
    associativity: bool
    identity: bool
    inverses: bool
    abelian: bool
    identity_index: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.closure and self.associativity and self.identity and self.inverses

    def failures(self) -> list[str]:
        names = ("closure", "associativity", "identity", "inverses")
        return [name for name in names if not getattr(self, name)]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "closure": self.closure,
            "associativity": self.associativity,
            "identity": self.identity,
            "inverses": self.inverses,
            "abelian": self.abelian,
            "is_group": self.ok,
        }


def check_group_axioms(cayley) -> AxiomReport:
    """Exhaustively check the group axioms of a square operation table."""
    table = np.asarray(cayley)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InvalidArgument("Cayley table must be square")
    n = table.shape[0]
    if n == 0:
        return AxiomReport(0, True, True, False, False, True)
    if not np.issubdtype(table.dtype, np.integer):
        if not np.all(np.equal(np.mod(table, 1), 0)):
            return AxiomReport(n, False, False, False, False, False)
        table = table.astype(np.int64)

    closure = bool(np.all((table >= 0) & (table < n)))
    abelian = bool(np.array_equal(table, table.T))
    if not closure:
        return AxiomReport(n, False, False, False, False, abelian)

    # (a∘b)∘c == a∘(b∘c) for all triples, one slab of a at a time
    associativity = True
    for a in range(n):
        left = table[table[a]]          # [b, c] -> (a∘b)∘c
        right = table[a][table]         # [b, c] -> a∘(b∘c)
        if not np.array_equal(left, right):
            associativity = False
            break

    idx = np.arange(n)
    candidates = [e for e in range(n) if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx)]
    if not candidates:
        return AxiomReport(n, closure, associativity, False, False, abelian)
    e = candidates[0]
    inverses = bool(np.all(np.any((table == e) & (table.T == e), axis=1)))
    return AxiomReport(n, closure, associativity, True, inverses, abelian, e)


# ---------------------------------------------------------------------------
# maps and homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """A bijection on {0, ..., n-1} in one-line notation."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(i) for i in self.map)
        if sorted(m) != list(range(len(m))):
            raise InvalidArgument(f"not a permutation: {list(m)}")
        object.__setattr__(self, "map", m)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(rng.permutation(n).tolist()))

    def __len__(self) -> int:
        return len(self.map)

    def __call__(self, i: int) -> int:
        return self.map[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: apply ``other`` first."""
        return Permutation(tuple(self.map[j] for j in other.map))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.map)
        for i, j in enumerate(self.map):
            inv[j] = i
        return Permutation(tuple(inv))

    def matrix(self) -> np.ndarray:
        """Permutation matrix P with ``(P x)[σ(i)] = x[i]``."""
        n = len(self.map)
        P = np.zeros((n, n))
        P[list(self.map), np.arange(n)] = 1.0
        return P


@dataclass(frozen=True)
class FiniteMap:
    domain_size: int
    codomain_size: int
    table: tuple[int, ...]

    def __post_init__(self):
        t = tuple(int(v) for v in self.table)
        if self.domain_size < 1 or self.codomain_size < 1:
            raise InvalidArgument("domain and codomain sizes must be positive")
        if len(t) != self.domain_size:
            raise InvalidArgument("table length must equal domain size")
        if any(v < 0 or v >= self.codomain_size for v in t):
            raise InvalidArgument("table entry outside codomain")
        object.__setattr__(self, "table", t)

    def __call__(self, a: int) -> int:
        return self.table[a]

    def then(self, other: "FiniteMap") -> "FiniteMap":
        """``other ∘ self``."""
        if other.domain_size != self.codomain_size:
            raise InvalidArgument("maps do not chain")
        return FiniteMap(self.domain_size, other.codomain_size, tuple(other.table[v] for v in self.table))


@dataclass(frozen=True)
class MapClass:
    injective: bool
    surjective: bool

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective


def classify_map(F: FiniteMap) -> MapClass:
    hit = set(F.table)
    return MapClass(injective=len(hit) == F.domain_size, surjective=len(hit) == F.codomain_size)


def check_homomorphism(F: FiniteMap, G: FiniteGroup, H: FiniteGroup) -> bool:
    """True iff F(a∘b) = F(a)*F(b) for every pair of elements of G."""
    if F.domain_size != G.order or F.codomain_size != H.order:
        raise InvalidArgument("map dimensions do not match the groups")
    f = np.asarray(F.table)
    return bool(np.array_equal(f[G.cayley], H.cayley[np.ix_(f, f)]))


def check_isomorphism(F: FiniteMap, G: FiniteGroup, H: FiniteGroup) -> bool:
    return check_homomorphism(F, G, H) and classify_map(F).bijective


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupAction:
    """A group acting on state vectors: ``act(g, x) -> g·x``."""

    group: FiniteGroup
    act: Callable[[int, np.ndarray], np.ndarray]

    def __call__(self, g: int, x) -> np.ndarray:
        return np.asarray(self.act(g, np.asarray(x)))

    def check_axioms(self, samples: Sequence, tol: float = DEFAULT_TOL) -> bool:
        """Identity and compatibility axioms on sampled states."""
        G = self.group
        for x in samples:
            x = np.asarray(x)
            if np.max(np.abs(self(G.identity, x) - x), initial=0.0) > tol:
                return False
            for a, b in itertools.product(G.elements(), repeat=2):
                lhs = self(G.compose(a, b), x)
                rhs = self(a, self(b, x))
                if np.max(np.abs(lhs - rhs), initial=0.0) > tol:
                    return False
        return True


def cyclic_shift_action(n: int) -> GroupAction:
    """C_n acting on R^n by rolling coordinates: ``(k·x)[i] = x[i-k]``."""
    return GroupAction(make_cyclic(n), lambda k, x: np.roll(x, k))


def image_rotation_action(side: int) -> GroupAction:
    """C_4 acting on flattened ``side x side`` images by quarter turns."""
    def act(k, x):
        img = np.asarray(x).reshape(side, side)
        return np.rot90(img, k).ravel()

    return GroupAction(make_cyclic(4), act)


def permutation_action(n: int) -> GroupAction:
    """S_n acting on R^n by ``(σ·x)[σ(i)] = x[i]``."""
    G = make_symmetric(n)
    perms = symmetric_permutations(G)

    def act(g, x):
        out = np.empty_like(x)
        out[perms[g]] = x
        return out

    return GroupAction(G, act)


def trivial_action() -> GroupAction:
    return GroupAction(trivial_group(), lambda g, x: x)


def orbit(action: GroupAction, x, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Distinct states ``g·x``, deduplicated by max-norm within ``tol``."""
    found: list[np.ndarray] = []
    for g in action.group.elements():
        y = action(g, x)
        if not any(np.max(np.abs(y - z), initial=0.0) <= tol for z in found):
            found.append(y)
    return found


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of an invariance/equivariance check.

    ``counterexample`` is the first violating ``(g, x)`` in iteration order.
    """

    holds: bool
    max_violation: float
    counterexample: Optional[tuple[int, np.ndarray]] = None

    def __bool__(self) -> bool:
        return self.holds


def check_invariance(f: Callable, action: GroupAction, samples: Sequence, tol: float = DEFAULT_TOL) -> PropertyCheck:
    worst = 0.0
    first = None
    for x in samples:
        x = np.asarray(x)
        fx = np.atleast_1d(np.asarray(f(x), dtype=complex if np.iscomplexobj(x) else float))
        for g in action.group.elements():
            err = float(np.max(np.abs(np.atleast_1d(f(action(g, x))) - fx), initial=0.0))
            worst = max(worst, err)
            if err > tol and first is None:
                first = (g, x)
    return PropertyCheck(first is None, worst, first)


def check_equivariance(f: Callable, action_in: GroupAction, action_out: GroupAction,
                       samples: Sequence, tol: float = DEFAULT_TOL) -> PropertyCheck:
    if not action_in.group.same_structure(action_out.group):
        raise InvalidArgument("input and output actions must share a group")
    worst = 0.0
    first = None
    for x in samples:
        x = np.asarray(x)
        fx = f(x)
        for g in action_in.group.elements():
            err = float(np.max(np.abs(f(action_in(g, x)) - action_out(g, fx)), initial=0.0))
            worst = max(worst, err)
            if err > tol and first is None:
                first = (g, x)
    return PropertyCheck(first is None, worst, first)


def group_convolve(f: Callable, psi: Callable[[int], float], action: GroupAction, x) -> float:
    """``Σ_g f(g·x) ψ(g⁻¹)`` over the finite group."""
    G = action.group
    return sum(f(action(g, x)) * psi(G.inverse(g)) for g in G.elements())


def group_convolve_orbit(f: Callable, psi: Callable[[int], float], action: GroupAction, x) -> np.ndarray:
    """Group convolution read off at every translate: entry h is ``(f⋆ψ)(h·x)``."""
    return np.array([group_convolve(f, psi, action, action(h, x)) for h in action.group.elements()])
