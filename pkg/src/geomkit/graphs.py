"""Graph construction and analytics: Laplacians, shortest paths,
connectivity, permutations and invariant aggregation, graph Fourier
analysis, message passing, 1-WL refinement and brute-force
homomorphism/isomorphism checks.

Nodes are ``0..n-1``. Undirected graphs store each edge once and expose a
symmetric adjacency matrix.
"""
from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgument, SizeLimitError, UndefinedAggregateError
from .groups import Permutation
from .spectral import sym_eigen

MAX_ISOMORPHISM_NODES = 8
ZERO_EIGENVALUE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: tuple[tuple[int, int, float], ...] = ()
    directed: bool = False
    features: Optional[np.ndarray] = None
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 0:
            raise InvalidArgument("node count must be non-negative")
        seen = set()
        norm = []
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidArgument(f"edge ({i}, {j}) references a node outside [0, {self.n})")
            if not w > 0:
                raise InvalidArgument(f"edge ({i}, {j}) has non-positive weight {w}")
            key = (i, j) if self.directed else (min(i, j), max(i, j))
            if key in seen:
                raise InvalidArgument(f"duplicate edge {key}")
            seen.add(key)
            norm.append((i, j, w))
        object.__setattr__(self, "edges", tuple(norm))
        if self.features is not None:
            X = np.atleast_2d(np.asarray(self.features, dtype=float))
            if X.shape[0] != self.n:
                raise InvalidArgument("feature matrix needs one row per node")
            object.__setattr__(self, "features", X)
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise InvalidArgument("need one label per node")
            object.__setattr__(self, "labels", tuple(self.labels))

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            A[i, j] = w
            if not self.directed:
                A[j, i] = w
        return A

    def neighbors(self) -> list[list[tuple[int, float]]]:
        """Out-neighbor lists ``[(j, w), ...]``; both directions if undirected."""
        nbrs: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            nbrs[i].append((j, w))
            if not self.directed and i != j:
                nbrs[j].append((i, w))
        for lst in nbrs:
            lst.sort()
        return nbrs

    def undirected_neighbors(self) -> list[list[int]]:
        nbrs: list[set] = [set() for _ in range(self.n)]
        for i, j, _ in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return [sorted(s) for s in nbrs]

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def with_labels(self, labels) -> "Graph":
        return Graph(self.n, self.edges, self.directed, self.features, labels)

    def with_features(self, X) -> "Graph":
        return Graph(self.n, self.edges, self.directed, X, self.labels)


def disjoint_union(G: Graph, H: Graph) -> Graph:
    if G.directed != H.directed:
        raise InvalidArgument("cannot mix directed and undirected graphs")
    shifted = tuple((i + G.n, j + G.n, w) for i, j, w in H.edges)
    return Graph(G.n + H.n, G.edges + shifted, G.directed)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def build(kind: str, n: Optional[int] = None, *, depth: Optional[int] = None,
          edges: Sequence = (), directed: bool = False) -> Graph:
    """Standard graph families: null, path, cycle, complete, binary_tree, from_edges."""
    if kind == "binary_tree":
        if depth is None or depth < 1:
            raise InvalidArgument("binary tree needs depth >= 1")
        size = 2 ** depth - 1
        # level order: children of node i are 2i+1 and 2i+2
        return Graph(size, tuple((i, c, 1.0) for i in range(size) for c in (2 * i + 1, 2 * i + 2) if c < size))
    if kind == "from_edges":
        if n is None:
            n = 1 + max((max(e[0], e[1]) for e in edges), default=-1)
        return Graph(n, tuple(edges), directed)
    if n is None or n < 1:
        raise InvalidArgument(f"{kind} graph needs n >= 1")
    if kind == "null":
        return Graph(n)
    if kind == "path":
        return Graph(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))
    if kind == "cycle":
        if n < 3:
            raise InvalidArgument("a simple cycle needs n >= 3")
        return Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))
    if kind == "complete":
        return Graph(n, tuple((i, j, 1.0) for i, j in itertools.combinations(range(n), 2)))
    raise InvalidArgument(f"unknown graph kind {kind!r}")


def _distance_matrix(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    return np.sqrt(np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=2))


def knn_graph(points, k: int, symmetric: bool = False) -> Graph:
    """Directed edges from each point to its k nearest others (ties: lower index).

    ``symmetric=True`` returns the undirected union of those edges.
    """
    D = _distance_matrix(points)
    n = D.shape[0]
    if not 1 <= k < n:
        raise InvalidArgument(f"need 1 <= k < {n}")
    edges = []
    for i in range(n):
        order = [j for j in np.argsort(D[i], kind="stable") if j != i][:k]
        edges.extend((i, int(j), 1.0) for j in order)
    if symmetric:
        und = {(min(i, j), max(i, j)) for i, j, _ in edges}
        return Graph(n, tuple((i, j, 1.0) for i, j in sorted(und)))
    return Graph(n, tuple(edges), directed=True)


def unit_disk(points, eps: float) -> Graph:
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    D = _distance_matrix(points)
    n = D.shape[0]
    return Graph(n, tuple((i, j, 1.0) for i, j in itertools.combinations(range(n), 2) if D[i, j] <= eps))


# ---------------------------------------------------------------------------
# matrices and spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GraphMatrices:
    A: np.ndarray
    D: np.ndarray
    L: np.ndarray
    L_norm: np.ndarray


def matrices(G: Graph) -> GraphMatrices:
    """Adjacency, degree, combinatorial and normalized Laplacians.

    Isolated nodes get a zero entry in D^{-1/2}.
    """
    A = G.adjacency()
    deg = A.sum(axis=1)
    D = np.diag(deg)
    L = D - A
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(deg), 0.0)
    L_norm = np.eye(G.n) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    return GraphMatrices(A, D, L, L_norm)


@dataclass(frozen=True, eq=False)
class GraphSpectrum:
    kind: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _require_undirected(G: Graph, what: str) -> None:
    if G.directed:
        raise InvalidArgument(f"{what} is defined for undirected graphs only")


def graph_spectrum(G: Graph, kind: str = "combinatorial") -> GraphSpectrum:
    _require_undirected(G, "the Laplacian spectrum")
    M = matrices(G)
    if kind == "combinatorial":
        eig = sym_eigen(M.L)
    elif kind == "normalized":
        eig = sym_eigen(M.L_norm)
    else:
        raise InvalidArgument(f"unknown Laplacian kind {kind!r}")
    return GraphSpectrum(kind, eig.eigenvalues, eig.eigenvectors)


def dirichlet_energy(G: Graph, x) -> float:
    """``½ Σ_ij A_ij (x_i - x_j)²``, i.e. ``x^T L x``."""
    _require_undirected(G, "Dirichlet energy")
    x = np.asarray(x, dtype=float)
    if x.shape != (G.n,):
        raise InvalidArgument("signal needs one value per node")
    return float(sum(w * (x[i] - x[j]) ** 2 for i, j, w in G.edges))


def graph_fourier(G: Graph, f) -> np.ndarray:
    """Coefficients ``U^T f`` in the Laplacian eigenbasis."""
    U = graph_spectrum(G).eigenvectors
    return U.T @ np.asarray(f, dtype=float)


def inverse_graph_fourier(G: Graph, coeffs) -> np.ndarray:
    U = graph_spectrum(G).eigenvectors
    return U @ np.asarray(coeffs, dtype=float)


def laplacian_pe(G: Graph, k: int) -> np.ndarray:
    """Eigenvectors of L for the k smallest nonzero eigenvalues, as columns."""
    if not 1 <= k < G.n:
        raise InvalidArgument(f"need 1 <= k < {G.n}")
    spec = graph_spectrum(G)
    first = int(np.sum(spec.eigenvalues < ZERO_EIGENVALUE_TOL))
    if first + k > G.n:
        raise InvalidArgument(f"only {G.n - first} nontrivial eigenvectors available")
    return spec.eigenvectors[:, first:first + k]


# ---------------------------------------------------------------------------
# paths and connectivity
# ---------------------------------------------------------------------------

class _Disconnected:
    """Marker returned as the diameter of a disconnected graph."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DISCONNECTED"

    def __str__(self) -> str:
        return "disconnected"


DISCONNECTED = _Disconnected()


def _require_positive_weights(G: Graph) -> None:
    for i, j, w in G.edges:
        if not w > 0:
            raise InvalidArgument(f"edge ({i}, {j}) has non-positive weight")


def shortest_paths(G: Graph, source: int) -> np.ndarray:
    """Dijkstra distances from ``source``; unreachable nodes get ``inf``."""
    if not 0 <= source < G.n:
        raise InvalidArgument("source node out of range")
    _require_positive_weights(G)
    nbrs = G.neighbors()
    dist = np.full(G.n, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(G.n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in nbrs[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def distance_matrix(G: Graph) -> np.ndarray:
    return np.array([shortest_paths(G, s) for s in range(G.n)]).reshape(G.n, G.n)


def diameter(G: Graph):
    """Largest shortest-path distance over ordered pairs, or ``DISCONNECTED``."""
    if G.n == 0:
        raise InvalidArgument("diameter of the empty graph is undefined")
    D = distance_matrix(G)
    if np.isinf(D).any():
        return DISCONNECTED
    return float(D.max())


def connected_components(G: Graph) -> np.ndarray:
    """Component label per node (edge direction ignored), numbered by first node."""
    nbrs = G.undirected_neighbors()
    labels = np.full(G.n, -1, dtype=int)
    current = 0
    for start in range(G.n):
        if labels[start] >= 0:
            continue
        labels[start] = current
        stack = [start]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if labels[v] < 0:
                    labels[v] = current
                    stack.append(v)
        current += 1
    return labels


def n_components(G: Graph) -> int:
    return int(connected_components(G).max(initial=-1)) + 1


def homophily(G: Graph, labels=None) -> float:
    """Fraction of edges whose endpoints share a label."""
    y = G.labels if labels is None else tuple(labels)
    if y is None or len(y) != G.n:
        raise InvalidArgument("need one label per node")
    if not G.edges:
        raise InvalidArgument("homophily is undefined without edges")
    return sum(y[i] == y[j] for i, j, _ in G.edges) / len(G.edges)


# ---------------------------------------------------------------------------
# permutations and aggregation
# ---------------------------------------------------------------------------

def _as_permutation(sigma, n: int) -> Permutation:
    p = sigma if isinstance(sigma, Permutation) else Permutation(tuple(sigma))
    if len(p) != n:
        raise InvalidArgument(f"permutation has length {len(p)}, expected {n}")
    return p


def permute(G: Graph, sigma) -> Graph:
    """Relabel node i as sigma(i); adjacency becomes ``P A P^T``."""
    p = _as_permutation(sigma, G.n)
    edges = tuple((p(i), p(j), w) for i, j, w in G.edges)
    X = None if G.features is None else permute_features(G.features, p)
    y = None
    if G.labels is not None:
        y = [None] * G.n
        for i, lab in enumerate(G.labels):
            y[p(i)] = lab
    return Graph(G.n, edges, G.directed, X, y)


def permute_features(X, sigma) -> np.ndarray:
    """Row i of X moves to row sigma(i), i.e. ``P X``."""
    X = np.asarray(X)
    p = _as_permutation(sigma, X.shape[0])
    out = np.empty_like(X)
    out[list(p.map)] = X
    return out


def aggregate(X, kind: str = "sum") -> np.ndarray:
    """Column-wise sum, mean or max of the rows of X."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidArgument("aggregate expects an N x D matrix")
    if kind not in ("sum", "mean", "max"):
        raise InvalidArgument(f"unknown aggregator {kind!r}")
    if X.shape[0] == 0:
        if kind == "max":
            raise UndefinedAggregateError("max over an empty set has no neutral element")
        return np.zeros(X.shape[1])
    if kind == "sum":
        return X.sum(axis=0)
    if kind == "mean":
        return X.mean(axis=0)
    return X.max(axis=0)


@dataclass(frozen=True)
class MessageFns:
    """One message-passing layer: ``x_i' = φ(x_i, ⊕_{j∈N(i)} ψ(x_i, x_j))``.

    ``neutral`` replaces the aggregate of an empty neighborhood; when None,
    sum and mean use the zero vector and max raises.
    """

    psi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    aggregate: str = "sum"
    neutral: Optional[np.ndarray] = None


def message_pass(G: Graph, X, fns: MessageFns) -> np.ndarray:
    """One message-passing update; directed graphs aggregate over out-neighbors."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] != G.n:
        raise InvalidArgument("feature matrix needs one row per node")
    nbrs = G.neighbors()
    rows = []
    width = None
    for i in range(G.n):
        msgs = [np.atleast_1d(fns.psi(X[i], X[j])) for j, _ in nbrs[i]]
        if msgs:
            width = msgs[0].size if width is None else width
            if any(m.size != width for m in msgs):
                raise InvalidArgument("messages have inconsistent widths")
            agg = aggregate(np.vstack(msgs), fns.aggregate)
        elif fns.neutral is not None:
            agg = np.atleast_1d(np.asarray(fns.neutral, dtype=float))
        else:
            # message width probed from a self-message
            probe = np.atleast_1d(fns.psi(X[i], X[i]))
            agg = aggregate(np.zeros((0, probe.size)), fns.aggregate)
        rows.append(np.atleast_1d(fns.phi(X[i], agg)))
    widths = {r.size for r in rows}
    if len(widths) > 1:
        raise InvalidArgument("update produced rows of different widths")
    return np.vstack(rows) if rows else np.zeros((0, X.shape[1]))


# ---------------------------------------------------------------------------
# Weisfeiler-Lehman
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WLResult:
    colors: tuple[int, ...]
    histogram: tuple[tuple[int, int], ...]
    iterations: int


def _wl_rounds(nbrs: list[list[int]], initial: Sequence, max_iters: int):
    """Yield successive colorings until the partition stops refining.

    Colors are ranks of sorted signatures, so they depend only on the
    multiset structure and not on node numbering.
    """
    keys = [repr(c) for c in initial]
    palette = {k: r for r, k in enumerate(sorted(set(keys)))}
    colors = [palette[k] for k in keys]
    yield colors
    for _ in range(max_iters):
        sigs = [(colors[i], tuple(sorted(colors[j] for j in nbrs[i]))) for i in range(len(nbrs))]
        palette = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        stable = len(set(new)) == len(set(colors))
        colors = new
        yield colors
        if stable:
            return


def _histogram(colors: Sequence[int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(Counter(colors).items()))


def wl_refine(G: Graph, max_iters: Optional[int] = None, labels=None) -> WLResult:
    """1-WL color refinement from uniform colors (or the given labels)."""
    init = labels if labels is not None else (G.labels if G.labels is not None else [0] * G.n)
    limit = G.n if max_iters is None else max_iters
    colors, rounds = [], -1
    for colors in _wl_rounds(G.undirected_neighbors(), init, limit):
        rounds += 1
    return WLResult(tuple(colors), _histogram(colors), rounds)


def wl_distinguishable(G1: Graph, G2: Graph, max_iters: Optional[int] = None) -> bool:
    """True iff 1-WL tells the graphs apart.

    Both graphs are refined jointly (as a disjoint union) so that colors are
    comparable; they are distinguished once their color histograms differ.
    """
    if G1.n != G2.n:
        return True
    U = disjoint_union(Graph(G1.n, G1.edges), Graph(G2.n, G2.edges))
    init1 = G1.labels if G1.labels is not None else [0] * G1.n
    init2 = G2.labels if G2.labels is not None else [0] * G2.n
    limit = U.n if max_iters is None else max_iters
    for colors in _wl_rounds(U.undirected_neighbors(), list(init1) + list(init2), limit):
        if _histogram(colors[:G1.n]) != _histogram(colors[G1.n:]):
            return True
    return False


# ---------------------------------------------------------------------------
# homomorphisms and isomorphisms
# ---------------------------------------------------------------------------

def check_graph_homomorphism(F: Sequence[int], G: Graph, H: Graph) -> bool:
    """True iff every edge of G maps to an edge of H under F."""
    if len(F) != G.n:
        raise InvalidArgument("node map must be defined on every node of G")
    if any(not 0 <= int(v) < H.n for v in F):
        raise InvalidArgument("node map leaves the node set of H")
    B = H.adjacency() > 0
    return all(B[F[i], F[j]] for i, j, _ in G.edges)


def find_isomorphism(G: Graph, H: Graph) -> Optional[tuple[int, ...]]:
    """Exhaustive search for a weight-preserving bijection, with degree pruning."""
    if max(G.n, H.n) > MAX_ISOMORPHISM_NODES:
        raise SizeLimitError(f"brute-force isomorphism is limited to {MAX_ISOMORPHISM_NODES} nodes")
    if G.n != H.n or G.directed != H.directed or len(G.edges) != len(H.edges):
        return None
    A, B = G.adjacency(), H.adjacency()
    degA, degB = (A > 0).sum(1) + (A > 0).sum(0), (B > 0).sum(1) + (B > 0).sum(0)
    if sorted(degA) != sorted(degB):
        return None
    n = G.n
    mapping = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for c in range(n):
            if used[c] or degA[i] != degB[c]:
                continue
            if A[i, i] != B[c, c]:
                continue
            if any(A[i, k] != B[c, mapping[k]] or A[k, i] != B[mapping[k], c] for k in range(i)):
                continue
            mapping[i], used[c] = c, True
            if extend(i + 1):
                return True
            used[c] = False
        mapping[i] = -1
        return False

    return tuple(mapping) if extend(0) else None


def check_graph_isomorphism(G: Graph, H: Graph) -> bool:
    return find_isomorphism(G, H) is not None
