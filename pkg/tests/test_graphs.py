import itertools
import math

import numpy as np
import pytest

from geomkit import InvalidArgument, SizeLimitError, UndefinedAggregateError
from geomkit.graphs import (
    DISCONNECTED,
    Graph,
    MessageFns,
    aggregate,
    build,
    check_graph_homomorphism,
    check_graph_isomorphism,
    connected_components,
    diameter,
    dirichlet_energy,
    disjoint_union,
    distance_matrix,
    find_isomorphism,
    graph_fourier,
    graph_spectrum,
    homophily,
    inverse_graph_fourier,
    knn_graph,
    laplacian_pe,
    matrices,
    message_pass,
    n_components,
    permute,
    permute_features,
    shortest_paths,
    unit_disk,
    wl_distinguishable,
    wl_refine,
)
from geomkit.groups import Permutation
from geomkit.spaces import check_metric_axioms

WEIGHTED_EDGES = ((0, 1, 2.0), (0, 2, 4.0), (1, 2, 1.0), (2, 3, 3.0))
FEATURES = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])


def random_graph(rng, n, p=0.4, weighted=False, directed=False):
    pairs = itertools.permutations(range(n), 2) if directed else itertools.combinations(range(n), 2)
    edges = [(i, j, float(rng.uniform(0.5, 5.0)) if weighted else 1.0) for i, j in pairs if rng.random() < p]
    return Graph(n, tuple(edges), directed)


def random_perm(rng, n):
    return Permutation(tuple(int(v) for v in rng.permutation(n)))


def bellman_ford(G, source):
    dist = np.full(G.n, np.inf)
    dist[source] = 0.0
    arcs = list(G.edges) if G.directed else list(G.edges) + [(j, i, w) for i, j, w in G.edges]
    for _ in range(G.n - 1):
        for i, j, w in arcs:
            if dist[i] + w < dist[j]:
                dist[j] = dist[i] + w
    return dist


def brute_isomorphic(G, H):
    if G.n != H.n:
        return False
    A, B = G.adjacency(), H.adjacency()
    return any(np.array_equal(A[np.ix_(p, p)], B) for p in map(list, itertools.permutations(range(G.n))))


class TestConstruction:
    def test_binary_tree_pattern(self):
        A = build("binary_tree", depth=3).adjacency()
        # rows 1, 2, 3 in one-based labels
        assert set(np.flatnonzero(A[0]) + 1) == {2, 3}
        assert set(np.flatnonzero(A[1]) + 1) == {1, 4, 5}
        assert set(np.flatnonzero(A[2]) + 1) == {1, 6, 7}
        assert A.shape == (7, 7)

    def test_complete_regular(self):
        np.testing.assert_array_equal(build("complete", 5).degrees(), [4] * 5)

    def test_null(self):
        assert not build("null", 3).adjacency().any()

    def test_path_and_cycle(self):
        P = build("path", 6)
        assert len(P.edges) == 5
        deg = P.degrees()
        assert deg[0] == deg[-1] == 1 and np.all(deg[1:-1] == 2)
        np.testing.assert_array_equal(build("cycle", 7).degrees(), [2] * 7)

    def test_invalid(self):
        for kind, n in (("path", 0), ("cycle", 2), ("mystery", 3)):
            with pytest.raises(InvalidArgument):
                build(kind, n)
        with pytest.raises(InvalidArgument):
            build("binary_tree", depth=0)

    def test_edge_validation(self):
        with pytest.raises(InvalidArgument):
            Graph(2, ((0, 1, 0.0),))
        with pytest.raises(InvalidArgument):
            Graph(2, ((0, 1, 1.0), (1, 0, 1.0)))
        with pytest.raises(InvalidArgument):
            Graph(2, ((0, 2, 1.0),))

    def test_undirected_adjacency_symmetric(self, rng):
        A = random_graph(rng, 8, weighted=True).adjacency()
        assert np.array_equal(A, A.T)


class TestGeometricGraphs:
    POINTS = np.array([[0.0], [1.0], [3.0]])

    def test_unit_disk(self):
        assert set((i, j) for i, j, _ in unit_disk(self.POINTS, 1.5).edges) == {(0, 1)}

    def test_unit_disk_complete(self):
        assert len(unit_disk(self.POINTS, 10.0).edges) == 3

    def test_knn(self):
        G = knn_graph(self.POINTS, 1)
        assert G.directed
        assert [j for j, _ in G.neighbors()[1]] == [0]
        assert [j for j, _ in G.neighbors()[2]] == [1]

    def test_knn_ties(self):
        G = knn_graph(np.array([[0.0], [-1.0], [1.0]]), 1)
        assert [j for j, _ in G.neighbors()[0]] == [1]

    def test_knn_out_degree(self, rng):
        G = knn_graph(rng.standard_normal((10, 2)), 3)
        assert all(len(nb) == 3 for nb in G.neighbors())

    def test_knn_invalid(self):
        with pytest.raises(InvalidArgument):
            knn_graph(self.POINTS, 3)
        with pytest.raises(InvalidArgument):
            unit_disk(self.POINTS, 0.0)


class TestMatrices:
    def test_weighted_directed(self):
        G = Graph(4, ((0, 1, 2.0), (0, 2, 4.0), (1, 2, 1.0), (2, 3, 3.0)), directed=True)
        np.testing.assert_array_equal(matrices(G).A, [[0, 2, 4, 0], [0, 0, 1, 0], [0, 0, 0, 3], [0, 0, 0, 0]])

    def test_path_laplacian(self):
        np.testing.assert_array_equal(matrices(build("path", 3)).L, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])

    def test_row_sums(self, rng):
        L = matrices(random_graph(rng, 9, weighted=True)).L
        np.testing.assert_allclose(L.sum(axis=1), 0, atol=1e-12)

    def test_isolated_node(self):
        G = Graph(3, ((0, 1, 1.0),))
        Ln = matrices(G).L_norm
        np.testing.assert_array_equal(Ln[2], [0, 0, 1])

    def test_spectral_properties(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 13))
            G = random_graph(rng, n, p=float(rng.uniform(0.05, 0.6)), weighted=bool(rng.integers(2)))
            comb = graph_spectrum(G).eigenvalues
            norm = graph_spectrum(G, "normalized").eigenvalues
            assert comb.min() >= -1e-9
            assert np.sum(comb < 1e-8) == n_components(G)
            assert norm.min() >= -1e-9 and norm.max() <= 2 + 1e-9

    def test_directed_spectrum_rejected(self):
        with pytest.raises(InvalidArgument):
            graph_spectrum(Graph(2, ((0, 1, 1.0),), directed=True))


class TestDirichlet:
    def test_constant(self, rng):
        assert dirichlet_energy(random_graph(rng, 8, weighted=True), np.full(8, 2.5)) == 0

    def test_single_edge(self):
        assert dirichlet_energy(build("path", 2), [0.0, 1.0]) == 1.0

    def test_quadratic_form(self, rng):
        for _ in range(20):
            G = random_graph(rng, 10, weighted=True)
            x = rng.standard_normal(10)
            A = G.adjacency()
            half_sum = 0.5 * sum(A[i, j] * (x[i] - x[j]) ** 2 for i in range(10) for j in range(10))
            assert dirichlet_energy(G, x) == pytest.approx(x @ matrices(G).L @ x, abs=1e-10)
            assert dirichlet_energy(G, x) == pytest.approx(half_sum, abs=1e-10)

    def test_errors(self):
        with pytest.raises(InvalidArgument):
            dirichlet_energy(Graph(2, ((0, 1, 1.0),), directed=True), [0, 1])
        with pytest.raises(InvalidArgument):
            dirichlet_energy(build("path", 3), [0, 1])


class TestPaths:
    def test_weighted_directed(self):
        G = Graph(4, WEIGHTED_EDGES, directed=True)
        assert shortest_paths(G, 0)[3] == 6
        assert shortest_paths(G, 3)[0] == math.inf

    def test_weighted_undirected(self):
        G = Graph(4, WEIGHTED_EDGES)
        D = distance_matrix(G)
        assert sorted(D[np.triu_indices(4, 1)]) == [1, 2, 3, 3, 4, 6]
        assert diameter(G) == 6

    def test_self_distance(self, rng):
        G = random_graph(rng, 7, weighted=True)
        np.testing.assert_array_equal(np.diag(distance_matrix(G)), 0)

    def test_single_node(self):
        assert diameter(build("null", 1)) == 0

    def test_disconnected(self):
        assert diameter(build("null", 2)) is DISCONNECTED
        assert str(DISCONNECTED) == "disconnected"

    def test_bellman_ford_oracle(self, rng):
        for _ in range(50):
            G = random_graph(rng, 9, p=0.3, weighted=True, directed=True)
            for s in range(G.n):
                np.testing.assert_allclose(shortest_paths(G, s), bellman_ford(G, s), rtol=1e-12)

    def test_metric(self, rng):
        G = random_graph(rng, 10, p=0.5, weighted=True)
        G = Graph(10, G.edges + tuple((i, i + 1, 10.0) for i in range(9) if not G.adjacency()[i, i + 1]))
        D = distance_matrix(G)
        assert check_metric_axioms(list(range(10)), lambda i, j: D[i, j]).ok

    def test_source_range(self):
        with pytest.raises(InvalidArgument):
            shortest_paths(build("path", 3), 3)


class TestComponents:
    def test_examples(self):
        assert n_components(build("cycle", 5)) == 1
        assert n_components(build("null", 4)) == 4
        U = disjoint_union(build("complete", 3), build("path", 2))
        assert n_components(U) == 2
        assert np.sum(graph_spectrum(U).eigenvalues < 1e-8) == 2
        np.testing.assert_array_equal(connected_components(U), [0, 0, 0, 1, 1])

    def test_direction_ignored(self):
        assert n_components(Graph(3, ((0, 1, 1.0), (2, 1, 1.0)), directed=True)) == 1


class TestHomophily:
    def test_uniform(self):
        assert homophily(build("cycle", 4), [1, 1, 1, 1]) == 1

    def test_bipartite(self):
        K = Graph(5, tuple((i, j, 1.0) for i in range(2) for j in range(2, 5)))
        assert homophily(K, ["a", "a", "b", "b", "b"]) == 0

    def test_path(self):
        assert homophily(build("path", 3), [0, 0, 1]) == 0.5
        assert homophily(build("path", 3).with_labels([0, 0, 1])) == 0.5

    def test_no_edges(self):
        with pytest.raises(InvalidArgument):
            homophily(build("null", 3), [0, 0, 0])


class TestPermutation:
    def test_identity(self, rng):
        G = random_graph(rng, 6)
        assert np.array_equal(permute(G, range(6)).adjacency(), G.adjacency())

    def test_swap_features(self):
        np.testing.assert_array_equal(permute_features(FEATURES, [1, 0, 2]), [[3, 4], [1, 2], [5, 6]])

    def test_conjugation(self, rng):
        for _ in range(20):
            G = random_graph(rng, 8, weighted=True)
            p = random_perm(rng, 8)
            P = p.matrix()
            H = permute(G, p)
            np.testing.assert_array_equal(H.adjacency(), P @ G.adjacency() @ P.T)
            np.testing.assert_allclose(np.sort(H.degrees()), np.sort(G.degrees()), rtol=1e-14)
            np.testing.assert_allclose(np.linalg.eigvalsh(H.adjacency()), np.linalg.eigvalsh(G.adjacency()), atol=1e-10)

    def test_not_bijective(self):
        with pytest.raises(InvalidArgument):
            permute(build("path", 3), [0, 0, 1])


class TestAggregate:
    def test_three_by_two(self):
        np.testing.assert_array_equal(aggregate(FEATURES, "sum"), [9, 12])
        np.testing.assert_array_equal(aggregate(FEATURES, "mean"), [3, 4])
        np.testing.assert_array_equal(aggregate(FEATURES, "max"), [5, 6])

    @pytest.mark.parametrize("kind", ["sum", "mean", "max"])
    def test_invariance(self, rng, kind):
        for _ in range(50):
            X = rng.integers(-9, 10, size=(7, 3)).astype(float)
            assert np.array_equal(aggregate(permute_features(X, random_perm(rng, 7)), kind), aggregate(X, kind))

    def test_empty(self):
        np.testing.assert_array_equal(aggregate(np.zeros((0, 2)), "sum"), [0, 0])
        np.testing.assert_array_equal(aggregate(np.zeros((0, 2)), "mean"), [0, 0])
        with pytest.raises(UndefinedAggregateError):
            aggregate(np.zeros((0, 2)), "max")


class TestGraphFourier:
    def test_constant(self, rng):
        G = build("cycle", 8)
        c = graph_fourier(G, np.full(8, 3.0))
        assert abs(c[0]) == pytest.approx(3 * math.sqrt(8))
        assert np.max(np.abs(c[1:])) < 1e-10

    def test_roundtrip_and_parseval(self, rng):
        G = random_graph(rng, 10, weighted=True)
        f = rng.standard_normal(10)
        c = graph_fourier(G, f)
        np.testing.assert_allclose(inverse_graph_fourier(G, c), f, atol=1e-10)
        assert np.linalg.norm(c) == pytest.approx(np.linalg.norm(f), abs=1e-10)


class TestPositionalEncoding:
    def test_path_fiedler(self):
        pe = laplacian_pe(build("path", 3), 1)[:, 0]
        np.testing.assert_allclose(pe, [1 / math.sqrt(2), 0, -1 / math.sqrt(2)], atol=1e-12)

    def test_orthonormal(self, rng):
        pe = laplacian_pe(build("cycle", 9), 4)
        np.testing.assert_allclose(pe.T @ pe, np.eye(4), atol=1e-10)

    def test_permutation_equivariance(self, rng):
        checked = 0
        while checked < 10:
            G = random_graph(rng, 8, p=0.5, weighted=True)
            spec = graph_spectrum(G).eigenvalues
            if n_components(G) != 1 or np.min(np.diff(spec)) < 1e-6:
                continue
            p = random_perm(rng, 8)
            pe, pe_perm = laplacian_pe(G, 3), laplacian_pe(permute(G, p), 3)
            moved = permute_features(pe, p)
            signs = np.sign(np.sum(moved * pe_perm, axis=0))
            np.testing.assert_allclose(pe_perm, moved * signs, atol=1e-8)
            checked += 1

    def test_too_many(self):
        with pytest.raises(InvalidArgument):
            laplacian_pe(build("path", 3), 3)


class TestMessagePassing:
    SUM_NEIGHBORS = MessageFns(psi=lambda xi, xj: xj, phi=lambda xi, a: a)

    def test_adjacency_product(self, rng):
        G = random_graph(rng, 9)
        X = rng.standard_normal((9, 3))
        np.testing.assert_allclose(message_pass(G, X, self.SUM_NEIGHBORS), G.adjacency() @ X, atol=1e-12)

    def test_zero_messages(self, rng):
        X = rng.standard_normal((6, 2))
        fns = MessageFns(psi=lambda xi, xj: np.zeros(2), phi=lambda xi, a: 2 * xi + a)
        for G in (build("complete", 6), build("null", 6), random_graph(rng, 6)):
            np.testing.assert_array_equal(message_pass(G, X, fns), 2 * X)

    @pytest.mark.parametrize("kind", ["sum", "mean", "max"])
    def test_equivariance_exact(self, rng, kind):
        fns = MessageFns(psi=lambda xi, xj: xi * xj - xj, phi=lambda xi, a: np.concatenate([xi + a, a]),
                         aggregate=kind, neutral=np.zeros(3) if kind == "max" else None)
        for _ in range(20):
            G = random_graph(rng, 8, p=0.4)
            X = rng.integers(-5, 6, size=(8, 3)).astype(float)
            p = random_perm(rng, 8)
            lhs = message_pass(permute(G, p), permute_features(X, p), fns)
            assert np.array_equal(lhs, permute_features(message_pass(G, X, fns), p))

    def test_isolated_node(self):
        G = Graph(3, ((0, 1, 1.0),))
        out = message_pass(G, np.ones((3, 2)), self.SUM_NEIGHBORS)
        np.testing.assert_array_equal(out[2], [0, 0])
        with pytest.raises(UndefinedAggregateError):
            message_pass(G, np.ones((3, 2)), MessageFns(lambda a, b: b, lambda a, m: m, "max"))

    def test_directed_out_neighbors(self):
        G = Graph(2, ((0, 1, 1.0),), directed=True)
        out = message_pass(G, np.array([[1.0], [5.0]]), self.SUM_NEIGHBORS)
        np.testing.assert_array_equal(out, [[5.0], [0.0]])

    def test_row_mismatch(self):
        with pytest.raises(InvalidArgument):
            message_pass(build("path", 3), np.ones((2, 2)), self.SUM_NEIGHBORS)


class TestWL:
    def test_isomorphic_pairs(self, rng):
        for _ in range(100):
            G = random_graph(rng, int(rng.integers(2, 10)), p=0.4)
            H = permute(G, random_perm(rng, G.n))
            assert not wl_distinguishable(G, H)
            assert wl_refine(G).histogram == wl_refine(H).histogram

    def test_blind_spot(self):
        C6 = build("cycle", 6)
        two_triangles = disjoint_union(build("cycle", 3), build("cycle", 3))
        assert not wl_distinguishable(C6, two_triangles)
        assert not check_graph_isomorphism(C6, two_triangles)
        assert not brute_isomorphic(C6, two_triangles)

    def test_path_vs_cycle(self):
        assert wl_distinguishable(build("path", 4), build("cycle", 4))

    def test_refinement_counts(self):
        res = wl_refine(build("path", 5))
        assert len(res.histogram) == 3
        assert res.colors[0] == res.colors[4] and res.colors[1] == res.colors[3]

    def test_labels_matter(self):
        P = build("path", 3)
        assert wl_distinguishable(P.with_labels(["a", "b", "a"]), P.with_labels(["b", "a", "a"]))

    def test_sizes_differ(self):
        assert wl_distinguishable(build("path", 3), build("path", 4))


class TestHomIso:
    def test_cycle_to_triangle(self):
        assert check_graph_homomorphism([0, 1, 2, 0, 1, 2], build("cycle", 6), build("complete", 3))

    def test_path_to_cycle(self):
        F = [i % 10 for i in range(11)]
        assert F[0] == F[10]
        assert check_graph_homomorphism(F, build("path", 11), build("cycle", 10))

    def test_non_homomorphism(self):
        assert not check_graph_homomorphism([0, 0, 1], build("path", 3), build("path", 2))

    def test_identity_iso(self, rng):
        G = random_graph(rng, 7)
        assert find_isomorphism(G, G) is not None

    def test_against_brute_force(self, rng):
        for _ in range(60):
            n = int(rng.integers(1, 7))
            G, H = random_graph(rng, n, 0.5), random_graph(rng, n, 0.5)
            if rng.random() < 0.5:
                H = permute(G, random_perm(rng, n))
            assert check_graph_isomorphism(G, H) == brute_isomorphic(G, H)
            sigma = find_isomorphism(G, H)
            if sigma is not None:
                assert np.array_equal(permute(G, sigma).adjacency(), H.adjacency())

    def test_weights_respected(self):
        G = Graph(2, ((0, 1, 1.0),))
        H = Graph(2, ((0, 1, 2.0),))
        assert not check_graph_isomorphism(G, H)

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            check_graph_isomorphism(build("path", 9), build("path", 9))
