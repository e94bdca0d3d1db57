"""Command-line front end.

Reports go to stdout as JSON (analytics) or CSV (arrays); diagnostics go to
stderr. Exit status: 0 success, 1 domain failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import fileio, graphs, groups, learn, spectral
from .errors import GeomkitError, InvalidArgument

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _num(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x


# ---------------------------------------------------------------------------
# graph analyze
# ---------------------------------------------------------------------------

def cmd_graph_analyze(args) -> int:
    G = fileio.read_edge_list(args.path)
    if args.labels:
        G = G.with_labels(fileio.read_labels(args.labels, G.n))
    deg = G.degrees()
    comps = graphs.connected_components(G)
    diam = graphs.diameter(G)
    if diam is graphs.DISCONNECTED:
        diam_out = "inf" if args.inf else "disconnected"
    else:
        diam_out = _num(diam)
    report = {
        "nodes": G.n,
        "edges": len(G.edges),
        "directed": G.directed,
        "degrees": {
            "values": [_num(d) for d in deg],
            "min": _num(deg.min()) if G.n else None,
            "max": _num(deg.max()) if G.n else None,
            "mean": float(deg.mean()) if G.n else None,
        },
        "components": int(comps.max(initial=-1)) + 1,
        "component_labels": comps.tolist(),
        "diameter": diam_out,
    }
    if G.labels is not None and G.edges:
        report["homophily"] = graphs.homophily(G)
    if not G.directed:
        spec = graphs.graph_spectrum(G)
        head = spec.eigenvalues[: args.spectrum_head]
        report["laplacian_spectrum_head"] = [float(np.round(v, 12)) + 0.0 for v in head]
        if args.pe:
            pe = graphs.laplacian_pe(G, args.pe)
            report["positional_encoding"] = np.round(pe, 12).tolist()
    elif args.pe:
        raise UsageError("positional encodings need an undirected graph")
    _emit(report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# heat
# ---------------------------------------------------------------------------

def cmd_heat(args) -> int:
    if args.tmax < 0:
        raise UsageError("--tmax must be non-negative")
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.init == "delta":
        if args.grid < 16:
            raise UsageError("--grid must be at least 16")
        g = spectral.delta_function(args.grid)
    else:
        g = fileio.read_grid_function(args.init)
        if not np.isclose(g.b - g.a, 2 * np.pi):
            raise UsageError("initial condition must sample one period of length 2*pi")
        g = spectral.GridFunction(-np.pi, np.pi, g.samples, True, "circle")
        if g.n < 16:
            raise UsageError("initial condition needs at least 16 samples")
    n_max = args.nmax if args.nmax is not None else min(spectral.DEFAULT_N_MAX, g.n // 4)
    sol = spectral.heat_solve(g, 0.0, n_max)
    x = g.x
    rows = []
    for k in range(1, args.steps + 1):
        t = args.tmax * k / args.steps
        vals = sol(x, t)
        rows.extend((t, xi, vi) for xi, vi in zip(x.tolist(), np.real(vals).tolist()))
    sys.stdout.write(fileio.write_rows(rows, ("t", "x", "value")))
    return EXIT_OK


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------

def cmd_group_check(args) -> int:
    table = fileio.read_cayley(args.path)
    if table.shape[0] != table.shape[1]:
        raise UsageError("Cayley table must be square")
    report = groups.check_group_axioms(table)
    _emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_group_map(args) -> int:
    F = fileio.read_finite_map(args.map)
    G = groups.FiniteGroup.from_table(fileio.read_cayley(args.domain))
    H = groups.FiniteGroup.from_table(fileio.read_cayley(args.codomain))
    kind = groups.classify_map(F)
    hom = groups.check_homomorphism(F, G, H)
    _emit({
        "injective": kind.injective,
        "surjective": kind.surjective,
        "bijective": kind.bijective,
        "homomorphism": hom,
        "isomorphism": hom and kind.bijective,
    })
    return EXIT_OK if hom else EXIT_DOMAIN


_FUNCTIONS = {
    "identity": lambda x: x,
    "sum": lambda x: np.array([x.sum()]),
    "first": lambda x: x[:1],
    "norm": lambda x: np.array([np.linalg.norm(x)]),
    "square": lambda x: x ** 2,
    "cumsum": np.cumsum,
}


def cmd_equivariance(args) -> int:
    if args.group == "cyclic":
        action = groups.cyclic_shift_action(args.n)
        dim = args.n
    elif args.group == "rotation":
        action = groups.image_rotation_action(args.n)
        dim = args.n * args.n
    else:
        action = groups.permutation_action(args.n)
        dim = args.n
    rng = np.random.default_rng(args.seed)
    samples = [rng.standard_normal(dim) for _ in range(args.samples)]
    f = _FUNCTIONS[args.function]
    if args.mode == "invariance":
        res = groups.check_invariance(f, action, samples, args.tol)
    else:
        res = groups.check_equivariance(f, action, action, samples, args.tol)
    out = {"mode": args.mode, "holds": res.holds, "max_violation": res.max_violation}
    if res.counterexample is not None:
        g, x = res.counterexample
        out["counterexample"] = {"element": action.group.labels[g], "state": x.tolist()}
    _emit(out)
    return EXIT_OK if res.holds else EXIT_DOMAIN


# ---------------------------------------------------------------------------
# fourier / mlp / wl
# ---------------------------------------------------------------------------

def cmd_fourier(args) -> int:
    g = fileio.read_grid_function(args.path)
    g = spectral.GridFunction(g.a, g.b, g.samples, True, "circle")
    series = spectral.fourier_coeffs(g, args.nmax)
    sys.stdout.write(fileio.write_fourier_series(series))
    return EXIT_OK


def cmd_mlp_train(args) -> int:
    data = fileio.read_dataset(args.path, args.targets)
    d_in, d_out = data[0][0].size, data[0][1].size
    hidden = [int(h) for h in args.hidden.split(",") if h] if args.hidden else []
    sizes = [d_in, *hidden, d_out]
    acts = [args.activation] * len(hidden) + ["identity"]
    params = learn.init_mlp(sizes, acts, seed=args.seed)
    params, history = learn.train(params, data, args.eta, args.steps)
    final, _ = learn.batch_loss_and_grad(params, data)
    _emit({
        "sizes": sizes,
        "steps": args.steps,
        "eta": args.eta,
        "initial_loss": history[0],
        "final_loss": final,
    })
    return EXIT_OK


def cmd_wl(args) -> int:
    G1, G2 = fileio.read_edge_list(args.g1), fileio.read_edge_list(args.g2)
    dist = graphs.wl_distinguishable(G1, G2)
    out = {"result": "distinguishable" if dist else "indistinguishable"}
    if max(G1.n, G2.n) <= graphs.MAX_ISOMORPHISM_NODES:
        out["isomorphic"] = graphs.check_graph_isomorphism(G1, G2)
    _emit(out)
    if args.assert_isomorphic and (dist or not out.get("isomorphic", True)):
        return EXIT_DOMAIN
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geomkit", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for every randomized routine")
    sub = p.add_subparsers(dest="command", required=True)

    graph = sub.add_parser("graph", help="graph analytics").add_subparsers(dest="action", required=True)
    ga = graph.add_parser("analyze", help="JSON report for an edge-list file")
    ga.add_argument("path")
    ga.add_argument("--labels", help="CSV of node,label rows")
    ga.add_argument("--pe", type=int, default=0, help="number of Laplacian positional encodings")
    ga.add_argument("--spectrum-head", type=int, default=5)
    ga.add_argument("--inf", action="store_true", help="report a disconnected diameter as \"inf\"")
    ga.set_defaults(func=cmd_graph_analyze)

    heat = sub.add_parser("heat", help="periodic heat equation, CSV rows t,x,value")
    heat.add_argument("--grid", type=int, default=256)
    heat.add_argument("--tmax", type=float, required=True)
    heat.add_argument("--steps", type=int, default=1)
    heat.add_argument("--init", default="delta", help="'delta' or a CSV file with columns x,re[,im]")
    heat.add_argument("--nmax", type=int, default=None)
    heat.set_defaults(func=cmd_heat)

    group = sub.add_parser("group", help="finite groups").add_subparsers(dest="action", required=True)
    gc = group.add_parser("check", help="verify group axioms of a JSON Cayley table")
    gc.add_argument("path")
    gc.set_defaults(func=cmd_group_check)
    gm = group.add_parser("map", help="classify a map between two groups")
    gm.add_argument("map")
    gm.add_argument("domain")
    gm.add_argument("codomain")
    gm.set_defaults(func=cmd_group_map)

    eq = sub.add_parser("equivariance", help="check invariance/equivariance of a built-in function")
    eq.add_argument("--group", choices=("cyclic", "rotation", "symmetric"), default="cyclic")
    eq.add_argument("--n", type=int, default=4)
    eq.add_argument("--function", choices=sorted(_FUNCTIONS), required=True)
    eq.add_argument("--mode", choices=("invariance", "equivariance"), default="equivariance")
    eq.add_argument("--samples", type=int, default=10)
    eq.add_argument("--tol", type=float, default=1e-9)
    eq.set_defaults(func=cmd_equivariance)

    fo = sub.add_parser("fourier", help="Fourier coefficients of a periodic CSV signal")
    fo.add_argument("path")
    fo.add_argument("--nmax", type=int, default=spectral.DEFAULT_N_MAX)
    fo.set_defaults(func=cmd_fourier)

    mlp = sub.add_parser("mlp", help="multilayer perceptron").add_subparsers(dest="action", required=True)
    mt = mlp.add_parser("train", help="full-batch gradient descent on a CSV dataset")
    mt.add_argument("path")
    mt.add_argument("--targets", type=int, default=1, help="number of trailing target columns")
    mt.add_argument("--hidden", default="", help="comma-separated hidden widths")
    mt.add_argument("--activation", choices=sorted(learn.ACTIVATIONS), default="tanh")
    mt.add_argument("--eta", type=float, default=0.05)
    mt.add_argument("--steps", type=int, default=500)
    mt.set_defaults(func=cmd_mlp_train)

    wl = sub.add_parser("wl", help="1-WL test on two edge-list files")
    wl.add_argument("g1")
    wl.add_argument("g2")
    wl.add_argument("--assert-isomorphic", action="store_true")
    wl.set_defaults(func=cmd_wl)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidArgument, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeomkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
