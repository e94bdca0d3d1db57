"""Plain-text file formats: edge lists, CSV arrays and JSON tables."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import InvalidArgument
from .graphs import Graph
from .groups import FiniteMap
from .spaces import GridFunction
from .spectral import FourierSeries

PathLike = Union[str, Path]


class ParseError(InvalidArgument):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def fmt(x: float) -> str:
    """Shortest round-tripping float text."""
    return repr(float(x))


# ---------------------------------------------------------------------------
# edge lists
# ---------------------------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``directed|undirected [n]`` followed by ``i j [w]`` lines.

    Blank lines and ``#`` comments are ignored. Without an explicit node
    count, n is one more than the largest index used.
    """
    directed = None
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if directed is None:
            if parts[0] not in ("directed", "undirected") or len(parts) > 2:
                raise ParseError("expected header 'directed' or 'undirected' [n]", lineno)
            directed = parts[0] == "directed"
            if len(parts) == 2:
                n = _int(parts[1], lineno)
            continue
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'i j [w]', got {line!r}", lineno)
        i, j = _int(parts[0], lineno), _int(parts[1], lineno)
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"bad weight {parts[2]!r}", lineno) from None
        if i < 0 or j < 0:
            raise ParseError("node indices must be non-negative", lineno)
        edges.append((i, j, w, lineno))
    if directed is None:
        raise ParseError("missing header", 1)
    if n is None:
        n = 1 + max((max(i, j) for i, j, _, _ in edges), default=-1)
    seen = set()
    for i, j, w, lineno in edges:
        key = (i, j) if directed else (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(f"duplicate edge {i} {j}", lineno)
        seen.add(key)
        if max(i, j) >= n:
            raise ParseError(f"node index exceeds declared count {n}", lineno)
        if not w > 0:
            raise ParseError(f"weight must be positive, got {w}", lineno)
    return Graph(n, tuple((i, j, w) for i, j, w, _ in edges), directed)


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer node index, got {tok!r}", lineno) from None


def read_edge_list(path: PathLike) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(G: Graph) -> str:
    lines = [f"{'directed' if G.directed else 'undirected'} {G.n}"]
    lines += [f"{i} {j} {fmt(w)}" for i, j, w in G.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _rows(path_or_text: PathLike, from_text: bool = False) -> list[list[str]]:
    text = path_or_text if from_text else Path(path_or_text).read_text()
    return [row for row in csv.reader(io.StringIO(str(text))) if row and not row[0].startswith("#")]


def _float_rows(rows: list[list[str]]) -> np.ndarray:
    # tolerate a single header row
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        return np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise InvalidArgument(f"non-numeric CSV entry: {exc}") from None


def read_points(path: PathLike) -> np.ndarray:
    """One point per row."""
    return _float_rows(_rows(path))


def write_rows(rows: Iterable[Iterable], header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    header = list(header)
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return out.getvalue()


def write_points(P) -> str:
    return write_rows(np.atleast_2d(np.asarray(P, dtype=float)).tolist())


def read_grid_function(path: PathLike, periodic: bool = True, normalization: str = "circle",
                       b: float | None = None) -> GridFunction:
    """Columns ``x, re, im``; uniform spacing is required.

    For periodic data the omitted right endpoint is inferred from the
    spacing unless given.
    """
    data = _float_rows(_rows(path))
    if data.ndim != 2 or data.shape[1] not in (2, 3):
        raise InvalidArgument("grid CSV needs columns x, re[, im]")
    x = data[:, 0]
    vals = data[:, 1] + 1j * data[:, 2] if data.shape[1] == 3 else data[:, 1]
    if data.shape[1] == 3 and not np.any(data[:, 2]):
        vals = data[:, 1]
    h = np.diff(x)
    if not np.allclose(h, h[0], rtol=1e-9, atol=1e-12):
        raise InvalidArgument("grid CSV must be uniformly spaced")
    a = float(x[0])
    if b is None:
        b = float(x[-1] + h[0]) if periodic else float(x[-1])
    return GridFunction(a, b, vals, periodic, normalization)


def write_grid_function(f: GridFunction) -> str:
    s = np.asarray(f.samples, dtype=complex)
    return write_rows(zip(f.x.tolist(), s.real.tolist(), s.imag.tolist()), ("x", "re", "im"))


def write_fourier_series(series: FourierSeries) -> str:
    return write_rows(series.rows(), ("n", "re", "im"))


def read_dataset(path: PathLike, n_targets: int = 1) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rows of features followed by ``n_targets`` target columns."""
    data = _float_rows(_rows(path))
    if data.ndim != 2 or data.shape[1] <= n_targets or n_targets < 1:
        raise InvalidArgument("dataset needs at least one feature and one target column")
    return [(row[:-n_targets].copy(), row[-n_targets:].copy()) for row in data]


def read_features(path: PathLike, n: int) -> np.ndarray:
    """``node, f1, f2, ...`` rows; every node must appear once."""
    data = _float_rows(_rows(path))
    idx = data[:, 0].astype(int)
    if sorted(idx.tolist()) != list(range(n)):
        raise InvalidArgument("features CSV must list every node exactly once")
    X = np.empty((n, data.shape[1] - 1))
    X[idx] = data[:, 1:]
    return X


def read_labels(path: PathLike, n: int) -> list:
    """``node, label`` rows; every node must appear once."""
    rows = _rows(path)
    if rows and not rows[0][0].strip().lstrip("-").isdigit():
        rows = rows[1:]
    labels = [None] * n
    for row in rows:
        try:
            i = int(row[0])
        except ValueError:
            raise InvalidArgument(f"bad node index {row[0]!r}") from None
        if not 0 <= i < n or labels[i] is not None:
            raise InvalidArgument(f"label row for node {i} is out of range or repeated")
        labels[i] = row[1].strip()
    if any(lab is None for lab in labels):
        raise InvalidArgument("labels CSV must list every node")
    return labels


# ---------------------------------------------------------------------------
# JSON tables
# ---------------------------------------------------------------------------

def read_cayley(path: PathLike) -> np.ndarray:
    """A Cayley table as a JSON array of integer rows (or ``{"table": ...}``)."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("table", data.get("cayley"))
    table = np.asarray(data)
    if table.ndim != 2 or not np.issubdtype(table.dtype, np.integer):
        raise InvalidArgument("Cayley table must be a JSON array of integer rows")
    return table


def dump_table(table) -> str:
    return json.dumps(np.asarray(table).tolist())


def read_finite_map(path: PathLike) -> FiniteMap:
    """``{"domain_size": m, "codomain_size": k, "table": [...]}``."""
    data = json.loads(Path(path).read_text())
    return FiniteMap(int(data["domain_size"]), int(data["codomain_size"]), tuple(data["table"]))


def dump_finite_map(F: FiniteMap) -> str:
    return json.dumps({"domain_size": F.domain_size, "codomain_size": F.codomain_size, "table": list(F.table)})
