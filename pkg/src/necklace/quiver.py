"""Quivers, their doubles, paths and root-theoretic combinatorics."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import NameCollision, QuiverMismatch, TooLarge
from .linalg import SparseMatrix


class Edge(NamedTuple):
    name: str
    tail: int
    head: int


class Path(NamedTuple):
    """A path in a quiver: vertex indices ``start``/``end`` and edge indices.

    ``edges == ()`` is the trivial path e_start (then start == end).
    Composition convention: a1...an needs head(a_k) == tail(a_{k+1}).
    """

    start: int
    end: int
    edges: Tuple[int, ...]

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.edges)

    @property
    def trivial(self) -> bool:
        return not self.edges

    @property
    def closed(self) -> bool:
        return self.start == self.end


def compose(p: Path, q: Path) -> Optional[Path]:
    """p*q (p first, then q), or None when h(p) != t(q)."""
    if p.end != q.start:
        return None
    if not p.edges:
        return q
    if not q.edges:
        return p
    return Path(p.start, q.end, p.edges + q.edges)


def subpath(p: Path, i: int, j: int, edges_tail, edges_head) -> Path:
    """Edges p[i:j] as a Path; empty slices give the trivial path at the right vertex."""
    if i < j:
        es = p.edges[i:j]
        return Path(edges_tail[es[0]], edges_head[es[-1]], es)
    if i == 0:
        v = p.start
    else:
        v = edges_head[p.edges[i - 1]]
    return Path(v, v, ())


class Quiver:
    """A finite quiver with a fixed vertex order and edge order.

    Vertex ids are stored as strings.  Edges are (name, tail, head) with tail
    and head given as vertex ids.
    """

    def __init__(self, vertices: Sequence, edges: Iterable[Tuple[str, object, object]]):
        self.vertices: Tuple[str, ...] = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        es = []
        for name, t, h in edges:
            t, h = str(t), str(h)
            if t not in self._vindex or h not in self._vindex:
                raise ValueError(f"edge {name!r} references an unknown vertex")
            es.append(Edge(str(name), self._vindex[t], self._vindex[h]))
        names = [e.name for e in es]
        if len(set(names)) != len(names):
            raise NameCollision("edge names must be unique")
        self.edges: Tuple[Edge, ...] = tuple(es)
        self._eindex = {e.name: i for i, e in enumerate(self.edges)}
        self.tails: Tuple[int, ...] = tuple(e.tail for e in self.edges)
        self.heads: Tuple[int, ...] = tuple(e.head for e in self.edges)
        out: List[List[int]] = [[] for _ in self.vertices]
        for i, e in enumerate(self.edges):
            out[e.tail].append(i)
        self.out_edges: Tuple[Tuple[int, ...], ...] = tuple(tuple(o) for o in out)

    # -- identity ---------------------------------------------------------
    def _key(self):
        return (type(self).__name__, self.vertices, self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quiver):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        es = ", ".join(f"{e.name}:{self.vertices[e.tail]}->{self.vertices[e.head]}" for e in self.edges)
        return f"{type(self).__name__}(vertices={list(self.vertices)}, edges=[{es}])"

    # -- lookups -----------------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex_index(self, v) -> int:
        try:
            return self._vindex[str(v)]
        except KeyError:
            raise KeyError(f"unknown vertex {v!r}") from None

    def edge_index(self, name: str) -> int:
        return self._eindex[name]

    def has_edge(self, name: str) -> bool:
        return name in self._eindex

    def edge_name(self, i: int) -> str:
        return self.edges[i].name

    # -- paths -------------------------------------------------------------
    def trivial(self, v) -> Path:
        i = v if isinstance(v, int) else self.vertex_index(v)
        return Path(i, i, ())

    def path(self, names: Union[str, Sequence[str]]) -> Path:
        """Path from a list of edge names (or a '.'-joined string)."""
        if isinstance(names, str):
            names = [n for n in names.split(".") if n]
        idx = tuple(self.edge_index(n) for n in names)
        return self.path_from_edges(idx)

    def path_from_edges(self, edges: Sequence[int]) -> Path:
        edges = tuple(edges)
        if not edges:
            raise ValueError("use trivial() for paths of length zero")
        for a, b in zip(edges, edges[1:]):
            if self.heads[a] != self.tails[b]:
                raise ValueError(
                    f"edges {self.edge_name(a)!r} and {self.edge_name(b)!r} are not composable")
        return Path(self.tails[edges[0]], self.heads[edges[-1]], edges)

    def edge_path(self, i: int) -> Path:
        return Path(self.tails[i], self.heads[i], (i,))

    def sub(self, p: Path, i: int, j: int) -> Path:
        return subpath(p, i, j, self.tails, self.heads)

    def paths_of_length(self, k: int, start: Optional[int] = None) -> Iterator[Path]:
        """All paths of length k (optionally from a given start), in lex order."""
        starts = range(self.num_vertices) if start is None else (start,)
        for s in starts:
            if k == 0:
                yield Path(s, s, ())
                continue
            yield from self._extend(s, (), s, k)

    def _extend(self, start, prefix, at, k):
        for e in self.out_edges[at]:
            np = prefix + (e,)
            if k == 1:
                yield Path(start, self.heads[e], np)
            else:
                yield from self._extend(start, np, self.heads[e], k - 1)

    def closed_paths(self, k: int) -> Iterator[Path]:
        for p in self.paths_of_length(k):
            if p.start == p.end:
                yield p

    def path_name(self, p: Path) -> str:
        if not p.edges:
            return f"e_{self.vertices[p.start]}"
        return ".".join(self.edges[e].name for e in p.edges)

    # -- structure ---------------------------------------------------------
    def components(self) -> List[List[int]]:
        """Connected components of the underlying undirected graph (vertex indices)."""
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.tail), find(e.head)
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: Dict[int, List[int]] = {}
        for v in range(self.num_vertices):
            groups.setdefault(find(v), []).append(v)
        return [groups[k] for k in sorted(groups)]

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"name": e.name, "from": self.vertices[e.tail], "to": self.vertices[e.head]}
                      for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Quiver":
        try:
            verts = data["vertices"]
            edges = [(e["name"], e["from"], e["to"]) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed quiver description: {exc}") from None
        return cls(verts, edges)


class DoubledQuiver(Quiver):
    """The double of a quiver: base edges first, then the reversed edges a*."""

    def __init__(self, base: Quiver):
        for e in base.edges:
            if e.name.endswith("*"):
                raise NameCollision(f"base edge name {e.name!r} already ends in '*'")
        verts = base.vertices
        es = [(e.name, verts[e.tail], verts[e.head]) for e in base.edges]
        es += [(e.name + "*", verts[e.head], verts[e.tail]) for e in base.edges]
        super().__init__(verts, es)
        self.base = base
        m = base.num_edges
        self.star: Tuple[int, ...] = tuple(list(range(m, 2 * m)) + list(range(m)))
        self.eps: Tuple[int, ...] = tuple([1] * m + [-1] * m)

    @property
    def base_edges(self) -> range:
        return range(self.base.num_edges)

    def _key(self):
        return ("DoubledQuiver", self.base.vertices, self.base.edges)


def double(q: Quiver) -> DoubledQuiver:
    if isinstance(q, DoubledQuiver):
        raise QuiverMismatch("quiver is already a double")
    return DoubledQuiver(q)


def load_quiver(source) -> Quiver:
    """Quiver from a JSON file path, JSON text or an already parsed dict."""
    if isinstance(source, Mapping):
        return Quiver.from_dict(source)
    text = str(source)
    if text.lstrip().startswith("{"):
        return Quiver.from_dict(json.loads(text))
    with open(text) as fh:
        return Quiver.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# standard examples


def jordan_quiver() -> Quiver:
    return Quiver(["0"], [("x", "0", "0")])


def loop_quiver(g: int) -> Quiver:
    names = ["x", "y", "z"] if g <= 3 else [f"x{i}" for i in range(1, g + 1)]
    return Quiver(["0"], [(names[i], "0", "0") for i in range(g)])


def a_n(n: int) -> Quiver:
    verts = [str(i) for i in range(1, n + 1)]
    edges = [(chr(ord("a") + i) if n <= 26 else f"a{i}", verts[i], verts[i + 1]) for i in range(n - 1)]
    return Quiver(verts, edges)


def d4() -> Quiver:
    return Quiver(["0", "1", "2", "3"], [("a", "1", "0"), ("b", "2", "0"), ("c", "3", "0")])


def kronecker(m: int) -> Quiver:
    """Two vertices joined by m parallel edges."""
    names = [chr(ord("a") + i) for i in range(m)]
    return Quiver(["1", "2"], [(n, "1", "2") for n in names])


# ---------------------------------------------------------------------------
# Cartan data, Tits form, classification


DimensionVector = Tuple[int, ...]


def dim_vector(q: Quiver, d) -> DimensionVector:
    """Normalize a dimension vector given as mapping vertex -> int or as a sequence."""
    if isinstance(d, Mapping):
        keys = {str(k) for k in d}
        if keys != set(q.vertices):
            raise ValueError("dimension vector must be indexed by exactly the vertex set")
        out = tuple(int(d[k]) if k in d else int(d[int(k)]) for k in q.vertices)  # type: ignore[index]
    else:
        out = tuple(int(x) for x in d)
        if len(out) != q.num_vertices:
            raise ValueError("dimension vector has the wrong length")
    if any(x < 0 for x in out):
        raise ValueError("dimension vector entries must be nonnegative")
    return out


@dataclass(frozen=True)
class CartanData:
    adjacency: Tuple[Tuple[int, ...], ...]
    cartan: Tuple[Tuple[int, ...], ...]

    def pairing(self, a: Sequence[int], b: Sequence[int]) -> int:
        """(a, A b)."""
        A = self.cartan
        n = len(A)
        return sum(a[i] * A[i][j] * b[j] for i in range(n) for j in range(n) if a[i] and b[j])

    def tits_form(self, d: Sequence[int]) -> Fraction:
        return Fraction(self.pairing(d, d), 2)

    def p(self, d: Sequence[int]) -> Fraction:
        return 1 - self.tits_form(d)

    def adjacency_matrix(self) -> SparseMatrix:
        return SparseMatrix.from_rows(self.adjacency) if self.adjacency else SparseMatrix.zero(0, 0)

    def cartan_matrix(self) -> SparseMatrix:
        return SparseMatrix.from_rows(self.cartan) if self.cartan else SparseMatrix.zero(0, 0)


def cartan_and_tits(q: Quiver) -> CartanData:
    """Adjacency C of the double (a loop adds 2 on the diagonal) and A = 2I - C."""
    base = q.base if isinstance(q, DoubledQuiver) else q
    n = base.num_vertices
    C = [[0] * n for _ in range(n)]
    for e in base.edges:
        if e.tail == e.head:
            C[e.tail][e.tail] += 2
        else:
            C[e.tail][e.head] += 1
            C[e.head][e.tail] += 1
    A = [[(2 if i == j else 0) - C[i][j] for j in range(n)] for i in range(n)]
    return CartanData(tuple(map(tuple, C)), tuple(map(tuple, A)))


DYNKIN = "Dynkin"
EXTENDED_DYNKIN = "ExtendedDynkin"
WILD = "Wild"


def _definiteness(M: List[List[Fraction]]) -> str:
    """'pd', 'psd' (singular) or 'indefinite' for a symmetric rational matrix.

    Symmetric Gaussian elimination with diagonal pivots: a negative pivot or a
    zero pivot with a nonzero off-diagonal row certifies indefiniteness.
    """
    M = [[Fraction(x) for x in row] for row in M]
    n = len(M)
    alive = list(range(n))
    singular = False
    while alive:
        # prefer a positive diagonal entry
        k = next((i for i in alive if M[i][i] > 0), None)
        if k is None:
            if any(M[i][i] < 0 for i in alive):
                return "indefinite"
            # all remaining diagonals are zero: PSD only if the block vanishes
            if any(M[i][j] for i in alive for j in alive):
                return "indefinite"
            return "psd"
        alive.remove(k)
        piv = M[k][k]
        for i in alive:
            f = M[i][k] / piv
            if f:
                for j in alive:
                    M[i][j] -= f * M[k][j]
        # zero rows left behind only make the form singular
        for i in list(alive):
            if M[i][i] == 0 and not any(M[i][j] for j in alive):
                alive.remove(i)
                singular = True
    return "psd" if singular else "pd"


def _classify_component(A, comp: List[int]) -> str:
    sub = [[A[i][j] for j in comp] for i in comp]
    kind = _definiteness(sub)
    return {"pd": DYNKIN, "psd": EXTENDED_DYNKIN, "indefinite": WILD}[kind]


def classify(q: Quiver) -> Union[str, List[str]]:
    """Dynkin / ExtendedDynkin / Wild from the definiteness of the Tits form.

    A connected quiver gives a single label; otherwise one label per component.
    """
    A = cartan_and_tits(q).cartan
    comps = q.components()
    labels = [_classify_component(A, c) for c in comps]
    if len(labels) == 1:
        return labels[0]
    return labels


def _support_connected(q: Quiver, d: Sequence[int]) -> bool:
    supp = [i for i, x in enumerate(d) if x]
    if not supp:
        return False
    seen = {supp[0]}
    stack = [supp[0]]
    sset = set(supp)
    adj: Dict[int, set] = {i: set() for i in supp}
    for e in q.edges:
        if e.tail in sset and e.head in sset:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == sset


def fundamental_region_test(q: Quiver, d) -> bool:
    """Connected support and (A d)_i <= 0 for every vertex."""
    d = dim_vector(q, d)
    if not any(d):
        raise ValueError("dimension vector must be nonzero")
    A = cartan_and_tits(q).cartan
    if not _support_connected(q, d):
        return False
    n = len(d)
    return all(sum(A[i][j] * d[j] for j in range(n)) <= 0 for i in range(n))


def sigma0_member(q: Quiver, d, bound: int = 10 ** 7) -> bool:
    """Decomposition criterion: every d = a + b with a, b > 0 has (a, A b) <= -2."""
    d = dim_vector(q, d)
    if not any(d):
        raise ValueError("dimension vector must be nonzero")
    count = 1
    for x in d:
        count *= x + 1
    if count > bound:
        raise TooLarge(f"{count} decompositions exceed the bound {bound}")
    cd = cartan_and_tits(q)
    for alpha in itertools.product(*(range(x + 1) for x in d)):
        if not any(alpha) or alpha == d:
            continue
        beta = tuple(x - y for x, y in zip(d, alpha))
        if cd.pairing(alpha, beta) > -2:
            return False
    return True
