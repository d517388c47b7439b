"""Path algebra elements, the commutator quotient (necklaces) and P (x) P."""
from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import QuiverMismatch
from .linalg import Scalar, format_rational, rat, simplify
from .quiver import Path, Quiver, compose


def _accumulate(target: Dict, key, c) -> None:
    v = target.get(key, 0) + c
    if v:
        target[key] = v
    else:
        target.pop(key, None)


def _clean(terms: Mapping) -> Dict:
    out = {}
    for k, v in terms.items():
        v = rat(v)
        if v:
            out[k] = v
    return out


def path_sort_key(p: Path):
    return (len(p.edges), p.edges, p.start)


class _LinComb:
    """Shared plumbing for finite linear combinations over a quiver."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: Mapping = ()):
        self.quiver = quiver
        self.terms: Dict = _clean(dict(terms))

    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.quiver != self.quiver:
            raise QuiverMismatch("elements live over different quivers")

    def _new(self, terms):
        obj = object.__new__(type(self))
        obj.quiver = self.quiver
        obj.terms = terms
        return obj

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            _accumulate(t, k, v)
        return self._new(t)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "_LinComb":
        c = rat(c)
        if not c:
            return self._new({})
        return self._new({k: simplify(c * v) for k, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, _LinComb):
            return NotImplemented
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.quiver == other.quiver and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, key) -> Scalar:
        return self.terms.get(key, 0)


class PathAlgebraElement(_LinComb):
    """Finite rational combination of paths of a quiver (an element of kQ)."""

    __slots__ = ()

    @classmethod
    def zero(cls, q: Quiver) -> "PathAlgebraElement":
        return cls(q, {})

    @classmethod
    def from_path(cls, q: Quiver, p: Path, c=1) -> "PathAlgebraElement":
        return cls(q, {p: c})

    @classmethod
    def idempotent(cls, q: Quiver, v) -> "PathAlgebraElement":
        return cls(q, {q.trivial(v): 1})

    @classmethod
    def one(cls, q: Quiver) -> "PathAlgebraElement":
        return cls(q, {q.trivial(i): 1 for i in range(q.num_vertices)})

    @classmethod
    def edge(cls, q: Quiver, name: str) -> "PathAlgebraElement":
        return cls(q, {q.edge_path(q.edge_index(name)): 1})

    @classmethod
    def from_names(cls, q: Quiver, names, c=1) -> "PathAlgebraElement":
        return cls(q, {q.path(names): c})

    def __mul__(self, other):
        if isinstance(other, PathAlgebraElement):
            return pa_mul(self, other)
        if isinstance(other, _LinComb):
            return NotImplemented
        return self.scale(other)

    def degree(self) -> int:
        """Maximal path length (-1 for zero)."""
        return max((len(p.edges) for p in self.terms), default=-1)

    def homogeneous(self, k: int) -> "PathAlgebraElement":
        return self._new({p: c for p, c in self.terms.items() if len(p.edges) == k})

    def sandwich(self, i: int, j: int) -> "PathAlgebraElement":
        """e_i x e_j."""
        return self._new({p: c for p, c in self.terms.items() if p.start == i and p.end == j})

    def sorted_terms(self) -> List[Tuple[Path, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: path_sort_key(kv[0]))

    def __repr__(self):
        return f"PathAlgebraElement({format_element(self)})"

    def __str__(self):
        return format_element(self)


def pa_mul(x: PathAlgebraElement, y: PathAlgebraElement) -> PathAlgebraElement:
    if x.quiver != y.quiver:
        raise QuiverMismatch("elements live over different quivers")
    out: Dict[Path, Scalar] = {}
    for p, a in x.terms.items():
        for q, b in y.terms.items():
            r = compose(p, q)
            if r is not None:
                _accumulate(out, r, a * b)
    return x._new(out)


def mul_paths(q: Quiver, *factors: PathAlgebraElement) -> PathAlgebraElement:
    out = PathAlgebraElement.one(q)
    for f in factors:
        out = pa_mul(out, f)
    return out


# ---------------------------------------------------------------------------
# necklaces


def canonical_rotation(p: Path, tails) -> Path:
    """Lexicographically least rotation of a closed path (edge-index order)."""
    es = p.edges
    if not es:
        return p
    n = len(es)
    best = es
    for i in range(1, n):
        r = es[i:] + es[:i]
        if r < best:
            best = r
    if best is es:
        return p
    v = tails[best[0]]
    return Path(v, v, best)


def is_canonical(p: Path) -> bool:
    es = p.edges
    return all(es <= es[i:] + es[:i] for i in range(1, len(es)))


class NecklaceElement(_LinComb):
    """Combination of canonically rotated closed paths: an element of P/[P,P]."""

    __slots__ = ()

    def __init__(self, quiver: Quiver, terms: Mapping = ()):
        canon: Dict[Path, Scalar] = {}
        for p, c in dict(terms).items():
            if p.start != p.end:
                raise ValueError("necklaces are closed paths")
            _accumulate(canon, canonical_rotation(p, quiver.tails), rat(c))
        super().__init__(quiver, canon)

    @classmethod
    def cycle(cls, q: Quiver, names, c=1) -> "NecklaceElement":
        return cls(q, {q.path(names): c})

    @classmethod
    def trivial_cycle(cls, q: Quiver, v, c=1) -> "NecklaceElement":
        return cls(q, {q.trivial(v): c})

    def degree(self) -> int:
        return max((len(p.edges) for p in self.terms), default=-1)

    def homogeneous(self, k: int) -> "NecklaceElement":
        return self._new({p: c for p, c in self.terms.items() if len(p.edges) == k})

    def representative(self) -> PathAlgebraElement:
        """A lift to P: each necklace by its canonical closed path."""
        return PathAlgebraElement(self.quiver, dict(self.terms))

    def sorted_terms(self) -> List[Tuple[Path, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: path_sort_key(kv[0]))

    def __repr__(self):
        return f"NecklaceElement({format_element(self)})"

    def __str__(self):
        return format_element(self)


def necklace_project(x: PathAlgebraElement) -> NecklaceElement:
    """Open paths vanish; closed paths go to their canonical rotation."""
    out: Dict[Path, Scalar] = {}
    tails = x.quiver.tails
    for p, c in x.terms.items():
        if p.start == p.end:
            _accumulate(out, canonical_rotation(p, tails), c)
    n = object.__new__(NecklaceElement)
    n.quiver = x.quiver
    n.terms = out
    return n


def necklaces(q: Quiver, k: int) -> List[Path]:
    """Canonical closed paths of length k (trivial paths when k == 0)."""
    if k == 0:
        return [q.trivial(i) for i in range(q.num_vertices)]
    return [p for p in q.closed_paths(k) if is_canonical(p)]


def necklaces_upto(q: Quiver, k: int) -> List[Path]:
    out: List[Path] = []
    for j in range(k + 1):
        out.extend(necklaces(q, j))
    return out


# ---------------------------------------------------------------------------
# P (x) P


class TensorElement(_LinComb):
    """Element of P (x) P stored as (left path, right path) -> coefficient."""

    __slots__ = ()

    @classmethod
    def pure(cls, q: Quiver, u: Path, v: Path, c=1) -> "TensorElement":
        return cls(q, {(u, v): c})

    @classmethod
    def from_elements(cls, x: PathAlgebraElement, y: PathAlgebraElement) -> "TensorElement":
        if x.quiver != y.quiver:
            raise QuiverMismatch("elements live over different quivers")
        return cls(x.quiver, {(u, v): a * b for u, a in x.terms.items() for v, b in y.terms.items()})

    def outer(self, left: Optional[PathAlgebraElement] = None,
              right: Optional[PathAlgebraElement] = None) -> "TensorElement":
        """left (u (x) v) right = left*u (x) v*right."""
        t = self.terms
        if left is not None:
            t = _tensor_act(t, left.terms, 0, True)
        if right is not None:
            t = _tensor_act(t, right.terms, 1, False)
        return self._new(t)

    def inner(self, left: Optional[PathAlgebraElement] = None,
              right: Optional[PathAlgebraElement] = None) -> "TensorElement":
        """left * (u (x) v) * right = u*right (x) left*v."""
        t = self.terms
        if right is not None:
            t = _tensor_act(t, right.terms, 0, False)
        if left is not None:
            t = _tensor_act(t, left.terms, 1, True)
        return self._new(t)

    def flip(self) -> "TensorElement":
        return self._new({(v, u): c for (u, v), c in self.terms.items()})

    def multiply(self) -> PathAlgebraElement:
        out: Dict[Path, Scalar] = {}
        for (u, v), c in self.terms.items():
            r = compose(u, v)
            if r is not None:
                _accumulate(out, r, c)
        return PathAlgebraElement(self.quiver, out)

    def __repr__(self):
        q = self.quiver
        parts = [f"{format_rational(c)}*({q.path_name(u)} (x) {q.path_name(v)})"
                 for (u, v), c in sorted(self.terms.items(), key=lambda kv: (path_sort_key(kv[0][0]), path_sort_key(kv[0][1])))]
        return "TensorElement(" + (" + ".join(parts) or "0") + ")"


def _tensor_act(terms, factor, slot: int, on_left: bool):
    out: Dict = {}
    for key, c in terms.items():
        p = key[slot]
        for f, a in factor.items():
            r = compose(f, p) if on_left else compose(p, f)
            if r is None:
                continue
            nk = (r, key[1]) if slot == 0 else (key[0], r)
            _accumulate(out, nk, c * a)
    return out


# ---------------------------------------------------------------------------
# printing


def format_term_path(q: Quiver, p: Path, cyclic: bool) -> str:
    if not p.edges:
        return f"e_{q.vertices[p.start]}"
    body = ".".join(q.edges[e].name for e in p.edges)
    return f"cyc({body})" if cyclic else body


def format_element(x) -> str:
    """Canonical expression syntax: terms sorted by (length, lex)."""
    cyclic = isinstance(x, NecklaceElement)
    parts: List[str] = []
    for p, c in x.sorted_terms():
        atom = format_term_path(x.quiver, p, cyclic)
        if c == 1:
            s, body = "+", atom
        elif c == -1:
            s, body = "-", atom
        elif c > 0:
            s, body = "+", f"{format_rational(c)}*{atom}"
        else:
            s, body = "-", f"{format_rational(-c)}*{atom}"
        parts.append((s, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, body in parts[1:]:
        out += f" {s} {body}"
    return out
