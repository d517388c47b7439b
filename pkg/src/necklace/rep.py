"""Representations of a quiver as tuples of exact rational matrices.

A point assigns to each edge a a matrix X_a of shape d_{h(a)} x d_{t(a)}.
A path a1 a2 ... an evaluates to X_an ... X_a1, so ev(pq) = ev(q) ev(p).
Matrices are numpy object arrays holding ints and Fractions.
"""
from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .algebra import NecklaceElement, PathAlgebraElement, _accumulate, canonical_rotation, necklaces
from .errors import QuiverMismatch, ShapeMismatch
from .linalg import Echelon, Scalar, SparseMatrix, format_rational, inverse, parse_rational, rat, simplify
from .necklace_lie import necklace_bracket, w_element
from .quiver import DoubledQuiver, Path, Quiver, double

Block = Tuple[int, int]


def _zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=object) * 0  # object zeros are Python ints


def _identity(n: int) -> np.ndarray:
    m = _zeros(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def _exact(m) -> np.ndarray:
    a = np.array(m, dtype=object)
    if a.ndim != 2:
        a = a.reshape((len(m), -1)) if len(m) else a.reshape((0, 0))
    return np.vectorize(simplify, otypes=[object])(np.vectorize(rat, otypes=[object])(a)) if a.size else a


def _trace(m: np.ndarray) -> Scalar:
    return simplify(sum((m[i, i] for i in range(m.shape[0])), 0))


def matrix_to_json(m: np.ndarray) -> List[List[str]]:
    return [[format_rational(x) for x in row] for row in m.tolist()]


def matrix_from_json(rows) -> np.ndarray:
    return _exact([[parse_rational(str(x)) for x in row] for row in rows])


def _dims_tuple(q: Quiver, d) -> Tuple[int, ...]:
    if isinstance(d, Mapping):
        out = [0] * q.num_vertices
        for k, v in d.items():
            out[q.vertex_index(k) if not isinstance(k, int) else k] = int(v)
        return tuple(out)
    d = tuple(int(x) for x in d)
    if len(d) != q.num_vertices:
        raise ShapeMismatch(f"dimension vector has {len(d)} entries for {q.num_vertices} vertices")
    return d


class RepPoint:
    """Edge -> exact matrix of shape d_h x d_t.  Also used for tangent vectors."""

    __slots__ = ("quiver", "dims", "mats")

    def __init__(self, quiver: Quiver, dims, mats: Mapping):
        self.quiver = quiver
        self.dims = _dims_tuple(quiver, dims)
        out: Dict[int, np.ndarray] = {}
        for e in range(quiver.num_edges):
            h, t = self.dims[quiver.heads[e]], self.dims[quiver.tails[e]]
            key = e if e in mats else quiver.edges[e].name
            m = mats.get(key)
            m = _zeros(h, t) if m is None else _exact(m) if not isinstance(m, np.ndarray) else m
            if m.shape != (h, t):
                raise ShapeMismatch(f"edge {quiver.edges[e].name}: expected shape {(h, t)}, got {m.shape}")
            out[e] = m
        self.mats = out

    @classmethod
    def zero(cls, q: Quiver, dims) -> "RepPoint":
        return cls(q, dims, {})

    @classmethod
    def random(cls, q: Quiver, dims, rng: np.random.Generator, bound: int = 5) -> "RepPoint":
        d = _dims_tuple(q, dims)
        mats = {}
        for e in range(q.num_edges):
            h, t = d[q.heads[e]], d[q.tails[e]]
            vals = rng.integers(-bound, bound + 1, size=(h, t)).tolist()
            mats[e] = np.array(vals, dtype=object).reshape((h, t))
        return cls(q, d, mats)

    def __getitem__(self, a) -> np.ndarray:
        return self.mats[a if isinstance(a, int) else self.quiver.edge_index(a)]

    def _like(self, mats) -> "RepPoint":
        obj = object.__new__(RepPoint)
        obj.quiver, obj.dims, obj.mats = self.quiver, self.dims, mats
        return obj

    def _check(self, other: "RepPoint"):
        if other.quiver != self.quiver:
            raise QuiverMismatch("points live over different quivers")
        if other.dims != self.dims:
            raise ShapeMismatch(f"dimension vectors differ: {self.dims} vs {other.dims}")

    def __add__(self, other: "RepPoint") -> "RepPoint":
        self._check(other)
        return self._like({e: self.mats[e] + other.mats[e] for e in self.mats})

    def scale(self, c) -> "RepPoint":
        c = rat(c)
        return self._like({e: m * c for e, m in self.mats.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepPoint):
            return NotImplemented
        return (self.quiver == other.quiver and self.dims == other.dims
                and all(np.array_equal(self.mats[e], other.mats[e]) for e in self.mats))

    def to_json(self) -> dict:
        q = self.quiver
        return {
            "dims": {q.vertices[i]: n for i, n in enumerate(self.dims)},
            "matrices": {q.edges[e].name: matrix_to_json(m) for e, m in self.mats.items()},
        }

    @classmethod
    def from_json(cls, q: Quiver, data: Union[str, Mapping]) -> "RepPoint":
        if isinstance(data, str):
            data = json.loads(data)
        d = _dims_tuple(q, data["dims"])
        mats = {}
        for name, rows in data.get("matrices", {}).items():
            e = q.edge_index(name)
            m = matrix_from_json(rows) if rows else _zeros(d[q.heads[e]], d[q.tails[e]])
            mats[e] = m.reshape((d[q.heads[e]], d[q.tails[e]]))
        return cls(q, d, mats)

    def __repr__(self):
        return f"RepPoint(dims={self.dims}, {json.dumps(self.to_json()['matrices'])})"


TangentVector = RepPoint


# ---------------------------------------------------------------------------
# evaluation and traces


def _eval_path(p: Path, rho: RepPoint) -> np.ndarray:
    q = rho.quiver
    m = _identity(rho.dims[p.start])
    for e in p.edges:
        m = rho.mats[e].dot(m)
    return m


def evaluate(x: PathAlgebraElement, rho: RepPoint) -> Dict[Block, np.ndarray]:
    """(start, end) -> matrix of shape d_end x d_start."""
    if x.quiver != rho.quiver:
        raise QuiverMismatch("element and point live over different quivers")
    out: Dict[Block, np.ndarray] = {}
    for p, c in x.terms.items():
        m = _eval_path(p, rho) * c
        key = (p.start, p.end)
        out[key] = out[key] + m if key in out else m
    return out


def evaluate_derivative(x: PathAlgebraElement, rho: RepPoint, v: RepPoint) -> Dict[Block, np.ndarray]:
    """Directional derivative of evaluate(x, .) at rho along v, letter by letter."""
    rho._check(v)
    out: Dict[Block, np.ndarray] = {}
    for p, c in x.terms.items():
        es = p.edges
        d = rho.dims
        acc = _zeros(d[p.end], d[p.start])
        for k in range(len(es)):
            m = _identity(d[p.start])
            for j, e in enumerate(es):
                m = (v.mats[e] if j == k else rho.mats[e]).dot(m)
            acc = acc + m
        key = (p.start, p.end)
        out[key] = out[key] + acc * c if key in out else acc * c
    return out


class InvariantPolynomial:
    """Combination of products of necklaces; a monomial is a sorted tuple of cycles."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: Mapping = ()):
        self.quiver = quiver
        out: Dict[Tuple[Path, ...], Scalar] = {}
        for mono, c in dict(terms).items():
            key = tuple(sorted((canonical_rotation(p, quiver.tails) for p in mono), key=_cycle_key))
            _accumulate(out, key, rat(c))
        self.terms = out

    @classmethod
    def from_necklace(cls, p: NecklaceElement) -> "InvariantPolynomial":
        return cls(p.quiver, {(cyc,): c for cyc, c in p.terms.items()})

    def __mul__(self, other: "InvariantPolynomial") -> "InvariantPolynomial":
        out: Dict = {}
        for m1, a in self.terms.items():
            for m2, b in other.terms.items():
                _accumulate(out, m1 + m2, a * b)
        return InvariantPolynomial(self.quiver, out)

    def __add__(self, other: "InvariantPolynomial") -> "InvariantPolynomial":
        t = dict(self.terms)
        for k, v in other.terms.items():
            _accumulate(t, k, v)
        return InvariantPolynomial(self.quiver, t)

    def __eq__(self, other) -> bool:
        return isinstance(other, InvariantPolynomial) and self.quiver == other.quiver and self.terms == other.terms

    def degree(self) -> int:
        return max((sum(len(p.edges) for p in m) for m in self.terms), default=0)

    def __str__(self):
        q = self.quiver
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: [_cycle_key(p) for p in kv[0]]):
            body = " ".join(f"cyc({q.path_name(p)})" if p.edges else q.path_name(p) for p in m) or "1"
            parts.append(f"{format_rational(c)}*{body}")
        return " + ".join(parts) or "0"


def _cycle_key(p: Path):
    return (len(p.edges), p.edges, p.start)


def _as_invariant(p) -> InvariantPolynomial:
    if isinstance(p, InvariantPolynomial):
        return p
    if isinstance(p, NecklaceElement):
        return InvariantPolynomial.from_necklace(p)
    raise TypeError(f"expected a necklace or invariant polynomial, got {type(p).__name__}")


def _cycle_trace(p: Path, rho: RepPoint) -> Scalar:
    if not p.edges:
        return rho.dims[p.start]
    return _trace(_eval_path(p, rho))


def psi(p, rho: RepPoint) -> Scalar:
    """Trace function of a necklace or of a product of necklaces at rho."""
    f = _as_invariant(p)
    if f.quiver != rho.quiver:
        raise QuiverMismatch("polynomial and point live over different quivers")
    cache: Dict[Path, Scalar] = {}
    total: Scalar = 0
    for mono, c in f.terms.items():
        val: Scalar = c
        for cyc in mono:
            if cyc not in cache:
                cache[cyc] = _cycle_trace(cyc, rho)
            val = val * cache[cyc]
        total += val
    return simplify(total)


# ---------------------------------------------------------------------------
# moment map and symplectic structure


class GroupElementLie:
    """Vertex -> d_i x d_i exact matrix with total trace zero."""

    __slots__ = ("dims", "mats")

    def __init__(self, dims: Sequence[int], mats: Mapping[int, object], check_trace: bool = True):
        self.dims = tuple(dims)
        out = {}
        for i, n in enumerate(self.dims):
            m = mats.get(i)
            m = _zeros(n, n) if m is None else (m if isinstance(m, np.ndarray) else _exact(m))
            if m.shape != (n, n):
                raise ShapeMismatch(f"vertex {i}: expected shape {(n, n)}, got {m.shape}")
            out[i] = m
        self.mats = out
        if check_trace and self.total_trace() != 0:
            raise ValueError("element of the Lie algebra must have total trace zero")

    def total_trace(self) -> Scalar:
        return simplify(sum((_trace(m) for m in self.mats.values()), 0))

    @classmethod
    def random(cls, dims: Sequence[int], rng: np.random.Generator, bound: int = 5) -> "GroupElementLie":
        mats = {}
        for i, n in enumerate(dims):
            mats[i] = np.array(rng.integers(-bound, bound + 1, size=(n, n)).tolist(), dtype=object).reshape((n, n))
        # fix the total trace on the first nonempty block
        total = sum(_trace(m) for m in mats.values())
        for i, n in enumerate(dims):
            if n:
                mats[i][0, 0] = mats[i][0, 0] - total
                break
        return cls(dims, mats)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GroupElementLie) and self.dims == other.dims
                and all(np.array_equal(self.mats[i], other.mats[i]) for i in self.mats))

    def to_json(self) -> dict:
        return {str(i): matrix_to_json(m) for i, m in self.mats.items()}


def _require_double(q: Quiver) -> DoubledQuiver:
    if not isinstance(q, DoubledQuiver):
        raise QuiverMismatch("a doubled quiver is required")
    return q


def moment(rho: RepPoint) -> GroupElementLie:
    """mu(rho) = sum_{a in Q} [X_a, X_a*]; equals -evaluate(w) in the path convention."""
    q = _require_double(rho.quiver)
    d = rho.dims
    mats = {i: _zeros(d[i], d[i]) for i in range(q.num_vertices)}
    for e in q.base_edges:
        X, Y = rho.mats[e], rho.mats[q.star[e]]
        h, t = q.heads[e], q.tails[e]
        mats[h] = mats[h] + X.dot(Y)
        mats[t] = mats[t] - Y.dot(X)
    return GroupElementLie(d, mats)


def symplectic_pair(u: RepPoint, v: RepPoint) -> Scalar:
    """sum_{a in Q} Tr(v_a* u_a) - Tr(u_a* v_a)."""
    u._check(v)
    q = _require_double(u.quiver)
    total: Scalar = 0
    for e in q.base_edges:
        s = q.star[e]
        total += _trace(v.mats[s].dot(u.mats[e])) - _trace(u.mats[s].dot(v.mats[e]))
    return simplify(total)


def group_action_vector(x: GroupElementLie, rho: RepPoint) -> RepPoint:
    """Infinitesimal base change: X_a -> x_h X_a - X_a x_t."""
    if x.dims != rho.dims:
        raise ShapeMismatch(f"dimension vectors differ: {x.dims} vs {rho.dims}")
    q = rho.quiver
    return rho._like({e: x.mats[q.heads[e]].dot(m) - m.dot(x.mats[q.tails[e]]) for e, m in rho.mats.items()})


def act(g: Mapping[int, np.ndarray], rho: RepPoint) -> RepPoint:
    """Base change by invertible blocks: X_a -> g_h X_a g_t^{-1}."""
    q = rho.quiver
    inv = {}
    for i, m in g.items():
        sm = SparseMatrix.from_rows(m.tolist())
        inv[i] = _exact(inverse(sm).to_rows()) if m.shape[0] else m
    return rho._like({e: g[q.heads[e]].dot(m).dot(inv[q.tails[e]]) for e, m in rho.mats.items()})


def moment_identity_check(rho: RepPoint, x: GroupElementLie, v: RepPoint) -> bool:
    """omega(xi_x, v) equals the derivative along v of rho -> sum_i Tr(x_i mu(rho)_i).

    The right side differentiates evaluate(w, .) letter by letter; mu = -ev(w).
    """
    lhs = symplectic_pair(group_action_vector(x, rho), v)
    w = w_element(_require_double(rho.quiver))
    dw = evaluate_derivative(w, rho, v)
    rhs: Scalar = 0
    for (s, t), m in dw.items():
        if s == t:
            rhs -= _trace(x.mats[s].dot(m))
    return lhs == simplify(rhs)


# ---------------------------------------------------------------------------
# independent gradient oracle and Poisson check


def _newton_derivative(values: Sequence[Scalar]) -> Scalar:
    """f'(0) for a polynomial of degree <= m sampled at s = 0..m."""
    diffs = [rat(x) for x in values]
    out = Fraction(0)
    for k in range(1, len(values)):
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
        out += Fraction((-1) ** (k + 1), k) * diffs[0]
    return simplify(out)


def gradient_oracle(p, rho: RepPoint, coord: Tuple) -> Scalar:
    """d psi(p) / d (X_a)_{ij} at rho, by exact interpolation along the coordinate line."""
    f = _as_invariant(p)
    a, i, j = coord
    e = a if isinstance(a, int) else rho.quiver.edge_index(a)
    m = f.degree()
    if m == 0:
        return 0
    vals = []
    for s in range(m + 1):
        mats = dict(rho.mats)
        shifted = rho.mats[e].copy()
        shifted[i, j] = shifted[i, j] + s
        mats[e] = shifted
        vals.append(psi(f, rho._like(mats)))
    return _newton_derivative(vals)


def gradient(p, rho: RepPoint) -> Dict[int, np.ndarray]:
    """Edge -> matrix of partial derivatives (same shape as X_a)."""
    out = {}
    for e, m in rho.mats.items():
        g = _zeros(*m.shape)
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                g[i, j] = gradient_oracle(p, rho, (e, i, j))
        out[e] = g
    return out


def oracle_bracket(p, r, rho: RepPoint) -> Scalar:
    """sum_{a in Q, i, j} dp/d(X_a*)_{ij} dr/d(X_a)_{ji} - dp/d(X_a)_{ij} dr/d(X_a*)_{ji}."""
    q = _require_double(rho.quiver)
    gp, gr = gradient(p, rho), gradient(r, rho)
    total: Scalar = 0
    for e in q.base_edges:
        s = q.star[e]
        total += _trace(gp[s].dot(gr[e])) - _trace(gp[e].dot(gr[s]))
    return simplify(total)


def poisson_check(p: NecklaceElement, r: NecklaceElement, rho: RepPoint) -> bool:
    return oracle_bracket(p, r, rho) == psi(necklace_bracket(p, r), rho)


# ---------------------------------------------------------------------------
# stabilization


def invariant_monomials(q: Quiver, s: int) -> List[Tuple[Path, ...]]:
    """Multisets of nontrivial necklaces with total length s."""
    cycles = [(k, c) for k in range(1, s + 1) for c in necklaces(q, k)]
    out: List[Tuple[Path, ...]] = []

    def rec(start: int, remaining: int, acc: List[Path]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(cycles)):
            k, c = cycles[idx]
            if k <= remaining:
                acc.append(c)
                rec(idx, remaining - k, acc)
                acc.pop()

    rec(0, s, [])
    return out


def stabilization_rank(q: Quiver, r: int, dims, samples: int, seed: int, bound: int = 5) -> List[dict]:
    """Rank of the evaluation matrix of degree-s invariant monomials on random points, s <= r."""
    if r < 1:
        raise ValueError("maximal degree must be >= 1")
    Q = q if isinstance(q, DoubledQuiver) else double(q)
    d = _dims_tuple(Q, dims)
    rng = np.random.default_rng(seed)
    points = [RepPoint.random(Q, d, rng, bound) for _ in range(samples)]
    report = []
    for s in range(r + 1):
        monos = invariant_monomials(Q, s)
        ech = Echelon()
        for rho in points:
            cache: Dict[Path, Scalar] = {}
            row = {}
            for idx, mono in enumerate(monos):
                val: Scalar = 1
                for cyc in mono:
                    if cyc not in cache:
                        cache[cyc] = _cycle_trace(cyc, rho)
                    val *= cache[cyc]
                if val:
                    row[idx] = val
            ech.add(row)
            if ech.rank == len(monos):
                break
        report.append({"degree": s, "monomials": len(monos), "rank": ech.rank, "full": ech.rank == len(monos)})
    return report
