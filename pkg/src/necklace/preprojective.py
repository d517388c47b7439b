"""Truncated (deformed) preprojective algebras P/(w - c) by per-degree linear algebra.

Ideal components are echelonized separately for each (start, end) vertex
pair.  Columns are ordered so that the pivot of a row is its
lexicographically greatest monomial (highest degree first when c != 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import (NecklaceElement, PathAlgebraElement, _accumulate, canonical_rotation, necklace_project,
                      necklaces, necklaces_upto)
from .errors import DeformedUnsupported, PreconditionFailed, TruncationExceeded
from .linalg import Echelon, MatrixSeries, Scalar, SparseMatrix, rat, series_inverse
from .necklace_lie import necklace_bracket, theta, w_element
from .quiver import WILD, DoubledQuiver, Path, Quiver, cartan_and_tits, classify, double

Word = Tuple[int, ...]


def _as_double(q: Quiver) -> DoubledQuiver:
    return q if isinstance(q, DoubledQuiver) else double(q)


class _Block:
    """Column bookkeeping and echelon data for one (start, end[, degree]) block."""

    __slots__ = ("words", "index", "ech")

    def __init__(self, words: List[Word]):
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}
        self.ech = Echelon()

    def vector(self, terms: Mapping[Word, Scalar]) -> Dict[int, Scalar]:
        return {self.index[w]: c for w, c in terms.items() if c}

    def basis_words(self) -> List[Word]:
        piv = self.ech.rows
        return [w for i, w in enumerate(self.words) if i not in piv]

    @property
    def rank(self) -> int:
        return self.ech.rank


class TruncatedQuotient:
    """P/(w - c) up to path degree N with echelonized ideal components."""

    def __init__(self, q: Quiver, c: Optional[Mapping] = None, N: int = 0):
        if N < 0:
            raise ValueError("truncation degree must be >= 0")
        self.quiver = _as_double(q)
        Q = self.quiver
        cvals = [0] * Q.num_vertices
        for k, v in dict(c or {}).items():
            cvals[Q.vertex_index(k) if not isinstance(k, int) else k] = rat(v)
        self.c: Tuple[Scalar, ...] = tuple(cvals)
        self.N = N
        self.graded = not any(self.c)
        self.w = w_element(Q)
        self._w_at = [self.w.sandwich(i, i) for i in range(Q.num_vertices)]
        self.blocks: Dict[Tuple, _Block] = {}
        if self.graded:
            self._build_graded()
        else:
            self._build_filtered()

    # -- construction --------------------------------------------------------
    def _words(self, s: int, t: int, k: int) -> List[Word]:
        return [p.edges for p in self.quiver.paths_of_length(k, s) if p.end == t]

    def _build_graded(self):
        Q = self.quiver
        n = Q.num_vertices
        for k in range(self.N + 1):
            for s in range(n):
                by_end: Dict[int, List[Word]] = {t: [] for t in range(n)}
                for p in Q.paths_of_length(k, s):
                    by_end[p.end].append(p.edges)
                for t in range(n):
                    # lex descending: index 0 is the lex-greatest word
                    self.blocks[(s, t, k)] = _Block(by_end[t][::-1])
            if k < 2:
                continue
            for s in range(n):
                for t in range(n):
                    blk = self.blocks[(s, t, k)]
                    # I_{k-1} * a keeps distinct pivots
                    for a in range(Q.num_edges):
                        if Q.heads[a] != t:
                            continue
                        src = self.blocks[(s, Q.tails[a], k - 1)]
                        for row in src.ech.rows.values():
                            blk.ech.add_pivot_row(
                                {blk.index[src.words[i] + (a,)]: x for i, x in row.items()})
                    # new generators p * w with len(p) = k - 2, h(p) = t
                    wt = self._w_at[t]
                    for p in Q.paths_of_length(k - 2, s):
                        if p.end != t:
                            continue
                        vec = {}
                        for r, x in wt.terms.items():
                            vec[blk.index[p.edges + r.edges]] = x
                        blk.ech.add(vec)

    def _build_filtered(self):
        Q = self.quiver
        n = Q.num_vertices
        for s in range(n):
            for t in range(n):
                words: List[Word] = []
                for k in range(self.N, -1, -1):
                    words.extend(self._words(s, t, k)[::-1])
                self.blocks[(s, t)] = _Block(words)
        rel = [self._w_at[i] - PathAlgebraElement(Q, {Q.trivial(i): self.c[i]}) for i in range(n)]
        for lp in range(self.N - 1):
            for lq in range(self.N - 1 - lp):
                for p in Q.paths_of_length(lp):
                    u = p.end
                    for qq in Q.paths_of_length(lq, u):
                        blk = self.blocks[(p.start, qq.end)]
                        vec: Dict[int, Scalar] = {}
                        for r, x in rel[u].terms.items():
                            key = blk.index[p.edges + r.edges + qq.edges]
                            vec[key] = vec.get(key, 0) + x
                        blk.ech.add(vec)

    # -- queries ---------------------------------------------------------------
    def _block_of(self, p: Path) -> _Block:
        if self.graded:
            return self.blocks[(p.start, p.end, len(p.edges))]
        return self.blocks[(p.start, p.end)]

    def normal_form(self, x: PathAlgebraElement) -> PathAlgebraElement:
        """Reduce x modulo the ideal; the result lives on non-pivot monomials."""
        if x.quiver != self.quiver:
            raise ValueError("element lives over a different quiver")
        if x.degree() > self.N:
            raise TruncationExceeded(f"element degree {x.degree()} exceeds truncation {self.N}")
        groups: Dict[Tuple, Dict[Word, Scalar]] = {}
        for p, c in x.terms.items():
            key = (p.start, p.end, len(p.edges)) if self.graded else (p.start, p.end)
            groups.setdefault(key, {})[p.edges] = c
        out: Dict[Path, Scalar] = {}
        for key, terms in groups.items():
            blk = self.blocks[key]
            red = blk.ech.reduce(blk.vector(terms))
            s, t = key[0], key[1]
            for i, c in red.items():
                out[Path(s, t, blk.words[i])] = c
        return PathAlgebraElement(self.quiver, out)

    def in_ideal(self, x: PathAlgebraElement) -> bool:
        return self.normal_form(x).is_zero()

    def basis(self, k: int) -> List[Path]:
        """Monomial basis of the degree-k component (c = 0) or of the degree-k layer."""
        if k > self.N:
            raise TruncationExceeded(f"degree {k} exceeds truncation {self.N}")
        Q = self.quiver
        out = []
        for s in range(Q.num_vertices):
            for t in range(Q.num_vertices):
                key = (s, t, k) if self.graded else (s, t)
                for w in self.blocks[key].basis_words():
                    if len(w) == k:
                        out.append(Path(s, t, w))
        return out

    def graded_dims(self) -> List[List[List[int]]]:
        """dims[k][i][j] = dim e_i Pi_k e_j (paths from i to j); layer counts if c != 0."""
        n = self.quiver.num_vertices
        out = []
        for k in range(self.N + 1):
            m = [[0] * n for _ in range(n)]
            for p in self.basis(k):
                m[p.start][p.end] += 1
            out.append(m)
        return out

    def dims(self) -> List[int]:
        return [sum(map(sum, m)) for m in self.graded_dims()]


def build(q: Quiver, c: Optional[Mapping] = None, N: int = 0) -> TruncatedQuotient:
    return TruncatedQuotient(q, c, N)


def normal_form(x: PathAlgebraElement, tq: TruncatedQuotient) -> PathAlgebraElement:
    return tq.normal_form(x)


# ---------------------------------------------------------------------------
# commutator quotient L = Pi / [Pi, Pi]


def _necklace_index(Q: Quiver, k: int) -> Dict[Path, int]:
    return {p: i for i, p in enumerate(necklaces(Q, k))}


def _ideal_necklace_echelon(Q: DoubledQuiver, k: int, w: PathAlgebraElement) -> Tuple[Dict[Path, int], Echelon]:
    """Span of the images of I_k in P_k/[P, P]: classes of e_i w u, u closed of length k-2."""
    idx = _necklace_index(Q, k)
    ech = Echelon()
    if k >= 2:
        tails = Q.tails
        for i in range(Q.num_vertices):
            wi = w.sandwich(i, i)
            for u in Q.paths_of_length(k - 2, i):
                if u.end != i:
                    continue
                vec: Dict[int, Scalar] = {}
                for r, x in wi.terms.items():
                    key = idx[canonical_rotation(Path(i, i, r.edges + u.edges), tails)]
                    vec[key] = vec.get(key, 0) + x
                ech.add(vec)
    return idx, ech


def l_dims(tq: TruncatedQuotient) -> List[int]:
    """dim L_k for k <= N: Pi_k modulo the span of commutators, by exact rank.

    [u, v] for u, v of complementary degree is spanned by [a, z] with a an edge
    and z in Pi_{k-1}, since [uv, z] = [u, vz] + [v, zu].
    """
    return _commutator_quotient_dims(tq, generators_only=True)


def l_dims_all_pairs(tq: TruncatedQuotient) -> List[int]:
    """Same as :func:`l_dims` but using every pair of basis elements (slow)."""
    return _commutator_quotient_dims(tq, generators_only=False)


def l_dims_necklace(tq: TruncatedQuotient) -> List[int]:
    """dim L_k via necklaces: cyclic words of length k modulo the classes of I_k."""
    if not tq.graded:
        raise DeformedUnsupported("commutator quotient dimensions need c = 0")
    Q = tq.quiver
    out = []
    for k in range(tq.N + 1):
        idx, ech = _ideal_necklace_echelon(Q, k, tq.w)
        out.append(len(idx) - ech.rank)
    return out


def _commutator_quotient_dims(tq: TruncatedQuotient, generators_only: bool) -> List[int]:
    if not tq.graded:
        raise DeformedUnsupported("commutator quotient dimensions need c = 0")
    Q = tq.quiver
    bases = [tq.basis(k) for k in range(tq.N + 1)]
    elems = [[PathAlgebraElement(Q, {p: 1}) for p in b] for b in bases]
    edges = [PathAlgebraElement(Q, {Q.edge_path(a): 1}) for a in range(Q.num_edges)]
    idem = [PathAlgebraElement.idempotent(Q, i) for i in range(Q.num_vertices)]
    out = []
    for k in range(tq.N + 1):
        coords: Dict[Path, int] = {p: i for i, p in enumerate(bases[k])}
        ech = Echelon()

        def add(x: PathAlgebraElement):
            nf = tq.normal_form(x)
            ech.add({coords[p]: c for p, c in nf.terms.items()})

        if generators_only:
            if k >= 1:
                for A in edges:
                    for Z in elems[k - 1]:
                        add(A * Z - Z * A)
        else:
            for j in range(k + 1):
                for U in elems[j]:
                    for V in elems[k - j]:
                        add(U * V - V * U)
        for U in elems[k]:
            for E in idem:
                add(E * U - U * E)
        out.append(len(bases[k]) - ech.rank)
    return out


# ---------------------------------------------------------------------------
# series identities


def _require_wild(q: Quiver):
    label = classify(q)
    if label != WILD:
        raise PreconditionFailed(f"quiver must be Wild (connected, indefinite Tits form); got {label}")


def expected_series(q: Quiver, N: int) -> MatrixSeries:
    """Coefficients of (I - C t + t^2 I)^{-1} up to t^N."""
    cd = cartan_and_tits(q)
    n = len(cd.adjacency)
    C = cd.adjacency_matrix()
    I = SparseMatrix.identity(n)
    a = MatrixSeries(n, [I, -C, I], N) if N >= 2 else MatrixSeries(n, [I, -C, I][: N + 1], N)
    return series_inverse(a)


def hilbert_check(q: Quiver, N: int, tq: Optional[TruncatedQuotient] = None) -> dict:
    _require_wild(q)
    tq = tq or build(q, None, N)
    actual = tq.graded_dims()
    expected = expected_series(q, N)
    rows = []
    for k in range(N + 1):
        exp = expected[k].to_rows()
        rows.append({"degree": k, "expected": exp, "actual": actual[k], "pass": exp == actual[k]})
    return {"check": "hilbert", "N": N, "degrees": rows, "pass": all(r["pass"] for r in rows)}


def euler_check(q: Quiver, N: int, tq: Optional[TruncatedQuotient] = None) -> dict:
    """Coefficient of t^s in Tr(P + t^2 P - t P C) against |I| delta_{s0}."""
    _require_wild(q)
    tq = tq or build(q, None, N)
    P = tq.graded_dims()
    C = cartan_and_tits(q).adjacency
    n = len(C)

    def tr(m):
        return sum(m[i][i] for i in range(n))

    def tr_pc(m):
        return sum(m[i][j] * C[j][i] for i in range(n) for j in range(n))

    rows = []
    for s in range(N + 1):
        val = tr(P[s])
        if s >= 2:
            val += tr(P[s - 2])
        if s >= 1:
            val -= tr_pc(P[s - 1])
        exp = n if s == 0 else 0
        rows.append({"degree": s, "expected": exp, "actual": val, "pass": val == exp})
    return {"check": "euler", "N": N, "degrees": rows, "pass": all(r["pass"] for r in rows)}


# ---------------------------------------------------------------------------
# center probe and bracket descent


def center_probe(tq: TruncatedQuotient, k: int) -> int:
    """dim {z in Pi_k : za = az for all edges a, e_i z = z e_i for all i}."""
    if not tq.graded:
        raise DeformedUnsupported("center probe needs c = 0")
    if k + 1 > tq.N:
        raise TruncationExceeded(f"center probe in degree {k} needs truncation >= {k + 1}")
    Q = tq.quiver
    basis = tq.basis(k)
    coords: Dict[Tuple, int] = {}

    def coord(tag, p):
        key = (tag, p)
        if key not in coords:
            coords[key] = len(coords)
        return coords[key]

    ech = Echelon()
    for z in basis:
        Z = PathAlgebraElement(Q, {z: 1})
        vec: Dict[int, Scalar] = {}
        for a in range(Q.num_edges):
            A = PathAlgebraElement(Q, {Q.edge_path(a): 1})
            nf = tq.normal_form(Z * A - A * Z)
            for p, c in nf.terms.items():
                vec[coord(a, p)] = c
        for i in range(Q.num_vertices):
            E = PathAlgebraElement.idempotent(Q, i)
            for p, c in (E * Z - Z * E).terms.items():
                vec[coord(("e", i), p)] = c
        ech.add(vec)
    return len(basis) - ech.rank


def lie_center_probe(q: Quiver, k: int, N: Optional[int] = None) -> int:
    """dim of {z in L_k : {z, s} = 0 in L for every basis necklace s of length <= N-k+2}.

    Works with necklace classes modulo the image of the ideal.
    """
    Q = _as_double(q)
    w = w_element(Q)
    N = k + 2 if N is None else N
    cache: Dict[int, Tuple[Dict[Path, int], Echelon]] = {}

    def space(m):
        if m not in cache:
            cache[m] = _ideal_necklace_echelon(Q, m, w)
        return cache[m]

    idx_k, ech_k = space(k)
    basis = [p for p, i in idx_k.items() if i not in ech_k.rows]
    coords: Dict[Tuple, int] = {}
    rows = Echelon()
    for z in basis:
        Z = NecklaceElement(Q, {z: 1})
        vec: Dict[int, Scalar] = {}
        for s in necklaces_upto(Q, N - k + 2):
            b = necklace_bracket(Z, NecklaceElement(Q, {s: 1}))
            if not b:
                continue
            m = b.degree()
            idx, ech = space(m)
            red = ech.reduce({idx[p]: c for p, c in b.terms.items()})
            for i, c in red.items():
                key = (s, m, i)
                if key not in coords:
                    coords[key] = len(coords)
                vec[coords[key]] = c
        rows.add(vec)
    return len(basis) - rows.rank


def descent_check(tq: TruncatedQuotient, D: int) -> dict:
    """Brackets of ideal classes with basis necklaces stay inside the ideal modulo commutators."""
    if not tq.graded:
        raise DeformedUnsupported("descent check needs c = 0")
    if D > tq.N:
        raise TruncationExceeded(f"degree bound {D} exceeds truncation {tq.N}")
    Q = tq.quiver
    w = tq.w
    tails = Q.tails
    # classes of p w q equal classes of w (q p): one per closed u of length <= D - 2
    reps: Dict = {}
    for L in range(0, D - 1):
        for i in range(Q.num_vertices):
            wi = w.sandwich(i, i)
            for u in Q.paths_of_length(L, i):
                if u.end != i:
                    continue
                cls = necklace_project(wi * PathAlgebraElement(Q, {u: 1}))
                if cls:
                    reps.setdefault(frozenset(cls.terms.items()), (u, cls))
    cache: Dict[int, Tuple[Dict[Path, int], Echelon]] = {}

    def member(b: NecklaceElement) -> bool:
        m = b.degree()
        if m not in cache:
            cache[m] = _ideal_necklace_echelon(Q, m, w)
        idx, ech = cache[m]
        return ech.contains({idx[p]: c for p, c in b.terms.items()})

    cycles = necklaces_upto(Q, D)
    failures = []
    checked = 0
    for u, cls in reps.values():
        for s in cycles:
            b = necklace_bracket(cls, NecklaceElement(Q, {s: 1}))
            checked += 1
            if b and not member(b):
                failures.append({"ideal_rep": Q.path_name(u), "cycle": Q.path_name(s)})
    wbar = necklace_project(w)
    w_central = all(not necklace_bracket(wbar, NecklaceElement(Q, {s: 1})) for s in cycles)
    theta_fail = [Q.path_name(s) for s in cycles if theta(NecklaceElement(Q, {s: 1}))(w)]
    return {
        "check": "descent",
        "D": D,
        "ideal_classes": len(reps),
        "pairs_checked": checked,
        "membership_failures": failures,
        "w_bracket_zero": w_central,
        "theta_w_failures": theta_fail,
        "pass": not failures and w_central and not theta_fail,
    }
