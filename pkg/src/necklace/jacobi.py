"""Jacobi matrices of endomorphisms of a free algebra and the chain rule.

The free algebra on n generators is the path algebra of a one-vertex quiver
with n loops.  Entries live in A (x) A; the product in Mat_n(A^e) is

    (P * Q)_{ij} = sum_k P_{kj} * Q_{ik},    (a (x) b) * (c (x) d) = ac (x) db,

which is the ordering that makes D(G o F) = (DG)(F) * DF hold with
DF_{ij} = d_i(f_j).
"""
from __future__ import annotations

from typing import Dict, List, Sequence

from .algebra import PathAlgebraElement, TensorElement, _accumulate, pa_mul
from .errors import NotFreeAlgebra, QuiverMismatch
from .quiver import Path, Quiver, compose

JacobiMatrix = List[List[TensorElement]]


def _check_free(q: Quiver) -> int:
    if q.num_vertices != 1:
        raise NotFreeAlgebra(f"free algebra needs a one-vertex quiver, got {q.num_vertices} vertices")
    return q.num_edges


def _check_tuple(F: Sequence[PathAlgebraElement]) -> Quiver:
    if not F:
        raise ValueError("empty tuple")
    q = F[0].quiver
    n = _check_free(q)
    if len(F) != n:
        raise ValueError(f"expected {n} entries, one per generator, got {len(F)}")
    for f in F:
        if f.quiver != q:
            raise QuiverMismatch("entries live over different quivers")
    return q


def double_partial(i: int, f: PathAlgebraElement) -> TensorElement:
    """d_i(f): for each occurrence of x_i in a word, (prefix) (x) (suffix)."""
    q = f.quiver
    _check_free(q)
    out: Dict = {}
    for p, c in f.terms.items():
        es = p.edges
        for k, e in enumerate(es):
            if e == i:
                _accumulate(out, (Path(0, 0, es[:k]), Path(0, 0, es[k + 1:])), c)
    return TensorElement(q, out)


def jacobi_matrix(F: Sequence[PathAlgebraElement]) -> JacobiMatrix:
    """DF with DF[i][j] = d_i(f_j)."""
    q = _check_tuple(F)
    n = q.num_edges
    return [[double_partial(i, F[j]) for j in range(n)] for i in range(n)]


def _tensor_star(x: TensorElement, y: TensorElement) -> Dict:
    out: Dict = {}
    for (a, b), s in x.terms.items():
        for (c, d), t in y.terms.items():
            _accumulate(out, (compose(a, c), compose(d, b)), s * t)
    return out


def star_mul(P: JacobiMatrix, Q: JacobiMatrix) -> JacobiMatrix:
    n = len(P)
    q = P[0][0].quiver
    res = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: Dict = {}
            for k in range(n):
                for key, c in _tensor_star(P[k][j], Q[i][k]).items():
                    _accumulate(acc, key, c)
            row.append(TensorElement(q, acc))
        res.append(row)
    return res


def apply_hom(F: Sequence[PathAlgebraElement], x: PathAlgebraElement) -> PathAlgebraElement:
    """The image of x under the endomorphism x_i -> f_i."""
    q = _check_tuple(F)
    one = PathAlgebraElement.one(q)
    cache: Dict[Path, PathAlgebraElement] = {}

    def image(p: Path) -> PathAlgebraElement:
        if p not in cache:
            if not p.edges:
                cache[p] = one
            else:
                cache[p] = pa_mul(image(Path(0, 0, p.edges[:-1])), F[p.edges[-1]])
        return cache[p]

    out = PathAlgebraElement.zero(q)
    for p, c in x.terms.items():
        out = out + image(p).scale(c)
    return out


def compose_tuples(G: Sequence[PathAlgebraElement], F: Sequence[PathAlgebraElement]) -> List[PathAlgebraElement]:
    """G o F: substitute f_1..f_n into g_1..g_n."""
    return [apply_hom(F, g) for g in G]


def substitute(J: JacobiMatrix, F: Sequence[PathAlgebraElement]) -> JacobiMatrix:
    """Apply F (x) F to every entry."""
    q = _check_tuple(F)
    res = []
    for row in J:
        new = []
        for t in row:
            acc = TensorElement(q, {})
            for (u, v), c in t.terms.items():
                left = apply_hom(F, PathAlgebraElement(q, {u: 1}))
                right = apply_hom(F, PathAlgebraElement(q, {v: 1}))
                acc = acc + TensorElement.from_elements(left, right).scale(c)
            new.append(acc)
        res.append(new)
    return res


def chain_rule_holds(G: Sequence[PathAlgebraElement], F: Sequence[PathAlgebraElement]) -> bool:
    lhs = jacobi_matrix(compose_tuples(G, F))
    rhs = star_mul(substitute(jacobi_matrix(G), F), jacobi_matrix(F))
    return lhs == rhs
