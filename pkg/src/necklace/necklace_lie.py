"""The necklace Lie algebra of a doubled quiver.

Cyclic derivatives, Hamiltonian derivations and the bracket on P/[P, P]
induced by the canonical 2-form  sum_{a in Q} da da*.
"""
from __future__ import annotations

from typing import Dict, List, Tuple

from .algebra import (NecklaceElement, PathAlgebraElement, _accumulate, canonical_rotation, necklace_project, necklaces_upto,
                      pa_mul)
from .errors import QuiverMismatch
from .forms import Derivation, NCForm
from .linalg import Scalar
from .quiver import DoubledQuiver, Path, Quiver, compose


def _require_double(q: Quiver) -> DoubledQuiver:
    if not isinstance(q, DoubledQuiver):
        raise QuiverMismatch("a doubled quiver is required")
    return q


def _edge(q: Quiver, a) -> int:
    return q.edge_index(a) if isinstance(a, str) else int(a)


def cycle_partials(q: Quiver, p: Path) -> Dict[int, Dict[Path, Scalar]]:
    """All cyclic derivatives of one closed path: edge -> {path: coeff}."""
    out: Dict[int, Dict[Path, Scalar]] = {}
    es = p.edges
    n = len(es)
    for i, e in enumerate(es):
        rest = es[i + 1:] + es[:i]
        h = q.heads[e]
        r = Path(h, q.tails[e], rest) if rest else Path(h, h, ())
        _accumulate(out.setdefault(e, {}), r, 1)
    return out


def _partials_of(p: NecklaceElement) -> Dict[int, Dict[Path, Scalar]]:
    out: Dict[int, Dict[Path, Scalar]] = {}
    for cyc, c in p.terms.items():
        for e, terms in cycle_partials(p.quiver, cyc).items():
            tgt = out.setdefault(e, {})
            for r, a in terms.items():
                _accumulate(tgt, r, c * a)
    return out


def partial(a, p: NecklaceElement) -> PathAlgebraElement:
    """Cyclic derivative: sum over occurrences of a of (p after a)(p before a)."""
    q = p.quiver
    e = _edge(q, a)
    out: Dict[Path, Scalar] = {}
    for cyc, c in p.terms.items():
        for r, x in cycle_partials(q, cyc).get(e, {}).items():
            _accumulate(out, r, c * x)
    return PathAlgebraElement(q, out)


def d_necklace(p: NecklaceElement) -> NCForm:
    """sum_a (d_a p) da, a representative of the class of dp in DR^1."""
    q = p.quiver
    out: Dict = {}
    for e, terms in _partials_of(p).items():
        a = q.edge_path(e)
        for r, c in terms.items():
            _accumulate(out, (r, a), c)
    return NCForm(q, out)


def theta(p: NecklaceElement) -> Derivation:
    """Hamiltonian derivation: theta_p(a) = eps(a) * d_{a*} p."""
    q = _require_double(p.quiver)
    parts = _partials_of(p)
    vals = {}
    for e in range(q.num_edges):
        terms = parts.get(q.star[e])
        if terms:
            vals[e] = PathAlgebraElement(q, {r: q.eps[e] * c for r, c in terms.items()})
    return Derivation(q, vals)


def one_form_coefficients(alpha: NCForm) -> Dict[int, Dict[Path, Scalar]]:
    """Write the DR^1 class of a 1-form as sum_a f_a da; returns a -> f_a.

    p0 d(b1..bk) = sum_i p0 b_<i db_i b_>i, and moving the degree-0 factor
    b_>i around the trace gives b_>i p0 b_<i db_i.  Open monomials vanish.
    """
    q = alpha.quiver
    out: Dict[int, Dict[Path, Scalar]] = {}
    for m, c in alpha.terms.items():
        if len(m) != 2:
            raise ValueError("expected a 1-form")
        p0, p1 = m
        if p0.start != p1.end:
            continue
        es = p1.edges
        for i, e in enumerate(es):
            before = q.sub(p1, 0, i)
            after = q.sub(p1, i + 1, len(es))
            r = compose(compose(after, p0), before)
            _accumulate(out.setdefault(e, {}), r, c)
    return out


def h_omega(alpha: NCForm) -> Derivation:
    """The derivation theta with theta(a) = eps(a) f_{a*}, where alpha = sum f_a da in DR^1."""
    q = _require_double(alpha.quiver)
    f = one_form_coefficients(alpha)
    vals = {}
    for e in range(q.num_edges):
        terms = f.get(q.star[e])
        if terms:
            vals[e] = PathAlgebraElement(q, {r: q.eps[e] * c for r, c in terms.items()})
    return Derivation(q, vals)


def necklace_bracket(p: NecklaceElement, r: NecklaceElement) -> NecklaceElement:
    """{p, r} = sum_a eps(a*) [ (d_a p)(d_{a*} r) ] projected to necklaces."""
    if p.quiver != r.quiver:
        raise QuiverMismatch("necklaces live over different quivers")
    q = _require_double(p.quiver)
    dp = _partials_of(p)
    if not dp:
        return NecklaceElement(q, {})
    dr = _partials_of(r)
    out: Dict[Path, Scalar] = {}
    tails = q.tails
    for e, left in dp.items():
        right = dr.get(q.star[e])
        if not right:
            continue
        sgn = q.eps[q.star[e]]
        for u, a in left.items():
            for v, b in right.items():
                w = compose(u, v)
                if w is None or w.start != w.end:
                    continue
                _accumulate(out, canonical_rotation(w, tails), sgn * a * b)
    res = object.__new__(NecklaceElement)
    res.quiver = q
    res.terms = out
    return res


def canonical_form(q: DoubledQuiver) -> NCForm:
    """omega = sum_{a in Q} da da*."""
    _require_double(q)
    out = {}
    for e in q.base_edges:
        a, b = q.edge_path(e), q.edge_path(q.star[e])
        out[(Path(a.start, a.start, ()), a, b)] = 1
    return NCForm(q, out)


def liouville(q: DoubledQuiver) -> NCForm:
    """lambda = sum_{a in Q} a da*, a primitive of the canonical 2-form."""
    _require_double(q)
    out = {}
    for e in q.base_edges:
        a, b = q.edge_path(e), q.edge_path(q.star[e])
        out[(a, b)] = 1
    return NCForm(q, out)


def w_element(q: DoubledQuiver) -> PathAlgebraElement:
    """w = sum_{a in Q} (a a* - a* a)."""
    _require_double(q)
    out: Dict[Path, Scalar] = {}
    for e in q.base_edges:
        a, b = q.edge_path(e), q.edge_path(q.star[e])
        _accumulate(out, compose(a, b), 1)
        _accumulate(out, compose(b, a), -1)
    return PathAlgebraElement(q, out)


def is_central(z: NecklaceElement, degree_bound: int) -> Tuple[bool, List]:
    """Does z bracket to zero with every basis cycle of length <= D?  Returns (ok, witnesses)."""
    bad = []
    for cyc in necklaces_upto(z.quiver, degree_bound):
        b = necklace_bracket(z, NecklaceElement(z.quiver, {cyc: 1}))
        if b:
            bad.append((cyc, b))
    return (not bad), bad


def centrality_check(q: DoubledQuiver, m: int, vertex, degree_bound: int) -> Tuple[bool, List]:
    """Is the class of e_i w^m central against every basis cycle of length <= D?

    Returns (ok, witnesses) where witnesses lists (cycle, bracket) failures.
    """
    i = q.vertex_index(vertex) if not isinstance(vertex, int) else vertex
    x = PathAlgebraElement.idempotent(q, i)
    w = w_element(q)
    for _ in range(m):
        x = pa_mul(x, w)
    return is_central(necklace_project(x), degree_bound)
