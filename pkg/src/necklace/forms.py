"""Noncommutative relative differential forms on a path algebra.

A monomial of degree n is a tuple (p0, p1, ..., pn) of paths standing for
p0 dp1 ... dpn, with p1..pn nontrivial and h(p_k) = t(p_{k+1}).  Everything
(d, products, contractions, Lie derivatives) acts on this tensor basis.
"""
from __future__ import annotations

import threading
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .algebra import (PathAlgebraElement, TensorElement, _accumulate, _clean, necklace_project,
                      path_sort_key)
from .errors import DegreeZero, NoSolution, NotClosed, QuiverMismatch, TruncationExceeded
from .linalg import Echelon, Scalar, format_rational, rat, simplify
from .quiver import Path, Quiver, compose

Monomial = Tuple[Path, ...]


def mono_degree(m: Monomial) -> int:
    return len(m) - 1


def mono_length(m: Monomial) -> int:
    return sum(len(p.edges) for p in m)


def mono_start(m: Monomial) -> int:
    return m[0].start


def mono_end(m: Monomial) -> int:
    return m[-1].end


# ---------------------------------------------------------------------------
# monomial kernels (cached; they only depend on path endpoints and edges)


@lru_cache(maxsize=1 << 20)
def rmul_mono(m: Monomial, b: Path) -> Tuple[Tuple[Monomial, Scalar], ...]:
    """m * b for a path b, renormalized with (m' dp) b = m' d(pb) - (m' p) db."""
    if len(m) == 1:
        r = compose(m[0], b)
        return () if r is None else (((r,), 1),)
    pn = m[-1]
    if not b.edges:
        return ((m, 1),) if pn.end == b.start else ()
    r = compose(pn, b)
    if r is None:
        return ()
    out: Dict[Monomial, Scalar] = {m[:-1] + (r,): 1}
    for mm, c in rmul_mono(m[:-1], pn):
        _accumulate(out, mm + (b,), -c)
    return tuple(out.items())


def mul_mono(m1: Monomial, m2: Monomial) -> Tuple[Tuple[Monomial, Scalar], ...]:
    tail = m2[1:]
    return tuple((mm + tail, c) for mm, c in rmul_mono(m1, m2[0]))


def lmul_path_mono(b: Path, m: Monomial) -> Optional[Monomial]:
    r = compose(b, m[0])
    return None if r is None else (r,) + m[1:]


def d_mono(m: Monomial) -> Optional[Monomial]:
    p0 = m[0]
    if not p0.edges:
        return None
    return (Path(p0.start, p0.start, ()),) + m


# ---------------------------------------------------------------------------
# forms


class NCForm:
    """Finite rational combination of form monomials (possibly mixed degree)."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: Mapping[Monomial, Scalar] = ()):
        self.quiver = quiver
        clean = {}
        for m, c in dict(terms).items():
            m = tuple(m)
            for k in range(1, len(m)):
                if not m[k].edges:
                    raise ValueError("form monomials need nontrivial p1..pn")
                if m[k - 1].end != m[k].start:
                    raise ValueError("form monomial is not composable")
            c = rat(c)
            if c:
                clean[m] = clean.get(m, 0) + c
        self.terms: Dict[Monomial, Scalar] = {m: c for m, c in clean.items() if c}

    @classmethod
    def _raw(cls, quiver: Quiver, terms: Dict[Monomial, Scalar]) -> "NCForm":
        obj = object.__new__(cls)
        obj.quiver = quiver
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, q: Quiver) -> "NCForm":
        return cls._raw(q, {})

    @classmethod
    def from_element(cls, x: PathAlgebraElement) -> "NCForm":
        return cls._raw(x.quiver, {(p,): c for p, c in x.terms.items()})

    @classmethod
    def monomial(cls, q: Quiver, m: Sequence[Path], c=1) -> "NCForm":
        return cls(q, {tuple(m): c})

    @classmethod
    def exact(cls, q: Quiver, *paths: Path) -> "NCForm":
        """dp1 dp2 ... dpn (e_{t(p1)} as p0)."""
        p1 = paths[0]
        return cls(q, {(Path(p1.start, p1.start, ()),) + tuple(paths): 1})

    # arithmetic
    def _check(self, other: "NCForm"):
        if not isinstance(other, NCForm):
            raise TypeError(f"expected NCForm, got {type(other).__name__}")
        if other.quiver != self.quiver:
            raise QuiverMismatch("forms live over different quivers")

    def __add__(self, other: "NCForm") -> "NCForm":
        self._check(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            _accumulate(t, k, v)
        return NCForm._raw(self.quiver, t)

    def __neg__(self) -> "NCForm":
        return NCForm._raw(self.quiver, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "NCForm") -> "NCForm":
        return self + (-other)

    def scale(self, c) -> "NCForm":
        c = rat(c)
        if not c:
            return NCForm.zero(self.quiver)
        return NCForm._raw(self.quiver, {k: simplify(c * v) for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, NCForm):
            return form_mul(self, other)
        if isinstance(other, PathAlgebraElement):
            return form_mul(self, NCForm.from_element(other))
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCForm):
            return NotImplemented
        return self.quiver == other.quiver and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    # structure
    @property
    def degree(self) -> Optional[int]:
        """Form degree if homogeneous, None for zero or mixed forms."""
        ds = {len(m) - 1 for m in self.terms}
        return ds.pop() if len(ds) == 1 else None

    def degrees(self) -> set:
        return {len(m) - 1 for m in self.terms}

    def part(self, n: int) -> "NCForm":
        return NCForm._raw(self.quiver, {m: c for m, c in self.terms.items() if len(m) - 1 == n})

    def block(self, n: int, length: int) -> "NCForm":
        return NCForm._raw(self.quiver, {m: c for m, c in self.terms.items()
                                         if len(m) - 1 == n and mono_length(m) == length})

    def blocks(self) -> set:
        return {(len(m) - 1, mono_length(m)) for m in self.terms}

    def to_element(self) -> PathAlgebraElement:
        if any(len(m) != 1 for m in self.terms):
            raise ValueError("not a 0-form")
        return PathAlgebraElement(self.quiver, {m[0]: c for m, c in self.terms.items()})

    def sandwich(self, i: int, j: int) -> "NCForm":
        return NCForm._raw(self.quiver, {m: c for m, c in self.terms.items()
                                         if m[0].start == i and m[-1].end == j})

    def r_average(self) -> "NCForm":
        """sum_i e_i w e_i (projection onto R-invariants)."""
        return NCForm._raw(self.quiver, {m: c for m, c in self.terms.items() if m[0].start == m[-1].end})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: tuple(path_sort_key(p) for p in kv[0]))

    def to_tuples(self) -> List[List[str]]:
        """Serialize as [coefficient, p0, p1, ..., pn] string lists."""
        q = self.quiver
        return [[format_rational(c)] + [q.path_name(p) for p in m] for m, c in self.sorted_terms()]

    def __repr__(self):
        return f"NCForm({format_form(self)})"

    def __str__(self):
        return format_form(self)


def format_monomial(q: Quiver, m: Monomial) -> str:
    parts = []
    if m[0].edges or len(m) == 1:
        parts.append(q.path_name(m[0]))
    for p in m[1:]:
        name = q.path_name(p)
        parts.append(f"d{name}" if len(p.edges) == 1 else f"d({name})")
    return " ".join(parts)


def format_form(w: NCForm) -> str:
    if not w.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(w.sorted_terms()):
        body = format_monomial(w.quiver, m)
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        txt = body if a == 1 else f"{format_rational(a)}*{body}"
        if i == 0:
            out.append(("-" if sign == "-" else "") + txt)
        else:
            out.append(f" {sign} {txt}")
    return "".join(out)


def _as_form(x) -> NCForm:
    if isinstance(x, NCForm):
        return x
    if isinstance(x, PathAlgebraElement):
        return NCForm.from_element(x)
    raise TypeError(f"expected a form, got {type(x).__name__}")


def d(w) -> NCForm:
    """de Rham differential."""
    w = _as_form(w)
    out: Dict[Monomial, Scalar] = {}
    for m, c in w.terms.items():
        dm = d_mono(m)
        if dm is not None:
            _accumulate(out, dm, c)
    return NCForm._raw(w.quiver, out)


def form_mul(a, b) -> NCForm:
    a, b = _as_form(a), _as_form(b)
    a._check(b)
    out: Dict[Monomial, Scalar] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if m1[-1].end != m2[0].start:
                continue
            for mm, c in mul_mono(m1, m2):
                _accumulate(out, mm, c * c1 * c2)
    return NCForm._raw(a.quiver, out)


def form_product(*factors) -> NCForm:
    acc = _as_form(factors[0])
    for f in factors[1:]:
        acc = form_mul(acc, f)
    return acc


def supercommutator(a, b) -> NCForm:
    a, b = _as_form(a), _as_form(b)
    out = form_mul(a, b)
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if m2[-1].end != m1[0].start:
                continue
            sgn = -1 if (len(m1) - 1) * (len(m2) - 1) % 2 else 1
            for mm, c in mul_mono(m2, m1):
                _accumulate(out.terms, mm, -sgn * c * c1 * c2)
    return out


# ---------------------------------------------------------------------------
# tensor products of forms


class TensorForm:
    """Element of the r-fold tensor power of forms: tuples of monomials -> coefficient."""

    __slots__ = ("quiver", "terms", "arity")

    def __init__(self, quiver: Quiver, arity: int, terms: Mapping[Tuple[Monomial, ...], Scalar] = ()):
        self.quiver = quiver
        self.arity = arity
        self.terms: Dict[Tuple[Monomial, ...], Scalar] = {}
        for k, c in dict(terms).items():
            if len(k) != arity:
                raise ValueError("tensor key has the wrong arity")
            c = rat(c)
            if c:
                _accumulate(self.terms, tuple(tuple(m) for m in k), c)

    @classmethod
    def _raw(cls, quiver, arity, terms) -> "TensorForm":
        obj = object.__new__(cls)
        obj.quiver = quiver
        obj.arity = arity
        obj.terms = terms
        return obj

    @classmethod
    def pure(cls, *forms) -> "TensorForm":
        forms = [_as_form(f) for f in forms]
        terms: Dict = {(): 1}
        for f in forms:
            nt: Dict = {}
            for k, c in terms.items():
                for m, a in f.terms.items():
                    _accumulate(nt, k + (m,), c * a)
            terms = nt
        return cls._raw(forms[0].quiver, len(forms), terms)

    def __add__(self, other: "TensorForm") -> "TensorForm":
        if self.arity != other.arity and self.terms and other.terms:
            raise ValueError("arity mismatch")
        t = dict(self.terms)
        for k, v in other.terms.items():
            _accumulate(t, k, v)
        return TensorForm._raw(self.quiver, max(self.arity, other.arity), t)

    def __neg__(self) -> "TensorForm":
        return TensorForm._raw(self.quiver, self.arity, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TensorForm") -> "TensorForm":
        return self + (-other)

    def scale(self, c) -> "TensorForm":
        c = rat(c)
        return TensorForm._raw(self.quiver, self.arity, {k: c * v for k, v in self.terms.items() if c})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorForm):
            return NotImplemented
        return self.terms == other.terms and (self.arity == other.arity or not self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def outer(self, left=None, right=None) -> "TensorForm":
        """Outer bimodule action: left (u1 (x) ... (x) ur) right = left*u1 (x) ... (x) ur*right."""
        t = self.terms
        if left is not None:
            left = _as_form(left)
            nt: Dict = {}
            for k, c in t.items():
                for m, a in left.terms.items():
                    if m[-1].end != k[0][0].start:
                        continue
                    for mm, b in mul_mono(m, k[0]):
                        _accumulate(nt, (mm,) + k[1:], c * a * b)
            t = nt
        if right is not None:
            right = _as_form(right)
            nt = {}
            for k, c in t.items():
                for m, a in right.terms.items():
                    if k[-1][-1].end != m[0].start:
                        continue
                    for mm, b in mul_mono(k[-1], m):
                        _accumulate(nt, k[:-1] + (mm,), c * a * b)
            t = nt
        return TensorForm._raw(self.quiver, self.arity, t)

    def slot_degrees(self) -> set:
        return {tuple(len(m) - 1 for m in k) for k in self.terms}

    def __repr__(self):
        q = self.quiver
        parts = []
        for k, c in sorted(self.terms.items(), key=lambda kv: tuple(tuple(path_sort_key(p) for p in m) for m in kv[0])):
            body = " (x) ".join(format_monomial(q, m) for m in k)
            parts.append(f"{format_rational(c)}*[{body}]")
        return "TensorForm(" + (" + ".join(parts) or "0") + ")"


BiForm = TensorForm


def _slotwise(tf: TensorForm, op: Callable[[Monomial], Iterable[Tuple[Tuple[Monomial, ...], Scalar]]],
              odd: bool, new_arity: int) -> TensorForm:
    """Extend a monomial operator to tensor forms as a (super-)derivation."""
    out: Dict = {}
    for key, c in tf.terms.items():
        before = 0
        for s, m in enumerate(key):
            sgn = -1 if (odd and before % 2) else 1
            for repl, a in op(m):
                _accumulate(out, key[:s] + repl + key[s + 1:], sgn * c * a)
            before += len(m) - 1
    return TensorForm._raw(tf.quiver, new_arity, out)


def d_tensor(tf: TensorForm) -> TensorForm:
    def op(m):
        dm = d_mono(m)
        return () if dm is None else (((dm,), 1),)
    return _slotwise(tf, op, True, tf.arity)


def diamond(b: TensorForm) -> NCForm:
    """(alpha (x) beta) -> (-1)^{kl} beta alpha."""
    if b.arity != 2 and b.terms:
        raise ValueError("diamond needs a 2-fold tensor")
    out: Dict[Monomial, Scalar] = {}
    for (u, v), c in b.terms.items():
        if v[-1].end != u[0].start:
            continue
        sgn = -1 if (len(u) - 1) * (len(v) - 1) % 2 else 1
        for mm, a in mul_mono(v, u):
            _accumulate(out, mm, sgn * c * a)
    return NCForm._raw(b.quiver, out)


# ---------------------------------------------------------------------------
# derivations


class Derivation:
    """R-linear derivation of P, given by its values on edges."""

    def __init__(self, quiver: Quiver, values: Mapping):
        self.quiver = quiver
        vals: Dict[int, PathAlgebraElement] = {}
        for k, v in dict(values).items():
            e = quiver.edge_index(k) if isinstance(k, str) else int(k)
            if not isinstance(v, PathAlgebraElement):
                raise TypeError("derivation values must be PathAlgebraElements")
            for p in v.terms:
                if p.start != quiver.tails[e] or p.end != quiver.heads[e]:
                    raise ValueError(f"value on {quiver.edge_name(e)!r} has the wrong endpoints")
            if v.terms:
                vals[e] = v
        self.values = vals
        self._cache: Dict[Path, Dict[Path, Scalar]] = {}

    def on_edge(self, e: int) -> PathAlgebraElement:
        return self.values.get(e, PathAlgebraElement.zero(self.quiver))

    def on_path(self, p: Path) -> Dict[Path, Scalar]:
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        out: Dict[Path, Scalar] = {}
        es = p.edges
        q = self.quiver
        for k, e in enumerate(es):
            v = self.values.get(e)
            if v is None:
                continue
            pre = q.sub(p, 0, k)
            post = q.sub(p, k + 1, len(es))
            for r, c in v.terms.items():
                rr = compose(compose(pre, r), post)
                _accumulate(out, rr, c)
        self._cache[p] = out
        return out

    def __call__(self, x: PathAlgebraElement) -> PathAlgebraElement:
        out: Dict[Path, Scalar] = {}
        for p, c in x.terms.items():
            for r, a in self.on_path(p).items():
                _accumulate(out, r, c * a)
        return PathAlgebraElement(self.quiver, out)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.quiver == other.quiver and self.values == other.values

    def __repr__(self):
        q = self.quiver
        inner = ", ".join(f"{q.edge_name(e)} -> {v}" for e, v in sorted(self.values.items()))
        return f"Derivation({inner})"


def euler_derivation(q: Quiver) -> Derivation:
    return Derivation(q, {e: PathAlgebraElement.from_path(q, q.edge_path(e)) for e in range(q.num_edges)})


class DoubleDerivation:
    """Derivation P -> P (x) P for the outer bimodule, given on edges."""

    def __init__(self, quiver: Quiver, values: Mapping):
        self.quiver = quiver
        vals: Dict[int, Dict[Tuple[Path, Path], Scalar]] = {}
        for k, v in dict(values).items():
            e = quiver.edge_index(k) if isinstance(k, str) else int(k)
            terms = v.terms if isinstance(v, TensorElement) else _clean(dict(v))
            for (u, w) in terms:
                if u.start != quiver.tails[e] or w.end != quiver.heads[e]:
                    raise ValueError(f"value on {quiver.edge_name(e)!r} has the wrong endpoints")
            if terms:
                vals[e] = dict(terms)
        self.values = vals
        self._cache: Dict[Path, Dict[Tuple[Path, Path], Scalar]] = {}

    def on_edge(self, e: int) -> TensorElement:
        return TensorElement(self.quiver, self.values.get(e, {}))

    def on_path(self, p: Path) -> Dict[Tuple[Path, Path], Scalar]:
        """Outer Leibniz: sum_k a1..a_{k-1} T'(a_k) (x) T''(a_k) a_{k+1}..an."""
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        out: Dict[Tuple[Path, Path], Scalar] = {}
        es = p.edges
        q = self.quiver
        for k, e in enumerate(es):
            v = self.values.get(e)
            if v is None:
                continue
            pre = q.sub(p, 0, k)
            post = q.sub(p, k + 1, len(es))
            for (u, w), c in v.items():
                uu = compose(pre, u)
                ww = compose(w, post)
                if uu is None or ww is None:
                    continue
                _accumulate(out, (uu, ww), c)
        self._cache[p] = out
        return out

    def __call__(self, x: PathAlgebraElement) -> TensorElement:
        out: Dict = {}
        for p, c in x.terms.items():
            for k, a in self.on_path(p).items():
                _accumulate(out, k, c * a)
        return TensorElement(self.quiver, out)

    def inner_action(self, left: PathAlgebraElement, right: PathAlgebraElement) -> "DoubleDerivation":
        """left . Theta . right with the bimodule structure from the inner action on P (x) P."""
        return DoubleDerivation(self.quiver, {e: self.on_edge(e).inner(left, right) for e in self.values})

    def __add__(self, other: "DoubleDerivation") -> "DoubleDerivation":
        vals = {e: self.on_edge(e) for e in self.values}
        for e in other.values:
            vals[e] = vals[e] + other.on_edge(e) if e in vals else other.on_edge(e)
        return DoubleDerivation(self.quiver, vals)

    def __eq__(self, other):
        if not isinstance(other, DoubleDerivation):
            return NotImplemented
        return self.quiver == other.quiver and self.values == other.values


def delta_dd(q: Quiver) -> DoubleDerivation:
    """a -> a (x) e_{h(a)} - e_{t(a)} (x) a."""
    vals = {}
    for e in range(q.num_edges):
        a = q.edge_path(e)
        vals[e] = {(a, Path(a.end, a.end, ())): 1, (Path(a.start, a.start, ()), a): -1}
    return DoubleDerivation(q, vals)


def ad_dd(p: TensorElement) -> DoubleDerivation:
    """Inner double derivation a -> a p' (x) p'' - p' (x) p'' a (p must be R-invariant)."""
    q = p.quiver
    for (u, v) in p.terms:
        if u.start != v.end:
            raise ValueError("ad p needs p in (P (x) P)^R: t(p') must equal h(p'')")
    vals = {}
    for e in range(q.num_edges):
        a = PathAlgebraElement.from_path(q, q.edge_path(e))
        vals[e] = p.outer(left=a) - p.outer(right=a)
    return DoubleDerivation(q, vals)


def partial_dd(q: Quiver, name: str) -> DoubleDerivation:
    """The double derivation d/d(edge): edge -> e_t (x) e_h, other edges -> 0."""
    e = q.edge_index(name)
    return DoubleDerivation(q, {e: {(Path(q.tails[e], q.tails[e], ()), Path(q.heads[e], q.heads[e], ())): 1}})


# ---------------------------------------------------------------------------
# contractions and Lie derivatives


def _suffix_mono(m: Monomial, k: int) -> Monomial:
    """(e; p_k, ..., p_n)."""
    v = m[k].start
    return (Path(v, v, ()),) + m[k:]


def _require_positive(w: NCForm):
    if any(len(m) == 1 for m in w.terms):
        raise DegreeZero("contraction needs forms of degree >= 1")


def _contract_der_mono(theta: Derivation, m: Monomial) -> Dict[Monomial, Scalar]:
    out: Dict[Monomial, Scalar] = {}
    n = len(m) - 1
    for k in range(1, n + 1):
        val = theta.on_path(m[k])
        if not val:
            continue
        sgn = -1 if (k - 1) % 2 else 1
        prefix = m[:k]
        suffix = m[k + 1:]
        for r, c in val.items():
            for mm, a in rmul_mono(prefix, r):
                _accumulate(out, mm + suffix, sgn * c * a)
    return out


def contract_der(theta: Derivation, w) -> NCForm:
    """i_theta: odd derivation with i(a) = 0, i(da) = theta(a)."""
    w = _as_form(w)
    _require_positive(w)
    out: Dict[Monomial, Scalar] = {}
    for m, c in w.terms.items():
        for mm, a in _contract_der_mono(theta, m).items():
            _accumulate(out, mm, c * a)
    return NCForm._raw(w.quiver, out)


def _contract_der_any(theta: Derivation, m: Monomial):
    if len(m) == 1:
        return ()
    return tuple(((mm,), a) for mm, a in _contract_der_mono(theta, m).items())


def lie_der(theta: Derivation, w) -> NCForm:
    """L_theta = d i_theta + i_theta d (i_theta vanishes on 0-forms)."""
    w = _as_form(w)
    pos = NCForm._raw(w.quiver, {m: c for m, c in w.terms.items() if len(m) > 1})
    out = contract_der(theta, d(w))
    if pos.terms:
        out = out + d(contract_der(theta, pos))
    return out


def _contract_dd_mono(theta: DoubleDerivation, m: Monomial) -> Dict[Tuple[Monomial, Monomial], Scalar]:
    out: Dict = {}
    n = len(m) - 1
    for k in range(1, n + 1):
        val = theta.on_path(m[k])
        if not val:
            continue
        sgn = -1 if (k - 1) % 2 else 1
        prefix = m[:k]
        suffix = m[k + 1:]
        for (u, v), c in val.items():
            right = (v,) + suffix
            for mm, a in rmul_mono(prefix, u):
                _accumulate(out, (mm, right), sgn * c * a)
    return out


def contract_dd(theta: DoubleDerivation, w) -> TensorForm:
    """i_Theta: Omega^n -> sum_k Omega^{k} (x) Omega^{n-1-k}."""
    w = _as_form(w)
    _require_positive(w)
    out: Dict = {}
    for m, c in w.terms.items():
        for k, a in _contract_dd_mono(theta, m).items():
            _accumulate(out, k, c * a)
    return TensorForm._raw(w.quiver, 2, out)


def _lie_dd_mono(theta: DoubleDerivation, m: Monomial) -> Dict[Tuple[Monomial, Monomial], Scalar]:
    out: Dict = {}
    n = len(m) - 1
    rest = m[1:]
    for (u, v), c in theta.on_path(m[0]).items():
        _accumulate(out, ((u,), (v,) + rest), c)
    for k in range(1, n + 1):
        val = theta.on_path(m[k])
        if not val:
            continue
        prefix = m[:k]
        suffix = m[k + 1:]
        for (u, v), c in val.items():
            # a0 da1..da_{k-1} d(u) (x) v da_{k+1}..
            if u.edges:
                _accumulate(out, (prefix + (u,), (v,) + suffix), c)
            # a0 da1..da_{k-1} u (x) d(v) da_{k+1}..
            if v.edges:
                right = (Path(v.start, v.start, ()), v) + suffix
                for mm, a in rmul_mono(prefix, u):
                    _accumulate(out, (mm, right), c * a)
    return out


def lie_dd(theta: DoubleDerivation, w) -> TensorForm:
    w = _as_form(w)
    out: Dict = {}
    for m, c in w.terms.items():
        for k, a in _lie_dd_mono(theta, m).items():
            _accumulate(out, k, c * a)
    return TensorForm._raw(w.quiver, 2, out)


def contract_reduced(theta: DoubleDerivation, w) -> NCForm:
    return diamond(contract_dd(theta, w))


def lie_reduced(theta: DoubleDerivation, w) -> NCForm:
    return diamond(lie_dd(theta, w))


# tensor extensions (operators acting slotwise on tensor powers of forms)


def contract_dd_tensor(theta: DoubleDerivation, tf: TensorForm) -> TensorForm:
    def op(m):
        if len(m) == 1:
            return ()
        return tuple(_contract_dd_mono(theta, m).items())
    return _slotwise(tf, op, True, tf.arity + 1)


def lie_dd_tensor(theta: DoubleDerivation, tf: TensorForm) -> TensorForm:
    return _slotwise(tf, lambda m: tuple(_lie_dd_mono(theta, m).items()), False, tf.arity + 1)


def contract_der_tensor(theta: Derivation, tf: TensorForm) -> TensorForm:
    return _slotwise(tf, lambda m: _contract_der_any(theta, m), True, tf.arity)


def contract_reduced_direct(theta: DoubleDerivation, w) -> NCForm:
    """Reduced contraction written out on a product of 1-forms, without the flip map.

    With w = a1 a2 ... an, a1 = p0 dp1 and ak = dpk:
    sum_k (-1)^{(k-1)(n-k+1)} i''(a_k) a_{k+1}..a_n a_1..a_{k-1} i'(a_k).
    """
    w = _as_form(w)
    _require_positive(w)
    q = w.quiver
    out = NCForm.zero(q)
    for m, c in w.terms.items():
        n = len(m) - 1
        ones = []
        for k in range(1, n + 1):
            p0 = m[0] if k == 1 else Path(m[k].start, m[k].start, ())
            ones.append(NCForm._raw(q, {(p0, m[k]): 1}))
        for k in range(1, n + 1):
            sgn = -1 if ((k - 1) * (n - k + 1)) % 2 else 1
            for (u, v), a in theta.on_path(m[k]).items():
                left = m[0] if k == 1 else None
                # i'(a_k) = (p0 if k == 1) * u, i''(a_k) = v
                first = NCForm._raw(q, {(v,): 1})
                if left is None:
                    last = NCForm._raw(q, {(u,): 1})
                else:
                    lu = compose(left, u)
                    if lu is None:
                        continue
                    last = NCForm._raw(q, {(lu,): 1})
                factors = [first] + ones[k:] + ones[:k - 1] + [last]
                out = out + form_product(*factors).scale(sgn * c * a)
    return out


def contract_reduced_delta_direct(w) -> NCForm:
    """Reduced contraction with Delta via sum_k (-1)^{(k-1)(n+1)} e'[a_k, da_{k+1}..da_n a0 da1..da_{k-1}]e''."""
    w = _as_form(w)
    _require_positive(w)
    q = w.quiver
    out = NCForm.zero(q)
    for m, c in w.terms.items():
        n = len(m) - 1
        for k in range(1, n + 1):
            sgn = -1 if ((k - 1) * (n + 1)) % 2 else 1
            factors = [NCForm.exact(q, m[j]) for j in range(k + 1, n + 1)]
            factors.append(NCForm._raw(q, {(m[0],): 1}))
            factors += [NCForm.exact(q, m[j]) for j in range(1, k)]
            inner = form_product(*factors)
            ak = NCForm._raw(q, {(m[k],): 1})
            comm = form_mul(ak, inner) - form_mul(inner, ak)
            out = out + comm.r_average().scale(sgn * c)
    return out


# ---------------------------------------------------------------------------
# Karoubi-de Rham quotient, decided blockwise by exact linear algebra


DEFAULT_TRUNCATION = 8
_dr_lock = threading.Lock()
_dr_cache: Dict = {}


def monomials(q: Quiver, n: int, length: int) -> List[Monomial]:
    """All form monomials of degree n and total path length ``length``."""
    out: List[Monomial] = []
    paths_by = {}

    def paths(k, start):
        key = (k, start)
        if key not in paths_by:
            paths_by[key] = list(q.paths_of_length(k, start))
        return paths_by[key]

    def rec(prefix: Tuple[Path, ...], left: int, slots: int):
        if slots == 0:
            if left == 0:
                out.append(prefix)
            return
        at = prefix[-1].end
        # each remaining slot needs length >= 1
        for k in range(1, left - (slots - 1) + 1):
            for p in paths(k, at):
                rec(prefix + (p,), left - k, slots - 1)

    for l0 in range(length + 1):
        if n == 0 and l0 != length:
            continue
        if n > 0 and length - l0 < n:
            continue
        for v in range(q.num_vertices):
            for p0 in paths(l0, v):
                rec((p0,), length - l0, n)
    return out


class _DRBlock:
    def __init__(self, q: Quiver, n: int, length: int):
        self.monos = monomials(q, n, length)
        self.index = {m: i for i, m in enumerate(self.monos)}
        self.ech = Echelon()
        gens: List[Tuple[NCForm, int, int]] = []
        for v in range(q.num_vertices):
            gens.append((NCForm._raw(q, {(Path(v, v, ()),): 1}), 0, 0))
        for e in range(q.num_edges):
            a = q.edge_path(e)
            gens.append((NCForm._raw(q, {(a,): 1}), 0, 1))
            gens.append((NCForm._raw(q, {(Path(a.start, a.start, ()), a): 1}), 1, 1))
        # [Omega, Omega] is spanned by [g, beta] with g in a generating set
        for g, gd, gl in gens:
            if gd > n or gl > length:
                continue
            for beta in monomials(q, n - gd, length - gl):
                comm = supercommutator(g, NCForm._raw(q, {beta: 1}))
                if comm.terms:
                    self.ech.add({self.index[m]: c for m, c in comm.terms.items()})

    def reduce(self, w: NCForm) -> Dict[Monomial, Scalar]:
        vec = {self.index[m]: c for m, c in w.terms.items()}
        red = self.ech.reduce(vec)
        return {self.monos[i]: c for i, c in red.items()}


def _dr_block(q: Quiver, n: int, length: int, bound: int) -> _DRBlock:
    if length > bound:
        raise TruncationExceeded(f"path degree {length} exceeds the truncation bound {bound}")
    key = (q, n, length)
    with _dr_lock:
        blk = _dr_cache.get(key)
        if blk is None:
            blk = _DRBlock(q, n, length)
            _dr_cache[key] = blk
    return blk


def dr_project(w, length: Optional[int] = None, bound: int = DEFAULT_TRUNCATION) -> NCForm:
    """Canonical representative of the class of w modulo graded commutators.

    With ``length`` given, only that path-degree block is projected.
    """
    w = _as_form(w)
    out: Dict[Monomial, Scalar] = {}
    for n, ln in sorted(w.blocks()):
        if length is not None and ln != length:
            continue
        blk = _dr_block(w.quiver, n, ln, bound)
        out.update(blk.reduce(w.block(n, ln)))
    return NCForm._raw(w.quiver, out)


def dr_equal(a, b, bound: int = DEFAULT_TRUNCATION) -> bool:
    diff = _as_form(a) - _as_form(b)
    return dr_project(diff, bound=bound).is_zero()


def dr_is_zero(a, bound: int = DEFAULT_TRUNCATION) -> bool:
    return dr_project(a, bound=bound).is_zero()


# ---------------------------------------------------------------------------
# noncommutative moment map


def mu_nc(w, bound: int = DEFAULT_TRUNCATION) -> PathAlgebraElement:
    """Canonical lift of the noncommutative moment map of a closed 2-form.

    The lift is x = (reduced Delta-contraction of beta) for any primitive
    d(beta) = w.  Since d and that contraction anticommute, x is the unique
    element without constant term satisfying dx = -(contraction of w), which
    is what gets solved here; x must lie in [P, P].
    """
    w = _as_form(w)
    q = w.quiver
    if w.degrees() - {2}:
        raise ValueError("mu_nc expects a 2-form")
    if not dr_is_zero(d(w), bound):
        raise NotClosed("the 2-form is not closed in the de Rham quotient")
    iota = contract_reduced(delta_dd(q), w)
    x: Dict[Path, Scalar] = {}
    for m, c in iota.terms.items():
        if len(m) != 2 or m[0].edges:
            raise NoSolution("reduced contraction is not an exact 1-form")
        _accumulate(x, m[1], -c)
    res = PathAlgebraElement(q, x)
    if d(res) != -iota:
        raise NoSolution("d(x) does not reproduce the contraction")
    if not necklace_project(res).is_zero():
        raise NoSolution("solution does not lie in the commutator subspace")
    return res
