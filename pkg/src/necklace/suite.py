"""Reproducibility harness: the full verification suite and its configuration.

Every check returns a plain dict with at least ``name`` and ``pass``; the
suite runner merges them by name into one JSON-serializable report.
"""
from __future__ import annotations

import inspect
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations_with_replacement
from pathlib import Path as FilePath
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from . import forms as F
from .algebra import NecklaceElement, PathAlgebraElement, necklace_project, necklaces, necklaces_upto
from .errors import ConfigError, NecklaceError
from .jacobi import chain_rule_holds
from .necklace_lie import canonical_form, centrality_check, necklace_bracket, w_element
from .preprojective import build, center_probe, descent_check, euler_check, hilbert_check
from .quiver import (DYNKIN, EXTENDED_DYNKIN, WILD, DoubledQuiver, Path, Quiver, a_n, classify, d4, double,
                     jordan_quiver, kronecker, load_quiver, loop_quiver)
from .rep import GroupElementLie, RepPoint, moment_identity_check, oracle_bracket, psi, stabilization_rank

DEFAULT_SEED = 0

HILBERT_2LOOP = [1, 4, 15, 56, 209, 780, 2911, 10864, 40545]


# ---------------------------------------------------------------------------
# quivers by name


def resolve_quiver(source) -> Quiver:
    """Builtin name ('jordan', 'loop:2', 'A:3', 'D4', 'kronecker:3', 'affine-A1'), JSON file or dict."""
    if isinstance(source, Quiver):
        return source
    if isinstance(source, Mapping):
        return load_quiver(dict(source))
    if not isinstance(source, str):
        raise ConfigError(f"cannot interpret quiver {source!r}")
    name, _, arg = source.partition(":")
    low = name.lower()
    try:
        if low == "jordan":
            return jordan_quiver()
        if low == "loop":
            return loop_quiver(int(arg or 1))
        if low == "a" and arg:
            return a_n(int(arg))
        if low == "d4":
            return d4()
        if low == "kronecker":
            return kronecker(int(arg or 2))
        if low in ("affine-a1", "a1~"):
            return kronecker(2)
    except ValueError as exc:
        raise ConfigError(f"bad quiver name {source!r}: {exc}") from None
    path = FilePath(source)
    if not path.exists():
        raise ConfigError(f"quiver file not found: {source}")
    try:
        return load_quiver(path.read_text())
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load quiver from {source}: {exc}") from None


def _double(q: Quiver) -> DoubledQuiver:
    return q if isinstance(q, DoubledQuiver) else double(q)


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([seed, tag])


# ---------------------------------------------------------------------------
# 1, 2: series identities


def check_hilbert(quiver="loop:2", N=8, expected=None, multi_quiver="kronecker:3", multi_N=5) -> dict:
    q = resolve_quiver(quiver)
    tq = build(q, None, N)
    dims = tq.dims()
    exp = list(expected) if expected is not None else (HILBERT_2LOOP[: N + 1] if quiver == "loop:2" else None)
    rep = hilbert_check(q, N, tq)
    multi = hilbert_check(resolve_quiver(multi_quiver), multi_N)
    ok = rep["pass"] and multi["pass"] and (exp is None or dims == exp)
    return {"name": "hilbert", "pass": ok, "expected": exp, "actual": dims,
            "matrix_check": {"quiver": str(multi_quiver), "N": multi_N, "pass": multi["pass"]}}


def check_euler(quivers=("loop:2", "kronecker:3"), N=6) -> dict:
    results = {}
    for name in quivers:
        rep = euler_check(resolve_quiver(name), N)
        results[str(name)] = {"pass": rep["pass"], "coefficients": [r["actual"] for r in rep["degrees"]]}
    return {"name": "euler", "pass": all(r["pass"] for r in results.values()), "actual": results}


# ---------------------------------------------------------------------------
# 3: necklace Lie algebra axioms


def lie_axioms(q: Quiver, max_total: int) -> dict:
    Q = _double(q)
    cyc = necklaces_upto(Q, max_total)
    elems = {p: NecklaceElement(Q, {p: 1}) for p in cyc}
    cache: Dict = {}

    def br(a: Path, b: Path) -> NecklaceElement:
        key = (a, b)
        if key not in cache:
            cache[key] = necklace_bracket(elems[a], elems[b])
        return cache[key]

    def br_elem(x: NecklaceElement, y: NecklaceElement) -> NecklaceElement:
        out = NecklaceElement(Q, {})
        for p, c in x.terms.items():
            out = out + necklace_bracket(NecklaceElement(Q, {p: c}), y)
        return out

    anti_bad = anti_n = 0
    for i, a in enumerate(cyc):
        for b in cyc[i:]:
            if len(a.edges) + len(b.edges) > max_total:
                continue
            anti_n += 1
            if br(a, b) + br(b, a):
                anti_bad += 1
    jac_bad = jac_n = 0
    for a, b, c in combinations_with_replacement(cyc, 3):
        if len(a.edges) + len(b.edges) + len(c.edges) > max_total:
            continue
        jac_n += 1
        total = (br_elem(elems[a], br(b, c)) + br_elem(elems[b], br(c, a)) + br_elem(elems[c], br(a, b)))
        if total:
            jac_bad += 1
    return {"pairs": anti_n, "antisymmetry_failures": anti_bad, "triples": jac_n, "jacobi_failures": jac_bad,
            "pass": anti_bad == 0 and jac_bad == 0}


def check_lie_axioms(cases=(("loop:2", 6), ("A:2", 5))) -> dict:
    res = {str(name): lie_axioms(resolve_quiver(name), int(m)) for name, m in cases}
    return {"name": "lie_axioms", "pass": all(r["pass"] for r in res.values()), "actual": res}


# ---------------------------------------------------------------------------
# 4: form calculus


def _paths_from(Q: Quiver, k: int, start: int) -> List[Path]:
    return list(Q.paths_of_length(k, start))


def _paths_to(Q: Quiver, k: int, end: int) -> List[Path]:
    return [p for p in Q.paths_of_length(k) if p.end == end]


def random_double_derivation(Q: Quiver, rng: np.random.Generator, max_len: int = 1) -> F.DoubleDerivation:
    vals = {}
    for e in range(Q.num_edges):
        terms = {}
        for _ in range(int(rng.integers(1, 3))):
            us = _paths_from(Q, int(rng.integers(0, max_len + 1)), Q.tails[e])
            vs = _paths_to(Q, int(rng.integers(0, max_len + 1)), Q.heads[e])
            if us and vs:
                u = us[int(rng.integers(len(us)))]
                v = vs[int(rng.integers(len(vs)))]
                terms[(u, v)] = terms.get((u, v), 0) + int(rng.integers(-3, 4))
        vals[e] = {k: c for k, c in terms.items() if c}
    return F.DoubleDerivation(Q, vals)


def random_derivation(Q: Quiver, rng: np.random.Generator, max_len: int = 2) -> F.Derivation:
    vals = {}
    for e in range(Q.num_edges):
        cands = [p for k in range(max_len + 1) for p in Q.paths_of_length(k, Q.tails[e]) if p.end == Q.heads[e]]
        if cands:
            p = cands[int(rng.integers(len(cands)))]
            vals[e] = PathAlgebraElement(Q, {p: int(rng.integers(1, 4))})
    return F.Derivation(Q, vals)


def random_path(Q: Quiver, rng: np.random.Generator, k: int, start: Optional[int] = None) -> Optional[Path]:
    ps = list(Q.paths_of_length(k, start))
    return ps[int(rng.integers(len(ps)))] if ps else None


def random_form(Q: Quiver, rng: np.random.Generator, n: int, max_len: int = 2, terms: int = 3) -> F.NCForm:
    out: Dict = {}
    for _ in range(terms):
        m = [random_path(Q, rng, int(rng.integers(0, max_len + 1)))]
        ok = True
        for _ in range(n):
            p = random_path(Q, rng, int(rng.integers(1, max_len + 1)), m[-1].end)
            if p is None:
                ok = False
                break
            m.append(p)
        if ok:
            key = tuple(m)
            out[key] = out.get(key, 0) + int(rng.integers(-3, 4))
    return F.NCForm(Q, {k: c for k, c in out.items() if c})


def _cdd(T, w: F.NCForm) -> F.TensorForm:
    # contractions vanish on functions; the library raises there instead
    if w.is_zero() or w.degrees() == {0}:
        return F.TensorForm(w.quiver, 2, {})
    return F.contract_dd(T, w)


def _cred(T, w: F.NCForm) -> F.NCForm:
    if w.is_zero() or w.degrees() == {0}:
        return F.NCForm.zero(w.quiver)
    return F.contract_reduced(T, w)


def _cder(xi, w: F.NCForm) -> F.NCForm:
    if w.is_zero() or w.degrees() == {0}:
        return F.NCForm.zero(w.quiver)
    return F.contract_der(xi, w)


def _cdd_tensor(T, tf: F.TensorForm) -> F.TensorForm:
    if not tf:
        return F.TensorForm(tf.quiver, tf.arity + 1, {})
    return F.contract_dd_tensor(T, tf)


class FormIdentities:
    """The form-calculus identities, each evaluated on one form."""

    def __init__(self, Q: Quiver, theta: F.DoubleDerivation, phi: F.DoubleDerivation, xi: F.Derivation):
        self.Q = Q
        self.theta, self.phi, self.xi = theta, phi, xi
        self.delta = F.delta_dd(Q)
        self.idem = [F.NCForm(Q, {(Q.trivial(i),): 1}) for i in range(Q.num_vertices)]
        self.gens = ([F.NCForm(Q, {(Q.edge_path(e),): 1}) for e in range(Q.num_edges)]
                     + [F.d(F.NCForm(Q, {(Q.edge_path(e),): 1})) for e in range(Q.num_edges)])

    def run(self, w: F.NCForm, n: int) -> Dict[str, bool]:
        T, P, D, xi = self.theta, self.phi, self.delta, self.xi
        d = F.d
        res: Dict[str, bool] = {}
        res["d_squared"] = d(d(w)).is_zero()
        # super-derivation rule for the double contraction
        ok = True
        for b in self.gens:
            lhs = _cdd(T, w * b)
            rhs = _cdd(T, w).outer(right=b) + _cdd(T, b).outer(left=w).scale((-1) ** n)
            ok &= lhs == rhs
        res["contraction_superderivation"] = ok
        if n >= 1:
            res["contractions_anticommute"] = (_cdd_tensor(P, _cdd(T, w))
                                               + _cdd_tensor(T, _cdd(P, w))).is_zero()
        res["cartan_double"] = F.d_tensor(_cdd(T, w)) + _cdd(T, d(w)) == F.lie_dd(T, w)
        res["lie_commutes_with_d"] = F.d_tensor(F.lie_dd(T, w)) == F.lie_dd(T, d(w))
        red = _cred(T, w)
        if n >= 1:
            res["reduced_formula"] = red == F.contract_reduced_direct(T, w)
        res["cartan_reduced"] = d(red) + _cred(T, d(w)) == F.lie_reduced(T, w)
        res["reduced_lie_commutes_with_d"] = d(F.lie_reduced(T, w)) == F.lie_reduced(T, d(w))
        if n >= 2:
            res["reduced_anticommutes_with_derivation"] = (
                _cder(xi, red) + _cred(T, _cder(xi, w))).is_zero()
        lhs = F.lie_dd(D, w)
        rhs = F.TensorForm(self.Q, 2, {})
        for e in self.idem:
            rhs = rhs + F.TensorForm.pure(w * e, e) - F.TensorForm.pure(e, e * w)
        res["delta_lie_double"] = lhs == rhs
        res["delta_lie_reduced"] = F.lie_reduced(D, w).is_zero()
        iota = _cred(D, w)
        if n >= 1:
            res["delta_contraction_formula"] = iota == -F.contract_reduced_delta_direct(w)
        res["delta_contraction_in_commutators"] = F.dr_is_zero(iota)
        res["delta_anticommutes_with_d"] = (_cred(D, d(w)) + d(iota)).is_zero()
        if n >= 2:
            res["contraction_kills_delta_image"] = _cred(T, iota).is_zero()
        res["derivation_lie_commutes_with_delta"] = (F.lie_der(xi, iota) == _cred(D, F.lie_der(xi, w))
                                                     if n >= 1 else True)
        return res


def _tally(acc: Dict[str, List[int]], res: Dict[str, bool]):
    for k, v in res.items():
        t = acc.setdefault(k, [0, 0])
        t[1] += 1
        if not v:
            t[0] += 1


def form_identities(q: Quiver, max_degree: int, max_length: int, random_count: int, seed: int) -> dict:
    Q = _double(q)
    rng = _rng(seed, 4)
    ids = FormIdentities(Q, random_double_derivation(Q, rng), F.partial_dd(Q, Q.edges[0].name), random_derivation(Q, rng))
    acc: Dict[str, List[int]] = {}
    literal = [0, 0]
    count = 0
    for n in range(max_degree + 1):
        for ln in range(max_length + 1):
            for m in F.monomials(Q, n, ln):
                w = F.NCForm(Q, {m: 1})
                _tally(acc, ids.run(w, n))
                count += 1
    for _ in range(random_count):
        n = int(rng.integers(0, max_degree + 1))
        local = FormIdentities(Q, random_double_derivation(Q, rng), random_double_derivation(Q, rng),
                               random_derivation(Q, rng))
        w = random_form(Q, rng, n)
        _tally(acc, local.run(w, n))
        iota = _cred(local.delta, w)
        literal[1] += 1
        if n >= 1 and iota and iota == F.contract_reduced_delta_direct(w):
            literal[0] += 1
        count += 1
    failures = {k: v[0] for k, v in acc.items() if v[0]}
    return {"forms": count, "identities": {k: v[1] for k, v in acc.items()}, "failures": failures,
            "literal_sign_delta_formula_matches": literal[0], "pass": not failures}


def check_form_identities(quivers=("loop:2", "A:2"), max_degree=3, max_length=4, random_count=100, seed=DEFAULT_SEED) -> dict:
    res = {str(name): form_identities(resolve_quiver(name), max_degree, max_length, random_count, seed) for name in quivers}
    return {"name": "form_identities", "pass": all(r["pass"] for r in res.values()), "actual": res}


# ---------------------------------------------------------------------------
# 5: noncommutative moment map


def random_element(Q: Quiver, rng: np.random.Generator, max_len: int = 3, terms: int = 2,
                   closed_at: Optional[int] = None) -> PathAlgebraElement:
    out: Dict = {}
    for _ in range(terms):
        k = int(rng.integers(1, max_len + 1))
        ps = [p for p in Q.paths_of_length(k, closed_at) if closed_at is None or p.end == closed_at]
        if ps:
            p = ps[int(rng.integers(len(ps)))]
            out[p] = out.get(p, 0) + int(rng.integers(-3, 4))
    return PathAlgebraElement(Q, {k: c for k, c in out.items() if c})


def check_mu_nc(quivers=("loop:2", "A:2", "kronecker:3"), random_quiver="loop:2", trials=50, seed=DEFAULT_SEED) -> dict:
    canon = {}
    for name in quivers:
        Q = _double(resolve_quiver(name))
        canon[str(name)] = F.mu_nc(canonical_form(Q)) == w_element(Q)
    Q = _double(resolve_quiver(random_quiver))
    rng = _rng(seed, 5)
    bad = 0
    for _ in range(trials):
        u, v = random_element(Q, rng), random_element(Q, rng)
        lhs = F.mu_nc(F.d(F.NCForm.from_element(u)) * F.d(F.NCForm.from_element(v)))
        comm = u * v - v * u
        rhs = PathAlgebraElement(Q, {})
        for i in range(Q.num_vertices):
            rhs = rhs + comm.sandwich(i, i)
        bad += lhs != rhs
    ok = all(canon.values()) and bad == 0
    return {"name": "mu_nc", "pass": ok, "actual": {"canonical_form": canon, "random_trials": trials, "random_failures": bad}}


# ---------------------------------------------------------------------------
# 6, 7, 8: representation functor


def _random_dims(Q: Quiver, rng, max_dim: int) -> List[int]:
    return [int(rng.integers(1, max_dim + 1)) for _ in range(Q.num_vertices)]


def check_moment(quivers=("loop:2", "A:2"), trials=100, max_dim=3, seed=DEFAULT_SEED) -> dict:
    res = {}
    for k, name in enumerate(quivers):
        Q = _double(resolve_quiver(name))
        rng = _rng(seed, 600 + k)
        ok = 0
        for _ in range(trials):
            d = _random_dims(Q, rng, max_dim)
            rho = RepPoint.random(Q, d, rng)
            x = GroupElementLie.random(d, rng)
            v = RepPoint.random(Q, d, rng)
            ok += moment_identity_check(rho, x, v)
        res[str(name)] = {"trials": trials, "passed": ok}
    return {"name": "moment_identity", "seed": seed, "pass": all(r["passed"] == r["trials"] for r in res.values()),
            "actual": res}


def poisson_sweep(q: Quiver, dim: int, max_total: int, seed: int) -> dict:
    Q = _double(q)
    rng = _rng(seed, 700 + dim)
    rho = RepPoint.random(Q, [dim] * Q.num_vertices, rng)
    cyc = necklaces_upto(Q, max_total)
    bad = []
    n = 0
    for a in cyc:
        for b in cyc:
            if len(a.edges) + len(b.edges) > max_total:
                continue
            p, r = NecklaceElement(Q, {a: 1}), NecklaceElement(Q, {b: 1})
            n += 1
            if oracle_bracket(p, r, rho) != psi(necklace_bracket(p, r), rho):
                bad.append([Q.path_name(a), Q.path_name(b)])
    return {"pairs": n, "failures": bad, "pass": not bad}


def check_poisson(quiver="loop:2", dims=(2, 3), max_total=5, seed=DEFAULT_SEED) -> dict:
    q = resolve_quiver(quiver)
    res = {str(d): poisson_sweep(q, int(d), max_total, seed) for d in dims}
    return {"name": "poisson", "seed": seed, "pass": all(r["pass"] for r in res.values()), "actual": res}


def check_stabilization(quiver="loop:2", r=3, max_dim=4, samples=500, seed=DEFAULT_SEED) -> dict:
    q = resolve_quiver(quiver)
    sweep = {}
    minimal = None
    for dd in range(1, max_dim + 1):
        rep = stabilization_rank(q, r, [dd] * q.num_vertices, samples, seed)
        sweep[dd] = rep
        if minimal is None and all(x["full"] for x in rep):
            minimal = dd
    monotone = all(sweep[a][s]["rank"] <= sweep[a + 1][s]["rank"] for a in range(1, max_dim) for s in range(r + 1))
    return {"name": "stabilization", "seed": seed, "pass": minimal is not None and monotone,
            "actual": {"minimal_dim": minimal, "monotone": monotone,
                       "ranks": {str(dd): [x["rank"] for x in rep] for dd, rep in sweep.items()},
                       "monomials": [x["monomials"] for x in sweep[1]]}}


# ---------------------------------------------------------------------------
# 9, 10, 11: centers and descent


def check_centrality(quiver="loop:2", max_power=2, max_length=5, witness=("x", "y")) -> dict:
    Q = _double(resolve_quiver(quiver))
    res = {}
    ok = True
    for m in range(max_power + 1):
        for i in range(Q.num_vertices):
            good, bad = centrality_check(Q, m, i, max_length)
            res[f"e_{Q.vertices[i]} w^{m}"] = good
            ok &= good
    wit = None
    z = NecklaceElement(Q, {Q.path(list(witness)): 1})
    for s in necklaces_upto(Q, max_length):
        b = necklace_bracket(z, NecklaceElement(Q, {s: 1}))
        if b:
            wit = {"cycle": Q.path_name(s), "bracket": str(b)}
            break
    return {"name": "centrality", "pass": ok and wit is not None, "actual": res, "witness": wit}


def check_center(quiver="loop:2", max_degree=5) -> dict:
    tq = build(resolve_quiver(quiver), None, max_degree + 1)
    dims = [center_probe(tq, k) for k in range(max_degree + 1)]
    exp = [1] + [0] * max_degree
    return {"name": "center", "pass": dims == exp, "expected": exp, "actual": dims}


def check_descent(quiver="loop:2", D=5) -> dict:
    rep = descent_check(build(resolve_quiver(quiver), None, D), D)
    return {"name": "descent", "pass": rep["pass"], "actual": rep}


# ---------------------------------------------------------------------------
# 12, 13


def _random_free_tuple(Q: Quiver, rng) -> List[PathAlgebraElement]:
    out = []
    for _ in range(Q.num_edges):
        terms: Dict = {}
        for _ in range(int(rng.integers(1, 4))):
            k = int(rng.integers(0, 4))
            p = random_path(Q, rng, k, 0)
            terms[p] = terms.get(p, 0) + int(rng.integers(-3, 4))
        out.append(PathAlgebraElement(Q, {k: c for k, c in terms.items() if c}))
    return out


def check_chain_rule(generators=(1, 2), trials=50, seed=DEFAULT_SEED) -> dict:
    rng = _rng(seed, 12)
    res = {}
    for n in generators:
        Q = loop_quiver(n) if n > 1 else jordan_quiver()
        per = max(1, trials // len(generators))
        ok = sum(chain_rule_holds(_random_free_tuple(Q, rng), _random_free_tuple(Q, rng)) for _ in range(per))
        res[str(n)] = {"trials": per, "passed": ok}
    return {"name": "chain_rule", "seed": seed, "pass": all(r["passed"] == r["trials"] for r in res.values()),
            "actual": res}


CLASSIFY_EXPECTED = {"A:2": DYNKIN, "A:3": DYNKIN, "D4": DYNKIN, "jordan": EXTENDED_DYNKIN,
                     "affine-A1": EXTENDED_DYNKIN, "loop:2": WILD}


def check_classify(expected: Optional[Mapping[str, str]] = None) -> dict:
    exp = dict(expected or CLASSIFY_EXPECTED)
    act = {name: classify(resolve_quiver(name)) for name in exp}
    return {"name": "classify", "pass": act == exp, "expected": exp, "actual": act}


# ---------------------------------------------------------------------------
# suite runner


CHECKS: Dict[str, Callable[..., dict]] = {
    "hilbert": check_hilbert,
    "euler": check_euler,
    "lie_axioms": check_lie_axioms,
    "form_identities": check_form_identities,
    "mu_nc": check_mu_nc,
    "moment_identity": check_moment,
    "poisson": check_poisson,
    "stabilization": check_stabilization,
    "centrality": check_centrality,
    "center": check_center,
    "descent": check_descent,
    "chain_rule": check_chain_rule,
    "classify": check_classify,
}

SEEDED = {"form_identities", "mu_nc", "moment_identity", "poisson", "stabilization", "chain_rule"}


def env_seed(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("NECKLACE_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"NECKLACE_SEED must be an integer, got {raw!r}") from None


def load_config(source) -> dict:
    if source is None:
        return {}
    if isinstance(source, Mapping):
        return dict(source)
    path = FilePath(source)
    if not path.exists():
        raise ConfigError(f"config file not found: {source}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _validate(config: dict) -> dict:
    allowed = {"seed", "checks", "parallel"}
    extra = set(config) - allowed
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    checks = config.get("checks", {})
    if not isinstance(checks, dict):
        raise ConfigError("'checks' must map check names to parameter objects")
    for name, params in checks.items():
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r}")
        if params is not None and not isinstance(params, dict):
            raise ConfigError(f"parameters for {name!r} must be an object")
    # quiver references must resolve before anything runs
    for name, params in checks.items():
        for key, val in (params or {}).items():
            if "quiver" in key:
                vals = val if isinstance(val, (list, tuple)) else [val]
                for v in vals:
                    resolve_quiver(v[0] if isinstance(v, (list, tuple)) else v)
    return checks


def run_check(name: str, params: Optional[dict] = None, seed: int = DEFAULT_SEED, timing: bool = True) -> dict:
    fn = CHECKS[name]
    kwargs = dict(params or {})
    if name in SEEDED:
        kwargs.setdefault("seed", seed)
    try:
        inspect.signature(fn).bind(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name!r}: {exc}") from None
    t0 = time.perf_counter()
    try:
        out = fn(**kwargs)
    except NecklaceError as exc:
        out = {"name": name, "pass": False, "error": f"{type(exc).__name__}: {exc}"}
    out["name"] = name
    if timing:
        out["seconds"] = round(time.perf_counter() - t0, 3)
    return out


def run_suite(config=None, only: Optional[Sequence[str]] = None, timing: bool = True) -> dict:
    """Run every configured check; returns a RunReport dict."""
    cfg = load_config(config)
    checks = _validate(cfg)
    seed = env_seed(int(cfg.get("seed", DEFAULT_SEED)))
    names = list(CHECKS) if only is None else list(only)
    for n in names:
        if n not in CHECKS:
            raise ConfigError(f"unknown check {n!r}")
    t0 = time.perf_counter()
    if cfg.get("parallel"):
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda n: run_check(n, checks.get(n), seed, timing), names))
    else:
        results = [run_check(n, checks.get(n), seed, timing) for n in names]
    results.sort(key=lambda r: names.index(r["name"]))
    report = {"command": "suite", "inputs": cfg, "seed": seed, "checks": results,
              "pass": all(r["pass"] for r in results)}
    if timing:
        report["wall_time"] = round(time.perf_counter() - t0, 3)
    return report
