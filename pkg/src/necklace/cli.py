"""Command-line entry point.

Exit codes: 0 when everything checked passes, 1 when a check fails, 2 for
usage errors (bad arguments, unparsable input, input outside a check's domain).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Dict, List, Optional

import numpy as np

from . import forms as F
from .algebra import NecklaceElement, PathAlgebraElement
from .errors import ConfigError, NecklaceError, PreconditionFailed
from .expr import parse_element
from .linalg import format_rational, parse_rational
from .necklace_lie import canonical_form, centrality_check, liouville, necklace_bracket, partial, theta
from .preprojective import build, center_probe, descent_check, euler_check, hilbert_check
from .quiver import DoubledQuiver, Quiver, cartan_and_tits, classify, double, sigma0_member
from .rep import GroupElementLie, RepPoint, moment_identity_check, oracle_bracket, psi, stabilization_rank
from .suite import check_stabilization, env_seed, resolve_quiver, run_suite


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _base(args) -> Quiver:
    q = resolve_quiver(args.quiver)
    return q.base if isinstance(q, DoubledQuiver) else q


def _doubled(args) -> DoubledQuiver:
    q = resolve_quiver(args.quiver)
    return q if isinstance(q, DoubledQuiver) else double(q)


def _parse(text: str, Q: Quiver, kind: Optional[str] = None):
    return parse_element(text, Q, kind)


def _necklace(text: str, Q: Quiver) -> NecklaceElement:
    x = parse_element(text, Q)
    if isinstance(x, PathAlgebraElement):
        x = parse_element(text, Q, "necklace")
    return x


def parse_dims(text: Optional[str], q: Quiver) -> List[int]:
    """'i:2,j:3' or a single integer for every vertex; unlisted vertices get 1."""
    if text is None:
        return [1] * q.num_vertices
    text = text.strip()
    if text.isdigit():
        return [int(text)] * q.num_vertices
    dims = [1] * q.num_vertices
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, val = part.partition(":")
        if not sep:
            raise UsageError(f"bad dimension entry {part!r}; expected vertex:value")
        try:
            dims[q.vertex_index(key.strip())] = int(val)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad dimension entry {part!r}: {exc}") from None
        if dims[q.vertex_index(key.strip())] < 0:
            raise UsageError("dimensions must be nonnegative")
    return dims


def parse_params(text: Optional[str], q: Quiver) -> Dict[str, object]:
    out: Dict[str, object] = {}
    if not text:
        return out
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, val = part.partition(":")
        if not sep:
            raise UsageError(f"bad parameter entry {part!r}; expected vertex:value")
        try:
            q.vertex_index(key.strip())
            out[key.strip()] = parse_rational(val.strip())
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad parameter entry {part!r}: {exc}") from None
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, str, bool, float)) or x is None:
        # floats only ever carry wall-clock timings
        return x
    try:
        return format_rational(x)
    except (TypeError, ValueError):
        return str(x)


def _render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(_jsonable(report), indent=2, sort_keys=False)
    lines = []
    for k, v in report.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{k}:")
            for row in v:
                lines.append("  " + "  ".join(f"{a}={_short(b, a)}" for a, b in row.items()))
        else:
            lines.append(f"{k}: {_short(v, k)}")
    return "\n".join(lines)


def _short(v, key: str = "") -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(_jsonable(v))
    if isinstance(v, bool):
        if key == "pass":
            return "PASS" if v else "FAIL"
        return "yes" if v else "no"
    return str(v)


# ---------------------------------------------------------------------------
# subcommands; each returns a report dict, with "pass" when it is a check


def cmd_classify(args) -> dict:
    q = _base(args)
    cd = cartan_and_tits(q)
    return {"quiver": args.quiver, "class": classify(q), "adjacency": cd.adjacency}


def cmd_double(args) -> dict:
    Q = _doubled(args)
    return {"vertices": list(Q.vertices),
            "edges": [{"name": e.name, "tail": Q.vertices[e.tail], "head": Q.vertices[e.head],
                       "eps": Q.eps[i]} for i, e in enumerate(Q.edges)]}


def cmd_mul(args) -> dict:
    Q = _doubled(args)
    x, y = _parse(args.left, Q, "path"), _parse(args.right, Q, "path")
    return {"result": str(x * y)}


def cmd_bracket(args) -> dict:
    Q = _doubled(args)
    return {"result": str(necklace_bracket(_necklace(args.p, Q), _necklace(args.q, Q)))}


def cmd_partial(args) -> dict:
    Q = _doubled(args)
    if not Q.has_edge(args.edge):
        raise UsageError(f"unknown edge {args.edge!r}")
    return {"result": str(partial(args.edge, _necklace(args.p, Q)))}


def cmd_theta(args) -> dict:
    Q = _doubled(args)
    th = theta(_necklace(args.p, Q))
    return {"values": {Q.edges[e].name: str(th.on_edge(e)) for e in range(Q.num_edges)}}


def cmd_mu_nc(args) -> dict:
    Q = _doubled(args)
    if args.du is not None or args.dv is not None:
        if args.du is None or args.dv is None:
            raise UsageError("--du and --dv go together")
        u, v = _parse(args.du, Q, "path"), _parse(args.dv, Q, "path")
        omega = F.d(F.NCForm.from_element(u)) * F.d(F.NCForm.from_element(v))
    else:
        omega = canonical_form(Q)
    return {"omega": str(omega), "mu_nc": str(F.mu_nc(omega))}


def cmd_liouville(args) -> dict:
    Q = _doubled(args)
    lam = liouville(Q)
    omega = canonical_form(Q)
    return {"liouville": str(lam), "d_liouville": str(F.d(lam)), "omega": str(omega),
            "pass": F.d(lam) == omega}


def cmd_normal_form(args) -> dict:
    Q = _doubled(args)
    x = _parse(args.expr, Q, "path")
    N = args.max_degree if args.max_degree is not None else max(x.degree(), 0)
    tq = build(Q, parse_params(args.c, Q), N)
    return {"input": str(x), "normal_form": str(tq.normal_form(x)), "N": N}


def _gated(fn, q, N) -> dict:
    try:
        return fn(q, N)
    except PreconditionFailed as exc:
        raise UsageError(str(exc)) from None


def cmd_hilbert(args) -> dict:
    return _gated(hilbert_check, _base(args), args.max_degree)


def cmd_euler(args) -> dict:
    return _gated(euler_check, _base(args), args.max_degree)


def cmd_center(args) -> dict:
    tq = build(_base(args), None, args.degree + 1)
    dim = center_probe(tq, args.degree)
    rep = {"degree": args.degree, "center_dimension": dim}
    if args.expect is not None:
        rep["pass"] = dim == args.expect
    return rep


def cmd_lie_center(args) -> dict:
    Q = _doubled(args)
    rows = []
    for m in range(args.max_power + 1):
        for i in range(Q.num_vertices):
            ok, bad = centrality_check(Q, m, i, args.max_length)
            rows.append({"element": f"e_{Q.vertices[i]} w^{m}", "central": ok,
                         "witness": Q.path_name(bad[0][0]) if bad else None})
    return {"max_length": args.max_length, "checks": rows, "pass": all(r["central"] for r in rows)}


def cmd_descent(args) -> dict:
    return descent_check(build(_base(args), None, args.max_degree), args.max_degree)


def cmd_moment(args) -> dict:
    Q = _doubled(args)
    seed = env_seed(args.seed)
    rng = np.random.default_rng(seed)
    ok = 0
    for _ in range(args.trials):
        d = parse_dims(args.dim, Q) if args.dim else [int(rng.integers(1, 4)) for _ in range(Q.num_vertices)]
        rho = RepPoint.random(Q, d, rng)
        ok += moment_identity_check(rho, GroupElementLie.random(d, rng), RepPoint.random(Q, d, rng))
    return {"seed": seed, "trials": args.trials, "passed": ok, "pass": ok == args.trials}


def cmd_poisson(args) -> dict:
    Q = _doubled(args)
    seed = env_seed(args.seed)
    rng = np.random.default_rng(seed)
    p, r = _necklace(args.p, Q), _necklace(args.q, Q)
    rho = RepPoint.random(Q, parse_dims(args.dim, Q), rng)
    lhs = oracle_bracket(p, r, rho)
    rhs = psi(necklace_bracket(p, r), rho)
    return {"seed": seed, "oracle_bracket": format_rational(lhs), "psi_of_bracket": format_rational(rhs),
            "point": rho.to_json(), "pass": lhs == rhs}


def cmd_stabilization(args) -> dict:
    q = _base(args)
    seed = env_seed(args.seed)
    if args.dim:
        rows = stabilization_rank(q, args.max_degree, parse_dims(args.dim, q), args.samples, seed)
        return {"seed": seed, "degrees": rows, "pass": all(r["full"] for r in rows)}
    rep = check_stabilization(args.quiver, args.max_degree, args.sweep, args.samples, seed)
    return {"seed": seed, **rep["actual"], "pass": rep["pass"]}


def cmd_sigma0(args) -> dict:
    q = _base(args)
    d = parse_dims(args.dim, q)
    return {"dim": d, "member": sigma0_member(q, d)}


def cmd_suite(args) -> dict:
    return run_suite(args.config, only=args.only or None, timing=not args.no_timing)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="necklace", description="Exact computations with quivers, necklaces and "
                                                                "preprojective algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, quiver=True):
        p = sub.add_parser(name, help=help_text)
        if quiver:
            p.add_argument("--quiver", default="loop:2",
                           help="builtin name (jordan, loop:g, A:n, D4, kronecker:m, affine-A1) or JSON file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=fn)
        return p

    add("classify", cmd_classify, "Dynkin / ExtendedDynkin / Wild")
    add("double", cmd_double, "print the doubled quiver")
    p = add("mul", cmd_mul, "multiply two path-algebra elements")
    p.add_argument("left")
    p.add_argument("right")
    p = add("bracket", cmd_bracket, "necklace bracket {p, q}")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p = add("partial", cmd_partial, "cyclic derivative of a necklace")
    p.add_argument("--edge", required=True)
    p.add_argument("--p", required=True)
    p = add("theta", cmd_theta, "Hamiltonian derivation of a necklace")
    p.add_argument("--p", required=True)
    p = add("mu-nc", cmd_mu_nc, "noncommutative moment map of the canonical form, or of du dv")
    p.add_argument("--du")
    p.add_argument("--dv")
    add("liouville", cmd_liouville, "the Liouville 1-form and its differential")
    p = add("normal-form", cmd_normal_form, "normal form in the (deformed) preprojective algebra")
    p.add_argument("--expr", required=True)
    p.add_argument("--c", help="deformation parameter, e.g. '0:1'")
    p.add_argument("--max-degree", type=int)
    p = add("hilbert", cmd_hilbert, "graded dimensions against the matrix series")
    p.add_argument("--max-degree", type=int, default=6)
    p = add("euler-check", cmd_euler, "Euler characteristic identity")
    p.add_argument("--max-degree", type=int, default=6)
    p = add("center", cmd_center, "dimension of the degree-k associative center")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--expect", type=int, help="expected dimension; turns the probe into a check")
    p = add("lie-center", cmd_lie_center, "centrality of e_i w^m in the necklace Lie algebra")
    p.add_argument("--max-power", type=int, default=2)
    p.add_argument("--max-length", type=int, default=5)
    p = add("descent-check", cmd_descent, "bracket descends to the preprojective quotient")
    p.add_argument("--max-degree", type=int, default=4)
    p = add("moment-check", cmd_moment, "moment map identity at random points")
    p.add_argument("--dim")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p = add("poisson-check", cmd_poisson, "trace map is a Poisson morphism at a random point")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--dim", default="2")
    p.add_argument("--seed", type=int, default=0)
    p = add("stabilization", cmd_stabilization, "rank of trace evaluation on random points")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--dim", help="single dimension vector; omit to sweep 1..--sweep")
    p.add_argument("--sweep", type=int, default=4)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p = add("sigma0", cmd_sigma0, "membership of a dimension vector in Sigma_0")
    p.add_argument("--dim", required=True)
    p = add("suite", cmd_suite, "run the full verification suite", quiver=False)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--only", nargs="*", help="restrict to these checks")
    p.add_argument("--no-timing", action="store_true", help="omit wall times for byte-identical reports")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NecklaceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.command != "suite":
        report = {"command": args.command, **report}
    print(_render(report, args.json))
    if "pass" in report and not report["pass"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
