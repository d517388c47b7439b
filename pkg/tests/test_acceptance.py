"""Acceptance criteria 1-13.

Each test runs one suite check at the stated size, compares against frozen
expectations from independent oracles, and prints a single
``CRITERION n: PASS|FAIL`` line.  Run alone with

    pytest tests/test_acceptance.py -v -s
"""
import time
from fractions import Fraction

import pytest
import sympy

from necklace import suite
from necklace.algebra import NecklaceElement
from necklace.necklace_lie import necklace_bracket
from necklace.quiver import double, loop_quiver

SEED = suite.DEFAULT_SEED


def report(capsys, n, name, ok, seconds, limit, extra=""):
    ok = bool(ok) and seconds < limit
    with capsys.disabled():
        print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} ({name}, {seconds:.1f}s / limit {limit}s{extra})")
    return ok


def timed(fn, **kw):
    t0 = time.perf_counter()
    out = fn(**kw)
    return out, time.perf_counter() - t0


def recurrence(a, b, n):
    """h_0 = 1, h_1 = a, h_k = a h_{k-1} - b h_{k-2}."""
    h = [1, a]
    while len(h) < n + 1:
        h.append(a * h[-1] - b * h[-2])
    return h[: n + 1]


def necklace_count(m, k):
    return sum(int(sympy.totient(d)) * m ** (k // d) for d in sympy.divisors(k)) // k


def multiset_counts(m, r):
    """Degree-s counts of multisets of necklaces over m letters, s <= r."""
    t = sympy.symbols("t")
    gen = 1
    for k in range(1, r + 1):
        gen *= (1 - t ** k) ** (-necklace_count(m, k))
    poly = sympy.series(gen, t, 0, r + 1).removeO()
    return [int(poly.coeff(t, s)) for s in range(r + 1)]


def test_criterion_01_hilbert(capsys):
    out, secs = timed(suite.check_hilbert, quiver="loop:2", N=8, multi_quiver="kronecker:3", multi_N=5)
    oracle = recurrence(4, 1, 8)
    assert oracle == [1, 4, 15, 56, 209, 780, 2911, 10864, 40545]
    ok = out["pass"] and out["actual"] == oracle and out["matrix_check"]["pass"]
    assert report(capsys, 1, "Hilbert series", ok, secs, 300)


def test_criterion_02_euler(capsys):
    out, secs = timed(suite.check_euler, quivers=("loop:2", "kronecker:3"), N=6)
    exp = {"loop:2": [1] + [0] * 6, "kronecker:3": [2] + [0] * 6}
    ok = out["pass"] and {k: v["coefficients"] for k, v in out["actual"].items()} == exp
    assert report(capsys, 2, "Euler characteristic", ok, secs, 60)


def test_criterion_03_lie_axioms(capsys):
    out, secs = timed(suite.check_lie_axioms, cases=(("loop:2", 6), ("A:2", 5)))
    act = out["actual"]
    ok = out["pass"] and all(r["pairs"] > 0 and r["triples"] > 0 for r in act.values())
    extra = "; " + ", ".join(f"{k}: {r['pairs']} pairs, {r['triples']} triples" for k, r in act.items())
    assert report(capsys, 3, "necklace Lie axioms", ok, secs, 600, extra)


def test_criterion_04_form_identities(capsys):
    out, secs = timed(suite.check_form_identities, quivers=("loop:2", "A:2"), max_degree=3, max_length=4,
                      random_count=100, seed=SEED)
    act = out["actual"]
    ok = out["pass"] and all(not r["failures"] and r["forms"] > 100 for r in act.values())
    extra = "; " + ", ".join(f"{k}: {r['forms']} forms" for k, r in act.items())
    assert report(capsys, 4, "form calculus identities", ok, secs, 600, extra)


def test_criterion_05_mu_nc(capsys):
    out, secs = timed(suite.check_mu_nc, quivers=("loop:2", "A:2", "kronecker:3"), trials=50, seed=SEED)
    act = out["actual"]
    ok = out["pass"] and all(act["canonical_form"].values()) and len(act["canonical_form"]) == 3 \
        and act["random_trials"] == 50 and act["random_failures"] == 0
    assert report(capsys, 5, "noncommutative moment map", ok, secs, 60)


def test_criterion_06_moment_identity(capsys):
    out, secs = timed(suite.check_moment, quivers=("loop:2", "A:2"), trials=100, max_dim=3, seed=SEED)
    ok = out["pass"] and all(r["trials"] >= 100 and r["passed"] == r["trials"] for r in out["actual"].values())
    assert report(capsys, 6, "moment map identity", ok, secs, 60, f"; seed {SEED}")


def test_criterion_07_poisson(capsys):
    out, secs = timed(suite.check_poisson, quiver="loop:2", dims=(2, 3), max_total=5, seed=SEED)
    act = out["actual"]
    ok = out["pass"] and all(r["pairs"] == 2061 and not r["failures"] for r in act.values())
    assert report(capsys, 7, "Poisson morphism", ok, secs, 600, f"; seed {SEED}")


def test_criterion_08_stabilization(capsys):
    out, secs = timed(suite.check_stabilization, quiver="loop:2", r=3, max_dim=4, samples=500, seed=SEED)
    act = out["actual"]
    counts = multiset_counts(4, 3)
    assert counts == [1, 4, 20, 84]
    ok = (out["pass"] and act["monomials"] == counts and act["monotone"]
          and act["ranks"][str(act["minimal_dim"])] == counts)
    frozen = {"1": [1, 4, 10, 20], "2": [1, 4, 20, 64], "3": counts, "4": counts}
    ok = ok and act["ranks"] == frozen and act["minimal_dim"] == 3
    assert report(capsys, 8, "stabilization", ok, secs, 600, f"; minimal d = {act['minimal_dim']}, seed {SEED}")


def test_criterion_09_centrality(capsys):
    out, secs = timed(suite.check_centrality, quiver="loop:2", max_power=2, max_length=5)
    Q = double(loop_quiver(2))
    wit = out["witness"]
    ok = out["pass"] and wit is not None and len(out["actual"]) == 3 and all(out["actual"].values())
    if ok:
        b = necklace_bracket(NecklaceElement.cycle(Q, "x.y"), NecklaceElement.cycle(Q, wit["cycle"]))
        ok = not b.is_zero()
    extra = f"; witness {{cyc(x.y), cyc({wit['cycle']})}} = {wit['bracket']}" if wit else ""
    assert report(capsys, 9, "centrality", ok, secs, 300, extra)


def test_criterion_10_center(capsys):
    out, secs = timed(suite.check_center, quiver="loop:2", max_degree=5)
    ok = out["pass"] and out["actual"] == [1, 0, 0, 0, 0, 0]
    assert report(capsys, 10, "associative center", ok, secs, 300)


def test_criterion_11_descent(capsys):
    out, secs = timed(suite.check_descent, quiver="loop:2", D=5)
    act = out["actual"]
    ok = out["pass"] and act["D"] == 5 and not act["membership_failures"] and act["w_bracket_zero"] \
        and not act["theta_w_failures"] and act["pairs_checked"] > 0
    assert report(capsys, 11, "bracket descent", ok, secs, 300, f"; {act['pairs_checked']} pairs")


def test_criterion_12_chain_rule(capsys):
    out, secs = timed(suite.check_chain_rule, generators=(1, 2), trials=50, seed=SEED)
    act = out["actual"]
    ok = out["pass"] and sum(r["trials"] for r in act.values()) == 50
    assert report(capsys, 12, "chain rule", ok, secs, 60, f"; seed {SEED}")


def test_criterion_13_classify(capsys):
    out, secs = timed(suite.check_classify)
    exp = {"A:2": "Dynkin", "A:3": "Dynkin", "D4": "Dynkin", "jordan": "ExtendedDynkin",
           "affine-A1": "ExtendedDynkin", "loop:2": "Wild"}
    ok = out["pass"] and out["actual"] == exp
    assert report(capsys, 13, "classification", ok, secs, 1)
