from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from necklace import forms as F
from necklace.algebra import NecklaceElement, PathAlgebraElement, necklace_project, necklaces_upto
from necklace.errors import QuiverMismatch
from necklace.necklace_lie import (centrality_check, d_necklace, h_omega, is_central, liouville, necklace_bracket,
                                   partial, theta, w_element, canonical_form)
from necklace.quiver import Quiver, a_n, double, jordan_quiver, loop_quiver


def cyc(Q, names, c=1):
    return NecklaceElement.cycle(Q, names, c)


def pa(Q, names, c=1):
    return PathAlgebraElement.from_names(Q, names, c)


def test_partial_examples(Q2):
    assert partial("x", cyc(Q2, "x")) == PathAlgebraElement.one(Q2)
    assert partial("x", cyc(Q2, "x.x.y")) == pa(Q2, "x.y") + pa(Q2, "y.x")
    assert partial("x", cyc(Q2, "y")).is_zero()
    assert partial("x", NecklaceElement.trivial_cycle(Q2, "0")).is_zero()


def test_partial_endpoints(A2):
    p = cyc(A2, "a.a*.a.a*")
    assert partial("a", p) == pa(A2, "a*.a.a*", 2)
    for t in partial("a", p).terms:
        assert t.start == A2.heads[A2.edge_index("a")] and t.end == A2.tails[A2.edge_index("a")]


def test_d_necklace_examples(Q1):
    dx = F.d(F.NCForm.from_element(pa(Q1, "x")))
    assert d_necklace(cyc(Q1, "x")) == dx
    dxs = F.d(F.NCForm.from_element(pa(Q1, "x*")))
    expected = F.NCForm.from_element(pa(Q1, "x*")) * dx + F.NCForm.from_element(pa(Q1, "x")) * dxs
    assert d_necklace(cyc(Q1, "x.x*")) == expected
    assert d_necklace(NecklaceElement.trivial_cycle(Q1, "0")).is_zero()


def test_d_necklace_is_dr_class_of_dp(Q2):
    for c in necklaces_upto(Q2, 3):
        if not c.edges:
            continue
        p = NecklaceElement(Q2, {c: 1})
        dp = F.d(F.NCForm.from_element(p.representative()))
        assert F.dr_equal(d_necklace(p), dp)


def test_theta_examples(Q1):
    t = theta(cyc(Q1, "x.x*"))
    assert t.on_edge(0) == pa(Q1, "x") and t.on_edge(1) == -pa(Q1, "x*")
    t = theta(cyc(Q1, "x"))
    assert t.on_edge(0).is_zero() and t.on_edge(1) == -PathAlgebraElement.one(Q1)
    assert theta(NecklaceElement.trivial_cycle(Q1, "0")).values == {}


def test_h_omega_examples(Q1):
    dx = F.d(F.NCForm.from_element(pa(Q1, "x")))
    t = h_omega(dx)
    assert t.on_edge(0).is_zero() and t.on_edge(1) == -PathAlgebraElement.one(Q1)
    t = h_omega(F.NCForm.from_element(pa(Q1, "x*")) * dx)
    assert t.on_edge(0).is_zero() and t.on_edge(1) == -pa(Q1, "x*")


def test_h_omega_of_d_necklace(Q2):
    for c in necklaces_upto(Q2, 4):
        p = NecklaceElement(Q2, {c: 1})
        assert h_omega(d_necklace(p)) == theta(p)


def test_bracket_examples(Q1, Q2):
    assert necklace_bracket(cyc(Q1, "x.x*"), cyc(Q1, "x")) == cyc(Q1, "x")
    e = NecklaceElement.trivial_cycle(Q2, "0")
    for c in necklaces_upto(Q2, 3):
        assert necklace_bracket(NecklaceElement(Q2, {c: 1}), e).is_zero()
    assert necklace_bracket(cyc(Q1, "x"), cyc(Q1, "x")).is_zero()
    with pytest.raises(QuiverMismatch):
        necklace_bracket(cyc(Q1, "x"), cyc(Q2, "x"))


def test_bracket_degree(Q2):
    for a, b in product(necklaces_upto(Q2, 3), repeat=2):
        br = necklace_bracket(NecklaceElement(Q2, {a: 1}), NecklaceElement(Q2, {b: 1}))
        for t in br.terms:
            assert len(t.edges) == len(a.edges) + len(b.edges) - 2


def test_bracket_is_hamiltonian_action(Q2):
    # {p, q} is theta_p applied to a lift of q, modulo commutators
    for a, b in product(necklaces_upto(Q2, 3), repeat=2):
        p, r = NecklaceElement(Q2, {a: 1}), NecklaceElement(Q2, {b: 1})
        assert necklace_bracket(p, r) == necklace_project(theta(p)(r.representative()))


def test_liouville_examples():
    Q = double(jordan_quiver())
    x = F.NCForm.from_element(pa(Q, "x"))
    lam = liouville(Q)
    assert lam == x * F.d(F.NCForm.from_element(pa(Q, "x*")))
    assert F.d(lam) == canonical_form(Q)
    assert liouville(double(Quiver(["0"], []))).is_zero()
    Q2 = double(loop_quiver(2))
    el = lambda n: F.NCForm.from_element(pa(Q2, n))
    assert liouville(Q2) == el("x") * F.d(el("x*")) + el("y") * F.d(el("y*"))


@pytest.mark.parametrize("base", [loop_quiver(2), a_n(2), a_n(3)])
def test_centrality(base):
    Q = double(base)
    for i in range(Q.num_vertices):
        assert centrality_check(Q, 0, i, 4)[0]
        assert centrality_check(Q, 1, i, 5)[0]


def test_non_central_witness(Q2):
    ok, bad = is_central(cyc(Q2, "x.y"), 4)
    assert not ok and bad


def test_w_bar_vanishes_for_one_loop(Q1):
    assert necklace_project(w_element(Q1)).is_zero()


def random_necklace(Q, rng, max_len):
    cs = necklaces_upto(Q, max_len)
    terms = {}
    for _ in range(int(rng.integers(1, 4))):
        c = cs[int(rng.integers(len(cs)))]
        terms[c] = terms.get(c, 0) + int(rng.integers(-3, 4))
    return NecklaceElement(Q, terms)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["loop", "A3"]), st.integers(0, 2 ** 32 - 1))
def test_lie_axioms_random(kind, seed):
    Q = double(loop_quiver(2) if kind == "loop" else a_n(3))
    rng = np.random.default_rng(seed)
    p, r, s = (random_necklace(Q, rng, 3) for _ in range(3))
    b = necklace_bracket
    assert b(p, r) == -b(r, p)
    assert (b(p, b(r, s)) + b(r, b(s, p)) + b(s, b(p, r))).is_zero()
