import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from necklace.algebra import PathAlgebraElement
from necklace.errors import DeformedUnsupported, PreconditionFailed, TruncationExceeded
from necklace.linalg import SparseMatrix, rank
from necklace.necklace_lie import w_element
from necklace.preprojective import (build, center_probe, descent_check, euler_check, expected_series, hilbert_check,
                                    l_dims, l_dims_all_pairs, l_dims_necklace, lie_center_probe, normal_form)
from necklace.quiver import Quiver, a_n, d4, double, jordan_quiver, kronecker, loop_quiver
from necklace.suite import random_element


def brute_dims(q, N):
    """dim Pi_k as (#paths) - rank of the full spanning set {p w q}."""
    Q = double(q)
    w = w_element(Q)
    out = []
    for k in range(N + 1):
        paths = list(Q.paths_of_length(k))
        index = {p: i for i, p in enumerate(paths)}
        rows = []
        if k >= 2:
            for lp in range(k - 1):
                for p in Q.paths_of_length(lp):
                    for r in Q.paths_of_length(k - 2 - lp, p.end):
                        x = PathAlgebraElement.from_path(Q, p) * w * PathAlgebraElement.from_path(Q, r)
                        if x:
                            row = [0] * len(paths)
                            for t, c in x.terms.items():
                                row[index[t]] = c
                            rows.append(row)
        r = rank(SparseMatrix.from_rows(rows, cols=len(paths))) if rows else 0
        out.append(len(paths) - r)
    return out


@pytest.mark.parametrize("q,N", [(jordan_quiver(), 5), (loop_quiver(2), 4), (a_n(2), 4), (a_n(3), 5),
                                 (kronecker(3), 4), (d4(), 5)])
def test_dims_match_brute_force(q, N):
    assert build(q, None, N).dims() == brute_dims(q, N)


def test_jordan_dims():
    assert build(jordan_quiver(), None, 3).dims() == [1, 2, 3, 4]


def test_two_loop_dims():
    assert build(loop_quiver(2), None, 3).dims() == [1, 4, 15, 56]


def test_degree_zero():
    for q in [a_n(3), d4(), kronecker(2)]:
        assert build(q, None, 0).dims() == [q.num_vertices]


def test_normal_form_examples():
    tq = build(jordan_quiver(), None, 3)
    Q = tq.quiver
    assert normal_form(PathAlgebraElement.from_names(Q, "x*.x"), tq) == PathAlgebraElement.from_names(Q, "x.x*")
    e = PathAlgebraElement.idempotent(Q, "0")
    assert normal_form(e, tq) == e
    assert normal_form(tq.w, tq).is_zero()
    with pytest.raises(TruncationExceeded):
        normal_form(PathAlgebraElement.from_names(Q, "x.x.x.x"), tq)


def test_normal_form_deformed():
    tq = build(jordan_quiver(), {"0": 1}, 4)
    Q = tq.quiver
    assert normal_form(tq.w, tq) == PathAlgebraElement.idempotent(Q, "0")
    tq = build(a_n(2), {"1": 2, "2": -2}, 3)
    Q = tq.quiver
    c = PathAlgebraElement.idempotent(Q, "1").scale(2) - PathAlgebraElement.idempotent(Q, "2").scale(2)
    assert normal_form(tq.w, tq) == c


def test_deformed_layers():
    # gr of the deformed algebra has the undeformed dimensions here
    assert build(jordan_quiver(), {"0": 1}, 5).dims() == [1, 2, 3, 4, 5, 6]
    assert build(loop_quiver(2), {"0": 1}, 5).dims() == [1, 4, 15, 56, 209, 780]


def test_deformed_gates():
    tq = build(jordan_quiver(), {"0": 1}, 3)
    for f in (l_dims, l_dims_all_pairs, l_dims_necklace):
        with pytest.raises(DeformedUnsupported):
            f(tq)
    with pytest.raises(DeformedUnsupported):
        center_probe(tq, 1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["loop", "A3", "K3"]), st.integers(0, 2 ** 32 - 1))
def test_normal_form_multiplicative(kind, seed):
    q = {"loop": loop_quiver(2), "A3": a_n(3), "K3": kronecker(3)}[kind]
    tq = build(q, None, 6)
    rng = np.random.default_rng(seed)
    x, y = random_element(tq.quiver, rng), random_element(tq.quiver, rng)
    nf = tq.normal_form
    assert nf(x * y) == nf(nf(x) * nf(y))
    assert nf(nf(x)) == nf(x)


@pytest.mark.parametrize("q,N", [(loop_quiver(2), 5), (jordan_quiver(), 5), (a_n(2), 4), (kronecker(3), 5),
                                 (a_n(3), 4)])
def test_l_dims_routes_agree(q, N):
    tq = build(q, None, N)
    a = l_dims(tq)
    assert a == l_dims_all_pairs(tq) == l_dims_necklace(tq)
    assert a[0] == tq.quiver.num_vertices
    assert all(x <= y for x, y in zip(a, tq.dims()))


def test_l_dims_values():
    assert l_dims(build(loop_quiver(2), None, 5)) == [1, 4, 10, 20, 54, 148]
    assert l_dims(build(jordan_quiver(), None, 5)) == build(jordan_quiver(), None, 5).dims()
    assert l_dims(build(kronecker(3), None, 5)) == [2, 0, 8, 0, 27, 0]


def test_hilbert_and_euler():
    rep = hilbert_check(loop_quiver(3), 5)
    assert rep["pass"]
    assert euler_check(loop_quiver(2), 6)["pass"]
    # five arms on one center: a wild tree
    star = Quiver(["c", "1", "2", "3", "4", "5"], [(n, v, "c") for n, v in zip("abdfg", "12345")])
    assert euler_check(star, 4)["pass"]
    assert euler_check(kronecker(3), 6)["pass"]


def test_three_loop_dims():
    assert build(loop_quiver(3), None, 5).dims() == [1, 6, 35, 204, 1189, 6930]


def test_expected_series_scalar():
    s = expected_series(loop_quiver(2), 4)
    assert [s[k][0, 0] for k in range(5)] == [1, 4, 15, 56, 209]


@pytest.mark.parametrize("q", [a_n(2), d4(), jordan_quiver(), kronecker(2)])
def test_series_checks_need_wild(q):
    with pytest.raises(PreconditionFailed):
        hilbert_check(q, 3)
    with pytest.raises(PreconditionFailed):
        euler_check(q, 3)


def test_center():
    tq = build(loop_quiver(2), None, 6)
    assert [center_probe(tq, k) for k in range(6)] == [1, 0, 0, 0, 0, 0]
    assert center_probe(build(jordan_quiver(), None, 3), 1) == 2
    assert center_probe(build(jordan_quiver(), None, 4), 2) == 3
    assert center_probe(build(kronecker(3), None, 4), 0) == 1
    with pytest.raises(TruncationExceeded):
        center_probe(tq, 6)


def test_lie_center():
    assert lie_center_probe(loop_quiver(2), 0, 4) == 1
    assert lie_center_probe(loop_quiver(2), 2, 5) == 0


def test_descent():
    rep = descent_check(build(loop_quiver(2), None, 5), 5)
    assert rep["pass"] and rep["w_bracket_zero"] and not rep["membership_failures"]
    assert descent_check(build(kronecker(3), None, 4), 4)["pass"]
    with pytest.raises(TruncationExceeded):
        descent_check(build(loop_quiver(2), None, 3), 4)
