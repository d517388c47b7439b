import json
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from necklace.algebra import NecklaceElement, PathAlgebraElement, necklace_project, necklaces_upto
from necklace.errors import ShapeMismatch
from necklace.necklace_lie import necklace_bracket, partial, w_element
from necklace.quiver import a_n, double, jordan_quiver, loop_quiver
from necklace.rep import (GroupElementLie, InvariantPolynomial, RepPoint, act, evaluate, gradient_oracle,
                          group_action_vector, invariant_monomials, moment, moment_identity_check, oracle_bracket,
                          poisson_check, psi, stabilization_rank, symplectic_pair)


def M(rows):
    return np.array(rows, dtype=object)


@pytest.fixture
def rho1(Q1):
    return RepPoint(Q1, (2,), {"x": [[0, 1], [0, 0]], "x*": [[0, 0], [1, 0]]})


def test_evaluate_examples(Q1, rho1):
    e = PathAlgebraElement.idempotent(Q1, "0")
    assert np.array_equal(evaluate(e, rho1)[(0, 0)], M([[1, 0], [0, 1]]))
    xxs = PathAlgebraElement.from_names(Q1, "x.x*")
    assert np.array_equal(evaluate(xxs, rho1)[(0, 0)], M([[0, 0], [0, 1]]))


def test_psi_examples(Q1, rho1):
    assert psi(NecklaceElement.trivial_cycle(Q1, "0"), rho1) == 2
    assert psi(NecklaceElement.cycle(Q1, "x.x*"), rho1) == 1
    assert psi(NecklaceElement.cycle(Q1, "x"), rho1) == 0


def test_psi_product(Q2):
    rng = np.random.default_rng(1)
    rho = RepPoint.random(Q2, (2,), rng)
    a = InvariantPolynomial.from_necklace(NecklaceElement.cycle(Q2, "x.y"))
    b = InvariantPolynomial.from_necklace(NecklaceElement.cycle(Q2, "x*"))
    assert psi(a * b, rho) == psi(a, rho) * psi(b, rho)
    assert psi(a + b, rho) == psi(a, rho) + psi(b, rho)
    assert (a * b).degree() == 3


def test_psi_matches_sympy_trace(Q2):
    rng = np.random.default_rng(2)
    rho = RepPoint.random(Q2, (3,), rng)
    S = {n: sympy.Matrix(rho[n].tolist()) for n in ("x", "y", "x*", "y*")}
    # the path x.y* evaluates to X_{y*} X_x
    assert psi(NecklaceElement.cycle(Q2, "x.y*"), rho) == (S["y*"] * S["x"]).trace()
    assert psi(NecklaceElement.cycle(Q2, "x.x.y"), rho) == (S["y"] * S["x"] * S["x"]).trace()


def test_moment_examples(Q1, rho1):
    mu = moment(rho1)
    assert np.array_equal(mu.mats[0], M([[1, 0], [0, -1]]))
    assert np.array_equal(mu.mats[0], -evaluate(w_element(Q1), rho1)[(0, 0)])
    assert not moment(RepPoint.zero(Q1, (3,))).mats[0].any()
    rng = np.random.default_rng(3)
    for _ in range(5):
        assert not moment(RepPoint.random(Q1, (1,), rng)).mats[0].any()


@pytest.mark.parametrize("base", [loop_quiver(2), a_n(3)])
def test_moment_total_trace(base):
    Q = double(base)
    rng = np.random.default_rng(4)
    for _ in range(10):
        d = [int(rng.integers(1, 4)) for _ in Q.vertices]
        assert moment(RepPoint.random(Q, d, rng)).total_trace() == 0


def test_symplectic_examples(Q1):
    u = RepPoint(Q1, (1,), {"x": [[1]]})
    v = RepPoint(Q1, (1,), {"x*": [[1]]})
    assert symplectic_pair(u, u) == 0
    assert symplectic_pair(u, v) == 1
    assert symplectic_pair(v, u) == -1
    with pytest.raises(ShapeMismatch):
        symplectic_pair(u, RepPoint.zero(Q1, (2,)))


def test_symplectic_nondegenerate(Q2):
    # Gram matrix on the coordinate basis at d = 2 has full rank
    d = (2,)
    basis = []
    for name in ("x", "y", "x*", "y*"):
        for i, j in product(range(2), repeat=2):
            m = np.zeros((2, 2), dtype=object)
            m[i, j] = 1
            basis.append(RepPoint(Q2, d, {name: m}))
    gram = sympy.Matrix([[symplectic_pair(a, b) for b in basis] for a in basis])
    assert gram.rank() == len(basis)
    assert gram == -gram.T


def test_group_action_examples(Q1):
    rho = RepPoint(Q1, (2,), {"x": [[0, 1], [0, 0]]})
    x = GroupElementLie((2,), {0: [[1, 0], [0, -1]]})
    assert np.array_equal(group_action_vector(x, rho)["x"], M([[0, 2], [0, 0]]))
    zero = GroupElementLie((2,), {})
    assert group_action_vector(zero, rho) == RepPoint.zero(Q1, (2,))
    scalar = GroupElementLie((2,), {0: [[3, 0], [0, 3]]}, check_trace=False)
    assert group_action_vector(scalar, rho) == RepPoint.zero(Q1, (2,))


def test_lie_element_trace_constraint():
    with pytest.raises(ValueError):
        GroupElementLie((2,), {0: [[1, 0], [0, 0]]})


def test_moment_identity_trivial_cases(Q2):
    rng = np.random.default_rng(5)
    rho = RepPoint.random(Q2, (2,), rng)
    v = RepPoint.random(Q2, (2,), rng)
    x = GroupElementLie.random((2,), rng)
    assert moment_identity_check(rho, GroupElementLie((2,), {}), v)
    assert moment_identity_check(rho, x, RepPoint.zero(Q2, (2,)))
    assert symplectic_pair(group_action_vector(GroupElementLie((2,), {}), rho), v) == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["loop", "A2"]), st.integers(0, 2 ** 32 - 1))
def test_moment_identity_random(kind, seed):
    Q = double(loop_quiver(2) if kind == "loop" else a_n(2))
    rng = np.random.default_rng(seed)
    d = [int(rng.integers(1, 4)) for _ in Q.vertices]
    rho, v = RepPoint.random(Q, d, rng), RepPoint.random(Q, d, rng)
    assert moment_identity_check(rho, GroupElementLie.random(d, rng), v)


def test_moment_identity_nontrivial(Q2):
    rng = np.random.default_rng(6)
    rho, v = RepPoint.random(Q2, (2,), rng), RepPoint.random(Q2, (2,), rng)
    x = GroupElementLie.random((2,), rng)
    lhs = symplectic_pair(group_action_vector(x, rho), v)
    assert lhs != 0 and moment_identity_check(rho, x, v)


def test_gradient_oracle_examples(Q1, rho1):
    for i, j in product(range(2), repeat=2):
        assert gradient_oracle(NecklaceElement.cycle(Q1, "x"), rho1, ("x", i, j)) == (1 if i == j else 0)
        assert gradient_oracle(NecklaceElement.trivial_cycle(Q1, "0"), rho1, ("x", i, j)) == 0


@pytest.mark.parametrize("base,d", [(loop_quiver(2), (2,)), (a_n(2), (2, 3))])
def test_gradient_identity(base, d):
    Q = double(base)
    rng = np.random.default_rng(7)
    rho = RepPoint.random(Q, d, rng)
    for c in necklaces_upto(Q, 4):
        if not c.edges:
            continue
        p = NecklaceElement(Q, {c: 1})
        for a in range(Q.num_edges):
            ev = evaluate(partial(a, p), rho)
            block = ev.get((Q.heads[a], Q.tails[a]))
            for i in range(rho.dims[Q.heads[a]]):
                for j in range(rho.dims[Q.tails[a]]):
                    expected = block[j, i] if block is not None else 0
                    assert gradient_oracle(p, rho, (a, i, j)) == expected


def test_poisson_examples(Q1):
    rng = np.random.default_rng(8)
    p, r = NecklaceElement.cycle(Q1, "x.x*"), NecklaceElement.cycle(Q1, "x")
    e = NecklaceElement.trivial_cycle(Q1, "0")
    for d in (2, 3):
        rho = RepPoint.random(Q1, (d,), rng)
        assert oracle_bracket(p, r, rho) == psi(r, rho) == np.trace(rho["x"])
        assert oracle_bracket(p, e, rho) == 0
        assert oracle_bracket(p, p, rho) == 0
        assert poisson_check(p, r, rho)


def test_poisson_a2():
    Q = double(a_n(2))
    rho = RepPoint.random(Q, (2, 2), np.random.default_rng(9))
    cs = [c for c in necklaces_upto(Q, 4) if c.edges]
    for a, b in product(cs, repeat=2):
        if len(a.edges) + len(b.edges) <= 6:
            assert poisson_check(NecklaceElement(Q, {a: 1}), NecklaceElement(Q, {b: 1}), rho)


def random_invertible(n, rng):
    while True:
        g = np.array(rng.integers(-3, 4, size=(n, n)).tolist(), dtype=object)
        if sympy.Matrix(g.tolist()).det() != 0:
            return g


@pytest.mark.parametrize("base,d", [(loop_quiver(2), (3,)), (a_n(3), (1, 2, 2))])
def test_psi_invariant_under_base_change(base, d):
    Q = double(base)
    rng = np.random.default_rng(10)
    rho = RepPoint.random(Q, d, rng)
    g = {i: random_invertible(n, rng) for i, n in enumerate(d)}
    moved = act(g, rho)
    for c in necklaces_upto(Q, 4):
        p = NecklaceElement(Q, {c: 1})
        assert psi(p, moved) == psi(p, rho)


def test_psi_trace_symmetry(Q2):
    rng = np.random.default_rng(11)
    rho = RepPoint.random(Q2, (2,), rng)
    for u in Q2.paths_of_length(2):
        for v in Q2.paths_of_length(2):
            U, V = PathAlgebraElement.from_path(Q2, u), PathAlgebraElement.from_path(Q2, v)
            assert psi(necklace_project(U * V), rho) == psi(necklace_project(V * U), rho)


def test_evaluate_homomorphism(A2):
    rng = np.random.default_rng(12)
    rho = RepPoint.random(A2, (2, 3), rng)
    paths = [p for k in range(4) for p in A2.paths_of_length(k)]
    for u, v in product(paths, repeat=2):
        if u.end != v.start:
            continue
        uv = PathAlgebraElement.from_path(A2, u) * PathAlgebraElement.from_path(A2, v)
        lhs = evaluate(uv, rho)[(u.start, v.end)]
        rhs = evaluate(PathAlgebraElement.from_path(A2, v), rho)[(v.start, v.end)].dot(
            evaluate(PathAlgebraElement.from_path(A2, u), rho)[(u.start, u.end)])
        assert np.array_equal(lhs, rhs)


def test_rep_json_roundtrip(Q2):
    rho = RepPoint.random(Q2, (2,), np.random.default_rng(13)).scale(Fraction(1, 3))
    data = json.loads(json.dumps(rho.to_json()))
    assert RepPoint.from_json(Q2, data) == rho


def test_shape_mismatch(Q1):
    with pytest.raises(ShapeMismatch):
        RepPoint(Q1, (2,), {"x": [[1]]})


def test_invariant_monomial_counts(Q2):
    assert [len(invariant_monomials(Q2, s)) for s in range(4)] == [1, 4, 20, 84]


def test_stabilization_small():
    Q = double(loop_quiver(2))
    one = stabilization_rank(Q, 2, (1,), 200, 0)
    assert [x["rank"] for x in one] == [1, 4, 10]
    assert not one[2]["full"]
    two = stabilization_rank(Q, 2, (2,), 200, 0)
    assert all(x["full"] for x in two)
    # degree one: traces of the loops are independent coordinates
    assert stabilization_rank(double(jordan_quiver()), 1, (1,), 50, 0)[1]["full"]
