from fractions import Fraction

import numpy as np
import pytest

from necklace.algebra import NecklaceElement, PathAlgebraElement, necklaces_upto
from necklace.errors import NonComposablePath, ParseError, UnknownEdge
from necklace.expr import format_expression, parse_element


def test_two_terms(Q1):
    x = parse_element("3/2*x.x* - 1*x*.x", Q1)
    assert isinstance(x, PathAlgebraElement)
    assert len(x) == 2
    assert x.coefficient(Q1.path("x.x*")) == Fraction(3, 2)
    assert x.coefficient(Q1.path("x*.x")) == -1


def test_cycle(Q2):
    c = parse_element("cyc(y.x)", Q2)
    assert isinstance(c, NecklaceElement)
    assert c == NecklaceElement.cycle(Q2, "x.y")


def test_idempotent_and_zero(A2):
    assert parse_element("e_1", A2) == PathAlgebraElement.idempotent(A2, "1")
    assert parse_element("0", A2).is_zero()
    assert parse_element("-a + a", A2).is_zero()


def test_errors(A2, Q2):
    with pytest.raises(NonComposablePath):
        parse_element("a.a", A2)
    with pytest.raises(UnknownEdge):
        parse_element("x.q", Q2)
    with pytest.raises(ParseError) as err:
        parse_element("x + * y", Q2)
    assert err.value.position == 4
    for bad in ["", "x +", "2 x", "1/0*x", "cyc(x", "e_9"]:
        with pytest.raises(ParseError):
            parse_element(bad, Q2)
    with pytest.raises(NonComposablePath):
        parse_element("cyc(a)", A2)


def test_kind_override(Q2):
    assert isinstance(parse_element("x.y", Q2, kind="necklace"), NecklaceElement)
    with pytest.raises(ParseError):
        parse_element("cyc(x)", Q2, kind="path")


def random_path_element(Q, rng):
    terms = {}
    for _ in range(int(rng.integers(0, 4))):
        k = int(rng.integers(0, 4))
        ps = list(Q.paths_of_length(k))
        p = ps[int(rng.integers(len(ps)))]
        terms[p] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
    return PathAlgebraElement(Q, terms)


def random_necklace_element(Q, rng):
    cs = necklaces_upto(Q, 4)
    terms = {}
    for _ in range(int(rng.integers(0, 4))):
        terms[cs[int(rng.integers(len(cs)))]] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
    return NecklaceElement(Q, terms)


def test_roundtrip_corpus(Q2, A2):
    rng = np.random.default_rng(2024)
    for i in range(1000):
        Q = Q2 if i % 2 else A2
        x = random_path_element(Q, rng) if i % 3 else random_necklace_element(Q, rng)
        kind = "necklace" if isinstance(x, NecklaceElement) else "path"
        assert parse_element(format_expression(x), Q, kind=kind) == x
