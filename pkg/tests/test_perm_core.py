import pickle
import random

import pytest

from errors import ParseError, PermutationError
from perm_core import (INF, Perm, PointSet, compose, fixed_points, format_label, from_cycles,
                       inverse, label_key, orbits, order, parse_cycles, parse_label)

from conftest import D17_X, D17_Y

PL17 = PointSet.projective_line(17)


def _random_perm(domain: PointSet, rng: random.Random) -> Perm:
    images = list(range(len(domain)))
    rng.shuffle(images)
    return Perm(domain, images)


def test_inf_sorts_last_and_survives_pickle():
    assert sorted([INF, 3, 0], key=label_key) == [0, 3, INF]
    assert pickle.loads(pickle.dumps(INF)) is INF
    assert format_label(INF) == "inf"


@pytest.mark.parametrize("token", ["inf", "oo", "∞", "Infinity"])
def test_parse_label_accepts_infinity_spellings(token):
    assert parse_label(token) is INF


def test_parse_label_rejects_garbage():
    with pytest.raises(ParseError):
        parse_label("x1")


def test_point_set_forms():
    assert len(PL17) == 18
    assert PL17.labels[-1] is INF
    assert PointSet.parse("pl:17") == PL17
    assert PointSet.parse("1..8") == PointSet.interval(1, 8)
    assert PointSet.parse("3, 1, inf") == PointSet([1, 3, INF])
    with pytest.raises(PermutationError):
        PointSet([1, 1])


@pytest.mark.parametrize("text", ["pl:17", "1..8", "1,3,inf", "0,2"])
def test_point_set_describe_parses_back(text):
    points = PointSet.parse(text)
    assert PointSet.parse(points.describe()) == points


def test_from_cycles_d17_x():
    x = Perm.parse(PL17, D17_X)
    assert x.fixed_points() == {9, 15}
    assert x(12) is INF and x(INF) == 12
    assert x.order() == 2
    assert x.cycle_string() == D17_X


def test_from_cycles_identity_and_even_y():
    assert from_cycles(PointSet.interval(1, 4), []).is_identity()
    y = from_cycles(PointSet.interval(1, 8), [(1, 2, 3, 4), (5, 6, 7, 8)])
    assert y.cycle_type() == [4, 4]
    assert y(4) == 1 and y(8) == 5


def test_from_cycles_errors():
    domain = PointSet.interval(1, 4)
    with pytest.raises(PermutationError):
        Perm.from_cycles(domain, [(1, 2), (2, 3)])
    with pytest.raises(PermutationError):
        Perm.from_cycles(domain, [(1, 9)])


@pytest.mark.parametrize("text", ["(1,2", "1,2)", "(1,,2)", "(a,b)"])
def test_malformed_cycles(text):
    with pytest.raises(ParseError):
        parse_cycles(text)


@pytest.mark.parametrize("text", ["", "()", "e", "  "])
def test_identity_spellings(text):
    assert parse_cycles(text) == []


def test_compose_d17_xy():
    x = Perm.parse(PL17, D17_X)
    y = Perm.parse(PL17, D17_Y)
    xy = compose(x, y)
    assert xy.cycle_string() == "(0,2,15,inf,11,7,9,14,12)(1,5,6,13,3,4,8,16,10)"
    assert order(xy) == 9
    assert [len(o) for o in orbits(xy)] == [9, 9]
    # right action: z^(xy) = (z^x)^y
    for z in PL17:
        assert xy(z) == y(x(z))


def test_d17_y_orbits_and_fixed_points():
    y = Perm.parse(PL17, D17_Y)
    assert sorted(len(o) for o in orbits(y)) == [1, 1, 8, 8]
    assert fixed_points(y) == {5, 10}
    assert y.order() == 8


def test_identity_basics():
    e = Perm.identity(PointSet.interval(1, 5))
    assert e.order() == 1
    assert len(e.orbits()) == 5
    assert e.fixed_points() == set(range(1, 6))
    assert e.cycle_string() == "()"


def test_compose_domain_mismatch():
    with pytest.raises(PermutationError):
        Perm.identity(PointSet.interval(1, 3)) * Perm.identity(PointSet.interval(1, 4))


def test_group_laws_on_random_perms():
    rng = random.Random(7)
    domain = PointSet.interval(0, 11)
    for _ in range(50):
        p, q, r = (_random_perm(domain, rng) for _ in range(3))
        assert (p * q) * r == p * (q * r)
        assert (p * inverse(p)).is_identity()
        assert (inverse(p) * p).is_identity()
        assert Perm.identity(domain) * q == q


def test_orbits_partition_and_order_is_exact():
    rng = random.Random(11)
    domain = PointSet.interval(1, 10)
    for _ in range(30):
        p = _random_perm(domain, rng)
        points = [z for o in p.orbits() for z in o]
        assert sorted(points) == list(domain)
        m = p.order()
        assert (p ** m).is_identity()
        assert all(not (p ** j).is_identity() for j in range(1, m))


def test_cycle_form_round_trip():
    rng = random.Random(3)
    domain = PointSet.interval(1, 9)
    for _ in range(20):
        p = _random_perm(domain, rng)
        assert Perm.from_cycles(domain, p.to_cycles()) == p
        assert Perm.parse(domain, p.cycle_string()) == p


def test_conjugate_by_relabels():
    domain = PointSet.interval(1, 4)
    p = Perm.parse(domain, "(1,2,3)")
    q = p.conjugate_by({1: 10, 2: 20, 3: 30, 4: 40})
    assert q.cycle_string() == "(10,20,30)"
    assert q.fixed_points() == {40}
