import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetpoisson.exact import CoordPoly
from jetpoisson.jets import (
    JetElement,
    TruncSeries,
    composition_coordinates,
    jet_compose,
    jet_invert,
    series_compose,
    series_partial,
)

from strategies import jets, small_rationals


def J(*xs):
    return JetElement(tuple(Fraction(x) for x in xs))


def uni(coeffs, order):
    return TruncSeries.univariate(coeffs, order)


def bi(terms, order=6):
    return TruncSeries(2, order, terms)


# -- group law ---------------------------------------------------------------


def test_compose_examples():
    assert jet_compose(J(1, 1, 0), J(1, 1, 0)) == J(1, 2, 2)
    y = J(3, -1, Fraction(1, 2))
    assert jet_compose(JetElement.identity(3), y) == y


def test_invert_examples():
    assert jet_invert(J(1, 1, 0)) == J(1, -1, 2)
    assert jet_invert(JetElement.identity(4)) == JetElement.identity(4)
    assert jet_invert(J(2, 0, 0)) == J(Fraction(1, 2), 0, 0)


def test_x1_must_be_nonzero():
    with pytest.raises(ValueError):
        J(0, 1)


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        jet_compose(J(1, 0), J(1, 0, 0))


def _brute_force_z(N):
    """z_k from ordered compositions of k, written out term by term."""
    nv = 2 * N
    xs = [CoordPoly.var(i, nv, laurent={0, N}) for i in range(N)]
    ys = [CoordPoly.var(N + i, nv, laurent={0, N}) for i in range(N)]
    z = []
    for k in range(1, N + 1):
        acc = CoordPoly.zero(nv, {0, N})
        for i in range(1, k + 1):
            for parts in itertools.product(range(1, k + 1), repeat=i):
                if sum(parts) == k:
                    term = xs[i - 1]
                    for j in parts:
                        term = term * ys[j - 1]
                    acc = acc + term
        z.append(acc)
    return z


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_composition_coordinates_match_brute_force(N):
    assert composition_coordinates(N) == _brute_force_z(N)


def test_z2_formula():
    z = composition_coordinates(3)
    x1, x2, _, y1, y2, _ = (CoordPoly.var(i, 6, laurent={0, 3}) for i in range(6))
    assert z[1] == x1 * y2 + x2 * y1 * y1


def test_series_compose_examples():
    s = uni([0, 1, 1], 3)
    assert series_compose(s, s) == uni([0, 1, 2, 2], 3)
    u = uni([0, 1], 5)
    inner = uni([0, 2, -1, 3], 5)
    assert series_compose(u, inner) == inner
    assert series_compose(uni([0, 1, 4], 5), uni([], 5)) == uni([], 5)


def test_series_compose_rejects_constant_term():
    with pytest.raises(ValueError):
        series_compose(uni([0, 1], 3), uni([1, 1], 3))


def test_series_partial_examples():
    assert series_partial(bi({(2, 1): 1}), "u") == bi({(1, 1): 2}, 5)
    phi = bi({(1, 2): 1, (2, 1): -1})
    assert series_partial(phi, "v") == bi({(1, 1): 2, (2, 0): -1}, 5)
    tri = TruncSeries(3, 6, {(1, 2, 0): 1})
    assert series_partial(tri, "w").is_zero()


def test_partial_lowers_order():
    assert series_partial(bi({(2, 1): 1}, 7), "u").order == 6


def test_jet_series_round_trip_examples():
    assert JetElement.identity(3).to_series() == uni([0, 1], 3)
    assert J(1, 2, 2).to_series() == uni([0, 1, 2, 2], 3)


def test_json_shapes():
    x = J(1, Fraction(-1, 2), 3)
    data = x.to_json()
    assert data == {"N": 3, "x": ["1/1", "-1/2", "3/1"]}
    assert JetElement.from_json(json.loads(json.dumps(data))) == x
    s = bi({(1, 2): Fraction(1, 3), (2, 1): -1})
    assert TruncSeries.from_json(s.to_json()) == s


# -- properties --------------------------------------------------------------


@given(jets(6), jets(6), jets(6))
@settings(max_examples=60)
def test_associativity(x, y, z):
    assert jet_compose(jet_compose(x, y), z) == jet_compose(x, jet_compose(y, z))


@given(jets(7))
@settings(max_examples=60)
def test_inverse_laws(x):
    e = JetElement.identity(7)
    xi = jet_invert(x)
    assert jet_compose(x, xi) == e
    assert jet_compose(xi, x) == e
    assert jet_compose(x, e) == x == jet_compose(e, x)


@given(jets(6), jets(6), st.integers(min_value=1, max_value=5))
@settings(max_examples=60)
def test_projection_commutes_with_composition(x, y, M):
    assert jet_compose(x, y).truncate(M) == jet_compose(x.truncate(M), y.truncate(M))


@given(jets(6))
def test_series_round_trip(x):
    assert JetElement.from_series(x.to_series()) == x


@given(st.lists(small_rationals, min_size=1, max_size=6), jets(5))
@settings(max_examples=60)
def test_chain_rule(outer_coeffs, y):
    order = 5
    outer = uni([0] + outer_coeffs, order)
    inner = y.to_series(order)
    lhs = series_partial(series_compose(outer, inner), 0)
    rhs = series_compose(series_partial(outer, 0), inner) * series_partial(inner, 0)
    assert lhs == rhs.truncate(lhs.order)


@given(jets(5), jets(5))
@settings(max_examples=40)
def test_symbolic_coordinates_agree_with_numeric_composition(x, y):
    z = composition_coordinates(5)
    point = list(x.x) + list(y.x)
    assert tuple(p.evaluate(point) for p in z) == jet_compose(x, y).x
