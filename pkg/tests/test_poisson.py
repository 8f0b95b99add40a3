import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from jetpoisson.exact import CoordPoly
from jetpoisson.jets import JetElement, jet_invert, random_jet
from jetpoisson.phi import PhiSeries, phi_d_lambda, phi_monomial
from jetpoisson.poisson import (
    LambdaTable,
    MuSeq,
    OmegaTable,
    RelationError,
    StructureError,
    composition_series_residual,
    g3_example,
    inversion_residual,
    inversion_step_residual,
    jacobi_failures,
    jacobi_residual,
    lambda_from_mu,
    multiplicativity_failures_random,
    multiplicativity_failures_symbolic,
    multiplicativity_residual,
    multiplicativity_residual_at,
    omega_from_lambda,
    omega_from_phi,
    omega_special,
    random_mu,
    relation_residual,
    required_mu_2d1,
)

from strategies import jets

X = [CoordPoly.var(k, 8) for k in range(8)]


def xs(N):
    return [CoordPoly.var(k, N) for k in range(N)]


def unit_table(d, N):
    return lambda_from_mu(MuSeq.from_free(d, [1], N + d))


# -- mu -> lambda ----------------------------------------------------------------


def test_simplest_sequence_gives_single_entry():
    lam = unit_table(1, 8)
    assert lam.entries == {(1, 2): 1, (2, 1): -1}


def test_d1_forces_mu3_zero():
    for m2 in (1, Fraction(-3, 2), 7):
        assert required_mu_2d1(MuSeq(1, (0, m2, 0))) == 0
    with pytest.raises(RelationError):
        MuSeq.from_free(1, [1, 5], 4)


def test_d2_forces_mu5_and_fills_lambda23():
    m3, m4 = Fraction(2, 3), Fraction(-5, 7)
    assert required_mu_2d1(MuSeq(2, (0, 0, m3, m4, 0))) == m4 * m4 / m3
    mu = MuSeq.from_free(2, [m3, m4, m4 * m4 / m3], 8)
    lam = lambda_from_mu(mu)
    assert lam(3, 2) == m4
    assert lam(2, 3) == -m4
    with pytest.raises(RelationError):
        lambda_from_mu(MuSeq(2, (0, 0, m3, m4, 0, 0, 0)))


def test_solve_mode_fills_relation():
    mu = MuSeq.from_free(2, [1, 2, 99], 7, mode="solve")
    assert mu.mu(5) == 4
    assert relation_residual(mu) == 0


def test_mu_invariants():
    with pytest.raises(StructureError):
        MuSeq(2, (0, 0, 0, 1))
    with pytest.raises(StructureError):
        MuSeq(2, (1, 0, 1))


def test_table_size_is_length_minus_d():
    mu = MuSeq.from_free(3, [1, 2, 3], 11, mode="solve")
    assert lambda_from_mu(mu).N == 8


@given(st.integers(1, 3), st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_lambda_properties(d, seed):
    mu = random_mu(random.Random(seed), d, 9 + d)
    lam = lambda_from_mu(mu)
    assert all(lam(1, n) == mu.mu(n) for n in range(1, lam.N + 1))
    assert all(lam(m, n) == -lam(n, m) for m in range(1, lam.N + 1) for n in range(1, lam.N + 1))
    assert all(lam(m, n) == 0 for m in range(1, d + 1) for n in range(1, d + 1))


def test_lambda_table_rejects_non_antisymmetric():
    with pytest.raises(StructureError):
        LambdaTable(3, {(1, 2): 1})


# -- bracket tables ------------------------------------------------------------------


def test_simplest_tables():
    x1 = xs(8)[0]
    assert omega_from_lambda(unit_table(1, 8), 8)(1, 2) == x1 ** 2 - x1 ** 3
    assert omega_special(1, 8)(1, 2) == x1 ** 3 - x1 ** 2


@pytest.mark.parametrize("d", [1, 2, 3])
def test_special_table_is_negated_unit_table(d):
    assert omega_special(d, 8) == -omega_from_lambda(unit_table(d, 8), 8)
    assert omega_special(d, 8).proportionality(omega_from_lambda(unit_table(d, 8), 8)) == -1


@pytest.mark.parametrize("d", [1, 2, 3])
def test_special_table_equals_generating_series(d):
    assert omega_special(d, 8) == omega_from_phi(phi_monomial(d, 17), 8)


def test_zero_phi_gives_zero_table():
    assert omega_from_phi(PhiSeries.from_lambda({}, 12), 6).entries == {}
    assert omega_from_lambda(LambdaTable(6, {}), 6).entries == {}


def _sympy_generating_table(phi: PhiSeries, N: int):
    """Independent oracle: expand phi(u,v)x'(u)x'(v) - phi(x(u),x(v)) with sympy."""
    u, v = sympy.symbols("u v")
    Xs = sympy.symbols(f"x1:{N + 1}")
    xu = sum(Xs[i] * u ** (i + 1) for i in range(N))
    xv = xu.subs(u, v)
    coeffs = {k: c for k, c in phi.series.coeffs.items() if max(k) <= N}
    f = lambda a, b: sum(sympy.Rational(c) * a ** i * b ** j for (i, j), c in coeffs.items())
    omega = sympy.expand(f(u, v) * sympy.diff(xu, u) * sympy.diff(xv, v) - f(xu, xv))
    poly = sympy.Poly(omega, u, v)
    table = {}
    for (i, j), c in poly.terms():
        if 1 <= i < j <= N:
            table[(i, j)] = {m: sympy.Rational(k) for m, k in sympy.Poly(c, *Xs).terms()}
    return table


@pytest.mark.parametrize("phi", [phi_d_lambda(2, 1, 9), phi_d_lambda(3, Fraction(-1, 2), 9), phi_monomial(1, 9)])
def test_generating_series_matches_sympy_oracle(phi):
    N = 4
    ours = omega_from_phi(phi, N)
    expected = _sympy_generating_table(phi, N)
    got = {ij: {m: sympy.Rational(c) for m, c in p.terms.items()} for ij, p in ours.entries.items()}
    assert got == expected


@given(st.integers(1, 3), st.integers(0, 10 ** 6))
@settings(max_examples=10, deadline=None)
def test_route_equality(d, seed):
    lam = lambda_from_mu(random_mu(random.Random(seed), d, 6 + d))
    assert omega_from_lambda(lam, 6) == omega_from_phi(lam.to_phi(), 6)


@given(st.integers(1, 3), st.integers(0, 10 ** 6))
@settings(max_examples=10, deadline=None)
def test_identity_value_and_locality(d, seed):
    lam = lambda_from_mu(random_mu(random.Random(seed), d, 7 + d))
    omega = omega_from_lambda(lam, 7)
    assert omega.identity_values() == {}
    assert omega.locality_violations() == []


def test_table_json_round_trip():
    omega = omega_from_lambda(lambda_from_mu(random_mu(random.Random(3), 2, 8)), 6)
    data = json.loads(json.dumps(omega.to_json()))
    assert data["kind"] == "omega"
    assert OmegaTable.from_json(data) == omega
    lam = lambda_from_mu(random_mu(random.Random(4), 1, 7))
    assert LambdaTable.from_json(lam.to_json()) == lam
    mu = random_mu(random.Random(5), 2, 8)
    assert MuSeq.from_json(mu.to_json()) == mu


# -- Jacobi and multiplicativity ---------------------------------------------------------


def test_special_table_satisfies_jacobi():
    assert jacobi_failures(omega_special(1, 8)) == []


def test_jacobi_detects_mutation():
    omega = omega_special(1, 6)
    bad = omega.with_entry(2, 4, omega(2, 4) + xs(6)[0])
    assert jacobi_failures(bad)


@pytest.mark.parametrize("d", [1, 2])
def test_special_table_is_multiplicative_symbolically(d):
    assert multiplicativity_failures_symbolic(omega_special(d, 6)) == []


def test_multiplicativity_detects_mutation():
    omega = omega_special(1, 5)
    bad = omega.with_entry(2, 4, omega(2, 4) + xs(5)[0])
    assert multiplicativity_failures_symbolic(bad)
    assert multiplicativity_failures_random(bad, random.Random(0), samples=2)


def test_random_mode_matches_symbolic_residual():
    omega = omega_special(2, 5)
    bad = omega.with_entry(1, 3, omega(1, 3) + xs(5)[1] * xs(5)[0])
    sym = multiplicativity_residual(bad, 1, 3, mode="symbolic")
    rng = random.Random(7)
    x, y = random_jet(rng, 5), random_jet(rng, 5)
    assert multiplicativity_residual_at(bad, 1, 3, x, y) == sym.evaluate(list(x.x) + list(y.x))


@given(jets(5))
@settings(max_examples=20, deadline=None)
def test_any_table_is_multiplicative_at_identity(x):
    # even a mutated table: z = x and the Jacobian is the identity, while omega(e) enters linearly
    omega = omega_special(1, 5)
    bad = omega.with_entry(2, 3, omega(2, 3) + xs(5)[1])
    e = JetElement.identity(5)
    for i in range(1, 6):
        for j in range(i + 1, 6):
            assert multiplicativity_residual_at(bad, i, j, x, e) == 0


def test_negation_preserves_both_conditions():
    omega = -omega_special(2, 6)
    assert jacobi_failures(omega) == []
    assert multiplicativity_failures_symbolic(omega) == []


def test_projection_compatibility():
    lam = lambda_from_mu(random_mu(random.Random(11), 2, 10))
    small = omega_from_lambda(lam, 8).truncate(5)
    assert small == omega_from_lambda(lam.truncate(5), 5)
    assert jacobi_failures(small) == []
    assert multiplicativity_failures_symbolic(small) == []


# -- the three-dimensional example --------------------------------------------------------


def test_g3_table_shape():
    g = g3_example()
    assert g(2, 3).terms[(-1, 3, 0)] == 6
    assert not g.is_polynomial()
    assert g.identity_values() == {}


def test_g3_is_poisson_lie():
    g = g3_example()
    assert jacobi_residual(g, 1, 2, 3).is_zero()
    assert multiplicativity_failures_symbolic(g) == []


# -- generating-series identities at rational points -------------------------------------


def test_composition_series_trivial_cases():
    phi = phi_monomial(1, 17)
    x = random_jet(random.Random(1), 8)
    e = JetElement.identity(8)
    assert composition_series_residual(phi, x, e).is_zero()
    assert composition_series_residual(phi, e, x).is_zero()


@given(jets(6), jets(6), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_composition_series_vanishes(x, y, d):
    assert composition_series_residual(phi_d_lambda(d, Fraction(1, 2), 13), x, y).is_zero()


def test_composition_series_detects_non_solution():
    bad = PhiSeries.from_lambda({(2, 3): 1, (3, 2): -1, (1, 4): 1, (4, 1): -1}, 13)
    rng = random.Random(2)
    # Omega always satisfies the functional equation; the bracket table it defines does not
    x, y = random_jet(rng, 6), random_jet(rng, 6)
    assert composition_series_residual(bad, x, y).is_zero()
    assert jacobi_failures(omega_from_phi(bad, 6))


def test_inversion_examples():
    phi = phi_monomial(1, 17)
    assert inversion_residual(phi, JetElement.identity(8)).is_zero()
    assert inversion_residual(phi, JetElement((1, 1) + (0,) * 6)).is_zero()
    assert inversion_residual(phi, JetElement((Fraction(3, 2),) + (0,) * 7)).is_zero()


@given(jets(6), st.integers(1, 2))
@settings(max_examples=15, deadline=None)
def test_inversion_vanishes(x, d):
    phi = phi_monomial(d, 13)
    assert inversion_residual(phi, x).is_zero()
    assert inversion_step_residual(phi, x).is_zero()


def test_inversion_detects_wrong_table():
    phi = phi_monomial(1, 13)
    omega = omega_from_phi(phi, 6)
    bad = omega.with_entry(1, 3, omega(1, 3) + xs(6)[1] * xs(6)[0])
    x = JetElement((2, 1, 3, -1, 1, Fraction(1, 2)))
    assert inversion_residual(phi, x, omega).is_zero()
    assert not inversion_residual(phi, x, bad).is_zero()


def test_inverse_jet_consistency():
    x = random_jet(random.Random(9), 6)
    assert jet_invert(jet_invert(x)) == x
