import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetpoisson import bialgebra as bia
from jetpoisson.bialgebra import (
    AlphaTable,
    RMatrix,
    WittElement,
    adjoint_on_tensor2,
    adjoint_on_tensor3,
    alpha_family_d_lambda,
    alpha_family_d_lambda_table,
    alpha_family_monomial,
    alpha_family_monomial_table,
    coboundary,
    coboundary_formula,
    coboundary_table,
    cocycle_failures,
    cocycle_residual,
    cojacobi_residual,
    cybe_residual,
    derive_cocycle_from_omega,
    homogeneous_kernel,
    is_totally_antisymmetric,
    pde_system_failures,
    r_from_lambda,
    solve_r_from_cocycle,
    trusted_triple,
    wedge,
    witt_bracket,
)
from jetpoisson.phi import phi_d_lambda
from jetpoisson.poisson import (
    LambdaTable,
    MuSeq,
    OmegaTable,
    g3_example,
    lambda_from_mu,
    omega_from_lambda,
    omega_special,
    random_mu,
)

seeds = st.integers(0, 10 ** 6)


def e0d(d, cap=12):
    return RMatrix(cap, wedge(0, d))


# -- Witt algebra ------------------------------------------------------------------------


def test_witt_bracket_examples():
    assert witt_bracket(1, 0) == (1, 1)
    assert witt_bracket(3, 3)[0] == 0
    assert witt_bracket(0, 2) == (-2, 2)
    with pytest.raises(ValueError):
        witt_bracket(-1, 0)


def test_witt_element_reports_overflow():
    a = WittElement({2: 1}, cap=4)
    b = WittElement({3: 1}, cap=4)
    c, overflow = a.bracket(b)
    assert overflow and not c.coeffs
    c, overflow = a.bracket(WittElement({1: 1}, cap=4))
    assert not overflow and c.coeffs == {3: 1}


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_witt_jacobi(a, b, c):
    # [[a,b],c] + cyclic = 0 on basis elements
    def br(x, y):
        return witt_bracket(x, y)

    total = {}
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        c1, i1 = br(p, q)
        c2, i2 = br(i1, r)
        total[i2] = total.get(i2, 0) + c1 * c2
    assert all(v == 0 for v in total.values())


# -- adjoint action and coboundaries --------------------------------------------------------


def test_adjoint_examples():
    i, j = 2, 5
    out, _ = adjoint_on_tensor2(0, wedge(i, j))
    assert out == {k: -(i + j) * v for k, v in wedge(i, j).items()}
    assert adjoint_on_tensor2(3, {})[0] == {}
    n, d = 4, 2
    expected = {}
    for k, val in list(wedge(n, d, n).items()) + list(wedge(0, n + d, n - d).items()):
        expected[k] = expected.get(k, 0) + val
    assert adjoint_on_tensor2(n, wedge(0, d))[0] == expected


def test_adjoint_overflow_flag():
    out, overflow = adjoint_on_tensor2(3, wedge(1, 4), cap=5)
    assert overflow
    assert all(max(k) <= 5 for k in out)


def test_coboundary_examples():
    n, d = 3, 2
    alpha = coboundary(e0d(d), n)
    assert alpha[(n, d)] == n
    assert alpha[(n + d, 0)] == -(n - d)
    assert alpha[(0, n + d)] == n - d
    assert alpha[(d, n)] == -n
    r = bia.random_r(random.Random(0), 6)
    assert coboundary(r, 0) == {k: -(k[0] + k[1]) * v for k, v in r.comps.items()}
    assert coboundary(RMatrix(6, {}), 2) == {}


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_coboundary_formula_matches_adjoint(seed):
    r = bia.random_r(random.Random(seed), 12)
    for n in range(13):
        assert coboundary(r, n) == coboundary_formula(r, n)


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_every_coboundary_is_a_cocycle(seed):
    r = bia.random_r(random.Random(seed), 9)
    assert cocycle_failures(coboundary_table(r)) == []


def test_rmatrix_must_be_antisymmetric():
    with pytest.raises(ValueError):
        RMatrix(3, {(0, 1): 1})


# -- explicit families -------------------------------------------------------------------------


def test_monomial_family_components():
    d, n = 2, 5
    a = alpha_family_monomial(d, n)
    assert a[(d, n)] == 2 * n and a[(n, d)] == -2 * n
    assert a[(0, d + n)] == -2 * (n - d) and a[(d + n, 0)] == 2 * (n - d)
    b = alpha_family_monomial(3, 3)
    assert (0, 6) not in b and (6, 0) not in b


@pytest.mark.parametrize("d", [1, 2, 3])
def test_monomial_family_is_minus_two_coboundary(d):
    fam = alpha_family_monomial_table(d, 10)
    assert fam.proportionality(coboundary_table(e0d(d, 10))) == -2


@pytest.mark.parametrize("d", [1, 2, 3])
def test_monomial_family_is_a_bialgebra(d):
    fam = alpha_family_monomial_table(d, 12)
    assert cocycle_failures(fam, 10) == []
    assert cojacobi_residual(fam) == {}


def test_monomial_family_mutation_breaks_cocycle():
    fam = alpha_family_monomial_table(2, 10)
    bad = fam.with_component(3, 1, 4, fam.component(3, 1, 4) + 1).with_component(3, 4, 1, -fam.component(3, 1, 4) - 1)
    assert cocycle_failures(bad)


@pytest.mark.parametrize("d", [2, 3])
def test_d_lambda_specializes_to_monomial_family(d):
    zero = alpha_family_d_lambda_table(d, 0, 12)
    assert zero.proportionality(alpha_family_monomial_table(d, 12)) == -1


def test_d_lambda_is_lambda_independent_for_d1():
    base = alpha_family_d_lambda_table(1, 0, 10)
    for lam in (1, Fraction(-1, 2), Fraction(5, 3)):
        assert alpha_family_d_lambda_table(1, lam, 10) == base


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("lam", [0, 1, Fraction(-1, 2)])
def test_d_lambda_family_is_twice_the_coboundary(d, lam):
    cap = 11
    table = LambdaTable.from_phi(phi_d_lambda(d, lam, 2 * cap + 4), cap + 1)
    fam = alpha_family_d_lambda_table(d, lam, cap)
    assert fam.proportionality(coboundary_table(r_from_lambda(table))) == 2


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("lam", [1, Fraction(-1, 2)])
def test_d_lambda_family_is_a_bialgebra(d, lam):
    fam = alpha_family_d_lambda_table(d, lam, 12)
    assert cocycle_failures(fam) == []
    assert cojacobi_residual(fam) == {}


# -- CYBE and co-Jacobi --------------------------------------------------------------------------


def cybe_brute_force(r: RMatrix):
    """Oracle: the three-term sum over all index tuples, no pruning."""
    cap = r.cap
    out = {}
    rng = range(cap + 1)
    for i, j, k, l in itertools.product(rng, repeat=4):
        a = r(i, j) * r(k, l)
        if not a:
            continue
        for coef, key in (
            ((i - k), (i + k, j, l)),
            ((j - k), (i, j + k, l)),
            ((j - l), (i, k, j + l)),
        ):
            if coef and max(key) <= cap:
                out[key] = out.get(key, 0) + coef * a
    return {k: v for k, v in out.items() if v}


def test_cybe_examples():
    assert cybe_residual(e0d(3, 8)) == {}
    assert cybe_residual(RMatrix(6, {})) == {}
    res = cybe_residual(RMatrix(6, wedge(1, 2)))
    assert res and res == cybe_brute_force(RMatrix(6, wedge(1, 2)))


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_cybe_matches_brute_force_and_is_antisymmetric(seed):
    r = bia.random_r(random.Random(seed), 5)
    res = cybe_residual(r)
    assert res == cybe_brute_force(r)
    assert is_totally_antisymmetric(res)


@given(st.integers(1, 3), seeds)
@settings(max_examples=8, deadline=None)
def test_classified_r_matrices_solve_cybe(d, seed):
    lam = lambda_from_mu(random_mu(random.Random(seed), d, 11 + d))
    r = r_from_lambda(lam)
    assert cybe_residual(r) == {}
    assert cojacobi_residual(coboundary_table(r)) == {}


@given(seeds)
@settings(max_examples=8, deadline=None)
def test_cojacobi_is_adjoint_of_cybe_for_coboundaries(seed):
    r = bia.random_r(random.Random(seed), 7)
    alpha = coboundary_table(r)
    lhs = cojacobi_residual(alpha)
    cybe = cybe_residual(r)
    w = min(alpha.weights(), default=0)
    for n in range(8):
        rhs = {k: v for k, v in adjoint_on_tensor3(n, cybe).items() if trusted_triple(k, 7, w)}
        assert bia.proportionality(lhs.get(n, {}), rhs) is not None


def test_zero_cocycle_passes_everything():
    z = AlphaTable(6, {})
    assert cocycle_failures(z) == [] and cojacobi_residual(z) == {}


# -- correspondence with the group side ---------------------------------------------------------


def test_r_from_lambda_examples():
    lam = lambda_from_mu(MuSeq.from_free(2, [1], 10))
    assert r_from_lambda(lam).comps == {(0, 2): 1, (2, 0): -1}
    assert r_from_lambda(LambdaTable(5, {})).comps == {}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_derived_cocycle_scalars(d):
    lam = lambda_from_mu(MuSeq.from_free(d, [1], 11 + d))
    r = r_from_lambda(lam)
    assert derive_cocycle_from_omega(omega_from_lambda(lam, 11)).proportionality(coboundary_table(r)) == 1
    assert derive_cocycle_from_omega(omega_special(d, 11)).proportionality(coboundary_table(r)) == -1


@given(st.integers(1, 3), seeds)
@settings(max_examples=6, deadline=None)
def test_derived_cocycle_is_the_coboundary(d, seed):
    lam = lambda_from_mu(random_mu(random.Random(seed), d, 9 + d))
    derived = derive_cocycle_from_omega(omega_from_lambda(lam, 9))
    assert derived == coboundary_table(r_from_lambda(lam))


def test_derived_cocycle_of_zero_table():
    assert derive_cocycle_from_omega(OmegaTable(5, {})).tables == {}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_pde_system_holds_for_classified_tables(d):
    lam = lambda_from_mu(random_mu(random.Random(d), d, 7 + d))
    omega = omega_from_lambda(lam, 7)
    assert pde_system_failures(omega, derive_cocycle_from_omega(omega)) == []
    special = omega_special(d, 7)
    assert pde_system_failures(special, derive_cocycle_from_omega(special)) == []


def test_pde_system_detects_wrong_cocycle():
    omega = omega_special(1, 5)
    alpha = derive_cocycle_from_omega(omega).scale(2)
    assert pde_system_failures(omega, alpha)
    assert pde_system_failures(OmegaTable(5, {}), AlphaTable(4, {})) == []


def test_homogeneous_kernel_trivial():
    for N in range(2, 8):
        assert set(homogeneous_kernel(N).values()) == {0}


def test_homogeneous_kernel_without_identity_condition_is_not_trivial():
    # dropping omega(e) = 0 lets through solutions that are nonzero at the identity
    assert sum(homogeneous_kernel(4, impose_identity=False).values()) > 0


# -- cocycle -> r -------------------------------------------------------------------------------


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_solver_round_trip(seed):
    r = bia.random_r(random.Random(seed), 10)
    sol = solve_r_from_cocycle(coboundary_table(r))
    assert sol.consistent
    assert sol.r.comps == r.comps
    assert all(rep.kernel_dim == 0 for rep in sol.reports)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_solver_recovers_monomial_family(d):
    sol = solve_r_from_cocycle(alpha_family_monomial_table(d, 12))
    assert sol.r.comps == {(0, d): -2, (d, 0): 2}
    kernels = {rep.weight: rep.kernel_dim for rep in sol.reports}
    assert all(kernels[w] == 0 for w in range(1, 13))


def test_solver_zero():
    sol = solve_r_from_cocycle(AlphaTable(8, {}))
    assert sol.consistent and sol.r.comps == {}


def test_solver_reports_offending_grade():
    fam = alpha_family_monomial_table(2, 8)
    bad = fam.with_component(4, 2, 5, 1).with_component(4, 5, 2, -1)
    sol = solve_r_from_cocycle(bad)
    assert not sol.consistent
    (rep,) = sol.failing()
    assert rep.weight == 3 and rep.offending is not None


def test_g3_cocycle_is_not_a_coboundary():
    alpha = derive_cocycle_from_omega(g3_example())
    sol = solve_r_from_cocycle(alpha)
    assert not sol.consistent
    assert sol.failing()[0].weight == 0


def test_json_round_trips():
    r = bia.random_r(random.Random(1), 6)
    assert RMatrix.from_json(r.to_json()).comps == r.comps
    alpha = alpha_family_d_lambda_table(2, Fraction(1, 3), 7)
    assert AlphaTable.from_json(alpha.to_json()) == alpha
    data = solve_r_from_cocycle(coboundary_table(r)).to_json()
    assert {"weight", "kernel_dim", "solved", "r_components"} <= set(data["weights"][0])
