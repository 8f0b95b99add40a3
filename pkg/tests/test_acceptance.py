"""Acceptance suite: one test per criterion at the default sizes.

Each test records a single PASS/FAIL line, printed in an "acceptance criteria" section
at the end of the pytest run. ``python -m jetpoisson report`` gives the same summary plus
a JSON payload.
"""
import pytest

from conftest import ACCEPTANCE_LINES
from jetpoisson.acceptance import AcceptanceConfig, quick_config, run_all, run_criterion

CFG = AcceptanceConfig(seed=0)


def check(key):
    result = run_criterion(key, CFG)
    print(result.line())
    ACCEPTANCE_LINES.append(result.line())
    for c in result.checks:
        if not c.passed:
            print(f"    FAIL {c.name} {list(c.indices)}: {c.residual}")
    assert result.passed, result.line()
    return result


def test_jet_group_is_associative_with_inverses():
    check("group-axioms")


def test_classified_tables_are_poisson_lie():
    check("classification-pipeline")


def test_two_routes_to_bracket_table_agree():
    check("route-equality")


def test_mu_recursion_forced_values():
    check("recursion-facts")


def test_phi_families_solve_functional_pde():
    result = check("functional-pde")
    assert result.notes["min_trusted_degree"] >= 12


def test_inversion_is_anti_poisson():
    check("inversion")


def test_three_dimensional_example():
    check("g3-example")


def test_bialgebra_conditions_for_families():
    result = check("bialgebra")
    scalars = result.notes["proportionality_to_coboundary"]
    assert scalars["monomial d=1"] == "-2/1"


def test_bracket_tables_differentiate_to_coboundaries():
    result = check("correspondence")
    assert set(result.notes["homogeneous_kernel_dim"].values()) == {0}


def test_cocycles_have_unique_r_matrix():
    result = check("cocycle-solver")
    assert set(result.notes["recovered_r0d"].values()) == {"-2/1"}


def test_report_is_deterministic():
    check("determinism")


@pytest.mark.parametrize("seed", [1, 2])
def test_other_seeds_quick(seed):
    results = run_all(quick_config(seed), skip=("determinism",))
    for r in results:
        print(f"seed {seed} {r.line()}")
        ACCEPTANCE_LINES.append(f"(quick, seed {seed}) {r.line()}")
    assert all(r.passed for r in results)
