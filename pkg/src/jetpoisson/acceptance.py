"""The acceptance suite: one function per criterion, shared by the CLI report and the tests.

Every criterion returns a :class:`CriterionResult` holding its checks and any
recorded scalars (sign and normalization constants are reported, never
assumed).  Randomness is drawn from ``random.Random`` streams seeded by the
configured seed and the criterion key, so results are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from . import bialgebra as bia
from .checks import (
    FAIL,
    PASS,
    Check,
    cocycle_checks,
    cojacobi_checks,
    cybe_checks,
    identity_checks,
    jacobi_checks,
    locality_checks,
    make_check,
    multiplicativity_checks,
    pde_checks,
    pde_system_checks,
    summarize,
)
from .exact import CoordPoly, rat_str
from .jets import JetElement, TruncSeries, composition_coordinates, jet_compose, jet_invert, random_jet
from .phi import PhiSeries, phi_d_lambda, phi_from_pair, phi_monomial
from .poisson import (
    LambdaTable,
    MuSeq,
    g3_example,
    inversion_residual,
    lambda_from_mu,
    omega_from_lambda,
    omega_from_phi,
    omega_special,
    random_mu,
    relation_residual,
    required_mu_2d1,
)


@dataclass
class AcceptanceConfig:
    seed: int = 0
    N: int = 8
    cap: int = 12
    symbolic_max: int = 6
    samples: int = 50
    group_random_N: int = 10
    group_pairs: int = 100
    inversion_samples: int = 20
    kernel_max: int = 10
    correspondence_max: int = 10
    solver_weight: int = 12
    roundtrips: int = 10

    def rng(self, key: str) -> random.Random:
        return random.Random(f"{self.seed}:{key}")

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CriterionResult:
    key: str
    title: str
    checks: List[Check] = field(default_factory=list)
    notes: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def line(self) -> str:
        bad = sum(not c.passed for c in self.checks)
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({bad}/{len(self.checks)} checks failing)" if bad else f" ({len(self.checks)} checks)"
        return f"[{status}] {self.key}: {self.title}{extra}"

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "notes": self.notes,
            "checks": [c.to_json() for c in sorted(self.checks, key=Check.sort_key)],
        }


def _bool_check(name: str, indices, ok: bool, detail: str | None = None, trusted: int | None = None) -> Check:
    return Check(name, tuple(indices), PASS if ok else FAIL, None if ok else (detail or "false"), trusted)


def _retag(checks: List[Check], indices) -> List[Check]:
    for c in checks:
        c.indices = tuple(indices)
    return checks


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def group_axioms(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("group-axioms", "jet group associativity and inverses")
    # symbolic associativity on G_6: coordinates of (xy)w and x(yw) as polynomials
    N = 6
    z = composition_coordinates(N)
    V = [CoordPoly.var(k, 3 * N, laurent={0, N, 2 * N}) for k in range(3 * N)]
    X, Y, W = V[:N], V[N:2 * N], V[2 * N:]
    xy = [p.substitute(X + Y) for p in z]
    yw = [p.substitute(Y + W) for p in z]
    for k in range(N):
        lhs = z[k].substitute(xy + W)
        rhs = z[k].substitute(X + yw)
        res.checks.append(make_check("associativity-symbolic", (k + 1,), lhs - rhs))
    rng = cfg.rng("group")
    M = cfg.group_random_N
    e = JetElement.identity(M)
    bad_assoc, bad_inv = [], []
    for s in range(cfg.group_pairs):
        x, y, w = random_jet(rng, M), random_jet(rng, M), random_jet(rng, M)
        if jet_compose(jet_compose(x, y), w) != jet_compose(x, jet_compose(y, w)):
            bad_assoc.append(s)
        xi = jet_invert(x)
        if jet_compose(x, xi) != e or jet_compose(xi, x) != e or jet_compose(x, e) != x:
            bad_inv.append(s)
    res.checks.append(_bool_check("associativity-random", (M, cfg.group_pairs), not bad_assoc, f"samples {bad_assoc}"))
    res.checks.append(_bool_check("inverse-random", (M, cfg.group_pairs), not bad_inv, f"samples {bad_inv}"))
    return res


def _pipeline_structures(cfg: AcceptanceConfig) -> List[Tuple[int, int, MuSeq, LambdaTable]]:
    rng = cfg.rng("pipeline")
    out = []
    for d in (1, 2, 3):
        for k in range(3):
            mu = random_mu(rng, d, cfg.N + d)
            out.append((d, k, mu, lambda_from_mu(mu, mode="strict")))
    return out


def classification_pipeline(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("classification-pipeline", "mu -> lambda -> omega tables are Poisson-Lie")
    for d, k, mu, lam in _pipeline_structures(cfg):
        omega = omega_from_lambda(lam, cfg.N)
        tag = (d, k)
        res.checks.append(make_check("relation", tag, relation_residual(mu)))
        res.checks.append(summarize("jacobi", tag, jacobi_checks(omega)))
        small = omega.truncate(min(cfg.symbolic_max, cfg.N))
        res.checks.append(summarize("multiplicativity-symbolic", tag + (small.N,), multiplicativity_checks(small, cfg.symbolic_max)))
        rng = cfg.rng(f"mult:{d}:{k}")
        res.checks.append(summarize("multiplicativity-random", tag + (cfg.N, cfg.samples),
                                    multiplicativity_checks(omega, symbolic_max=0, samples=cfg.samples, rng=rng)))
        res.checks.append(summarize("identity-value", tag, identity_checks(omega)))
        res.checks.append(summarize("locality", tag, locality_checks(omega)))
    res.notes["mu"] = {f"d={d},k={k}": [rat_str(v) for v in mu.values] for d, k, mu, _ in _pipeline_structures(cfg)}
    return res


def route_equality(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("route-equality", "double-sum and generating-series tables agree")
    for d, k, mu, lam in _pipeline_structures(cfg):
        a = omega_from_lambda(lam, cfg.N)
        b = omega_from_phi(lam.to_phi(), cfg.N)
        diff = [(ij, str(a(*ij) - b(*ij))) for ij in sorted(set(a.entries) | set(b.entries)) if a(*ij) != b(*ij)]
        res.checks.append(_bool_check("route-equality", (d, k), not diff, str(diff[:2])))
    return res


def recursion_facts(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("recursion-facts", "lambda_1n = mu_n and the forced values of mu_{2d+1}")
    for d, k, mu, lam in _pipeline_structures(cfg):
        bad = [n for n in range(1, lam.N + 1) if lam(1, n) != mu.mu(n)]
        res.checks.append(_bool_check("first-row", (d, k), not bad, f"n = {bad}"))
        res.checks.append(_bool_check("vanishing-block", (d, k),
                                      all(lam(m, n) == 0 for m in range(1, d + 1) for n in range(1, d + 1))))
    rng = cfg.rng("recursion")
    for s in range(5):
        m2 = Fraction(rng.randint(1, 9), rng.randint(1, 5)) * rng.choice((1, -1))
        one = MuSeq(1, (0, m2, 0))
        res.checks.append(make_check("forced-mu3", (1, s), required_mu_2d1(one)))
        m3 = Fraction(rng.randint(1, 9), rng.randint(1, 5)) * rng.choice((1, -1))
        m4 = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        two = MuSeq(2, (0, 0, m3, m4, 0))
        res.checks.append(make_check("forced-mu5", (2, s), required_mu_2d1(two) - m4 * m4 / m3))
    return res


def functional_pde(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("functional-pde", "the antisymmetric series solve the functional PDE")
    order = cfg.cap + 2
    cases: List[Tuple[str, tuple, PhiSeries]] = []
    for d in (1, 2, 3, 4):
        cases.append(("monomial", (d,), phi_monomial(d, order)))
    for d in (1, 2, 3):
        for lam in (Fraction(1), Fraction(-1, 2)):
            cases.append(("d-lambda", (d, rat_str(lam)), phi_d_lambda(d, lam, order)))
    for d in (1, 2, 3):
        f = TruncSeries.univariate([0] * (d + 1) + [1], order)
        g = TruncSeries.univariate([0, -1], order)
        cases.append(("pair", (d,), phi_from_pair(f, g, d, 1, order)))
    trusted = []
    for name, idx, phi in cases:
        (chk,) = pde_checks(phi)
        chk.name = f"pde-{name}"
        chk.indices = idx
        if chk.trusted_degree is None or chk.trusted_degree < cfg.cap:
            chk.status = FAIL
            chk.residual = f"trusted degree {chk.trusted_degree} below {cfg.cap}"
        trusted.append(chk.trusted_degree)
        res.checks.append(chk)
    # a series that is not a solution must be caught
    bad = PhiSeries.from_lambda({(2, 3): 1, (3, 2): -1, (1, 4): 1, (4, 1): -1}, order)
    (chk,) = pde_checks(bad)
    res.checks.append(_bool_check("pde-non-solution-detected", (), not chk.passed, "residual vanished"))
    res.notes["min_trusted_degree"] = min(trusted)
    return res


def inversion(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("inversion", "inversion is anti-Poisson at random points")
    N = cfg.N
    for d in (1, 2):
        phi = phi_monomial(d, 2 * N + 1)
        omega = omega_from_phi(phi, N)
        rng = cfg.rng(f"inversion:{d}")
        checks = [make_check("inversion", (d, s), inversion_residual(phi, random_jet(rng, N), omega), N)
                  for s in range(cfg.inversion_samples)]
        res.checks.append(summarize("inversion", (d, N, cfg.inversion_samples), checks, N))
    return res


def g3(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("g3-example", "the three-dimensional example and its non-extendability evidence")
    omega = g3_example()
    res.checks.extend(jacobi_checks(omega))
    res.checks.extend(multiplicativity_checks(omega, symbolic_max=3))
    res.checks.extend(identity_checks(omega))
    res.checks.append(_bool_check("not-polynomial", (), not omega.is_polynomial(), "table is polynomial"))
    # tables from the generating series are always polynomial
    rng = cfg.rng("g3")
    polys = []
    for d in (1, 2):
        polys.append(omega_from_phi(phi_monomial(d, 7), 3).is_polynomial())
        lam = lambda_from_mu(random_mu(rng, d, 3 + d), mode="strict")
        polys.append(omega_from_phi(lam.to_phi(), 3).is_polynomial())
    res.checks.append(_bool_check("generating-series-polynomial", (), all(polys)))
    return res


def bialgebra(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("bialgebra", "coboundaries, cocycles, co-Jacobi and CYBE")
    cap = cfg.cap
    rng = cfg.rng("bialgebra")
    for s in range(10):
        r = bia.random_r(rng, cap)
        diff = [n for n in range(cap + 1) if bia.coboundary(r, n) != bia.coboundary_formula(r, n)]
        res.checks.append(_bool_check("coboundary-formula", (s,), not diff, f"n = {diff}"))
    # r-matrices of classified lambda tables (size cap + 1 gives r up to the cap)
    for d in (1, 2, 3):
        lam = lambda_from_mu(random_mu(rng, d, cap + 1 + d))
        res.checks.extend(_retag(cybe_checks(bia.r_from_lambda(lam)), ("mu", d)))
        res.checks.append(summarize("cojacobi", ("mu", d), cojacobi_checks(bia.coboundary_table(bia.r_from_lambda(lam)))))
    for d in (1, 2, 3):
        r = bia.RMatrix(cap, bia.wedge(0, d))
        res.checks.extend(_retag(cybe_checks(r), ("monomial", d)))
    scalars = {}
    for d in (1, 2, 3):
        alpha = bia.alpha_family_monomial_table(d, cap)
        res.checks.append(summarize("cocycle", ("monomial", d), cocycle_checks(alpha, min(10, cap))))
        res.checks.append(summarize("cojacobi", ("monomial", d), cojacobi_checks(alpha)))
        c = alpha.proportionality(bia.coboundary_table(bia.RMatrix(cap, bia.wedge(0, d))))
        scalars[f"monomial d={d}"] = None if c is None else rat_str(c)
        res.checks.append(_bool_check("monomial-proportional", (d,), c is not None))
    for d in (2, 3):
        for lam in (Fraction(1), Fraction(-1, 2)):
            alpha = bia.alpha_family_d_lambda_table(d, lam, cap)
            tag = ("d-lambda", d, rat_str(lam))
            res.checks.append(summarize("cocycle", tag, cocycle_checks(alpha)))
            res.checks.append(summarize("cojacobi", tag, cojacobi_checks(alpha)))
            lam_table = LambdaTable.from_phi(phi_d_lambda(d, lam, 2 * cap + 4), cap + 1)
            r = bia.r_from_lambda(lam_table)
            res.checks.extend(_retag(cybe_checks(r), tag))
            c = alpha.proportionality(bia.coboundary_table(r))
            scalars[f"d-lambda d={d} lambda={rat_str(lam)}"] = None if c is None else rat_str(c)
            res.checks.append(_bool_check("d-lambda-proportional", tag[1:], c is not None))
    for d in (2, 3):
        zero = bia.alpha_family_d_lambda_table(d, 0, cap)
        c = zero.proportionality(bia.alpha_family_monomial_table(d, cap))
        scalars[f"d-lambda at 0 vs monomial d={d}"] = None if c is None else rat_str(c)
        res.checks.append(_bool_check("d-lambda-specializes", (d,), c is not None))
    res.notes["proportionality_to_coboundary"] = scalars
    return res


def correspondence(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("correspondence", "bracket tables differentiate to coboundary cocycles")
    size = cfg.correspondence_max + 1
    rng = cfg.rng("correspondence")
    scalars = {}
    for d in (1, 2, 3):
        structures = [("special", omega_special(d, size), bia.RMatrix(size - 1, bia.wedge(0, d)))]
        mu = MuSeq.from_free(d, [1], size + d)
        lam = lambda_from_mu(mu)
        structures.append(("unit-mu", omega_from_lambda(lam, size), bia.r_from_lambda(lam)))
        lam = lambda_from_mu(random_mu(rng, d, size + d))
        structures.append(("random-mu", omega_from_lambda(lam, size), bia.r_from_lambda(lam)))
        for name, omega, r in structures:
            derived = bia.derive_cocycle_from_omega(omega)
            c = derived.proportionality(bia.coboundary_table(r))
            scalars[f"{name} d={d}"] = None if c is None else rat_str(c)
            res.checks.append(_bool_check("derived-cocycle-proportional", (name, d), c is not None and c != 0))
            small = omega.truncate(cfg.N)
            res.checks.append(summarize("pde-system", (name, d, cfg.N),
                                        pde_system_checks(small, bia.derive_cocycle_from_omega(small))))
    kernels = {}
    for N in range(2, cfg.kernel_max + 1):
        blocks = bia.homogeneous_kernel(N)
        kernels[N] = sum(blocks.values())
        nonzero = {deg: k for deg, k in blocks.items() if k}
        res.checks.append(_bool_check("homogeneous-kernel", (N,), not nonzero, f"kernel by degree {nonzero}"))
    res.notes["derived_cocycle_scalar"] = scalars
    res.notes["homogeneous_kernel_dim"] = {str(k): v for k, v in kernels.items()}
    return res


def cocycle_solver(cfg: AcceptanceConfig) -> CriterionResult:
    res = CriterionResult("cocycle-solver", "cocycles are coboundaries with unique r")
    cap = cfg.cap
    rng = cfg.rng("solver")
    for s in range(cfg.roundtrips):
        r = bia.random_r(rng, cap)
        sol = bia.solve_r_from_cocycle(bia.coboundary_table(r))
        ok = sol.consistent and sol.r is not None and sol.r.comps == r.comps
        kernels = [rep.kernel_dim for rep in sol.reports if rep.weight <= cfg.solver_weight]
        res.checks.append(_bool_check("round-trip", (s,), ok and not any(kernels), f"kernels {kernels}"))
    recovered = {}
    for d in (1, 2, 3):
        sol = bia.solve_r_from_cocycle(bia.alpha_family_monomial_table(d, cap))
        kern = {rep.weight: rep.kernel_dim for rep in sol.reports if rep.weight <= cfg.solver_weight}
        ok = sol.consistent and sol.r is not None and set(sol.r.comps) == {(0, d), (d, 0)}
        res.checks.append(_bool_check("monomial-recovered", (d,), ok, f"r = {sol.r.comps if sol.r else None}"))
        res.checks.append(_bool_check("kernel-trivial", (d,), not any(kern.values()) and len(kern) >= cfg.solver_weight,
                                      f"kernels {kern}"))
        if sol.r is not None:
            recovered[f"d={d}"] = rat_str(sol.r(0, d))
    res.notes["recovered_r0d"] = recovered
    return res


def determinism(cfg: AcceptanceConfig) -> CriterionResult:
    """Two report runs on a reduced configuration must serialize identically."""
    from .cli import report_payload, canonical_json

    res = CriterionResult("determinism", "identical seeds give identical report payloads")
    small = quick_config(cfg.seed)
    a = canonical_json(report_payload(small, skip=("determinism",)))
    b = canonical_json(report_payload(small, skip=("determinism",)))
    res.checks.append(_bool_check("report-identical", (cfg.seed,), a == b, "payloads differ"))
    res.notes["payload_bytes"] = len(a)
    return res


def quick_config(seed: int = 0) -> AcceptanceConfig:
    return AcceptanceConfig(seed=seed, N=5, cap=8, symbolic_max=4, samples=3, group_random_N=6, group_pairs=5,
                            inversion_samples=2, kernel_max=5, correspondence_max=6, solver_weight=8, roundtrips=2)


CRITERIA: List[Tuple[str, Callable[[AcceptanceConfig], CriterionResult]]] = [
    ("group-axioms", group_axioms),
    ("classification-pipeline", classification_pipeline),
    ("route-equality", route_equality),
    ("recursion-facts", recursion_facts),
    ("functional-pde", functional_pde),
    ("inversion", inversion),
    ("g3-example", g3),
    ("bialgebra", bialgebra),
    ("correspondence", correspondence),
    ("cocycle-solver", cocycle_solver),
    ("determinism", determinism),
]


def run_criterion(key: str, cfg: AcceptanceConfig) -> CriterionResult:
    for k, fn in CRITERIA:
        if k == key:
            return fn(cfg)
    raise KeyError(key)


def run_all(cfg: AcceptanceConfig, skip=()) -> List[CriterionResult]:
    return [fn(cfg) for key, fn in CRITERIA if key not in skip]
