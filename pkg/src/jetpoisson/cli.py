"""Command-line front end.

    jetpoisson gen      build a structure file (mu, lambda, omega, phi, r, alpha)
    jetpoisson verify   run residual checks on a structure file
    jetpoisson solve-r  recover the r-matrix of a cocycle file
    jetpoisson report   run the acceptance suite

Exit codes: 0 pass, 1 verification failure, 2 solver inconsistency, 3 input error.
Rationals are read and written as "p/q" strings.
"""

from __future__ import annotations

import argparse
import json
import platform
import random
import sys
from typing import Dict, List, Optional, Sequence

from . import __version__
from . import bialgebra as bia
from .acceptance import AcceptanceConfig, quick_config, run_all
from .checks import (
    Check,
    cocycle_checks,
    cojacobi_checks,
    composition_series_checks,
    cybe_checks,
    identity_checks,
    inversion_checks,
    jacobi_checks,
    locality_checks,
    make_check,
    multiplicativity_checks,
    pde_checks,
    pde_system_checks,
)
from .exact import rat, rat_str
from .phi import PhiError, PhiSeries, phi_d_lambda, phi_monomial
from .poisson import (
    LambdaTable,
    MuSeq,
    OmegaTable,
    StructureError,
    g3_example,
    lambda_from_mu,
    omega_from_lambda,
    omega_from_phi,
    omega_special,
    random_mu,
    relation_residual,
)

EXIT_OK, EXIT_FAIL, EXIT_INCONSISTENT, EXIT_INPUT = 0, 1, 2, 3

KINDS = ("mu", "lambda", "omega", "phi", "r", "alpha")
FAMILIES = ("mu", "random-mu", "special", "g3", "phi-monomial", "phi-lambda", "alpha-monomial", "alpha-d-lambda")
CHECKS = (
    "relation", "jacobi", "multiplicativity", "identity", "locality", "route", "pde",
    "composition", "inversion", "pde-system", "cybe", "cocycle", "cojacobi",
)


class InputError(Exception):
    pass


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(payload, path: str | None) -> None:
    text = canonical_json(payload)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_rationals(text: str | None) -> List:
    if not text:
        return []
    try:
        return [rat(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational list {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# structure files
# ---------------------------------------------------------------------------


def load_structure(path: str):
    """(kind, object, raw dict) from a structure file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or data.get("kind") not in KINDS:
        raise InputError(f"{path}: expected a JSON object with kind in {', '.join(KINDS)}")
    kind = data["kind"]
    loaders = {
        "mu": MuSeq.from_json,
        "lambda": LambdaTable.from_json,
        "omega": OmegaTable.from_json,
        "phi": PhiSeries.from_json,
        "r": bia.RMatrix.from_json,
        "alpha": bia.AlphaTable.from_json,
    }
    try:
        return kind, loaders[kind](data), data
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: malformed {kind} file: {exc!r}") from exc


def _structure_json(kind: str, obj, meta: Dict) -> dict:
    data = obj.to_json()
    data["kind"] = kind
    for k, v in meta.items():
        if v is not None:
            data[k] = v
    return data


def _lambda_outputs(kind: str, lam: LambdaTable, N: int):
    if kind == "lambda":
        return lam
    if kind == "omega":
        return omega_from_lambda(lam, N)
    if kind == "phi":
        return lam.to_phi()
    if kind == "r":
        return bia.r_from_lambda(lam)
    if kind == "alpha":
        return bia.coboundary_table(bia.r_from_lambda(lam))
    raise InputError(f"cannot produce kind {kind!r} from a lambda table")


def cmd_gen(args) -> int:
    fam = args.family
    meta = {"family": fam, "d": args.d}
    N = args.N
    if N < 1:
        raise InputError("N must be at least 1")
    if fam in ("mu", "random-mu"):
        if fam == "mu":
            mu = MuSeq.from_free(args.d, _parse_rationals(args.mu), N + args.d, mode=args.mode)
        else:
            mu = random_mu(random.Random(args.seed), args.d, N + args.d)
            meta["seed"] = args.seed
        kind = args.kind or "lambda"
        obj = mu if kind == "mu" else _lambda_outputs(kind, lambda_from_mu(mu, mode=args.mode), N)
    elif fam in ("special", "g3"):
        kind = args.kind or "omega"
        omega = omega_special(args.d, N) if fam == "special" else g3_example()
        if fam == "g3":
            meta.pop("d")
        if kind == "omega":
            obj = omega
        elif kind == "alpha":
            obj = bia.derive_cocycle_from_omega(omega)
        else:
            raise InputError(f"family {fam} produces omega or alpha, not {kind}")
    elif fam in ("phi-monomial", "phi-lambda"):
        kind = args.kind or "phi"
        if fam == "phi-monomial":
            phi = phi_monomial(args.d, 2 * N + 1)
        else:
            lam_def = rat(args.lam if args.lam is not None else 0)
            meta["lambda_def"] = rat_str(lam_def)
            phi = phi_d_lambda(args.d, lam_def, 2 * N + 1)
        obj = phi if kind == "phi" else _lambda_outputs(kind, LambdaTable.from_phi(phi, N), N)
    elif fam in ("alpha-monomial", "alpha-d-lambda"):
        kind = args.kind or "alpha"
        if kind != "alpha":
            raise InputError(f"family {fam} produces alpha tables only")
        if fam == "alpha-monomial":
            obj = bia.alpha_family_monomial_table(args.d, args.cap)
        else:
            lam_def = rat(args.lam if args.lam is not None else 0)
            meta["lambda_def"] = rat_str(lam_def)
            obj = bia.alpha_family_d_lambda_table(args.d, lam_def, args.cap)
    else:
        raise InputError(f"unknown family {fam!r}")
    _emit(_structure_json(kind, obj, meta), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _applicable(kind: str) -> List[str]:
    table = {
        "mu": list(CHECKS),
        "lambda": [c for c in CHECKS if c != "relation"],
        "omega": ["jacobi", "multiplicativity", "identity", "locality", "pde-system", "cocycle"],
        "phi": ["pde", "jacobi", "multiplicativity", "identity", "locality", "composition", "inversion"],
        "r": ["cybe", "cocycle", "cojacobi"],
        "alpha": ["cocycle", "cojacobi"],
    }
    return table[kind]


def run_verify(kind: str, obj, selected: Sequence[str], N: Optional[int], args) -> List[Check]:
    rng_seed = args.seed
    out: List[Check] = []
    mu = lam = omega = phi = r = alpha = None
    if kind == "mu":
        mu = obj
        if "relation" in selected:
            out.append(make_check("relation", (2 * mu.d + 1,), relation_residual(mu) if 2 * mu.d + 1 <= mu.M else 0))
        lam = lambda_from_mu(mu, mode="solve")
    elif kind == "lambda":
        lam = obj
    elif kind == "omega":
        omega = obj
    elif kind == "phi":
        phi = obj
    elif kind == "r":
        r = obj
    else:
        alpha = obj

    def size(natural: int) -> int:
        if N is None:
            return natural
        if N > natural:
            raise InputError(f"requested N={N} exceeds the {natural} the input determines")
        return N

    if lam is not None:
        n = size(lam.N)
        lam = lam.truncate(n)
        omega = omega_from_lambda(lam, n)
        phi = lam.to_phi()
        r = bia.r_from_lambda(lam)
    elif phi is not None:
        n = size(phi.complete_box)
        if any(c in selected for c in ("jacobi", "multiplicativity", "identity", "locality", "composition", "inversion")):
            omega = omega_from_phi(phi, n)
    elif omega is not None:
        omega = omega.truncate(size(omega.N))
    if omega is not None and kind == "omega" and ("pde-system" in selected or "cocycle" in selected):
        alpha = bia.derive_cocycle_from_omega(omega)
    if r is not None and alpha is None:
        alpha = bia.coboundary_table(r)

    if "jacobi" in selected and omega is not None:
        out += jacobi_checks(omega)
    if "multiplicativity" in selected and omega is not None:
        out += multiplicativity_checks(omega, args.symbolic_max, args.samples, random.Random(f"{rng_seed}:mult"))
    if "identity" in selected and omega is not None:
        out += identity_checks(omega)
    if "locality" in selected and omega is not None:
        out += locality_checks(omega)
    if "route" in selected and lam is not None:
        other = omega_from_phi(phi, omega.N)
        keys = sorted(set(omega.entries) | set(other.entries))
        out += [make_check("route", ij, omega(*ij) - other(*ij)) for ij in keys] or [make_check("route", (), 0)]
    if "pde" in selected and phi is not None:
        out += pde_checks(phi)
    if "composition" in selected and phi is not None:
        out += composition_series_checks(phi, omega.N, args.series_samples, random.Random(f"{rng_seed}:composition"))
    if "inversion" in selected and phi is not None:
        out += inversion_checks(phi, omega.N, args.series_samples, random.Random(f"{rng_seed}:inversion"), omega)
    if "pde-system" in selected and omega is not None:
        derived = alpha if kind == "omega" else bia.derive_cocycle_from_omega(omega)
        out += pde_system_checks(omega, derived)
    if "cybe" in selected and r is not None:
        out += cybe_checks(r)
    if "cocycle" in selected and alpha is not None:
        out += cocycle_checks(alpha)
    if "cojacobi" in selected and alpha is not None:
        out += cojacobi_checks(alpha)
    return sorted(out, key=Check.sort_key)


def cmd_verify(args) -> int:
    kind, obj, _ = load_structure(args.input)
    applicable = _applicable(kind)
    selected = args.check or applicable
    unknown = [c for c in selected if c not in CHECKS]
    if unknown:
        raise InputError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    skipped = [c for c in selected if c not in applicable]
    if skipped:
        raise InputError(f"checks {skipped} do not apply to a {kind} file")
    try:
        checks = run_verify(kind, obj, selected, args.N, args)
    except (StructureError, PhiError) as exc:
        raise InputError(str(exc)) from exc
    passed = all(c.passed for c in checks)
    payload = {
        "kind": "report",
        "input_kind": kind,
        "seed": args.seed,
        "checks": [c.to_json() for c in checks],
        "passed": passed,
    }
    if args.out:
        _emit(payload, args.out)
    failing = [c for c in checks if not c.passed]
    print(f"{len(checks)} checks, {len(failing)} failing")
    for c in failing[:20]:
        print(f"FAIL {c.name} {list(c.indices)}: {c.residual}")
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# solve-r
# ---------------------------------------------------------------------------


def cmd_solve_r(args) -> int:
    kind, obj, _ = load_structure(args.input)
    if kind != "alpha":
        raise InputError(f"solve-r needs an alpha file, got {kind}")
    if not obj.is_antisymmetric():
        raise InputError("alpha table is not antisymmetric")
    result = bia.solve_r_from_cocycle(obj)
    payload = result.to_json()
    payload["kind"] = "solve-report"
    if args.out:
        _emit(payload, args.out)
    if not result.consistent:
        for rep in result.failing():
            where = rep.offending
            print(f"inconsistent at weight {rep.weight}" + (f", component n={where[0]} ({where[1]},{where[2]})" if where else ""))
        return EXIT_INCONSISTENT
    kernels = {rep.weight: rep.kernel_dim for rep in result.reports}
    comps = {k: rat_str(v) for k, v in sorted(result.r.comps.items()) if k[0] < k[1]}
    print(f"solved: r = {comps}; max kernel dimension {max(kernels.values(), default=0)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def report_payload(cfg: AcceptanceConfig, skip=()) -> dict:
    results = run_all(cfg, skip=skip)
    return {
        "kind": "acceptance-report",
        "seed": cfg.seed,
        "config": cfg.to_json(),
        "versions": {"jetpoisson": __version__, "python": platform.python_version()},
        "criteria": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
    }


def cmd_report(args) -> int:
    cfg = quick_config(args.seed) if args.quick else AcceptanceConfig(seed=args.seed)
    if not args.quick:
        cfg.N, cfg.cap, cfg.samples, cfg.symbolic_max = args.N, args.cap, args.samples, args.symbolic_max
    payload = report_payload(cfg)
    if args.out:
        _emit(payload, args.out)
    for crit in payload["criteria"]:
        status = "PASS" if crit["passed"] else "FAIL"
        print(f"[{status}] {crit['key']}: {crit['title']}")
    print(f"seed {cfg.seed}: {'all criteria pass' if payload['passed'] else 'FAILURES'}")
    return EXIT_OK if payload["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetpoisson", description="Poisson-Lie structures on jet groups, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a structure file")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--kind", choices=KINDS, help="output kind (defaults to the family's natural kind)")
    gen.add_argument("--d", type=int, default=1)
    gen.add_argument("--mu", help="comma-separated mu_{d+1}, mu_{d+2}, ... as p/q")
    gen.add_argument("--lambda", dest="lam", help="deformation parameter as p/q")
    gen.add_argument("--N", type=int, default=8)
    gen.add_argument("--cap", type=int, default=12, help="grade cap for algebra-side tables")
    gen.add_argument("--mode", choices=("strict", "solve"), default="strict")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output path (default stdout)")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="verify a structure file")
    ver.add_argument("input")
    ver.add_argument("--check", action="append", choices=CHECKS, help="repeatable; default: all applicable")
    ver.add_argument("--N", type=int, help="truncate to G_N before checking")
    ver.add_argument("--symbolic-max", type=int, default=6)
    ver.add_argument("--samples", type=int, default=50)
    ver.add_argument("--series-samples", type=int, default=5)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", help="report JSON path")
    ver.set_defaults(func=cmd_verify)

    sol = sub.add_parser("solve-r", help="recover r from a cocycle")
    sol.add_argument("input")
    sol.add_argument("--out", help="solver report JSON path")
    sol.set_defaults(func=cmd_solve_r)

    rep = sub.add_parser("report", help="run the acceptance suite")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--N", type=int, default=8)
    rep.add_argument("--cap", type=int, default=12)
    rep.add_argument("--samples", type=int, default=50)
    rep.add_argument("--symbolic-max", type=int, default=6)
    rep.add_argument("--quick", action="store_true", help="small sizes, for smoke runs")
    rep.add_argument("--out", help="report JSON path")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (StructureError, PhiError, ValueError, ZeroDivisionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
