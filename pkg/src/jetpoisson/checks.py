"""Named verification checks with a uniform, JSON-friendly result record.

Each suite turns exact residuals into :class:`Check` records.  A check passes
only when its residual is exactly zero on the trusted range.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .bialgebra import (
    AlphaTable,
    RMatrix,
    cocycle_residual,
    cojacobi_residual,
    cybe_residual,
    pde_system_residual,
)
from .exact import rat_str
from .jets import random_jet
from .phi import PhiSeries, functional_pde_check
from .poisson import (
    OmegaTable,
    composition_series_residual,
    inversion_residual,
    jacobi_residual,
    multiplicativity_residuals_at,
    multiplicativity_residual_symbolic,
)

PASS, FAIL = "pass", "fail"


@dataclass
class Check:
    name: str
    indices: tuple
    status: str
    residual: Optional[str] = None
    trusted_degree: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def sort_key(self):
        return (self.name, tuple(str(i) for i in self.indices))

    def to_json(self) -> dict:
        data = {"name": self.name, "indices": list(self.indices), "status": self.status}
        if self.residual is not None:
            data["residual"] = self.residual
        # null means the identity was checked exactly on all of G_N
        data["trusted_degree"] = self.trusted_degree
        return data


def _fmt_table(t: dict, limit: int = 6) -> str:
    items = sorted(t.items())
    parts = [f"{k}: {rat_str(v)}" for k, v in items[:limit]]
    if len(items) > limit:
        parts.append(f"... ({len(items)} nonzero components)")
    return "{" + ", ".join(parts) + "}"


def make_check(name: str, indices: Sequence, residual, trusted_degree: int | None = None) -> Check:
    """Residual may be a polynomial, series, rational or dict; falsy means zero."""
    if not residual:
        return Check(name, tuple(indices), PASS, None, trusted_degree)
    if isinstance(residual, dict):
        text = _fmt_table(residual)
    elif isinstance(residual, (int, Fraction)):
        text = rat_str(residual)
    else:
        text = str(residual)
        if len(text) > 300:
            text = text[:300] + " ..."
    return Check(name, tuple(indices), FAIL, text, trusted_degree)


def summarize(name: str, indices: Sequence, checks: List[Check], trusted_degree: int | None = None) -> Check:
    """Collapse many checks into one, reporting the first failure."""
    bad = [c for c in checks if not c.passed]
    if not bad:
        return Check(name, tuple(indices), PASS, None, trusted_degree)
    first = bad[0]
    msg = f"{len(bad)}/{len(checks)} failing; first {first.name}{list(first.indices)}: {first.residual}"
    return Check(name, tuple(indices), FAIL, msg, trusted_degree)


# ---------------------------------------------------------------------------
# group side
# ---------------------------------------------------------------------------


def jacobi_checks(omega: OmegaTable) -> List[Check]:
    N = omega.N
    return [
        make_check("jacobi", (j, k, l), jacobi_residual(omega, j, k, l))
        for j in range(1, N + 1)
        for k in range(j + 1, N + 1)
        for l in range(k + 1, N + 1)
    ]


def multiplicativity_checks(omega: OmegaTable, symbolic_max: int = 6, samples: int = 50, rng: random.Random | None = None) -> List[Check]:
    """Symbolic on G_N when N <= symbolic_max, otherwise ``samples`` seeded random pairs."""
    N = omega.N
    pairs = [(i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
    if N <= symbolic_max:
        return [make_check("multiplicativity-symbolic", p, multiplicativity_residual_symbolic(omega, *p)) for p in pairs]
    rng = rng or random.Random(0)
    failures = {}
    for _ in range(samples):
        x, y = random_jet(rng, N), random_jet(rng, N)
        todo = [p for p in pairs if p not in failures]
        for p, r in multiplicativity_residuals_at(omega, x, y, todo).items():
            if r:
                failures[p] = f"{rat_str(r)} at x={[rat_str(c) for c in x.x]}, y={[rat_str(c) for c in y.x]}"
    out = []
    for p in pairs:
        if p in failures:
            out.append(Check("multiplicativity-random", p, FAIL, failures[p]))
        else:
            out.append(Check("multiplicativity-random", p, PASS))
    return out


def identity_checks(omega: OmegaTable) -> List[Check]:
    vals = omega.identity_values()
    return [make_check("identity-value", (i, j), vals.get((i, j), 0)) for (i, j) in sorted(omega.entries)]


def locality_checks(omega: OmegaTable) -> List[Check]:
    bad = set(omega.locality_violations())
    return [
        Check("locality", (i, j), FAIL if (i, j) in bad else PASS,
              f"uses x_{omega(i, j).max_variable()}" if (i, j) in bad else None)
        for (i, j) in sorted(omega.entries)
    ]


def pde_checks(phi: PhiSeries) -> List[Check]:
    ok, trusted, residual = functional_pde_check(phi)
    return [make_check("functional-pde", (), residual, trusted)]


def composition_series_checks(phi: PhiSeries, N: int, samples: int, rng: random.Random) -> List[Check]:
    out = []
    for s in range(samples):
        x, y = random_jet(rng, N), random_jet(rng, N)
        out.append(make_check("composition-series", (s,), composition_series_residual(phi, x, y), N))
    return out


def inversion_checks(phi: PhiSeries, N: int, samples: int, rng: random.Random, omega: OmegaTable | None = None) -> List[Check]:
    out = []
    for s in range(samples):
        x = random_jet(rng, N)
        out.append(make_check("inversion", (s,), inversion_residual(phi, x, omega), N))
    return out


# ---------------------------------------------------------------------------
# algebra side
# ---------------------------------------------------------------------------


def cocycle_checks(alpha: AlphaTable, upto: int | None = None) -> List[Check]:
    upto = alpha.cap if upto is None else upto
    return [
        make_check("cocycle", (n, m), cocycle_residual(alpha, n, m), alpha.cap)
        for n in range(upto + 1)
        for m in range(upto + 1 - n)
    ]


def cojacobi_checks(alpha: AlphaTable) -> List[Check]:
    res = cojacobi_residual(alpha)
    return [make_check("cojacobi", (n,), res.get(n, {}), alpha.cap) for n in range(alpha.cap + 1)]


def cybe_checks(r: RMatrix) -> List[Check]:
    return [make_check("cybe", (), cybe_residual(r), r.cap)]


def pde_system_checks(omega: OmegaTable, alpha: AlphaTable) -> List[Check]:
    N = omega.N
    return [
        make_check("pde-system", (j, m, n), pde_system_residual(omega, alpha, j, m, n))
        for m in range(1, N + 1)
        for n in range(1, N + 1)
        if m != n
        for j in range(1, max(m, n) + 1)
    ]
