"""Antisymmetric generating series phi(u, v) and the functional PDE it solves.

phi(u, v) = sum lambda_ij u^i v^j parameterizes every Poisson-Lie bracket on
the jet group through Omega(u,v;x) = phi(u,v) x'(u) x'(v) - phi(x(u), x(v)).
Admissible phi are divisible by u and v, antisymmetric, and solve

    sum over cyclic (u,v,w) of  phi(u,v) [d2phi(w,u) + d2phi(w,v)] = 0,

where d2phi is the derivative of phi in its second slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .exact import Rational, rat, rat_str
from .jets import TruncSeries

CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class PhiError(ValueError):
    pass


@dataclass(frozen=True)
class PhiSeries:
    """phi as a bivariate series.

    Without ``box`` every coefficient of total degree <= ``series.order`` is
    known.  With ``box`` set (tables of size N) the known coefficients are the
    lambda_ij with i, j <= box instead, so total-degree completeness is box + 1.
    """

    series: TruncSeries
    box: Optional[int] = None

    def __post_init__(self):
        if self.series.nvars != 2:
            raise PhiError("phi is a series in two variables")
        if self.box is not None and self.series.order < 2 * self.box:
            raise PhiError("a box-complete phi needs series order >= 2 * box")

    @property
    def order(self) -> int:
        """Total degree up to which every coefficient is known."""
        if self.box is None:
            return self.series.order
        return min(self.series.order, self.box + 1)

    @property
    def complete_box(self) -> int:
        """Largest B such that every lambda_ij with i, j <= B is known."""
        return self.box if self.box is not None else self.series.order // 2

    def lam(self, i: int, j: int) -> Rational:
        return self.series.coefficient(i, j)

    @classmethod
    def from_lambda(cls, entries: Mapping[Tuple[int, int], Rational], order: int, box: int | None = None) -> "PhiSeries":
        return cls(TruncSeries(2, order, {k: rat(v) for k, v in entries.items()}), box)

    def lambda_entries(self) -> Dict[Tuple[int, int], Rational]:
        return dict(self.series.coeffs)

    def is_divisible(self) -> bool:
        return all(i >= 1 and j >= 1 for i, j in self.series.coeffs)

    def is_antisymmetric(self) -> bool:
        c = self.series.coeffs
        return all(c.get((j, i), 0) == -v for (i, j), v in c.items())

    def check(self) -> "PhiSeries":
        if not self.is_divisible():
            raise PhiError("phi must be divisible by u and by v")
        if not self.is_antisymmetric():
            raise PhiError("phi must satisfy phi(u,v) = -phi(v,u)")
        return self

    def __neg__(self) -> "PhiSeries":
        return PhiSeries(-self.series, self.box)

    def scale(self, c) -> "PhiSeries":
        return PhiSeries(self.series.scale(rat(c)), self.box)

    def __str__(self) -> str:
        return str(self.series)

    def to_json(self) -> dict:
        lam = [
            {"i": i, "j": j, "value": rat_str(v)}
            for (i, j), v in sorted(self.series.coeffs.items())
            if i < j
        ]
        data = {"Ord": self.series.order, "lambda": lam}
        if self.box is not None:
            data["box"] = self.box
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "PhiSeries":
        entries = {}
        for e in data["lambda"]:
            i, j, v = int(e["i"]), int(e["j"]), rat(e["value"])
            if i >= j:
                raise PhiError("stored lambda entries must have i < j")
            entries[(i, j)] = v
            entries[(j, i)] = -v
        box = data.get("box")
        return cls.from_lambda(entries, int(data["Ord"]), None if box is None else int(box)).check()


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def phi_monomial(d: int, order: int) -> PhiSeries:
    """uv(u^d - v^d): lambda_{d+1,1} = 1, lambda_{1,d+1} = -1."""
    if d < 1:
        raise PhiError("d must be a positive integer")
    return PhiSeries.from_lambda({(d + 1, 1): 1, (1, d + 1): -1}, order)


def _geometric(ratio: Rational, var: int, order: int) -> TruncSeries:
    deg = [0, 0]
    coeffs = {}
    for k in range(order + 1):
        deg[var] = k
        coeffs[tuple(deg)] = ratio ** k if k else 1
    return TruncSeries(2, order, coeffs)


def phi_d_lambda(d: int, lam, order: int) -> PhiSeries:
    """Expansion of [uv(v^d-u^d) + lam d u^2v^2(u^{d-1}-v^{d-1})] / ([1-(d-1)lam u][1-(d-1)lam v])."""
    if d < 1:
        raise PhiError("d must be a positive integer")
    lam = rat(lam)
    num = {(1, d + 1): 1, (d + 1, 1): -1}
    if d > 1 and lam:
        for key, c in (((d + 1, 2), lam * d), ((2, d + 1), -lam * d)):
            num[key] = num.get(key, 0) + c
    numerator = TruncSeries(2, order, num)
    ratio = (d - 1) * lam
    series = numerator * _geometric(ratio, 0, order) * _geometric(ratio, 1, order)
    return PhiSeries(series).check()


def pair_condition_check(f: TruncSeries, g: TruncSeries, d: int, mu) -> Tuple[bool, TruncSeries]:
    """Residual f'g - fg' + d*mu*f; the pair is admissible iff it vanishes."""
    mu = rat(mu)
    residual = f.partial(0) * g - f * g.partial(0) + f.scale(d * mu)
    return residual.is_zero(), residual


def phi_from_pair(f: TruncSeries, g: TruncSeries, d: int, mu, order: int | None = None) -> PhiSeries:
    """(1/mu)[f(u)g(v) - f(v)g(u)] for an admissible pair (f, g)."""
    mu = rat(mu)
    if d < 1:
        raise PhiError("d must be a positive integer")
    if not mu:
        raise PhiError("mu_{d+1} must be nonzero")
    if f.nvars != 1 or g.nvars != 1:
        raise PhiError("f and g are univariate series")
    if f.valuation() != d + 1:
        raise PhiError(f"f must have a zero of order exactly {d + 1} at u=0, found {f.valuation()}")
    ok, residual = pair_condition_check(f, g, d, mu)
    if not ok:
        raise PhiError(f"pair condition f'g - fg' = -d mu f fails; residual {residual}")
    fu, fv = f.relabel([0], 2), f.relabel([1], 2)
    gu, gv = g.relabel([0], 2), g.relabel([1], 2)
    series = (fu * gv - fv * gu).scale(Fraction(1) / mu)
    if order is not None:
        series = series.truncate(order)
    return PhiSeries(series).check()


# ---------------------------------------------------------------------------
# functional PDE
# ---------------------------------------------------------------------------


def functional_pde_residual(phi: PhiSeries, order: int | None = None) -> TruncSeries:
    """Trivariate residual of the functional PDE; its ``order`` is the trusted degree."""
    phi.check()
    base = phi.series.truncate(phi.order if order is None else min(order, phi.order))
    d2 = base.partial(1)
    total = None
    for a, b, c in CYCLIC:
        outer = base.relabel((a, b), 3)
        inner = d2.relabel((c, a), 3) + d2.relabel((c, b), 3)
        term = outer * inner
        total = term if total is None else total + term
    return total


def functional_pde_check(phi: PhiSeries, order: int | None = None) -> Tuple[bool, int, TruncSeries]:
    """(passed, trusted_degree, residual)."""
    residual = functional_pde_residual(phi, order)
    return residual.is_zero(), residual.order, residual
