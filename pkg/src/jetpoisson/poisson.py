"""Poisson-Lie brackets on the jet group G_N.

Three constructions of the bracket table omega_ij = {x_i, x_j} are provided
and cross-checked against one another:

* ``omega_from_lambda`` -- the explicit double-sum formula in the lambda_mn;
* ``omega_special`` -- the closed form of the one-monomial family;
* ``omega_from_phi`` -- coefficient extraction from the generating series
  Omega(u,v;x) = phi(u,v) x'(u) x'(v) - phi(x(u), x(v)).

The verifiers return exact residuals (polynomials, rationals or series); a
zero residual certifies the identity at the stated truncation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exact import CoordPoly, Rational, _norm, rat, rat_str
from .jets import (
    JetElement,
    TruncSeries,
    composition_coordinates,
    invert_coefficients,
    jet_compose,
    jet_invert,
    random_jet,
    symbolic_jet,
)
from .phi import PhiSeries


class StructureError(ValueError):
    pass


class RelationError(StructureError):
    """The single relation fixing mu_{2d+1} is violated."""


# ---------------------------------------------------------------------------
# mu -> lambda
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuSeq:
    """Classification data: d and mu_1..mu_M (mu_n = 0 for n <= d, mu_{d+1} != 0)."""

    d: int
    values: Tuple[Rational, ...]

    def __post_init__(self):
        vals = tuple(rat(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.d < 1:
            raise StructureError("d must be a positive integer")
        if len(vals) < self.d + 1:
            raise StructureError(f"need at least mu_1..mu_{self.d + 1}")
        if any(vals[n] for n in range(self.d)):
            raise StructureError(f"mu_n must vanish for n <= d = {self.d}")
        if not vals[self.d]:
            raise StructureError("mu_{d+1} must be nonzero")

    @property
    def M(self) -> int:
        return len(self.values)

    def mu(self, n: int) -> Rational:
        if n < 1:
            return 0
        if n > self.M:
            raise StructureError(f"mu_{n} is beyond the supplied sequence (length {self.M})")
        return self.values[n - 1]

    @classmethod
    def from_free(cls, d: int, free: Sequence, length: int, mode: str = "strict") -> "MuSeq":
        """Build mu from mu_{d+1}, mu_{d+2}, ... (``free``), zero-padded to ``length``.

        In ``solve`` mode the entry mu_{2d+1} of ``free`` is ignored and filled
        from the relation; in ``strict`` mode it is checked.
        """
        vals = [0] * d + [rat(v) for v in free]
        vals = (vals + [0] * length)[:length]
        seq = cls(d, tuple(vals))
        if 2 * d + 1 <= length:
            if mode == "solve":
                vals[2 * d] = required_mu_2d1(seq)
                seq = cls(d, tuple(vals))
            elif mode == "strict":
                check_relation(seq)
            else:
                raise StructureError(f"unknown mode {mode!r}")
        return seq

    def to_json(self) -> dict:
        return {"kind": "mu", "d": self.d, "N": self.M, "mu": [rat_str(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: Mapping) -> "MuSeq":
        vals = tuple(rat(v) for v in data["mu"])
        if "N" in data and int(data["N"]) != len(vals):
            raise StructureError(f"mu file declares N={data['N']} but lists {len(vals)} values")
        return cls(int(data["d"]), vals)


def _nu_values(mu: MuSeq, upto: int) -> Dict[int, Rational]:
    """lambda_{d+1,n} for 1 <= n <= upto by the recursion; n = d+1 gives 0.

    Uses mu up to index upto + d.  The n = d+1 step is where the recursion
    degenerates; there the relation on mu_{2d+1} applies instead and the
    entry is lambda_{d+1,d+1} = 0.
    """
    d = mu.d
    m1 = mu.mu(d + 1)
    nu: Dict[int, Rational] = {}
    for n in range(1, upto + 1):
        if n == d + 1:
            nu[n] = 0
            continue
        acc = d * m1 * mu.mu(n + d)
        for s in range(1, n):
            # lambda_{s,d+1} = -lambda_{d+1,s}
            acc -= (n + d - 2 * s + 1) * mu.mu(n + d - s + 1) * (-nu[s])
        nu[n] = _norm(-Fraction(acc) / ((d - n + 1) * m1))
    return nu


def required_mu_2d1(mu: MuSeq) -> Rational:
    """mu_{2d+1} forced by the relation, from mu_{d+1}..mu_{2d}."""
    d = mu.d
    m1 = mu.mu(d + 1)
    nu = _nu_values(mu, d)
    acc = sum(2 * (d + 1 - s) * mu.mu(2 * d + 2 - s) * (-nu[s]) for s in range(2, d + 1))
    return _norm(-Fraction(acc) / (d * m1))


def relation_residual(mu: MuSeq) -> Rational:
    """mu_{2d+1} minus its forced value (zero iff the relation holds)."""
    return _norm(Fraction(mu.mu(2 * mu.d + 1)) - required_mu_2d1(mu))


def check_relation(mu: MuSeq) -> None:
    if 2 * mu.d + 1 > mu.M:
        return
    r = relation_residual(mu)
    if r:
        raise RelationError(
            f"relation on mu_{2 * mu.d + 1} violated: expected {required_mu_2d1(mu)}, "
            f"got {mu.mu(2 * mu.d + 1)}"
        )


@dataclass(frozen=True)
class LambdaTable:
    """Antisymmetric table lambda_mn, 1 <= m, n <= N (zero outside)."""

    N: int
    entries: Mapping[Tuple[int, int], Rational]

    def __post_init__(self):
        clean = {}
        for (m, n), v in self.entries.items():
            v = rat(v)
            if not (1 <= m <= self.N and 1 <= n <= self.N):
                raise StructureError(f"lambda_{m},{n} outside 1..{self.N}")
            if v:
                clean[(m, n)] = v
        for (m, n), v in clean.items():
            if clean.get((n, m), 0) != -v:
                raise StructureError(f"lambda is not antisymmetric at ({m},{n})")
        object.__setattr__(self, "entries", clean)

    def __call__(self, m: int, n: int) -> Rational:
        return self.entries.get((m, n), 0)

    def to_phi(self, order: int | None = None) -> PhiSeries:
        """phi with coefficients lambda_ij.

        By default the result is box-complete (all i, j <= N).  An explicit
        total-degree ``order`` may not exceed N + 1, the largest degree the
        table determines completely.
        """
        if order is None:
            return PhiSeries.from_lambda(self.entries, 2 * self.N, box=self.N)
        if order > self.N + 1:
            raise StructureError(f"a size-{self.N} table determines phi only to degree {self.N + 1}")
        return PhiSeries.from_lambda(self.entries, order)

    @classmethod
    def from_phi(cls, phi: PhiSeries, N: int) -> "LambdaTable":
        return cls(N, {k: v for k, v in phi.lambda_entries().items() if max(k) <= N})

    def truncate(self, M: int) -> "LambdaTable":
        return LambdaTable(M, {k: v for k, v in self.entries.items() if max(k) <= M})

    def to_json(self) -> dict:
        lam = [{"i": i, "j": j, "value": rat_str(v)} for (i, j), v in sorted(self.entries.items()) if i < j]
        return {"kind": "lambda", "N": self.N, "lambda": lam}

    @classmethod
    def from_json(cls, data: Mapping) -> "LambdaTable":
        entries = {}
        for e in data["lambda"]:
            i, j, v = int(e["i"]), int(e["j"]), rat(e["value"])
            entries[(i, j)] = v
            entries[(j, i)] = -v
        return cls(int(data["N"]), entries)


def lambda_from_mu(mu: MuSeq, mode: str = "strict") -> LambdaTable:
    """The full lambda table determined by mu_1..mu_M, of size N = M - d."""
    if mode == "strict":
        check_relation(mu)
    elif mode == "solve":
        if 2 * mu.d + 1 <= mu.M:
            vals = list(mu.values)
            vals[2 * mu.d] = required_mu_2d1(mu)
            mu = MuSeq(mu.d, tuple(vals))
    else:
        raise StructureError(f"unknown mode {mode!r}")
    d = mu.d
    N = mu.M - d
    if N < 1:
        raise StructureError("mu sequence too short to determine any lambda entry")
    nu = _nu_values(mu, N)
    m1 = Fraction(mu.mu(d + 1))
    entries = {}
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            v = (mu.mu(m) * nu[n] - mu.mu(n) * nu[m]) / m1
            if v:
                entries[(m, n)] = _norm(v)
    return LambdaTable(N, entries)


def random_mu(rng: random.Random, d: int, length: int, num_range: int = 3, den_range: int = 3) -> MuSeq:
    """Seeded admissible mu: random mu_{d+1}.. with mu_{2d+1} solved from the relation."""
    free = []
    for k in range(length - d):
        while True:
            q = Fraction(rng.randint(-num_range, num_range), rng.randint(1, den_range))
            if q or k:
                break
        free.append(q)
    return MuSeq.from_free(d, free, length, mode="solve")


# ---------------------------------------------------------------------------
# bracket tables
# ---------------------------------------------------------------------------


class OmegaTable:
    """omega_ij for 1 <= i < j <= N; antisymmetric extension implied."""

    def __init__(self, N: int, entries: Mapping[Tuple[int, int], CoordPoly]):
        self.N = N
        clean = {}
        for (i, j), p in entries.items():
            if not (1 <= i <= N and 1 <= j <= N):
                raise StructureError(f"omega_{i},{j} outside 1..{N}")
            if i == j:
                if p:
                    raise StructureError("diagonal entries must vanish")
                continue
            if i > j:
                i, j, p = j, i, -p
            if p.nvars != N:
                p = p.extend(N) if p.nvars < N else None
                if p is None:
                    raise StructureError("entry uses more variables than N")
            if (i, j) in clean and clean[(i, j)] != p:
                raise StructureError(f"conflicting entries for ({i},{j})")
            if p:
                clean[(i, j)] = p
        self.entries: Dict[Tuple[int, int], CoordPoly] = clean
        self._partials: Dict[Tuple[int, int, int], CoordPoly] = {}
        self._zero = CoordPoly.zero(N)

    def __call__(self, i: int, j: int) -> CoordPoly:
        if i < j:
            return self.entries.get((i, j), self._zero)
        if i > j:
            p = self.entries.get((j, i))
            return -p if p is not None else self._zero
        return self._zero

    def partial(self, i: int, j: int, k: int) -> CoordPoly:
        """d omega_ij / d x_k (all 1-based)."""
        key = (i, j, k)
        if key not in self._partials:
            self._partials[key] = self(i, j).partial(k - 1)
        return self._partials[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, OmegaTable):
            return NotImplemented
        return self.N == other.N and self.entries == other.entries

    def __neg__(self) -> "OmegaTable":
        return OmegaTable(self.N, {k: -p for k, p in self.entries.items()})

    def scale(self, c) -> "OmegaTable":
        return OmegaTable(self.N, {k: p.scale(c) for k, p in self.entries.items()})

    def truncate(self, M: int) -> "OmegaTable":
        """Projection to G_M: keep i, j <= M and drop the variables x_{M+1}.. ."""
        out = {}
        for (i, j), p in self.entries.items():
            if j <= M:
                if any(pos >= M for pos in p.variables()):
                    raise StructureError(f"omega_{i},{j} depends on coordinates beyond {M}")
                out[(i, j)] = CoordPoly(M, {m[:M]: c for m, c in p.terms.items()}, p.laurent)
        return OmegaTable(M, out)

    def with_entry(self, i: int, j: int, p: CoordPoly) -> "OmegaTable":
        entries = dict(self.entries)
        if i > j:
            i, j, p = j, i, -p
        entries[(i, j)] = p
        return OmegaTable(self.N, entries)

    def evaluate(self, point: Sequence) -> Dict[Tuple[int, int], Rational]:
        return {k: p.evaluate(point) for k, p in self.entries.items()}

    def is_polynomial(self) -> bool:
        return all(p.is_polynomial() for p in self.entries.values())

    def locality_violations(self) -> List[Tuple[int, int]]:
        return [(i, j) for (i, j), p in self.entries.items() if p.max_variable() > max(i, j)]

    def identity_values(self) -> Dict[Tuple[int, int], Rational]:
        """omega_ij(e) at e = (1, 0, ..., 0); nonzero entries only."""
        e = [1] + [0] * (self.N - 1)
        vals = self.evaluate(e)
        return {k: v for k, v in vals.items() if v}

    def proportionality(self, other: "OmegaTable") -> Optional[Rational]:
        """The scalar c with self == c * other, or None."""
        if self.N != other.N:
            return None
        if not other.entries:
            return 1 if not self.entries else None
        (k0, p0), *_ = sorted(other.entries.items())
        m0, c0 = next(iter(sorted(p0.terms.items())))
        c = Fraction(self(*k0).terms.get(m0, 0)) / Fraction(c0)
        return _norm(c) if self == other.scale(c) else None

    def __repr__(self) -> str:
        return f"OmegaTable(N={self.N}, {len(self.entries)} entries)"

    def to_json(self) -> dict:
        return {
            "kind": "omega",
            "N": self.N,
            "omega": [{"i": i, "j": j, "poly": p.to_json()} for (i, j), p in sorted(self.entries.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "OmegaTable":
        N = int(data["N"])
        return cls(N, {(int(e["i"]), int(e["j"])): CoordPoly.from_json(e["poly"]) for e in data["omega"]})


def _composition_sums(N: int) -> List[List[CoordPoly]]:
    """S[p][i] = sum over ordered compositions r_1+..+r_p = i of x_{r_1}...x_{r_p}.

    Built by the recursion S[p][i] = sum_r x_r S[p-1][i-r].
    """
    xs = [CoordPoly.var(k, N) for k in range(N)]
    zero = CoordPoly.zero(N)
    S = [[CoordPoly.const(1, N)] + [zero] * N]
    for p in range(1, N + 1):
        row = [zero] * (N + 1)
        for i in range(p, N + 1):
            acc = zero
            for r in range(1, i - p + 2):
                prev = S[p - 1][i - r]
                if prev:
                    acc = acc + xs[r - 1] * prev
            row[i] = acc
        S.append(row)
    return S


def omega_from_lambda(lam: LambdaTable, N: int | None = None) -> OmegaTable:
    """Bracket table by the explicit lambda double-sum formula."""
    N = lam.N if N is None else N
    if N > lam.N:
        raise StructureError(f"lambda table of size {lam.N} cannot determine omega up to {N}")
    xs = [CoordPoly.var(k, N) for k in range(N)]
    S = _composition_sums(N)
    entries = {}
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            acc = CoordPoly.zero(N)
            for p in range(1, i + 1):
                for q in range(1, j + 1):
                    c = lam(i - p + 1, j - q + 1)
                    if c:
                        acc = acc + (xs[p - 1] * xs[q - 1]).scale(c * p * q)
                    c = lam(p, q)
                    if c and S[p][i] and S[q][j]:
                        acc = acc - (S[p][i] * S[q][j]).scale(c)
            entries[(i, j)] = acc
    return OmegaTable(N, entries)


def omega_special(d: int, N: int) -> OmegaTable:
    """The one-monomial family, transcribed term by term (x_i = 0 for i < 1)."""
    if d < 1:
        raise StructureError("d must be a positive integer")
    S = _composition_sums(N)
    zero = CoordPoly.zero(N)

    def x(k: int) -> CoordPoly:
        return CoordPoly.var(k - 1, N) if 1 <= k <= N else zero

    def s(k: int) -> CoordPoly:
        return S[d + 1][k] if d + 1 <= N and 0 <= k <= N else zero

    entries = {}
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            entries[(i, j)] = (
                (x(j) * x(i - d)).scale((i - d) * j)
                - (x(i) * x(j - d)).scale(i * (j - d))
                + x(i) * s(j)
                - x(j) * s(i)
            )
    return OmegaTable(N, entries)


def _require_box(phi: PhiSeries, N: int) -> None:
    if phi.complete_box < N and phi.order < 2 * N - 1:
        raise StructureError(f"phi does not determine every lambda_ij with i, j <= {N}")


def omega_series(phi: PhiSeries, xs: TruncSeries, box: int) -> TruncSeries:
    """Omega(u,v;x) = phi(u,v) x'(u) x'(v) - phi(x(u), x(v)) on the box i, j <= ``box``.

    ``xs`` is a univariate series with rational or coordinate-polynomial
    coefficients; the result is exact on the box when ``xs`` is known to
    degree ``box`` and phi to total degree 2*box.
    """
    dx = xs.partial(0)
    du, dv = dx.relabel([0], 2), dx.relabel([1], 2)
    xu, xv = xs.relabel([0], 2), xs.relabel([1], 2)
    phis = phi.series
    first = phis.mul(du, box).mul(dv, box)
    second = phis.substitute([xu, xv], box=box)
    return (first - second).restrict_box(box)


def omega_from_phi(phi: PhiSeries, N: int) -> OmegaTable:
    """Bracket table as coefficients of the generating series at the generic point."""
    phi.check()
    _require_box(phi, N)
    xs = symbolic_jet(N, order=2 * N + 1)
    omega = omega_series(phi, xs, N)
    entries = {}
    for (i, j), c in omega.coeffs.items():
        if i < j:
            entries[(i, j)] = c
        elif i > j and omega.coefficient(j, i) != -c:
            raise StructureError("generating series produced a non-antisymmetric table")
    return OmegaTable(N, entries)


def g3_example() -> OmegaTable:
    """The three displayed brackets on G_3, including the Laurent entry 6 x2^3/x1."""
    x1, x2, x3 = (CoordPoly.var(k, 3) for k in range(3))
    return OmegaTable(
        3,
        {
            (1, 2): x1 * x2,
            (1, 3): (x2 * x2).scale(4) - (x1 * x3).scale(2),
            (2, 3): (x2 ** 3 * x1 ** -1).scale(6) - (x2 * x3).scale(5),
        },
    )


def generating_series_polynomial(omega: OmegaTable) -> bool:
    """Polynomiality scan: every table from the generating series is polynomial."""
    return omega.is_polynomial()


# ---------------------------------------------------------------------------
# Jacobi identity
# ---------------------------------------------------------------------------


def jacobi_residual(omega: OmegaTable, j: int, k: int, l: int) -> CoordPoly:
    """sum_i omega_ij d_i omega_kl + omega_ik d_i omega_lj + omega_il d_i omega_jk."""
    acc = CoordPoly.zero(omega.N)
    for i in range(1, omega.N + 1):
        for a, (b, c) in ((j, (k, l)), (k, (l, j)), (l, (j, k))):
            w = omega(i, a)
            if not w:
                continue
            dp = omega.partial(b, c, i)
            if dp:
                acc = acc + w * dp
    return acc


def jacobi_failures(omega: OmegaTable, N: int | None = None) -> List[Tuple[Tuple[int, int, int], CoordPoly]]:
    """All triples j < k < l <= N with a nonzero Jacobi residual."""
    N = omega.N if N is None else N
    bad = []
    for j in range(1, N + 1):
        for k in range(j + 1, N + 1):
            for l in range(k + 1, N + 1):
                r = jacobi_residual(omega, j, k, l)
                if r:
                    bad.append(((j, k, l), r))
    return bad


# ---------------------------------------------------------------------------
# multiplicativity
# ---------------------------------------------------------------------------


class CompositionJacobian:
    """z = xy in the 2N-variable ring, with its partials in x and in y."""

    def __init__(self, N: int):
        self.N = N
        self.z = composition_coordinates(N)
        self.dzdx = [[zi.partial(k) for k in range(N)] for zi in self.z]
        self.dzdy = [[zi.partial(N + k) for k in range(N)] for zi in self.z]


@lru_cache(maxsize=None)
def _jacobian(N: int) -> CompositionJacobian:
    return CompositionJacobian(N)


def _bilinear(omega_entries, A_i, A_j, N, nv, laurent) -> CoordPoly:
    acc = CoordPoly.zero(nv, laurent)
    for (k, l), w in omega_entries:
        t = A_i[k - 1] * A_j[l - 1] - A_i[l - 1] * A_j[k - 1]
        if t:
            acc = acc + w * t
    return acc


def multiplicativity_residual_symbolic(omega: OmegaTable, i: int, j: int) -> CoordPoly:
    """omega_ij(xy) minus the transported brackets of x and y, in 2N variables."""
    N = omega.N
    J = _jacobian(N)
    nv = 2 * N
    laurent = frozenset({0, N})
    lhs = omega(i, j).substitute(J.z) if omega(i, j) else CoordPoly.zero(nv, laurent)
    ox = [(k, p.embed(nv, 0)) for k, p in sorted(omega.entries.items())]
    oy = [(k, p.embed(nv, N)) for k, p in sorted(omega.entries.items())]
    rhs = _bilinear(ox, J.dzdx[i - 1], J.dzdx[j - 1], N, nv, laurent)
    rhs = rhs + _bilinear(oy, J.dzdy[i - 1], J.dzdy[j - 1], N, nv, laurent)
    return lhs - rhs


def multiplicativity_residuals_at(omega: OmegaTable, x: JetElement, y: JetElement, pairs=None) -> Dict[Tuple[int, int], Rational]:
    """Residuals at one rational pair (x, y) for every (i, j) in ``pairs`` (default: all i < j).

    The Jacobian entries and the three bracket tables are evaluated once and
    shared across all pairs.
    """
    N = omega.N
    J = _jacobian(N)
    point = list(x.x) + list(y.x)
    if pairs is None:
        pairs = [(i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
    wx = _bracket_values(omega, x.x)
    wy = _bracket_values(omega, y.x)
    wz = jet_compose(x, y).x
    Ax = [[p.evaluate(point) for p in row] for row in J.dzdx]
    Ay = [[p.evaluate(point) for p in row] for row in J.dzdy]
    out = {}
    for i, j in pairs:
        lhs = omega(i, j).evaluate(wz)
        rhs = 0
        for W, A in ((wx, Ax), (wy, Ay)):
            Ai, Aj = A[i - 1], A[j - 1]
            for k in range(N):
                if not Ai[k]:
                    continue
                row = W[k]
                for l in range(N):
                    if row[l] and Aj[l]:
                        rhs += row[l] * Ai[k] * Aj[l]
        out[(i, j)] = _norm(Fraction(lhs - rhs))
    return out


def multiplicativity_residual_at(omega: OmegaTable, i: int, j: int, x: JetElement, y: JetElement) -> Rational:
    """The symbolic residual evaluated exactly at one rational pair (x, y)."""
    return multiplicativity_residuals_at(omega, x, y, [(i, j)])[(i, j)]


def multiplicativity_residual(omega: OmegaTable, i: int, j: int, mode: str = "symbolic", rng=None, samples: int = 50):
    """Symbolic mode returns a polynomial; random mode returns the first nonzero sample (or 0)."""
    if mode == "symbolic":
        return multiplicativity_residual_symbolic(omega, i, j)
    if mode == "random":
        rng = rng or random.Random(0)
        for _ in range(samples):
            x, y = random_jet(rng, omega.N), random_jet(rng, omega.N)
            r = multiplicativity_residual_at(omega, i, j, x, y)
            if r:
                return r
        return 0
    raise ValueError(f"unknown mode {mode!r}")


def multiplicativity_failures_symbolic(omega: OmegaTable) -> List[Tuple[Tuple[int, int], CoordPoly]]:
    bad = []
    for i in range(1, omega.N + 1):
        for j in range(i + 1, omega.N + 1):
            r = multiplicativity_residual_symbolic(omega, i, j)
            if r:
                bad.append(((i, j), r))
    return bad


def multiplicativity_failures_random(omega: OmegaTable, rng: random.Random, samples: int = 50):
    """Exact residuals at ``samples`` seeded random pairs, over every (i, j)."""
    bad = []
    for _ in range(samples):
        x, y = random_jet(rng, omega.N), random_jet(rng, omega.N)
        for ij, r in sorted(multiplicativity_residuals_at(omega, x, y).items()):
            if r:
                bad.append((ij, (x, y), r))
    return bad


# ---------------------------------------------------------------------------
# generating-series identities at rational points
# ---------------------------------------------------------------------------


def _poly_series(x: JetElement) -> TruncSeries:
    # the jet as an exact polynomial; box-N coefficients are exact by locality
    return x.to_series(order=2 * x.N + 1)


def composition_series_residual(phi: PhiSeries, x: JetElement, y: JetElement) -> TruncSeries:
    """Omega(u,v;xy) - Omega(y(u),y(v);x) - Omega(u,v;y) x'(y(u)) x'(y(v)).

    Exact for all coefficients u^i v^j with i, j <= N.
    """
    if x.N != y.N:
        raise ValueError("x and y have different truncation orders")
    N = x.N
    _require_box(phi, N)
    xs, ys = _poly_series(x), _poly_series(y)
    lhs = omega_series(phi, _poly_series(jet_compose(x, y)), N)
    om_x = omega_series(phi, xs, N)
    yu, yv = ys.relabel([0], 2), ys.relabel([1], 2)
    first = om_x.substitute([yu, yv], box=N)
    dx_of_y = xs.partial(0).compose(ys)
    second = omega_series(phi, ys, N).mul(dx_of_y.relabel([0], 2), N).mul(dx_of_y.relabel([1], 2), N)
    return (lhs - first - second).restrict_box(N)


@lru_cache(maxsize=None)
def symbolic_inverse(N: int) -> Tuple[CoordPoly, ...]:
    """Coordinates of x^{-1} as Laurent polynomials in x_1..x_N."""
    xs = [CoordPoly.var(k, N) for k in range(N)]
    return tuple(invert_coefficients(xs, xs[0].inverse()))


def inversion_jacobian(x: JetElement) -> List[List[Rational]]:
    """J[a][k] = d (x^{-1})_a / d x_k at x."""
    inv = symbolic_inverse(x.N)
    return [[p.partial(k).evaluate(x.x) for k in range(x.N)] for p in inv]


def _bracket_values(omega: OmegaTable, point) -> List[List[Rational]]:
    N = omega.N
    vals = omega.evaluate(point)
    W = [[0] * N for _ in range(N)]
    for (i, j), v in vals.items():
        W[i - 1][j - 1] = v
        W[j - 1][i - 1] = -v
    return W


def inversion_residual(phi: PhiSeries, x: JetElement, omega: OmegaTable | None = None) -> TruncSeries:
    """{Xbar(w), Xbar(s)} + [Xbar'(w) Xbar'(s) phi(w,s) - phi(Xbar(w), Xbar(s))] at x.

    The bracket of the inverse coordinates is computed by the chain rule from
    the bracket table at x; the bracketed term is the generating series at
    xbar = x^{-1}.  Exact for all coefficients with both degrees <= N.
    """
    N = x.N
    _require_box(phi, N)
    omega = omega_from_phi(phi, N) if omega is None else omega
    W = _bracket_values(omega, x.x)
    J = inversion_jacobian(x)
    lhs = {}
    for a in range(N):
        for b in range(N):
            v = 0
            for k in range(N):
                if not J[a][k]:
                    continue
                for l in range(N):
                    if W[k][l] and J[b][l]:
                        v += J[a][k] * W[k][l] * J[b][l]
            if v:
                lhs[(a + 1, b + 1)] = v
    lhs_series = TruncSeries(2, 2 * N + 1, lhs)
    xbar = jet_invert(x)
    return (lhs_series + omega_series(phi, _poly_series(xbar), N)).restrict_box(N)


def inversion_step_residual(phi: PhiSeries, x: JetElement, omega: OmegaTable | None = None) -> TruncSeries:
    """{X(v), Xbar(w)}|_{w=X(u)} - Xbar'(X(u)) {X(u), X(v)} at x, exact on the box N."""
    N = x.N
    omega = omega_from_phi(phi, N) if omega is None else omega
    W = _bracket_values(omega, x.x)
    J = inversion_jacobian(x)
    # B(s, v) = sum_{a,j} {X_j, Xbar_a} s^a v^j with {X_j, Xbar_a} = sum_l omega_jl J_al
    B = {}
    for a in range(N):
        for j in range(N):
            v = sum(W[j][l] * J[a][l] for l in range(N) if W[j][l] and J[a][l])
            if v:
                B[(a + 1, j + 1)] = v
    xs = _poly_series(x)
    order = 2 * N + 1
    left = TruncSeries(2, order, B).substitute([xs.relabel([0], 2), TruncSeries.variable(1, 2, order)], box=N)
    dxbar = _poly_series(jet_invert(x)).partial(0).compose(xs)
    right = omega_series(phi, xs, N).mul(dxbar.relabel([0], 2), N)
    return (left - right).restrict_box(N)
