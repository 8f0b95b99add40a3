"""Lie bialgebra structures on the Witt algebra [e_n, e_m] = (n - m) e_{n+m}, n, m >= 0.

Elements of the completed tensor square are stored by their tensor
components: an antisymmetric table ``{(i, j): t^ij}``.  A wedge e_a ^ e_b is
ingested as +1 at (a, b) and -1 at (b, a).  Every object carries a grade cap
``cap``; components with an index above the cap are not stored.

Correspondence with the group side: basis index n <-> coordinate x_{n+1},
r^ij = lambda_{i+1, j+1}.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exact import CoordPoly, Rational, _norm, rat, rat_str
from .linalg import Echelon, InconsistentSystem, solve

Tensor2 = Dict[Tuple[int, int], Rational]
Tensor3 = Dict[Tuple[int, int, int], Rational]


def _add(t: dict, key, value) -> None:
    if not value:
        return
    v = t.get(key, 0) + value
    if v:
        t[key] = _norm(v) if isinstance(v, Fraction) else v
    else:
        t.pop(key, None)


def wedge(a: int, b: int, coef=1) -> Tensor2:
    t: Tensor2 = {}
    _add(t, (a, b), rat(coef))
    _add(t, (b, a), -rat(coef))
    return t


def is_antisymmetric(t: Mapping[Tuple[int, int], Rational]) -> bool:
    return all(t.get((j, i), 0) == -v for (i, j), v in t.items())


def restrict(t: Mapping, cap: int) -> dict:
    return {k: v for k, v in t.items() if max(k) <= cap}


def proportionality(a: Mapping, b: Mapping) -> Optional[Rational]:
    """Scalar c with a == c * b (None if no such scalar; 1 when both vanish)."""
    if not b:
        return 1 if not a else None
    key = min(b)
    c = Fraction(a.get(key, 0)) / Fraction(b[key])
    keys = set(a) | set(b)
    if all(a.get(k, 0) == c * b.get(k, 0) for k in keys):
        return _norm(c)
    return None


# ---------------------------------------------------------------------------
# the Witt algebra
# ---------------------------------------------------------------------------


def witt_bracket(n: int, m: int) -> Tuple[int, int]:
    """[e_n, e_m] as (coefficient, index)."""
    if n < 0 or m < 0:
        raise ValueError("basis indices are non-negative")
    return n - m, n + m


@dataclass
class WittElement:
    """Finite combination sum c_n e_n with all indices <= cap."""

    coeffs: Dict[int, Rational]
    cap: int

    def __post_init__(self):
        self.coeffs = {n: rat(c) for n, c in self.coeffs.items() if c}
        if any(n < 0 or n > self.cap for n in self.coeffs):
            raise ValueError("index outside 0..cap")

    def bracket(self, other: "WittElement") -> Tuple["WittElement", bool]:
        """The bracket truncated at the cap, plus whether anything was cut off."""
        cap = min(self.cap, other.cap)
        out: Dict[int, Rational] = {}
        overflow = False
        for n, a in self.coeffs.items():
            for m, b in other.coeffs.items():
                c, k = witt_bracket(n, m)
                if not c:
                    continue
                if k > cap:
                    overflow = True
                    continue
                _add(out, k, c * a * b)
        return WittElement(out, cap), overflow


@dataclass
class RMatrix:
    cap: int
    comps: Tensor2

    def __post_init__(self):
        self.comps = {k: rat(v) for k, v in self.comps.items() if v}
        if not is_antisymmetric(self.comps):
            raise ValueError("r-matrix must be antisymmetric")
        if any(min(k) < 0 or max(k) > self.cap for k in self.comps):
            raise ValueError("r-matrix index outside 0..cap")

    def __call__(self, i: int, j: int) -> Rational:
        return self.comps.get((i, j), 0)

    def to_json(self) -> dict:
        return {
            "kind": "r",
            "cap": self.cap,
            "r": [{"i": i, "j": j, "value": rat_str(v)} for (i, j), v in sorted(self.comps.items()) if i < j],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RMatrix":
        comps: Tensor2 = {}
        for e in data["r"]:
            i, j, v = int(e["i"]), int(e["j"]), rat(e["value"])
            comps[(i, j)] = v
            comps[(j, i)] = -v
        return cls(int(data["cap"]), comps)


@dataclass
class AlphaTable:
    """alpha(e_n) for 0 <= n <= cap, each an antisymmetric table."""

    cap: int
    tables: Dict[int, Tensor2]

    def __post_init__(self):
        clean = {}
        for n, t in self.tables.items():
            t = {k: rat(v) for k, v in t.items() if v and max(k) <= self.cap}
            if t:
                clean[n] = t
        self.tables = clean

    def __call__(self, n: int) -> Tensor2:
        return self.tables.get(n, {})

    def component(self, n: int, i: int, j: int) -> Rational:
        return self.tables.get(n, {}).get((i, j), 0)

    def scale(self, c) -> "AlphaTable":
        c = rat(c)
        return AlphaTable(self.cap, {n: {k: v * c for k, v in t.items()} for n, t in self.tables.items()})

    def with_component(self, n: int, i: int, j: int, value) -> "AlphaTable":
        tables = {m: dict(t) for m, t in self.tables.items()}
        tables.setdefault(n, {})[(i, j)] = rat(value)
        return AlphaTable(self.cap, tables)

    def is_antisymmetric(self) -> bool:
        return all(is_antisymmetric(t) for t in self.tables.values())

    def weights(self) -> set:
        return {i + j - n for n, t in self.tables.items() for (i, j) in t}

    def proportionality(self, other: "AlphaTable") -> Optional[Rational]:
        flat_a = {(n,) + k: v for n, t in self.tables.items() for k, v in t.items()}
        flat_b = {(n,) + k: v for n, t in other.tables.items() for k, v in t.items()}
        return proportionality(flat_a, flat_b)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlphaTable) and self.tables == other.tables

    def to_json(self) -> dict:
        rows = []
        for n in sorted(self.tables):
            for (i, j), v in sorted(self.tables[n].items()):
                if i < j:
                    rows.append({"n": n, "i": i, "j": j, "value": rat_str(v)})
        # diagonal entries only occur in non-antisymmetric (invalid) input
        return {"kind": "alpha", "cap": self.cap, "alpha": rows}

    @classmethod
    def from_json(cls, data: Mapping) -> "AlphaTable":
        tables: Dict[int, Tensor2] = {}
        for e in data["alpha"]:
            n, i, j, v = int(e["n"]), int(e["i"]), int(e["j"]), rat(e["value"])
            t = tables.setdefault(n, {})
            t[(i, j)] = v
            t[(j, i)] = -v
        return cls(int(data["cap"]), tables)


# ---------------------------------------------------------------------------
# adjoint action and coboundaries
# ---------------------------------------------------------------------------


def adjoint_on_tensor2(n: int, t: Mapping[Tuple[int, int], Rational], cap: int | None = None) -> Tuple[Tensor2, bool]:
    """e_n . t = ([e_n, .] (x) 1 + 1 (x) [e_n, .]) t, via the bracket.

    Returns the image restricted to indices <= ``cap`` and a flag telling
    whether nonzero components beyond the cap were dropped.
    """
    out: Tensor2 = {}
    for (a, b), c in t.items():
        ca, ia = witt_bracket(n, a)
        cb, ib = witt_bracket(n, b)
        _add(out, (ia, b), ca * c)
        _add(out, (a, ib), cb * c)
    if cap is None:
        return out, False
    kept = restrict(out, cap)
    return kept, len(kept) != len(out)


def adjoint_on_tensor3(n: int, t: Mapping[Tuple[int, int, int], Rational]) -> Tensor3:
    out: Tensor3 = {}
    for (a, b, c), v in t.items():
        for slot, idx in enumerate((a, b, c)):
            coef, k = witt_bracket(n, idx)
            key = list((a, b, c))
            key[slot] = k
            _add(out, tuple(key), coef * v)
    return out


def coboundary(r: RMatrix, n: int) -> Tensor2:
    """alpha(e_n) = e_n . r, components with indices <= r.cap."""
    return adjoint_on_tensor2(n, r.comps, r.cap)[0]


def coboundary_formula(r: RMatrix, n: int) -> Tensor2:
    """Closed form (2n - i) r^{i-n, j} + (2n - j) r^{i, j-n} for i, j <= r.cap."""
    out: Tensor2 = {}
    for i in range(r.cap + 1):
        for j in range(r.cap + 1):
            v = 0
            if i >= n:
                v += (2 * n - i) * r(i - n, j)
            if j >= n:
                v += (2 * n - j) * r(i, j - n)
            if v:
                out[(i, j)] = v
    return out


def coboundary_table(r: RMatrix) -> AlphaTable:
    return AlphaTable(r.cap, {n: coboundary(r, n) for n in range(r.cap + 1)})


# ---------------------------------------------------------------------------
# bialgebra conditions
# ---------------------------------------------------------------------------


def cocycle_residual(alpha: AlphaTable, n: int, m: int) -> Tensor2:
    """(n - m) alpha(e_{n+m}) - e_n . alpha(e_m) + e_m . alpha(e_n), indices <= cap.

    Every component with indices <= cap is exact: the adjoint action only
    moves indices up.  Requires n + m <= cap.
    """
    if n + m > alpha.cap:
        raise ValueError(f"n + m = {n + m} exceeds the grade cap {alpha.cap}")
    out: Tensor2 = {}
    for k, v in alpha(n + m).items():
        _add(out, k, (n - m) * v)
    for k, v in adjoint_on_tensor2(n, alpha(m), alpha.cap)[0].items():
        _add(out, k, -v)
    for k, v in adjoint_on_tensor2(m, alpha(n), alpha.cap)[0].items():
        _add(out, k, v)
    return out


def cocycle_failures(alpha: AlphaTable, upto: int | None = None) -> List[Tuple[Tuple[int, int], Tensor2]]:
    upto = alpha.cap if upto is None else upto
    bad = []
    for n in range(upto + 1):
        for m in range(upto + 1 - n):
            res = cocycle_residual(alpha, n, m)
            if res:
                bad.append(((n, m), res))
    return bad


def cybe_residual(r: RMatrix) -> Tensor3:
    """<r, r> = [r12, r13] + [r12, r23] + [r13, r23], all indices <= cap.

    With r^ij r^kl summed: [e_i, e_k] (x) e_j (x) e_l, e_i (x) [e_j, e_k] (x) e_l
    and e_i (x) e_k (x) [e_j, e_l].  Components with indices <= cap only use
    r entries with indices <= cap, so they are exact.
    """
    cap = r.cap
    out: Tensor3 = {}
    items = list(r.comps.items())
    for (i, j), a in items:
        for (k, l), b in items:
            ab = a * b
            c, s = witt_bracket(i, k)
            if c and s <= cap:
                _add(out, (s, j, l), c * ab)
            c, s = witt_bracket(j, k)
            if c and s <= cap:
                _add(out, (i, s, l), c * ab)
            c, s = witt_bracket(j, l)
            if c and s <= cap:
                _add(out, (i, k, s), c * ab)
    return out


def is_totally_antisymmetric(t: Mapping[Tuple[int, int, int], Rational]) -> bool:
    for (a, b, c), v in t.items():
        for perm, sign in (((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1), ((b, c, a), 1), ((c, a, b), 1)):
            if t.get(perm, 0) != sign * v:
                return False
    return True


def cojacobi_residual(alpha: AlphaTable, min_weight: int | None = None) -> Dict[int, Tensor3]:
    """Cyclic sum of (1 (x) alpha) alpha(e_n) on the trusted window, per n.

    T_n^{ikl} = sum_j alpha_n^{ij} alpha_j^{kl}, and the residual is
    T^{xyz} + T^{yzx} + T^{zxy}.  A component is trusted when no j beyond
    the cap could contribute, i.e. when every pairwise sum of (x, y, z) is
    at most cap + min_weight (weights of alpha are i + j - n).
    """
    cap = alpha.cap
    if min_weight is None:
        min_weight = min(alpha.weights(), default=0)
    bound = cap + min_weight
    out: Dict[int, Tensor3] = {}
    for n in range(cap + 1):
        T: Tensor3 = {}
        for (i, j), a in alpha(n).items():
            for (k, l), b in alpha(j).items():
                _add(T, (i, k, l), a * b)
        S: Tensor3 = {}
        for (x, y, z), v in T.items():
            for key in ((x, y, z), (z, x, y), (y, z, x)):
                _add(S, key, v)
        S = {
            k: v for k, v in S.items()
            if max(k) <= cap and k[0] + k[1] <= bound and k[1] + k[2] <= bound and k[0] + k[2] <= bound
        }
        if S:
            out[n] = S
    return out


def trusted_triple(key: Tuple[int, int, int], cap: int, min_weight: int) -> bool:
    x, y, z = key
    b = cap + min_weight
    return max(key) <= cap and x + y <= b and y + z <= b and x + z <= b


# ---------------------------------------------------------------------------
# explicit families
# ---------------------------------------------------------------------------


def alpha_family_monomial(d: int, n: int, cap: int | None = None) -> Tensor2:
    """2n e_d ^ e_n - 2(n - d) e_0 ^ e_{d+n}."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    out: Tensor2 = {}
    for k, v in wedge(d, n, 2 * n).items():
        _add(out, k, v)
    for k, v in wedge(0, d + n, -2 * (n - d)).items():
        _add(out, k, v)
    return out if cap is None else restrict(out, cap)


def alpha_family_monomial_table(d: int, cap: int) -> AlphaTable:
    return AlphaTable(cap, {n: alpha_family_monomial(d, n, cap) for n in range(cap + 1)})


def alpha_family_d_lambda(d: int, lam, n: int, cap: int) -> Tensor2:
    """The four-sum one-parameter family, every component with indices <= cap."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    lam = rat(lam)
    k = (d - 1) * lam

    def pw(base, e):
        return base ** e if e else 1

    out: Tensor2 = {}

    def put(a, b, coef):
        for key, v in wedge(a, b, coef).items():
            _add(out, key, v)

    for i in range(d + n, cap + 1):
        put(0, i, 2 * (2 * n - i) * pw(k, i - (n + d)))
    for i in range(d, cap + 1):
        put(i, n, -2 * n * pw(k, i - d))
    for i in range(d + n, cap + 1):
        for j in range(1, d):
            put(i, j, 2 * (2 * n - i) * pw(lam, i + j - (n + d)) * pw(d - 1, i + j - (n + d + 1)))
    for i in range(d, cap + 1):
        for j in range(n + 1, d + n):
            put(i, j, 2 * (2 * n - j) * pw(lam, i + j - (n + d)) * pw(d - 1, i + j - (n + d + 1)))
    return restrict(out, cap)


def alpha_family_d_lambda_table(d: int, lam, cap: int) -> AlphaTable:
    return AlphaTable(cap, {n: alpha_family_d_lambda(d, lam, n, cap) for n in range(cap + 1)})


# ---------------------------------------------------------------------------
# group <-> algebra
# ---------------------------------------------------------------------------


def r_from_lambda(lam) -> RMatrix:
    """r^ij = lambda_{i+1, j+1} for a LambdaTable of size N (cap N - 1)."""
    return RMatrix(lam.N - 1, {(m - 1, n - 1): v for (m, n), v in lam.entries.items()})


def lambda_entries_from_r(r: RMatrix) -> Dict[Tuple[int, int], Rational]:
    return {(i + 1, j + 1): v for (i, j), v in r.comps.items()}


def derive_cocycle_from_omega(omega) -> AlphaTable:
    """alpha^{i-1, j-1}_{n-1} = d omega_ij / d x_n at e = (1, 0, ..., 0); cap N - 1."""
    N = omega.N
    e = [1] + [0] * (N - 1)
    tables: Dict[int, Tensor2] = {}
    for (i, j) in omega.entries:
        for n in range(1, N + 1):
            v = omega.partial(i, j, n).evaluate(e)
            if v:
                t = tables.setdefault(n - 1, {})
                t[(i - 1, j - 1)] = v
                t[(j - 1, i - 1)] = -v
    return AlphaTable(N - 1, tables)


# ---------------------------------------------------------------------------
# cocycle -> r
# ---------------------------------------------------------------------------


@dataclass
class WeightReport:
    weight: int
    kernel_dim: int
    solved: bool
    unknowns: int
    equations: int
    r_components: Dict[Tuple[int, int], Rational] = field(default_factory=dict)
    offending: Optional[Tuple[int, int, int]] = None

    def to_json(self) -> dict:
        data = {
            "weight": self.weight,
            "kernel_dim": self.kernel_dim,
            "solved": self.solved,
            "r_components": [
                {"i": i, "j": j, "value": rat_str(v)} for (i, j), v in sorted(self.r_components.items()) if i < j
            ],
        }
        if self.offending is not None:
            data["offending"] = {"n": self.offending[0], "i": self.offending[1], "j": self.offending[2]}
        return data


@dataclass
class SolveResult:
    r: Optional[RMatrix]
    reports: List[WeightReport]

    @property
    def consistent(self) -> bool:
        return all(rep.solved for rep in self.reports)

    def failing(self) -> List[WeightReport]:
        return [rep for rep in self.reports if not rep.solved]

    def to_json(self) -> dict:
        data = {"consistent": self.consistent, "weights": [rep.to_json() for rep in self.reports]}
        if self.r is not None:
            data["r"] = self.r.to_json()
        return data


def _r_ref(i: int, j: int):
    """(sign, unknown key) for r^ij in terms of the i < j unknowns."""
    if i < 0 or j < 0 or i == j:
        return 0, None
    return (1, (i, j)) if i < j else (-1, (j, i))


def solve_r_from_cocycle(alpha: AlphaTable, max_weight: int | None = None) -> SolveResult:
    """Solve alpha(e_n) = e_n . r weight by weight.

    Unknowns of weight w are r^ij with i < j, i + j = w, both <= cap; they
    only meet the components (a, b) of alpha(e_n) with a + b = n + w.  The
    kernel dimension of each homogeneous block is reported.
    """
    cap = alpha.cap
    if not alpha.is_antisymmetric():
        raise ValueError("alpha must be antisymmetric")
    weights = set(alpha.weights())
    top = 2 * cap - 1 if max_weight is None else max_weight
    weights |= set(range(1, top + 1))
    reports: List[WeightReport] = []
    r_comps: Tensor2 = {}
    for w in sorted(weights):
        unknowns = [(i, w - i) for i in range(max(0, w - cap), cap + 1) if i < w - i <= cap]
        col = {key: c for c, key in enumerate(unknowns)}
        rows, rhs, labels = [], [], []
        for n in range(cap + 1):
            for a in range(cap + 1):
                b = n + w - a
                if b < 0 or b > cap or a >= b:
                    continue
                row: Dict[int, Rational] = {}
                if a >= n:
                    s, key = _r_ref(a - n, b)
                    if key is not None:
                        _add(row, col[key], s * (2 * n - a))
                if b >= n:
                    s, key = _r_ref(a, b - n)
                    if key is not None:
                        _add(row, col[key], s * (2 * n - b))
                rows.append(row)
                rhs.append(alpha.component(n, a, b))
                labels.append((n, a, b))
        # components whose weight has no unknowns at all
        if w < 1:
            bad = [(n, a, b) for n, t in alpha.tables.items() for (a, b), v in t.items() if a + b - n == w and v]
            reports.append(WeightReport(w, 0, not bad, 0, len(bad), offending=bad[0] if bad else None))
            continue
        try:
            sol, kernel = solve(rows, rhs, len(unknowns), labels)
        except InconsistentSystem as exc:
            kernel = len(unknowns) - _rank(rows)
            reports.append(WeightReport(w, kernel, False, len(unknowns), len(rows), offending=exc.row_label))
            continue
        comps = {}
        for c, v in sol.items():
            i, j = unknowns[c]
            comps[(i, j)] = _norm(v)
            comps[(j, i)] = -_norm(v)
        r_comps.update(comps)
        reports.append(WeightReport(w, kernel, True, len(unknowns), len(rows), comps))
    r = RMatrix(cap, r_comps) if all(rep.solved for rep in reports) else None
    return SolveResult(r, reports)


def _rank(rows) -> int:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return ech.rank


def random_r(rng: random.Random, cap: int, density: float = 0.5, num_range: int = 5) -> RMatrix:
    comps: Tensor2 = {}
    for i in range(cap + 1):
        for j in range(i + 1, cap + 1):
            if rng.random() < density:
                v = Fraction(rng.randint(-num_range, num_range), rng.randint(1, 3))
                if v:
                    comps[(i, j)] = v
                    comps[(j, i)] = -v
    return RMatrix(cap, comps)


# ---------------------------------------------------------------------------
# the linear PDE system obtained by differentiating multiplicativity at y = e
# ---------------------------------------------------------------------------


def pde_system_residual(omega, alpha: AlphaTable, j: int, m: int, n: int) -> CoordPoly:
    """LHS - RHS of the linearized multiplicativity system (1-based j, m, n).

    sum_{i >= j} (i+1-j) x_{i+1-j} d omega_mn / d x_i
      = (m+1-j) omega_{m+1-j,n} + (n+1-j) omega_{m,n+1-j}
        + sum_{k<=m, l<=n} alpha_j^{kl} (m+1-k)(n+1-l) x_{m+1-k} x_{n+1-l},

    with alpha_j^{kl} read from ``alpha`` as component (j-1; k-1, l-1).
    """
    N = omega.N
    xs = [CoordPoly.var(k, N) for k in range(N)]
    acc = CoordPoly.zero(N)
    for i in range(j, N + 1):
        dp = omega.partial(m, n, i)
        if dp:
            acc = acc + (xs[i - j] * dp).scale(i + 1 - j)
    if m + 1 - j >= 1:
        acc = acc - omega(m + 1 - j, n).scale(m + 1 - j)
    if n + 1 - j >= 1:
        acc = acc - omega(m, n + 1 - j).scale(n + 1 - j)
    for (k1, l1), a in alpha(j - 1).items():
        k, l = k1 + 1, l1 + 1
        if k <= m and l <= n:
            acc = acc - (xs[m - k] * xs[n - l]).scale(a * (m + 1 - k) * (n + 1 - l))
    return acc


def pde_system_failures(omega, alpha: AlphaTable) -> List[Tuple[Tuple[int, int, int], CoordPoly]]:
    bad = []
    N = omega.N
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            if m == n:
                continue
            for j in range(1, max(m, n) + 1):
                r = pde_system_residual(omega, alpha, j, m, n)
                if r:
                    bad.append(((j, m, n), r))
    return bad


def _partitions(total: int, parts: int, largest: int):
    """Multisets of ``parts`` positive integers <= largest summing to total (non-increasing)."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(largest, total - parts + 1), 0, -1):
        if first * parts < total:
            break
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def _monomial(parts: Sequence[int], N: int) -> Tuple[int, ...]:
    e = [0] * N
    for p in parts:
        e[p - 1] += 1
    return tuple(e)


def homogeneous_kernel(N: int, impose_identity: bool = True) -> Dict[int, int]:
    """Kernel dimension of the homogeneous linearized system on G_N, per degree block.

    Unknowns: antisymmetric omega_mn (m < n <= N), polynomial.  The j = 1
    equation is the Euler relation sum_i i x_i d_i omega_mn = (m+n) omega_mn,
    so omega_mn is spanned by monomials of index weight m + n; the operators
    preserve polynomial degree, so the system splits into degree blocks.
    With ``impose_identity`` the condition omega_mn(e) = 0 removes x1^{m+n}.
    Returns {degree: kernel_dim} for every degree that has unknowns.
    """
    pairs = [(m, n) for m in range(1, N + 1) for n in range(m + 1, N + 1)]
    result: Dict[int, int] = {}
    for deg in range(2, 2 * N):
        unknown_index: Dict[Tuple[Tuple[int, int], Tuple[int, ...]], int] = {}
        for (m, n) in pairs:
            for parts in _partitions(m + n, deg, N):
                mono = _monomial(parts, N)
                if impose_identity and parts == (1,) * (m + n):
                    continue
                unknown_index[((m, n), mono)] = len(unknown_index)
        if not unknown_index:
            continue
        by_pair: Dict[Tuple[int, int], List[Tuple[Tuple[int, ...], int]]] = {}
        for ((pair, mono), c) in unknown_index.items():
            by_pair.setdefault(pair, []).append((mono, c))

        def omega_terms(a: int, b: int):
            """(sign, [(mono, col)]) for omega_ab in this block."""
            if a < 1 or b < 1 or a == b:
                return 0, []
            if a < b:
                return 1, by_pair.get((a, b), [])
            return -1, by_pair.get((b, a), [])

        ech = Echelon()
        for (m, n) in pairs:
            for j in range(1, n + 1):
                eq: Dict[Tuple[int, ...], Dict[int, Rational]] = {}
                for mono, col in by_pair.get((m, n), []):
                    # D_j x^a = sum_{i >= j} (i+1-j) a_i x^{a - e_i + e_{i+1-j}}
                    for i in range(j, N + 1):
                        ai = mono[i - 1]
                        if not ai:
                            continue
                        nm = list(mono)
                        nm[i - 1] -= 1
                        nm[i - j] += 1
                        _add(eq.setdefault(tuple(nm), {}), col, (i + 1 - j) * ai)
                for (a, b, coef) in ((m + 1 - j, n, m + 1 - j), (m, n + 1 - j, n + 1 - j)):
                    sign, terms = omega_terms(a, b)
                    for mono, col in terms:
                        _add(eq.setdefault(mono, {}), col, -sign * coef)
                for row in eq.values():
                    if row:
                        ech.add(row)
        result[deg] = len(unknown_index) - ech.rank
    return result
