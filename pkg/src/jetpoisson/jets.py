"""Truncated formal power series and the jet groups G_N.

A :class:`TruncSeries` lives in one to three formal variables (u, v, w) and
keeps every term of total degree <= ``order``.  Coefficients are rationals or
:class:`~jetpoisson.exact.CoordPoly` values; the code only relies on ``+``,
``*`` and truthiness, so both kinds mix freely.

Truncation bookkeeping is deliberately conservative: binary operations give
the minimum of the operand orders and a derivative lowers the order by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .exact import CoordPoly, Rational, _norm, rat, rat_str

VAR_NAMES = ("u", "v", "w")


def _clean(c):
    return _norm(c) if isinstance(c, Fraction) else c


class TruncSeries:
    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs: Mapping[Tuple[int, ...], object] | None = None):
        if not 1 <= nvars <= 3:
            raise ValueError("series support one to three formal variables")
        self.nvars = nvars
        self.order = order
        clean = {}
        for deg, c in (coeffs or {}).items():
            deg = tuple(deg)
            if len(deg) != nvars or any(d < 0 for d in deg):
                raise ValueError(f"bad degree vector {deg}")
            if sum(deg) > order or not c:
                continue
            c = _clean(c)
            if deg in clean:
                c = clean[deg] + c
                if not c:
                    del clean[deg]
                    continue
            clean[deg] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, nvars, order, coeffs) -> "TruncSeries":
        s = cls.__new__(cls)
        s.nvars, s.order, s.coeffs = nvars, order, coeffs
        return s

    @classmethod
    def univariate(cls, coeffs: Sequence, order: int | None = None) -> "TruncSeries":
        """Series sum_k coeffs[k] u^k."""
        if order is None:
            order = len(coeffs) - 1
        return cls(1, order, {(k,): c for k, c in enumerate(coeffs)})

    @classmethod
    def variable(cls, index: int, nvars: int, order: int) -> "TruncSeries":
        deg = [0] * nvars
        deg[index] = 1
        return cls(nvars, order, {tuple(deg): 1})

    # -- protocol -----------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.nvars == other.nvars and self.coeffs == other.coeffs

    def coefficient(self, *deg: int):
        return self.coeffs.get(tuple(deg), 0)

    def __getitem__(self, deg):
        if isinstance(deg, int):
            deg = (deg,)
        return self.coefficient(*deg)

    def valuation(self) -> int:
        """Lowest total degree present (``order + 1`` for the zero series)."""
        return min((sum(d) for d in self.coeffs), default=self.order + 1)

    def truncate(self, order: int) -> "TruncSeries":
        order = min(order, self.order)
        return TruncSeries._raw(self.nvars, order, {d: c for d, c in self.coeffs.items() if sum(d) <= order})

    def restrict_box(self, cap: int) -> "TruncSeries":
        """Drop every term with some variable degree above ``cap``."""
        return TruncSeries._raw(self.nvars, self.order, {d: c for d, c in self.coeffs.items() if max(d) <= cap})

    # -- ring operations ----------------------------------------------------
    def _check(self, other: "TruncSeries"):
        if not isinstance(other, TruncSeries) or other.nvars != self.nvars:
            raise ValueError("series have different variable counts")

    def __neg__(self) -> "TruncSeries":
        return TruncSeries._raw(self.nvars, self.order, {d: -c for d, c in self.coeffs.items()})

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        order = min(self.order, other.order)
        out = {d: c for d, c in self.coeffs.items() if sum(d) <= order}
        for d, c in other.coeffs.items():
            if sum(d) > order:
                continue
            s = out[d] + c if d in out else c
            if s:
                out[d] = _clean(s)
            else:
                out.pop(d, None)
        return TruncSeries._raw(self.nvars, order, out)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def scale(self, c) -> "TruncSeries":
        out = {}
        for d, v in self.coeffs.items():
            p = v * c
            if p:
                out[d] = _clean(p)
        return TruncSeries._raw(self.nvars, self.order, out)

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        return self.mul(other)

    def mul(self, other: "TruncSeries", box: int | None = None) -> "TruncSeries":
        """Truncated product; ``box`` additionally drops terms with a variable degree above it."""
        self._check(other)
        order = min(self.order, other.order)
        out: Dict[Tuple[int, ...], object] = {}
        b_items = [(d, sum(d), c) for d, c in other.coeffs.items()]
        for da, ca in self.coeffs.items():
            sa = sum(da)
            for db, sb, cb in b_items:
                if sa + sb > order:
                    continue
                d = tuple([x + y for x, y in zip(da, db)])
                if box is not None and max(d) > box:
                    continue
                p = ca * cb
                out[d] = out[d] + p if d in out else p
        out = {d: _clean(c) for d, c in out.items() if c}
        return TruncSeries._raw(self.nvars, order, out)

    def __rmul__(self, c) -> "TruncSeries":
        return self.scale(c)

    def __pow__(self, e: int) -> "TruncSeries":
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = TruncSeries(self.nvars, self.order, {(0,) * self.nvars: 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def map_coefficients(self, fn) -> "TruncSeries":
        return TruncSeries(self.nvars, self.order, {d: fn(c) for d, c in self.coeffs.items()})

    # -- calculus and substitution ----------------------------------------
    def partial(self, var: int) -> "TruncSeries":
        """Formal derivative in variable ``var`` (0=u, 1=v, 2=w)."""
        if isinstance(var, str):
            var = VAR_NAMES.index(var)
        out = {}
        for d, c in self.coeffs.items():
            e = d[var]
            if e:
                out[d[:var] + (e - 1,) + d[var + 1:]] = _clean(c * e)
        return TruncSeries._raw(self.nvars, self.order - 1, out)

    def relabel(self, slots: Sequence[int], nvars: int) -> "TruncSeries":
        """Rename variable ``i`` to target variable ``slots[i]`` in an ``nvars`` ring.

        Two slots may name the same target (the degrees then add).
        """
        out: Dict[Tuple[int, ...], object] = {}
        for d, c in self.coeffs.items():
            nd = [0] * nvars
            for i, e in enumerate(d):
                nd[slots[i]] += e
            nd = tuple(nd)
            out[nd] = out[nd] + c if nd in out else c
        return TruncSeries(nvars, self.order, {d: c for d, c in out.items() if c})

    def substitute(self, images: Sequence["TruncSeries"], box: int | None = None) -> "TruncSeries":
        """Replace variable ``i`` by ``images[i]``; images need a zero constant term.

        With ``box`` set, every intermediate product is projected onto terms whose
        per-variable degrees are <= box.  This is exact for those terms because
        the images have no constant term.
        """
        if len(images) != self.nvars:
            raise ValueError(f"need {self.nvars} images")
        target = images[0].nvars
        for im in images:
            if im.nvars != target:
                raise ValueError("images live in different series rings")
            if im.coefficient(*([0] * target)):
                raise ValueError("inner series must have zero constant term")
        order = min([self.order] + [im.order for im in images])
        powers: Dict[Tuple[int, int], TruncSeries] = {}

        def power(i: int, e: int) -> TruncSeries:
            key = (i, e)
            if key not in powers:
                base = images[i].truncate(order)
                if box is not None:
                    base = base.restrict_box(box)
                powers[key] = base if e == 1 else power(i, e - 1).mul(base, box)
            return powers[key]

        acc = TruncSeries(target, order)
        for d, c in sorted(self.coeffs.items()):
            term = None
            for i, e in enumerate(d):
                if e:
                    term = power(i, e) if term is None else term.mul(power(i, e), box)
            if term is None:
                term = TruncSeries(target, order, {(0,) * target: 1})
            acc = acc + term.scale(c)
        return acc

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """Univariate substitution ``self(inner(u))``."""
        if self.nvars != 1 or inner.nvars != 1:
            raise ValueError("compose is for univariate series; use substitute")
        return self.substitute([inner])

    # -- display / serialization -----------------------------------------
    def __repr__(self) -> str:
        return f"TruncSeries({self.nvars}, order={self.order}, {str(self)!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for d, c in sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(
                VAR_NAMES[i] if e == 1 else f"{VAR_NAMES[i]}^{e}" for i, e in enumerate(d) if e
            )
            cs = f"({c})" if isinstance(c, CoordPoly) else str(c)
            pieces.append(cs if not mono else (mono if cs == "1" else f"{cs}*{mono}"))
        return " + ".join(pieces)

    def to_json(self) -> dict:
        terms = []
        for d, c in sorted(self.coeffs.items()):
            entry = {"deg": list(d)}
            if isinstance(c, CoordPoly):
                entry["poly"] = c.to_json()
            else:
                entry["coef"] = rat_str(c)
            terms.append(entry)
        return {"vars": self.nvars, "Ord": self.order, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncSeries":
        coeffs = {}
        for t in data["terms"]:
            c = CoordPoly.from_json(t["poly"]) if "poly" in t else rat(t["coef"])
            coeffs[tuple(t["deg"])] = c
        return cls(int(data["vars"]), int(data["Ord"]), coeffs)


def series_compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    return outer.compose(inner)


def series_partial(s: TruncSeries, var) -> TruncSeries:
    return s.partial(var)


# ---------------------------------------------------------------------------
# jet groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JetElement:
    """A point x(u) = x_1 u + ... + x_N u^N of G_N, x_1 != 0."""

    x: Tuple[Rational, ...]

    def __post_init__(self):
        coords = tuple(rat(c) for c in self.x)
        if not coords:
            raise ValueError("a jet needs at least one coordinate")
        if not coords[0]:
            raise ValueError("x1 must be nonzero in the jet group")
        object.__setattr__(self, "x", coords)

    @property
    def N(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, N: int) -> "JetElement":
        return cls((1,) + (0,) * (N - 1))

    def to_series(self, order: int | None = None) -> TruncSeries:
        return TruncSeries.univariate((0,) + self.x, self.N if order is None else order)

    @classmethod
    def from_series(cls, s: TruncSeries, N: int | None = None) -> "JetElement":
        N = s.order if N is None else N
        if s.coefficient(0):
            raise ValueError("a jet series has no constant term")
        return cls(tuple(s.coefficient(k) for k in range(1, N + 1)))

    def __matmul__(self, other: "JetElement") -> "JetElement":
        return jet_compose(self, other)

    def inverse(self) -> "JetElement":
        return jet_invert(self)

    def truncate(self, M: int) -> "JetElement":
        return JetElement(self.x[:M])

    def to_json(self) -> dict:
        return {"N": self.N, "x": [rat_str(c) for c in self.x]}

    @classmethod
    def from_json(cls, data: Mapping) -> "JetElement":
        x = tuple(rat(c) for c in data["x"])
        if len(x) != int(data["N"]):
            raise ValueError("coordinate count does not match N")
        return cls(x)


def jet_compose(x: JetElement, y: JetElement) -> JetElement:
    """Group product (xy)(u) = x(y(u)) mod u^{N+1}."""
    if x.N != y.N:
        raise ValueError(f"truncation orders differ: {x.N} vs {y.N}")
    z = x.to_series().compose(y.to_series())
    return JetElement.from_series(z, x.N)


def invert_coefficients(coeffs: Sequence, inv_first) -> List:
    """Coefficients of the compositional inverse of sum_k coeffs[k-1] u^k.

    Back-substitution on [u^k] xbar(x(u)) = delta_{k1}; ``inv_first`` is the
    multiplicative inverse of coeffs[0] in the coefficient ring.  Works for
    rationals and for Laurent coordinate polynomials alike.
    """
    N = len(coeffs)
    xs = TruncSeries.univariate((0,) + tuple(coeffs), N)
    powers = [None, xs]
    for a in range(2, N + 1):
        powers.append(powers[-1] * xs)
    inv_pows = [1]
    for _ in range(N):
        inv_pows.append(inv_pows[-1] * inv_first)
    out = []
    for k in range(1, N + 1):
        rest = 0
        for a in range(1, k):
            rest = rest + out[a - 1] * powers[a].coefficient(k)
        target = (1 if k == 1 else 0) - rest
        out.append(_clean(target * inv_pows[k]))
    return out


def jet_invert(x: JetElement) -> JetElement:
    return JetElement(tuple(invert_coefficients(x.x, Fraction(1) / Fraction(x.x[0]))))


def composition_coordinates(N: int) -> List[CoordPoly]:
    """z_1..z_N of z = xy as polynomials in (x_1..x_N, y_1..y_N).

    z_k = sum_i x_i * [u^k] y(u)^i, i.e. x_i times the sum over ordered
    compositions j_1+...+j_i = k of y_{j_1}...y_{j_i}.
    """
    nv = 2 * N
    laurent = frozenset({0, N})
    xs = [CoordPoly.var(i, nv, laurent=laurent) for i in range(N)]
    ys = [CoordPoly.var(N + i, nv, laurent=laurent) for i in range(N)]
    y_series = TruncSeries.univariate([0] + ys, N)
    z = [CoordPoly.zero(nv, laurent) for _ in range(N)]
    power = y_series
    for i in range(1, N + 1):
        for k in range(i, N + 1):
            c = power.coefficient(k)
            if c:
                z[k - 1] = z[k - 1] + xs[i - 1] * c
        power = power * y_series
    return z


def symbolic_jet(N: int, order: int | None = None, nvars: int | None = None, offset: int = 0) -> TruncSeries:
    """The generic series X(u) = sum X_i u^i with coordinate-function coefficients."""
    nvars = N if nvars is None else nvars
    laurent = frozenset({offset})
    coeffs = [0] + [CoordPoly.var(offset + i, nvars, laurent=laurent) for i in range(N)]
    return TruncSeries.univariate(coeffs, N if order is None else order)


def random_jet(rng, N: int, num_range: int = 5, den_range: int = 4) -> JetElement:
    """Seeded random element of G_N with small rational coordinates."""
    def draw(nonzero=False):
        while True:
            q = Fraction(rng.randint(-num_range, num_range), rng.randint(1, den_range))
            if q or not nonzero:
                return q
    return JetElement(tuple(draw(k == 0) for k in range(N)))
