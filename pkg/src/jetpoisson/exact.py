"""Exact rationals and sparse Laurent-in-x1 coordinate polynomials.

Coefficients are Python ``int`` or ``fractions.Fraction``; a Fraction with
denominator one is always stored as an ``int`` so that the common integer
case stays on the fast path.  Exponent vectors are tuples of length ``nvars``.
Negative exponents are only legal in the *Laurent positions* of a polynomial,
which default to ``{0}`` (the coordinate x1 of a jet group).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Rational = Union[int, Fraction]
Monomial = Tuple[int, ...]

DEFAULT_LAURENT = frozenset({0})


def rat(value) -> Rational:
    """Coerce ``value`` (int, Fraction, or "p/q" string) to a canonical rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; pass 'p/q' strings")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rat_str(value: Rational) -> str:
    """Canonical "p/q" string; integers are written with denominator 1."""
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def _norm(c: Rational) -> Rational:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class CoordPoly:
    """Immutable sparse polynomial in x_1..x_N over the rationals.

    >>> x1, x2 = CoordPoly.var(0, 2), CoordPoly.var(1, 2)
    >>> str((x1 + x2) ** 2)
    'x1^2 + 2*x1*x2 + x2^2'
    """

    __slots__ = ("nvars", "terms", "laurent", "_hash")

    def __init__(
        self,
        nvars: int,
        terms: Mapping[Monomial, Rational] | None = None,
        laurent: Iterable[int] = DEFAULT_LAURENT,
        *,
        _trusted: bool = False,
    ):
        self.nvars = nvars
        self.laurent = laurent if isinstance(laurent, frozenset) else frozenset(laurent)
        if _trusted:
            self.terms = terms
        else:
            clean: Dict[Monomial, Rational] = {}
            for mono, c in (terms or {}).items():
                mono = tuple(mono)
                if len(mono) != nvars:
                    raise ValueError(f"exponent vector {mono} does not have length {nvars}")
                for pos, e in enumerate(mono):
                    if e < 0 and pos not in self.laurent:
                        raise ValueError(f"negative exponent in non-Laurent position {pos + 1}")
                c = rat(c)
                if c:
                    clean[mono] = _norm(clean.get(mono, 0) + c)
                    if not clean[mono]:
                        del clean[mono]
            self.terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, laurent=DEFAULT_LAURENT) -> "CoordPoly":
        return cls(nvars, {}, laurent, _trusted=True)

    @classmethod
    def const(cls, c, nvars: int, laurent=DEFAULT_LAURENT) -> "CoordPoly":
        c = rat(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, laurent, _trusted=True)

    @classmethod
    def var(cls, i: int, nvars: int, power: int = 1, laurent=DEFAULT_LAURENT) -> "CoordPoly":
        """The monomial x_{i+1}**power (``i`` is 0-based)."""
        mono = [0] * nvars
        mono[i] = power
        return cls(nvars, {tuple(mono): 1}, laurent)

    @classmethod
    def monomial(cls, mono: Sequence[int], coef=1, laurent=DEFAULT_LAURENT) -> "CoordPoly":
        return cls(len(mono), {tuple(mono): coef}, laurent)

    # -- basic protocol -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, CoordPoly):
            return self.terms == other.terms and (
                self.nvars == other.nvars or not self.terms
            )
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.terms
            return self.terms == {(0,) * self.nvars: other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def _coerce(self, other) -> "CoordPoly":
        if isinstance(other, CoordPoly):
            if other.nvars == self.nvars:
                return other
            if other.nvars < self.nvars:
                return other.extend(self.nvars)
            raise ValueError("left operand has fewer variables; extend it explicitly")
        return CoordPoly.const(other, self.nvars, self.laurent)

    def extend(self, nvars: int) -> "CoordPoly":
        """Zero-extend to ``nvars`` variables (new variables appended)."""
        if nvars < self.nvars:
            raise ValueError("cannot shrink the variable count")
        pad = (0,) * (nvars - self.nvars)
        return CoordPoly(nvars, {m + pad: c for m, c in self.terms.items()}, self.laurent, _trusted=True)

    def embed(self, nvars: int, offset: int) -> "CoordPoly":
        """Place the variables at positions offset..offset+N-1 of a larger ring."""
        if offset + self.nvars > nvars:
            raise ValueError("embedding does not fit")
        pre, post = (0,) * offset, (0,) * (nvars - offset - self.nvars)
        terms = {pre + m + post: c for m, c in self.terms.items()}
        laurent = frozenset(p + offset for p in self.laurent)
        return CoordPoly(nvars, terms, laurent, _trusted=True)

    def with_laurent(self, laurent: Iterable[int]) -> "CoordPoly":
        return CoordPoly(self.nvars, self.terms, laurent)

    # -- arithmetic -----------------------------------------------------------
    def __neg__(self) -> "CoordPoly":
        return CoordPoly(self.nvars, {m: -c for m, c in self.terms.items()}, self.laurent, _trusted=True)

    def __add__(self, other) -> "CoordPoly":
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return CoordPoly(self.nvars, out, self.laurent | other.laurent, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other) -> "CoordPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "CoordPoly":
        return (-self) + other

    def scale(self, c) -> "CoordPoly":
        c = rat(c)
        if not c:
            return CoordPoly.zero(self.nvars, self.laurent)
        return CoordPoly(self.nvars, {m: _norm(v * c) for m, v in self.terms.items()}, self.laurent, _trusted=True)

    def __mul__(self, other) -> "CoordPoly":
        if not isinstance(other, CoordPoly):
            return self.scale(other)
        other = self._coerce(other)
        out: Dict[Monomial, Rational] = {}
        get = out.get
        b_items = list(other.terms.items())
        for ma, ca in self.terms.items():
            for mb, cb in b_items:
                m = tuple([x + y for x, y in zip(ma, mb)])
                out[m] = get(m, 0) + ca * cb
        out = {m: _norm(c) for m, c in out.items() if c}
        return CoordPoly(self.nvars, out, self.laurent | other.laurent, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CoordPoly":
        if e < 0:
            return self.inverse() ** (-e)
        result = CoordPoly.const(1, self.nvars, self.laurent)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_unit(self) -> bool:
        """True for a nonzero monomial supported on Laurent positions only."""
        if len(self.terms) != 1:
            return False
        (mono,) = self.terms
        return all(e == 0 or pos in self.laurent for pos, e in enumerate(mono))

    def inverse(self) -> "CoordPoly":
        if not self.is_unit():
            raise ZeroDivisionError("only monomials in Laurent variables are invertible")
        ((mono, c),) = self.terms.items()
        return CoordPoly(self.nvars, {tuple(-e for e in mono): _norm(Fraction(1) / c)}, self.laurent, _trusted=True)

    # -- calculus and evaluation ------------------------------------------
    def partial(self, i: int) -> "CoordPoly":
        """Formal derivative with respect to x_{i+1} (0-based ``i``)."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                nm = m[:i] + (e - 1,) + m[i + 1:]
                out[nm] = _norm(c * e)
        return CoordPoly(self.nvars, out, self.laurent, _trusted=True)

    def evaluate(self, point: Sequence) -> Rational:
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        pt = [rat(p) for p in point]
        total: Rational = 0
        cache: Dict[Tuple[int, int], Rational] = {}
        for m, c in self.terms.items():
            t = c
            for pos, e in enumerate(m):
                if e:
                    key = (pos, e)
                    v = cache.get(key)
                    if v is None:
                        if e < 0:
                            if not pt[pos]:
                                raise ZeroDivisionError(f"x{pos + 1} = 0 meets a negative exponent")
                            v = Fraction(1) / Fraction(pt[pos]) ** (-e)
                        else:
                            v = pt[pos] ** e
                        cache[key] = v
                    t = t * v
            total += t
        return _norm(total) if isinstance(total, Fraction) else total

    def substitute(self, images: Sequence["CoordPoly"]) -> "CoordPoly":
        """Replace x_k by ``images[k]``; all images must share one target ring."""
        if len(images) != self.nvars:
            raise ValueError(f"need {self.nvars} images, got {len(images)}")
        target = images[0].nvars if images else 0
        laurent = frozenset().union(*(im.laurent for im in images)) if images else DEFAULT_LAURENT
        images = [im.extend(target) if im.nvars < target else im for im in images]
        if any(im.nvars != target for im in images):
            raise ValueError("images live in different rings")
        powers: Dict[Tuple[int, int], CoordPoly] = {}

        def power(k: int, e: int) -> CoordPoly:
            key = (k, e)
            if key not in powers:
                if e < 0:
                    if not images[k].is_unit():
                        raise ZeroDivisionError(f"image of x{k + 1} is not invertible")
                    powers[key] = images[k].inverse() ** (-e)
                elif e == 1:
                    powers[key] = images[k]
                else:
                    half = power(k, e // 2)
                    p = half * half
                    powers[key] = p * images[k] if e % 2 else p
            return powers[key]

        acc: Dict[Monomial, Rational] = {}
        for m, c in sorted(self.terms.items()):
            t = None
            for k, e in enumerate(m):
                if e:
                    t = power(k, e) if t is None else t * power(k, e)
            if t is None:
                mono = (0,) * target
                acc[mono] = acc.get(mono, 0) + c
                continue
            for tm, tc in t.terms.items():
                acc[tm] = acc.get(tm, 0) + c * tc
        return CoordPoly(target, {m: _norm(v) for m, v in acc.items() if v}, laurent, _trusted=True)

    # -- inspection -----------------------------------------------------------
    def variables(self) -> set:
        """0-based indices of the variables that actually occur."""
        return {pos for m in self.terms for pos, e in enumerate(m) if e}

    def is_polynomial(self) -> bool:
        return all(e >= 0 for m in self.terms for e in m)

    def max_variable(self) -> int:
        """Largest 1-based variable index occurring, 0 for constants."""
        used = self.variables()
        return max(used) + 1 if used else 0

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def weight(self, mono: Monomial) -> int:
        return sum((i + 1) * e for i, e in enumerate(mono))

    def sorted_terms(self):
        """Terms in graded-lex order, weight wt(x_i) = i, heaviest first."""
        return sorted(self.terms.items(), key=lambda t: (self.weight(t[0]), t[0]), reverse=True)

    def __repr__(self) -> str:
        return f"CoordPoly({self.nvars}, {str(self)!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for m, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            factors = []
            for pos, e in enumerate(m):
                if e == 1:
                    factors.append(f"x{pos + 1}")
                elif e:
                    factors.append(f"x{pos + 1}^{e}")
            body = "*".join(factors)
            if not body:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(body)
            elif c == -1:
                pieces.append("-" + body)
            else:
                pieces.append(f"{c}*{body}")
        return " + ".join(pieces).replace("+ -", "- ")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        data = {
            "N": self.nvars,
            "terms": [{"exp": list(m), "coef": rat_str(c)} for m, c in sorted(self.terms.items())],
        }
        if self.laurent != DEFAULT_LAURENT:
            data["laurent"] = sorted(self.laurent)
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "CoordPoly":
        laurent = frozenset(data.get("laurent", DEFAULT_LAURENT))
        terms: Dict[Monomial, Rational] = {}
        for t in data["terms"]:
            mono = tuple(int(e) for e in t["exp"])
            if mono in terms:
                raise ValueError(f"duplicate exponent vector {mono}")
            terms[mono] = rat(t["coef"])
        return cls(int(data["N"]), terms, laurent)


# thin functional aliases matching the operation names used across the package
def poly_add(a: CoordPoly, b: CoordPoly) -> CoordPoly:
    if a.nvars < b.nvars:
        a = a.extend(b.nvars)
    return a + b


def poly_mul(a: CoordPoly, b: CoordPoly) -> CoordPoly:
    if a.nvars < b.nvars:
        a = a.extend(b.nvars)
    return a * b


def poly_partial(p: CoordPoly, i: int) -> CoordPoly:
    """Partial derivative with respect to x_i, **1-based** ``i``."""
    return p.partial(i - 1)


def poly_eval(p: CoordPoly, point: Sequence) -> Rational:
    return p.evaluate(point)


def poly_substitute(p: CoordPoly, images: Sequence[CoordPoly]) -> CoordPoly:
    return p.substitute(images)


def variables(n: int, laurent=DEFAULT_LAURENT):
    """The coordinate polynomials x_1..x_n."""
    return [CoordPoly.var(i, n, laurent=laurent) for i in range(n)]
