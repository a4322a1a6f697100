"""Truncated power series over pluggable coefficient fields.

A series holds finitely many (exponent, coefficient) pairs on the grid
(1/d)Z below a truncation order N; terms at or beyond N are unknown.
Every operation propagates the tightest truncation order that is fully
determined by its inputs, so valuations read off stored data are never
silently wrong.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Tuple, Union

from .errors import ParseError, PrecisionLossError, UsageError
from .fftower import FFTower, FFTowerElem, tower
from .values import Value


class RationalField:
    """Coefficient field tag for exact rationals."""

    name = "q"
    char = 0

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise UsageError(f"cannot coerce {x!r} into the rationals")

    def owns(self, x) -> bool:
        return isinstance(x, (int, Fraction))

    def is_zero(self, c) -> bool:
        return c == 0

    def show(self, c) -> str:
        return str(Fraction(c))

    def parse(self, text: str):
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational coefficient {text!r}") from exc

    def random(self, rng):
        return Fraction(rng.randrange(-9, 10), rng.randrange(1, 7))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("RationalField")

    def __repr__(self):
        return "QQ"


class TowerField:
    """Coefficient field tag for the F_p tower (desk-scale F_p^alg)."""

    def __init__(self, p: int, tower_: FFTower | None = None):
        self.p = p
        self.tower = tower_ or tower(p)
        self.name = f"f{p}"
        self.char = p

    @property
    def zero(self):
        return self.tower.zero()

    @property
    def one(self):
        return self.tower.one()

    def coerce(self, x):
        if isinstance(x, FFTowerElem):
            if x.p != self.p:
                raise UsageError("tower coefficient over the wrong prime")
            return x
        if isinstance(x, int):
            return self.tower.from_int(x)
        if isinstance(x, Fraction):
            num = self.tower.from_int(x.numerator)
            den = self.tower.from_int(x.denominator)
            return num / den
        raise UsageError(f"cannot coerce {x!r} into F_{self.p} tower")

    def owns(self, x) -> bool:
        return isinstance(x, (FFTowerElem, int, Fraction))

    def is_zero(self, c) -> bool:
        return self.coerce(c).is_zero()

    def show(self, c) -> str:
        c = self.coerce(c)
        body = ",".join(str(d) for d in c.coeffs)
        return f"({body})@{self.p}^{c.level}"

    def parse(self, text: str):
        text = text.strip()
        m = re.fullmatch(r"\(([\d,]*)\)@(\d+)\^(\d+)", text)
        if m:
            digits = [int(d) for d in m.group(1).split(",") if d != ""]
            p, lvl = int(m.group(2)), int(m.group(3))
            if p != self.p:
                raise ParseError(f"coefficient is over p={p}, ground over p={self.p}")
            return self.tower.elem(lvl, digits)
        try:
            return self.tower.from_int(int(text))
        except ValueError as exc:
            raise ParseError(f"bad tower coefficient {text!r}") from exc

    def random(self, rng, level: int = 1):
        return self.tower.random(rng, level)

    def __eq__(self, other):
        return isinstance(other, TowerField) and other.p == self.p

    def __hash__(self):
        return hash(("TowerField", self.p))

    def __repr__(self):
        return f"GF({self.p})~"


FieldTag = Union[RationalField, TowerField]


def field_by_name(name: str) -> FieldTag:
    name = name.lower()
    if name in ("q", "qq", "rational"):
        return RationalField()
    m = re.fullmatch(r"f(\d+)", name)
    if m:
        return TowerField(int(m.group(1)))
    raise ParseError(f"unknown coefficient field {name!r}")


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TruncatedSeries:
    """Finitely supported exponent -> coefficient map below a truncation order."""

    __slots__ = ("field", "denom", "terms", "trunc")

    def __init__(self, field: FieldTag, denom: int,
                 terms: Union[Mapping, Iterable[Tuple]], trunc):
        trunc = _frac(trunc)
        if denom < 1:
            raise UsageError("grid denominator must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc = {}
        for e, c in items:
            e = _frac(e)
            if (e * denom).denominator != 1:
                raise UsageError(f"exponent {e} is not on the grid (1/{denom})Z")
            c = field.coerce(c)
            if e in acc:
                c = acc[e] + c
            acc[e] = c
        clean = tuple(sorted(
            (e, c) for e, c in acc.items()
            if e < trunc and not field.is_zero(c)
        ))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "denom", denom)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, *a):
        raise AttributeError("TruncatedSeries is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(field: FieldTag, denom: int, trunc) -> "TruncatedSeries":
        return TruncatedSeries(field, denom, {}, trunc)

    @staticmethod
    def monomial(field: FieldTag, denom: int, exp, coeff=1, trunc=None) -> "TruncatedSeries":
        exp = _frac(exp)
        if trunc is None:
            raise UsageError("monomial needs an explicit truncation order")
        return TruncatedSeries(field, denom, {exp: coeff}, trunc)

    def zero_like(self) -> "TruncatedSeries":
        return TruncatedSeries.zero(self.field, self.denom, self.trunc)

    def one_like(self) -> "TruncatedSeries":
        return TruncatedSeries(self.field, self.denom, {Fraction(0): self.field.one}, self.trunc)

    def from_int(self, n: int) -> "TruncatedSeries":
        return TruncatedSeries(self.field, self.denom, {Fraction(0): n}, self.trunc)

    # -- inspection ---------------------------------------------------

    def is_zero_mod_precision(self) -> bool:
        return not self.terms

    def value(self) -> Value:
        """Least stored exponent; the truncation order when no term is
        stored (read: the valuation is at least this)."""
        if self.terms:
            return Value(self.terms[0][0])
        return Value(self.trunc)

    def precision_cap(self) -> Value:
        return Value(self.trunc)

    def grid_step(self) -> Fraction:
        return Fraction(1, self.denom)

    def coeff_at(self, e) -> object:
        e = _frac(e)
        if e >= self.trunc:
            raise PrecisionLossError(f"coefficient at t^{e} is beyond O(t^{self.trunc})")
        for ee, c in self.terms:
            if ee == e:
                return c
        return self.field.zero

    def support(self):
        return tuple(e for e, _ in self.terms)

    def leading(self):
        if not self.terms:
            raise PrecisionLossError("leading term of a series that vanishes modulo precision")
        return self.terms[0]

    # -- arithmetic ---------------------------------------------------

    def _check_field(self, other: "TruncatedSeries"):
        if self.field != other.field:
            raise UsageError("series over different coefficient fields")

    def _coerce_operand(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        if self.field.owns(other) or isinstance(other, (int, Fraction)):
            return TruncatedSeries(self.field, self.denom,
                                   {Fraction(0): self.field.coerce(other)}, self.trunc)
        return None

    def __add__(self, other):
        other = self._coerce_operand(other)
        if other is None:
            return NotImplemented
        self._check_field(other)
        denom = _lcm(self.denom, other.denom)
        trunc = min(self.trunc, other.trunc)
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc[e] + c if e in acc else c
        return TruncatedSeries(self.field, denom, acc, trunc)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.field, self.denom,
                               [(e, -c) for e, c in self.terms], self.trunc)

    def __sub__(self, other):
        other = self._coerce_operand(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            if isinstance(other, int) or self.field.owns(other):
                c = self.field.coerce(other)
                if self.field.is_zero(c):
                    return self.zero_like()
                return TruncatedSeries(self.field, self.denom,
                                       [(e, cc * c) for e, cc in self.terms], self.trunc)
            return NotImplemented
        self._check_field(other)
        denom = _lcm(self.denom, other.denom)
        bounds = [self.trunc + other.trunc]
        if self.terms:
            bounds.append(self.terms[0][0] + other.trunc)
        if other.terms:
            bounds.append(other.terms[0][0] + self.trunc)
        trunc = min(bounds)
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e >= trunc:
                    continue
                c = c1 * c2
                acc[e] = acc[e] + c if e in acc else c
        return TruncatedSeries(self.field, denom, acc, trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("series powers take non-negative integer exponents")
        out = self.one_like()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            if isinstance(other, int) or self.field.owns(other):
                c = self.field.coerce(other)
                if self.field.is_zero(c):
                    raise ZeroDivisionError("division by zero coefficient")
                inv = Fraction(1, 1) / c if isinstance(c, Fraction) else c.inverse()
                return self * inv
            return NotImplemented
        self._check_field(other)
        if other.is_zero_mod_precision():
            raise PrecisionLossError("division by a series that vanishes modulo precision")
        vb, lead_b = other.terms[0]
        va = self.terms[0][0] if self.terms else self.trunc
        trunc = min(self.trunc - vb, va + other.trunc - 2 * vb)
        denom = _lcm(self.denom, other.denom)
        rem = self
        q = {}
        while rem.terms and rem.terms[0][0] - vb < trunc:
            e_r, c_r = rem.terms[0]
            qe = e_r - vb
            qc = c_r / lead_b if isinstance(c_r, Fraction) else c_r * lead_b.inverse()
            q[qe] = qc
            piece = TruncatedSeries(self.field, denom, {qe: qc}, trunc)
            rem = rem - piece * other
        return TruncatedSeries(self.field, denom, q, trunc)

    # -- structural maps ----------------------------------------------

    def shift(self, alpha) -> "TruncatedSeries":
        """Exact multiplication by the unit monomial t^alpha."""
        alpha = _frac(alpha)
        return TruncatedSeries(self.field, self.denom,
                               [(e + alpha, c) for e, c in self.terms],
                               self.trunc + alpha)

    def truncate(self, order) -> "TruncatedSeries":
        order = min(_frac(order), self.trunc)
        return TruncatedSeries(self.field, self.denom, self.terms, order)

    def widen(self, order) -> "TruncatedSeries":
        """Reinterpret stored terms at a higher truncation order.

        Only sound when the caller knows the element exactly (e.g. it was
        built from exact text or integers)."""
        order = _frac(order)
        if order < self.trunc:
            return self.truncate(order)
        return TruncatedSeries(self.field, self.denom, self.terms, order)

    def map_coeffs(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(self.field, self.denom,
                               [(e, fn(c)) for e, c in self.terms], self.trunc)

    def differentiate(self) -> "TruncatedSeries":
        """Formal d/dt: t^g -> g * t^(g-1)."""
        return TruncatedSeries(self.field, self.denom,
                               [(e - 1, self.field.coerce(e) * c) for e, c in self.terms
                                if not self.field.is_zero(self.field.coerce(e))],
                               self.trunc - 1)

    # -- comparison ---------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._coerce_operand(other)
            if other is None:
                return NotImplemented
        return (self.field == other.field and self.terms == other.terms
                and self.trunc == other.trunc)

    def __hash__(self):
        return hash((self.field, self.terms, self.trunc))

    def __repr__(self):
        return f"TruncatedSeries({format_series(self)!r})"

    def __str__(self):
        return format_series(self)


def _lcm(a: int, b: int) -> int:
    import math

    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# text serialization: "c*t^(e) + ... + O(t^(N))"


def format_series(a: TruncatedSeries) -> str:
    parts = [f"{a.field.show(c)}*t^({e})" for e, c in a.terms]
    parts.append(f"O(t^({a.trunc}))")
    return " + ".join(parts)


_TERM_RE = re.compile(r"^(?P<coeff>.+?)\*t\^\((?P<exp>-?\d+(?:/\d+)?)\)$")
_BIGO_RE = re.compile(r"^O\(t\^\((?P<ord>-?\d+(?:/\d+)?)\)\)$")


def parse_series(text: str, field: FieldTag, denom: int | None = None) -> TruncatedSeries:
    """Parse the ``format_series`` grammar; inverse of it bit for bit."""
    chunks = [c.strip() for c in text.split(" + ")]
    if not chunks:
        raise ParseError("empty series text")
    trunc = None
    terms = []
    for chunk in chunks:
        m = _BIGO_RE.match(chunk)
        if m:
            if trunc is not None:
                raise ParseError("two O(...) markers in one series")
            trunc = Fraction(m.group("ord"))
            continue
        m = _TERM_RE.match(chunk)
        if not m:
            raise ParseError(f"bad series term {chunk!r}")
        terms.append((Fraction(m.group("exp")), field.parse(m.group("coeff"))))
    if trunc is None:
        raise ParseError("series text lacks the O(t^(N)) marker")
    if denom is None:
        denom = 1
        for e, _ in terms:
            denom = _lcm(denom, e.denominator)
        denom = _lcm(denom, trunc.denominator)
    return TruncatedSeries(field, denom, terms, trunc)


def random_series(field: FieldTag, denom: int, trunc, rng, *,
                  min_exp=0, max_terms=6) -> TruncatedSeries:
    trunc = _frac(trunc)
    lo = int(_frac(min_exp) * denom)
    hi = int(trunc * denom)
    if hi <= lo:
        return TruncatedSeries.zero(field, denom, trunc)
    terms = {}
    for _ in range(rng.randrange(0, max_terms + 1)):
        e = Fraction(rng.randrange(lo, hi), denom)
        terms[e] = field.random(rng)
    return TruncatedSeries(field, denom, terms, trunc)


# ---------------------------------------------------------------------------
# weak coefficient map (monomial section alpha -> t^alpha, so the
# coefficient of the leading term represents the residue)


class WeakCoeffMap:
    """Leading-coefficient map built from the unit monomial section."""

    def __init__(self, prototype: TruncatedSeries):
        self.prototype = prototype
        self.field = prototype.field

    def monomial(self, alpha, trunc=None) -> TruncatedSeries:
        trunc = self.prototype.trunc + _frac(alpha) if trunc is None else _frac(trunc)
        return TruncatedSeries(self.field, self.prototype.denom,
                               {_frac(alpha): self.field.one}, trunc)

    def co(self, a: TruncatedSeries):
        """co a: the residue of t^(-va) * a; zero when a vanishes modulo
        precision (flag via a.is_zero_mod_precision())."""
        if a.is_zero_mod_precision():
            return self.field.zero
        return a.terms[0][1]

    def lift(self, coeff_bar, alpha, trunc) -> TruncatedSeries:
        """(WCM4): an element with co = coeff_bar and value alpha."""
        if self.field.is_zero(self.field.coerce(coeff_bar)):
            raise UsageError("cannot lift the zero residue to a prescribed value")
        return TruncatedSeries(self.field, self.prototype.denom,
                               {_frac(alpha): coeff_bar}, _frac(trunc))

    def shift_down(self, a: TruncatedSeries, alpha) -> TruncatedSeries:
        """Exact multiplication by m_{-alpha} = t^(-alpha)."""
        return a.shift(-_frac(alpha))


def weak_coeff(a: TruncatedSeries, with_flag: bool = False):
    """Leading coefficient of a series; 0 (with flag True) when the series
    vanishes modulo precision."""
    flagged = a.is_zero_mod_precision()
    c = a.field.zero if flagged else a.terms[0][1]
    return (c, flagged) if with_flag else c
