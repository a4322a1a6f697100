"""Images of additive polynomials over truncated F_p((t)) as windowed
F_p-subspaces: pseudo-directness of sums and optimal approximation.

A subgroup is represented exactly on an exponent window [lo, hi): the
image of an additive polynomial is an F_p-subspace, so windowed linear
algebra is exact within the window and every claim is "modulo value >=
hi".  Echelon bases are ordered by ascending leading exponent, which
makes the greedy elimination step exactly the value-improvement step of
the immediacy criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import PrecisionLossError, ResourceCapError, UsageError
from .series import TowerField, TruncatedSeries
from .values import Value


def frobenius_power(a: TruncatedSeries, p: int, j: int) -> TruncatedSeries:
    """a^(p^j) in characteristic p: exponents scale by p^j, coefficients
    pass through the j-fold Frobenius; exact on the scaled window."""
    q = p**j
    return TruncatedSeries(a.field, a.denom,
                           [(e * q, c ** q) for e, c in a.terms],
                           a.trunc * q)


@dataclass(frozen=True)
class AdditivePoly:
    """sum_j coeffs[j] * X^(p^j) with coefficients in F_p((t))."""

    p: int
    coeffs: Tuple[TruncatedSeries, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise UsageError("additive polynomial needs at least one coefficient")
        for c in self.coeffs:
            if not isinstance(c.field, TowerField) or c.field.p != self.p:
                raise UsageError("coefficients must live over the declared F_p")

    def apply(self, a: TruncatedSeries) -> TruncatedSeries:
        acc = None
        for j, c in enumerate(self.coeffs):
            if c.is_zero_mod_precision():
                continue
            term = c * frobenius_power(a, self.p, j)
            acc = term if acc is None else acc + term
        if acc is None:
            raise UsageError("all coefficients vanish modulo precision")
        return acc


@dataclass(frozen=True)
class TruncatedSubspace:
    """Reduced echelon basis of an F_p-subspace of the coefficient window
    [lo, hi); coordinates are exponents ascending, leading = lowest."""

    p: int
    lo: int
    hi: int
    basis: Tuple[Tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> List[int]:
        return [self.lo + _pivot_pos(row) for row in self.basis]

    def row_series(self, row, field: TowerField) -> TruncatedSeries:
        terms = {Fraction(self.lo + i): int(x) for i, x in enumerate(row) if x}
        return TruncatedSeries(field, 1, terms, Fraction(self.hi))

    def elements(self, limit: int = 1 << 14):
        """Every vector in the span (tests only; capped)."""
        if self.p**self.dim > limit:
            raise ResourceCapError(f"span has {self.p}^{self.dim} elements")
        import itertools

        width = self.hi - self.lo
        for combo in itertools.product(range(self.p), repeat=self.dim):
            vec = [0] * width
            for coeff, row in zip(combo, self.basis):
                if coeff:
                    for i, x in enumerate(row):
                        vec[i] = (vec[i] + coeff * x) % self.p
            yield tuple(vec)


def _pivot_pos(row) -> int:
    for i, x in enumerate(row):
        if x:
            return i
    raise UsageError("zero row in an echelon basis")


def _echelon(rows: Sequence[Sequence[int]], p: int) -> List[List[int]]:
    """Reduced row echelon form over F_p, rows ordered by pivot position."""
    work = [list(r) for r in rows if any(r)]
    out: List[List[int]] = []
    width = len(work[0]) if work else 0
    col = 0
    while work and col < width:
        sel = next((r for r in work if r[col] % p), None)
        if sel is None:
            col += 1
            continue
        work.remove(sel)
        inv = pow(sel[col], -1, p)
        sel = [(x * inv) % p for x in sel]
        work = [[(x - r[col] * y) % p for x, y in zip(r, sel)] if r[col] % p else r
                for r in work]
        work = [r for r in work if any(r)]
        out = [[(x - r[col] * y) % p for x, y in zip(r, sel)] if r[col] % p else r
               for r in out]
        out.append(sel)
        col += 1
    out.sort(key=_pivot_pos)
    return out


def _series_window_vector(a: TruncatedSeries, lo: int, hi: int) -> List[int]:
    if a.denom != 1:
        raise UsageError("windowed subgroups live on the integer grid")
    if a.trunc < hi:
        raise PrecisionLossError(
            f"series known to O(t^{a.trunc}) cannot fill the window up to {hi}")
    vec = [0] * (hi - lo)
    for e, c in a.terms:
        if e < lo:
            raise UsageError(f"series has a term below the window: t^{e}")
        if e >= hi:
            continue
        vec[int(e) - lo] = _coeff_int(c)
    return vec


def _coeff_int(c) -> int:
    if c.level != 1:
        raise UsageError("windowed computations need prime-field coefficients")
    return c.coeffs[0] if c.coeffs else 0


def subspace_from_series(elems: Sequence[TruncatedSeries], lo: int, hi: int,
                         p: int) -> TruncatedSubspace:
    rows = [_series_window_vector(a, lo, hi) for a in elems]
    basis = _echelon(rows, p) if rows else []
    return TruncatedSubspace(p, lo, hi, tuple(tuple(r) for r in basis))


def image_window(f: AdditivePoly, window: Tuple[int, int], *,
                 input_slack: Optional[int] = None,
                 cell_bound: int = 200_000) -> TruncatedSubspace:
    """The F_p-span of f over inputs whose images can meet the window,
    reduced to the window [lo, hi).

    Generators are the images of the unit monomials t^g; g runs from
    lo - slack up to the first exponent whose image lies entirely above
    the window (image valuations are monotone in g).  Combinations whose
    leading terms cancel below lo are handled by echelonizing over an
    extended exponent range before restricting.
    """
    lo, hi = window
    if hi <= lo:
        raise UsageError("empty window")
    p = f.p
    J = len(f.coeffs) - 1
    vals = []
    for j, c in enumerate(f.coeffs):
        if not c.is_zero_mod_precision():
            vals.append((j, c.value().amount))
    if not vals:
        raise UsageError("zero additive polynomial")

    def image_value(g: int) -> Fraction:
        return min(vc + g * p**j for j, vc in vals)

    slack = input_slack if input_slack is not None else 2 * (hi - lo) + p**J
    g_lo = lo - slack
    g = g_lo
    gens = []
    while image_value(g) < hi:
        gens.append(g)
        g += 1
    if not gens:
        return TruncatedSubspace(p, lo, hi, ())
    floor = int(min(image_value(g) for g in gens))
    if (hi - floor) * len(gens) > cell_bound:
        raise ResourceCapError(
            f"window too large: {len(gens)} generators over {hi - floor} exponents")

    field = f.coeffs[0].field
    rows = []
    for g in gens:
        unit = TruncatedSeries(field, 1, {Fraction(g): 1},
                               max(Fraction(hi), Fraction(g) + 1))
        img = f.apply(unit)
        if img.trunc < hi:
            raise PrecisionLossError(
                f"coefficients too short: image of t^{g} known to O(t^{img.trunc})")
        vec = [0] * (hi - floor)
        for e, c in img.terms:
            if floor <= e < hi:
                vec[int(e) - floor] = _coeff_int(c)
        rows.append(vec)
    ech = _echelon(rows, p)
    kept = [row[lo - floor:] for row in ech if _pivot_pos(row) >= lo - floor]
    return TruncatedSubspace(p, lo, hi, tuple(tuple(r) for r in kept))


@dataclass(frozen=True)
class PseudoDirectReport:
    ok: bool
    witness: Optional[Tuple[int, ...]] = None
    witness_value: Optional[int] = None

    def __bool__(self):
        return self.ok


def _union_span(subspaces: Sequence[TruncatedSubspace]) -> TruncatedSubspace:
    first = subspaces[0]
    for s in subspaces[1:]:
        if (s.lo, s.hi, s.p) != (first.lo, first.hi, first.p):
            raise UsageError("subspaces live on different windows")
    rows = [row for s in subspaces for row in s.basis]
    basis = _echelon(rows, first.p) if rows else []
    return TruncatedSubspace(first.p, first.lo, first.hi,
                             tuple(tuple(r) for r in basis))


def pseudo_direct_check(subspaces: Sequence[TruncatedSubspace],
                        window: Tuple[int, int]) -> PseudoDirectReport:
    """Windowed pseudo-directness: every valuation attained by the sum
    must be attained by a combination whose summands all have at least
    that valuation (no leading-value cancellation is ever needed).

    Decided by leading-exponent matching: for each pivot alpha of the sum
    span, the span of the basis rows of value >= alpha from each summand
    must itself attain alpha."""
    subspaces = list(subspaces)
    if not subspaces:
        raise UsageError("no subspaces given")
    lo, hi = window
    total = _union_span(subspaces)
    p = total.p
    for row in total.basis:
        alpha = lo + _pivot_pos(row)
        high_rows = [r for s in subspaces for r in s.basis
                     if s.lo + _pivot_pos(r) >= alpha]
        ok_here = False
        if high_rows:
            ech = _echelon(high_rows, p)
            ok_here = any(lo + _pivot_pos(r) == alpha for r in ech)
        if not ok_here:
            return PseudoDirectReport(False, witness=tuple(row),
                                      witness_value=alpha)
    return PseudoDirectReport(True)


@dataclass(frozen=True)
class ApproxResult:
    best: Tuple[int, ...]
    achieved: Value
    at_window_top: bool
    pseudo_direct: bool


def optimal_approx(a_prime: TruncatedSeries,
                   subspaces: Sequence[TruncatedSubspace],
                   window: Tuple[int, int]) -> ApproxResult:
    """Best approximation of a' from the windowed sum by greedy
    leading-term elimination over the echelon basis.

    When the windowed sum is pseudo-direct the greedy answer attains the
    maximum of v(a' - z); otherwise the result is best-effort and flagged.
    """
    lo, hi = window
    total = _union_span(list(subspaces))
    p = total.p
    flag = pseudo_direct_check(subspaces, window).ok
    r = _series_window_vector(a_prime, lo, hi)
    width = hi - lo
    best = [0] * width
    rows_by_pivot = {_pivot_pos(row): row for row in total.basis}
    achieved = None
    for pos in range(width):
        if r[pos] % p == 0:
            continue
        row = rows_by_pivot.get(pos)
        if row is None:
            achieved = Value(Fraction(lo + pos))
            break
        coeff = r[pos] % p
        r = [(x - coeff * y) % p for x, y in zip(r, row)]
        best = [(x + coeff * y) % p for x, y in zip(best, row)]
    at_top = achieved is None
    if at_top:
        achieved = Value(Fraction(hi))
    return ApproxResult(tuple(best), achieved, at_top, flag)
