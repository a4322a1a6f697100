"""Exact multivariate polynomials and Hasse (formal) derivatives.

Coefficients may be plain integers, Fractions, or ground-ring elements;
evaluation and derivative extraction stay exact in whatever precision
discipline the coefficients carry.  The Hasse derivative f^[i] realizes
the characteristic-free Taylor expansion

    f(b + eps) = f(b) + sum_i f^[i](b) * eps^i .
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Mapping, Sequence, Tuple

from .errors import ParseError, UsageError

MultiIndex = Tuple[int, ...]


def index_norm(i: MultiIndex) -> int:
    return sum(i)


def unit_index(nvars: int, j: int) -> MultiIndex:
    if not 0 <= j < nvars:
        raise UsageError(f"variable index {j} out of range for {nvars} variables")
    return tuple(1 if k == j else 0 for k in range(nvars))


class MultiPoly:
    """Sparse multivariate polynomial: multi-index -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[MultiIndex, object]):
        if nvars < 0:
            raise UsageError("negative variable count")
        clean = {}
        for idx, c in terms.items():
            idx = tuple(int(k) for k in idx)
            if len(idx) != nvars or any(k < 0 for k in idx):
                raise UsageError(f"bad multi-index {idx} for {nvars} variables")
            if _coeff_is_zero(c):
                continue
            clean[idx] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def variable(nvars: int, j: int, coeff=1) -> "MultiPoly":
        return MultiPoly(nvars, {unit_index(nvars, j): coeff})

    @staticmethod
    def constant(nvars: int, c) -> "MultiPoly":
        return MultiPoly(nvars, {tuple([0] * nvars): c})

    # -- inspection -------------------------------------------------------

    def degree(self) -> int:
        return max((index_norm(i) for i in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items())

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other)
        if other.nvars != self.nvars:
            raise UsageError("polynomials in different variable counts")
        acc = dict(self.terms)
        for i, c in other.terms.items():
            acc[i] = acc[i] + c if i in acc else c
        return MultiPoly(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            acc = {i: c * other for i, c in self.terms.items()}
            return MultiPoly(self.nvars, acc)
        if other.nvars != self.nvars:
            raise UsageError("polynomials in different variable counts")
        acc = {}
        for i1, c1 in self.terms.items():
            for i2, c2 in other.terms.items():
                i = tuple(a + b for a, b in zip(i1, i2))
                c = c1 * c2
                acc[i] = acc[i] + c if i in acc else c
        return MultiPoly(self.nvars, acc)

    def __rmul__(self, other):
        return MultiPoly(self.nvars, {i: other * c for i, c in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, MultiPoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items(), key=lambda t: t[0]))))

    # -- evaluation ----------------------------------------------------

    def eval(self, point: Sequence):
        point = list(point)
        if len(point) != self.nvars:
            raise UsageError(f"expected {self.nvars} coordinates, got {len(point)}")
        if not point:
            acc = 0
            for _, c in self.sorted_terms():
                acc = acc + c
            return acc
        acc = None
        for idx, c in self.sorted_terms():
            term = c
            for x, k in zip(point, idx):
                if k:
                    term = term * x**k
            acc = term if acc is None else acc + term
        if acc is None:
            return _zero_like(point[0])
        if not isinstance(acc, type(point[0])) and hasattr(point[0], "zero_like"):
            acc = point[0].zero_like() + acc
        return acc

    def substitute(self, assignments: Mapping[int, object]) -> "MultiPoly":
        """Clamp some variables to ground values, keeping the rest symbolic.

        Variable indices are renumbered in increasing order of the
        surviving variables."""
        keep = [j for j in range(self.nvars) if j not in assignments]
        acc: dict = {}
        for idx, c in self.sorted_terms():
            coeff = c
            for j, val in assignments.items():
                k = idx[j]
                if k:
                    coeff = coeff * val**k
            new_idx = tuple(idx[j] for j in keep)
            acc[new_idx] = acc[new_idx] + coeff if new_idx in acc else coeff
        return MultiPoly(len(keep), acc)

    # -- Hasse derivatives ----------------------------------------------

    def hasse(self, i: MultiIndex) -> "MultiPoly":
        """The i-th formal derivative f^[i]; binomial weights are taken in
        the coefficient ring, so this is correct in any characteristic."""
        i = tuple(int(x) for x in i)
        if len(i) != self.nvars:
            raise UsageError("multi-index arity mismatch")
        acc = {}
        for idx, c in self.terms.items():
            if any(k < d for k, d in zip(idx, i)):
                continue
            w = 1
            for k, d in zip(idx, i):
                w *= math.comb(k, d)
            new_idx = tuple(k - d for k, d in zip(idx, i))
            term = w * c if w != 1 else c
            if _coeff_is_zero(term):
                continue
            acc[new_idx] = acc[new_idx] + term if new_idx in acc else term
        return MultiPoly(self.nvars, acc)

    def partial(self, j: int) -> "MultiPoly":
        return self.hasse(unit_index(self.nvars, j))

    def multi_indices(self):
        """All multi-indices with nonzero Hasse derivative candidates:
        the box spanned by the monomials of f, minus the origin."""
        if not self.terms:
            return
        box = [max(idx[k] for idx in self.terms) for k in range(self.nvars)]
        def rec(prefix, k):
            if k == self.nvars:
                if any(prefix):
                    yield tuple(prefix)
                return
            for d in range(box[k] + 1):
                yield from rec(prefix + [d], k + 1)
        yield from rec([], 0)

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def _coeff_is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    if hasattr(c, "is_zero_mod_precision"):
        return False  # keep imprecise zeros; dropping them would claim exactness
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return False


def _zero_like(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(0)
    if hasattr(x, "zero_like"):
        return x.zero_like()
    return x - x


def taylor_expand(f: MultiPoly, b: Sequence, eps: Sequence):
    """Right-hand side of the Taylor identity: f(b) + sum f^[i](b) eps^i."""
    acc = f.eval(b)
    for i in f.multi_indices():
        fi = f.hasse(i)
        if fi.is_zero():
            continue
        term = fi.eval(b)
        for e, k in zip(eps, i):
            if k:
                term = term * e**k
        acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# text grammar: "coef*X0^a*X1^b + ..." with rational, finite-field, or
# brace-wrapped ground-element coefficients


def format_poly(f: MultiPoly, coeff_show=None) -> str:
    if not f.terms:
        return "0"
    show = coeff_show or _default_show
    parts = []
    for idx, c in f.sorted_terms():
        factors = [show(c)]
        for j, k in enumerate(idx):
            if k == 1:
                factors.append(f"X{j}")
            elif k > 1:
                factors.append(f"X{j}^{k}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def _default_show(c) -> str:
    if isinstance(c, (int, Fraction)):
        return str(c)
    return "{" + str(c) + "}"


_VAR_RE = re.compile(r"^X(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, nvars: int, coeff_parse=None) -> MultiPoly:
    """Parse the ``format_poly`` grammar.

    ``coeff_parse`` maps a coefficient token (already stripped of braces)
    to a coefficient; rationals are the default."""
    text = text.strip()
    if text == "0":
        return MultiPoly(nvars, {})
    parse_c = coeff_parse or (lambda s: Fraction(s))
    terms: dict = {}
    for raw in _split_top(text, " + "):
        raw = raw.strip()
        neg = False
        if raw.startswith("- "):
            neg, raw = True, raw[2:]
        factors = _split_top(raw, "*")
        coeff = None
        idx = [0] * nvars
        for tok in factors:
            tok = tok.strip()
            m = _VAR_RE.match(tok)
            if m:
                j = int(m.group(1))
                if j >= nvars:
                    raise ParseError(f"variable X{j} out of range (nvars={nvars})")
                idx[j] += int(m.group(2) or 1)
            else:
                if tok.startswith("{") and tok.endswith("}"):
                    tok = tok[1:-1]
                c = parse_c(tok)
                coeff = c if coeff is None else coeff * c
        if coeff is None:
            coeff = Fraction(1)
        if neg:
            coeff = -coeff
        key = tuple(idx)
        terms[key] = terms[key] + coeff if key in terms else coeff
    return MultiPoly(nvars, terms)


def _split_top(text: str, sep: str):
    """Split on ``sep`` outside brace-wrapped coefficient literals."""
    out, depth, cur, i = [], 0, [], 0
    while i < len(text):
        ch = text[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            out.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(ch)
        i += 1
    out.append("".join(cur))
    return out
