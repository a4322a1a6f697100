"""Hasse derivatives, the exact Taylor identity, and the text grammar."""

import math
import random
from fractions import Fraction

import sympy

from conftest import F2, QQ, f2_series, padic, q_series
from ultralift.padics import random_padic
from ultralift.polynomials import MultiPoly, format_poly, parse_poly, taylor_expand
from ultralift.series import random_series


def test_hasse_of_pth_power_in_char_p():
    one = F2.one
    f = MultiPoly(1, {(2,): one})  # X^2 over a char-2 coefficient field
    assert f.hasse((1,)).is_zero()          # binom(2,1) = 0 mod 2
    assert f.hasse((2,)) == MultiPoly(1, {(0,): one})


def test_hasse_first_is_derivative():
    f = MultiPoly(1, {(2,): Fraction(1)})
    assert f.hasse((1,)) == MultiPoly(1, {(1,): Fraction(2)})


def test_hasse_mixed_index_matches_symbolic_expansion():
    # oracle: expand f(b + eps) with sympy, read the eps0*eps1^2 coefficient
    f = MultiPoly(2, {(1, 2): Fraction(1)})  # X0 * X1^2
    b0, b1, e0, e1 = sympy.symbols("b0 b1 e0 e1")
    expanded = sympy.expand((b0 + e0) * (b1 + e1) ** 2)
    oracle = expanded.coeff(e0, 1).coeff(e1, 2)
    got = f.hasse((1, 2))
    assert oracle == 1
    assert got == MultiPoly(2, {(0, 0): Fraction(1)})


def _random_poly(rng, nvars, deg, coeff_fn):
    terms = {}
    for _ in range(rng.randrange(1, 7)):
        idx = tuple(rng.randrange(0, deg + 1) for _ in range(nvars))
        if sum(idx) > deg:
            continue
        terms[idx] = coeff_fn()
    terms[(0,) * nvars] = coeff_fn()
    return MultiPoly(nvars, terms)


def test_taylor_identity_exact_over_three_grounds(rng):
    checks = 0
    for _ in range(70):
        # rationals
        f = _random_poly(rng, 3, 4, lambda: Fraction(rng.randrange(-9, 10)))
        b = [Fraction(rng.randrange(-4, 5), rng.randrange(1, 4)) for _ in range(3)]
        eps = [Fraction(rng.randrange(-4, 5), rng.randrange(1, 4)) for _ in range(3)]
        lhs = f.eval([x + e for x, e in zip(b, eps)])
        assert lhs == taylor_expand(f, b, eps)
        checks += 1
    for _ in range(40):
        # char-2 series coefficients
        f = _random_poly(rng, 3, 4, lambda: rng.randrange(0, 2))
        b = [random_series(F2, 1, 8, rng) for _ in range(3)]
        eps = [random_series(F2, 1, 8, rng) for _ in range(3)]
        lhs = f.eval([x + e for x, e in zip(b, eps)])
        gap = lhs - taylor_expand(f, b, eps)
        assert gap.is_zero_mod_precision()
        checks += 1
    for _ in range(40):
        # 3-adics
        f = _random_poly(rng, 3, 4, lambda: rng.randrange(-9, 10))
        b = [random_padic(3, 9, rng) for _ in range(3)]
        eps = [random_padic(3, 9, rng) for _ in range(3)]
        lhs = f.eval([x + e for x, e in zip(b, eps)])
        gap = lhs - taylor_expand(f, b, eps)
        assert gap.is_zero_mod_precision()
        checks += 1
    assert checks == 150


def test_hasse_matches_scaled_partials_in_char_zero(rng):
    for _ in range(25):
        f = _random_poly(rng, 2, 5, lambda: Fraction(rng.randrange(-5, 6)))
        i0, i1 = rng.randrange(0, 3), rng.randrange(0, 3)
        if i0 == i1 == 0:
            i0 = 1
        g = f
        for _ in range(i0):
            g = g.partial(0)
        for _ in range(i1):
            g = g.partial(1)
        scale = math.factorial(i0) * math.factorial(i1)
        assert g == f.hasse((i0, i1)) * Fraction(scale)


def test_partial_of_constant_is_zero():
    f = MultiPoly(2, {(0, 0): Fraction(3)})
    assert f.partial(0).is_zero()


def test_substitute_clamps_and_renumbers():
    f = parse_poly("1*X0^2*X1 + 2*X2", 3)
    g = f.substitute({0: Fraction(2)})
    assert g.nvars == 2
    assert g.eval([Fraction(5), Fraction(7)]) == 4 * 5 + 2 * 7


def test_poly_round_trip():
    f = parse_poly("2*X0^2*X1 + -1/3*X1 + 5", 2)
    assert parse_poly(format_poly(f), 2) == f


def test_poly_eval_over_padics():
    f = parse_poly("1*X0^2 + -7", 1)
    b = padic(3, 1, 8)
    assert f.eval([b]).residue == (1 - 7) % 3**8
