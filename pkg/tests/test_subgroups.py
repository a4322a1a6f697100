"""Windowed additive-polynomial images, pseudo-directness, approximation."""

import itertools
import random
from fractions import Fraction

import pytest

from conftest import F2
from ultralift.series import TruncatedSeries
from ultralift.subgroups import (AdditivePoly, frobenius_power, image_window,
                                 optimal_approx, pseudo_direct_check,
                                 subspace_from_series)
from ultralift.values import Value


def ser(terms, trunc=300):
    return TruncatedSeries(F2, 1, terms, Fraction(trunc))


def brute_window_span(space):
    return set(space.elements())


def vec_valuation(vec, lo, hi):
    for i, x in enumerate(vec):
        if x:
            return lo + i
    return hi


# -- images ---------------------------------------------------------------


def test_identity_image_is_full_space():
    f = AdditivePoly(2, (ser({0: 1}),))
    s = image_window(f, (0, 4))
    assert s.pivots() == [0, 1, 2, 3]


def test_squaring_image_matches_exhaustive_enumeration():
    f = AdditivePoly(2, (ser({}), ser({0: 1})))
    s = image_window(f, (0, 6))
    assert s.pivots() == [0, 2, 4]
    # oracle: square every F_2-polynomial input of degree < 6 and truncate
    got = set()
    for mask in range(2**6):
        a = ser({k: (mask >> k) & 1 for k in range(6)}, trunc=12)
        sq = (a * a).truncate(6)
        vec = [0] * 6
        for e, c in sq.terms:
            vec[int(e)] = 1
        got.add(tuple(vec))
    assert got == brute_window_span(s)


def test_artin_schreier_image_exhaustive():
    f = AdditivePoly(2, (ser({0: 1}), ser({0: 1})))
    s = image_window(f, (0, 4))
    got = set()
    for mask in range(2**4):
        a = ser({k: (mask >> k) & 1 for k in range(4)}, trunc=12)
        img = (a + a * a).truncate(4)
        vec = [0] * 4
        for e, c in img.terms:
            vec[int(e)] = 1
        got.add(tuple(vec))
    assert got == brute_window_span(s)


def test_frobenius_power_is_exact():
    a = ser({1: 1, 3: 1}, trunc=5)
    sq = frobenius_power(a, 2, 1)
    assert sq.terms == ((Fraction(2), F2.one), (Fraction(6), F2.one))
    assert sq.trunc == 10


# -- pseudo-directness ------------------------------------------------------


def test_single_summand_always_pseudo_direct():
    f = AdditivePoly(2, (ser({}), ser({0: 1})))
    s = image_window(f, (0, 6))
    assert pseudo_direct_check([s], (0, 6)).ok


def test_equal_line_spans_pseudo_direct():
    a1 = subspace_from_series([ser({0: 1})], 0, 4, 2)
    assert pseudo_direct_check([a1, a1], (0, 4)).ok


def brute_pseudo_direct(spaces, lo, hi):
    """(66) checked by exhaustive decomposition search over the window."""
    total_rows = [row for s in spaces for row in s.basis]
    total = subspace_from_series(
        [TruncatedSeries(F2, 1,
                         {Fraction(lo + i): int(x) for i, x in enumerate(row) if x},
                         Fraction(hi)) for row in total_rows], lo, hi, 2) \
        if total_rows else None
    if total is None:
        return True
    spans = [list(s.elements()) for s in spaces]
    for a_vec in total.elements():
        if not any(a_vec):
            continue
        va = vec_valuation(a_vec, lo, hi)
        found = False
        for combo in itertools.product(*spans):
            summed = [0] * (hi - lo)
            for part in combo:
                summed = [(x + y) % 2 for x, y in zip(summed, part)]
            vsum = vec_valuation(summed, lo, hi)
            parts_vals = [vec_valuation(p, lo, hi) for p in combo]
            gap = [(x - y) % 2 for x, y in zip(a_vec, summed)]
            if vec_valuation(gap, lo, hi) > va and vsum == min(parts_vals):
                found = True
                break
        if not found:
            return False
    return True


def test_cancellation_pair_detected_with_witness():
    b1 = subspace_from_series([ser({0: 1, 1: 1})], 0, 4, 2)
    b2 = subspace_from_series([ser({0: 1})], 0, 4, 2)
    rep = pseudo_direct_check([b1, b2], (0, 4))
    assert not rep.ok
    assert rep.witness_value == 1
    assert not brute_pseudo_direct([b1, b2], 0, 4)


def test_pseudo_direct_matches_brute_force_on_random_instances(rng):
    agreements = 0
    for _ in range(25):
        spaces = []
        for _ in range(rng.randrange(1, 3)):
            gens = []
            for _ in range(rng.randrange(1, 3)):
                terms = {k: rng.randrange(0, 2) for k in range(4)}
                if not any(terms.values()):
                    terms[rng.randrange(0, 4)] = 1
                gens.append(ser(terms, trunc=8))
            spaces.append(subspace_from_series(gens, 0, 4, 2))
        if sum(s.dim for s in spaces) > 6:
            continue
        got = pseudo_direct_check(spaces, (0, 4)).ok
        want = brute_pseudo_direct(spaces, 0, 4)
        assert got == want
        agreements += 1
    assert agreements >= 15


# -- optimal approximation ---------------------------------------------------


def brute_best_value(a_vec, spaces, lo, hi):
    total_rows = [row for s in spaces for row in s.basis]
    best = vec_valuation(a_vec, lo, hi)
    space = subspace_from_series(
        [TruncatedSeries(F2, 1,
                         {Fraction(lo + i): int(x) for i, x in enumerate(row) if x},
                         Fraction(hi)) for row in total_rows], lo, hi, 2) \
        if total_rows else None
    if space is None:
        return best
    for z in space.elements():
        gap = [(x - y) % 2 for x, y in zip(a_vec, z)]
        best = max(best, vec_valuation(gap, lo, hi))
    return best


def test_approx_element_inside_sum():
    a = subspace_from_series([ser({0: 1}), ser({2: 1})], 0, 4, 2)
    res = optimal_approx(ser({0: 1, 2: 1}, trunc=8), [a], (0, 4))
    assert res.at_window_top and res.achieved == Value(4)


def test_approx_t_against_even_span():
    a = subspace_from_series([ser({0: 1}), ser({2: 1})], 0, 4, 2)
    res = optimal_approx(ser({1: 1}, trunc=8), [a], (0, 4))
    assert res.best == (0, 0, 0, 0)
    assert res.achieved == Value(1)
    assert not res.at_window_top


def test_approx_matches_brute_force_random(rng):
    for _ in range(25):
        gens = []
        for _ in range(rng.randrange(1, 4)):
            terms = {k: rng.randrange(0, 2) for k in range(6)}
            if not any(terms.values()):
                terms[rng.randrange(0, 6)] = 1
            gens.append(ser(terms, trunc=12))
        space = subspace_from_series(gens, 0, 6, 2)
        a_terms = {k: rng.randrange(0, 2) for k in range(6)}
        a = ser(a_terms, trunc=12)
        res = optimal_approx(a, [space], (0, 6))
        a_vec = tuple(a_terms.get(k, 0) for k in range(6))
        want = brute_best_value(a_vec, [space], 0, 6)
        got = 6 if res.at_window_top else int(res.achieved.amount)
        assert got == want


def test_approx_monotone_in_window(rng):
    # enlarging the window never decreases the achieved value
    for _ in range(15):
        gens = [ser({0: 1, 1: 1}, trunc=12), ser({2: 1}, trunc=12)]
        small = subspace_from_series(gens, 0, 4, 2)
        large = subspace_from_series(gens, 0, 6, 2)
        a_terms = {k: rng.randrange(0, 2) for k in range(4)}
        a = ser(a_terms, trunc=12)
        r_small = optimal_approx(a, [small], (0, 4))
        r_large = optimal_approx(a, [large], (0, 6))
        v_small = 4 if r_small.at_window_top else int(r_small.achieved.amount)
        v_large = 6 if r_large.at_window_top else int(r_large.achieved.amount)
        assert v_large >= v_small


def test_prop64_equivalence_on_tiny_window(rng):
    # windowed pseudo-directness agrees with the exhaustive immediacy test
    # for the sum map on every nonzero element of the windowed sum
    f1 = AdditivePoly(2, (ser({0: 1, 1: 1}),))           # a -> (1+t) a
    f2 = AdditivePoly(2, (ser({0: 1}),))                 # identity
    s1 = image_window(f1, (0, 3))
    s2 = image_window(f2, (0, 3))
    got = pseudo_direct_check([s1, s2], (0, 3)).ok
    want = brute_pseudo_direct([s1, s2], 0, 3)
    assert got == want
