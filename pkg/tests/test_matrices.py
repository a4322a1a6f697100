"""Determinant, adjugate, Jacobian: division-free and exact."""

import itertools
from fractions import Fraction

from conftest import padic, q_series
from ultralift.matrices import ValuedMatrix, jacobian
from ultralift.padics import random_padic
from ultralift.polynomials import MultiPoly, parse_poly
from ultralift.values import Value, ValuedVector


def brute_det(rows):
    """Permutation-sum determinant; the independent oracle."""
    n = len(rows)
    total = None
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = rows[0][perm[0]]
        for i in range(1, n):
            term = term * rows[i][perm[i]]
        term = term if sign == 1 else -term
        total = term if total is None else total + term
    return total


def test_adjugate_of_1x1_is_one():
    m = ValuedMatrix([[padic(3, 5, 8)]])
    adj = m.adjugate()
    assert adj[0, 0].residue == 1


def test_adjugate_of_identity():
    e = ValuedMatrix([[padic(3, 1, 8), padic(3, 0, 8)],
                      [padic(3, 0, 8), padic(3, 1, 8)]])
    adj = e.adjugate()
    assert adj[0, 0].residue == 1 and adj[1, 1].residue == 1
    assert adj[0, 1].residue == 0 and adj[1, 0].residue == 0


def test_classical_2x2_adjugate():
    a, b, c, d = (Fraction(x) for x in (2, 3, 5, 7))
    m = ValuedMatrix([[q_series({0: a}), q_series({0: b})],
                      [q_series({0: c}), q_series({0: d})]])
    adj = m.adjugate()
    assert adj[0, 0].coeff_at(0) == d and adj[0, 1].coeff_at(0) == -b
    assert adj[1, 0].coeff_at(0) == -c and adj[1, 1].coeff_at(0) == a


def test_determinant_matches_permutation_oracle(rng):
    for n in (2, 3, 4):
        for _ in range(10):
            rows = [[random_padic(3, 8, rng) for _ in range(n)] for _ in range(n)]
            m = ValuedMatrix(rows)
            assert (m.determinant() - brute_det(rows)).is_zero_mod_precision()


def test_jacobian_times_adjugate_is_det_times_identity(rng):
    for _ in range(10):
        fs = []
        for _ in range(3):
            terms = {}
            for _ in range(4):
                idx = tuple(rng.randrange(0, 3) for _ in range(3))
                terms[idx] = rng.randrange(-9, 10)
            fs.append(MultiPoly(3, terms))
        b = [random_padic(3, 8, rng) for _ in range(3)]
        J = jacobian(fs, b)
        det = J.determinant()
        prod = J * J.adjugate()
        for i in range(3):
            for j in range(3):
                want = det if i == j else det.zero_like()
                assert (prod[i, j] - want).is_zero_mod_precision()


def test_identity_jacobian():
    fs = [MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)]
    J = jacobian(fs, [padic(3, 4, 8), padic(3, 9, 8)])
    assert J[0, 0].residue == 1 and J[1, 1].residue == 1
    assert J[0, 1].residue == 0 and J[1, 0].residue == 0


def test_diagonal_jacobian_of_squares():
    fs = [parse_poly("1*X0^2", 2), parse_poly("1*X1^2", 2)]
    a, b = padic(3, 4, 8), padic(3, 7, 8)
    J = jacobian(fs, [a, b])
    assert J[0, 0] == a + a and J[1, 1] == b + b


def test_matrix_action_value_bound(rng):
    # entries of value >= 0 never lower the value of a vector
    for _ in range(30):
        rows = [[random_padic(3, 8, rng) for _ in range(3)] for _ in range(3)]
        m = ValuedMatrix(rows)
        y = ValuedVector([random_padic(3, 8, rng) for _ in range(3)])
        my = m.apply(y)
        if my.is_zero_mod_precision():
            continue
        assert my.value() >= y.value()
