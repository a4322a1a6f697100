import random
from fractions import Fraction

import pytest

from ultralift.padics import TruncatedPAdic
from ultralift.series import RationalField, TowerField, TruncatedSeries

QQ = RationalField()
F2 = TowerField(2)
F3 = TowerField(3)


@pytest.fixture
def rng():
    return random.Random(20240)


def q_series(terms, trunc=12, denom=1):
    return TruncatedSeries(QQ, denom, terms, Fraction(trunc))


def f2_series(terms, trunc=12, denom=1):
    return TruncatedSeries(F2, denom, terms, Fraction(trunc))


def padic(p, x, n):
    return TruncatedPAdic.from_rational(p, Fraction(x), n)
