#!/usr/bin/env python3
"""Walk each solver once and print the solutions with their certificates."""

import random
from fractions import Fraction

from ultralift import (MultiPoly, TruncatedPAdic, ValuedVector, newton_1d,
                       newton_nd, series_invert)
from ultralift.diff_fields import (RosenlichtInstance, VDFieldInstance,
                                   d_solve, dhensel_solve, integrate,
                                   ode_solve, vd_axiom_report)
from ultralift.polynomials import parse_poly
from ultralift.series import RationalField, TruncatedSeries
from ultralift.subgroups import AdditivePoly, image_window, optimal_approx, pseudo_direct_check
from ultralift.series import TowerField


def banner(title):
    print()
    print("=" * 72)
    print(title)
    print("=" * 72)


def main():
    rng = random.Random(0)

    banner("square root of 7 in the 3-adics (one-dimensional Newton lemma)")
    f = parse_poly("1*X0^2 + -7", 1)
    root, cert = newton_1d(f, TruncatedPAdic(3, 1, 14), 12)
    print("root:", root)
    print(cert.table())

    banner("2x2 system over the 3-adics (adjugate reduction)")
    fs = [parse_poly("1*X0^2 + -7", 2), parse_poly("1*X1^2 + -1*X0", 2)]
    b = ValuedVector([TruncatedPAdic(3, 1, 16), TruncatedPAdic(3, 1, 16)])
    roots, cert = newton_nd(fs, b, 10)
    print("roots:", list(roots))
    print(cert.table())

    banner("compositional inverse of X + X^2 (signed Catalan numbers)")
    QQ = RationalField()
    t = TruncatedSeries(QQ, 1, {1: 1}, 14)
    inv, cert = series_invert([1, 1], t, 13)
    print("inverse:", inv)

    banner("VD-field axioms and D-solving over the F_2 tower")
    vd = VDFieldInstance(p=2, trunc=Fraction(12))
    for chk in vd_axiom_report(vd, samples=15):
        print(f"  [{'ok' if chk.ok else 'FAIL'}] {chk.name}")
    target = vd.series({1: 1, 3: vd.tower.generator(2)})
    sol = d_solve(vd, target, 10)
    print("D a = a' solved:", sol)
    print("residual value:", (target - vd.D(sol)).value())

    banner("D-Hensel lifting: (Da)^2 + Da = c")
    c = vd.series({2: 1, 5: vd.tower.generator(2)})
    fD = MultiPoly(2, {(0, 2): 1, (0, 1): 1}) - MultiPoly.constant(2, c)
    root, cert = dhensel_solve(vd, fD, vd.zero(), 10, rng=rng)
    print("root:", root)
    print(cert.table())

    banner("Rosenlicht ODE: Dy = t^2 + y^2")
    ros = RosenlichtInstance(denom=1, trunc=Fraction(24))
    g = MultiPoly(2, {(2, 0): 1})
    cc = ros.series({2: 1})
    y, cert = ode_solve(ros, g, cc, 2, 21, rng=rng)
    print("solution:", y)
    print(cert.table())

    banner("windowed image of X^2 + X over F_2((t)) and best approximation")
    F2 = TowerField(2)
    one = TruncatedSeries(F2, 1, {0: 1}, 60)
    f_as = AdditivePoly(2, (one, one))
    space = image_window(f_as, (0, 6))
    print("image pivots on [0, 6):", space.pivots())
    print("pseudo-direct:", pseudo_direct_check([space], (0, 6)).ok)
    a = TruncatedSeries(F2, 1, {0: 1, 1: 1}, 60)
    res = optimal_approx(a, [space], (0, 6))
    print("best approximation of 1 + t:", res.best,
          "achieved value:", ">= 6" if res.at_window_top else res.achieved)


if __name__ == "__main__":
    main()
