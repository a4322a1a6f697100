"""One- and multi-dimensional Newton lifting, the implicit function
theorem, pseudo-inverse lifting, and compositional inversion of series.

All solvers linearize at the ORIGINAL point: the pseudo-slope (f'(b) in
one dimension, det J_f(b) via the adjugate reduction in n dimensions) is
frozen for the whole run, which keeps the certified slope valid on the
whole ball.  Refreshing the Jacobian each step is a non-goal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import HypothesisViolation, UsageError
from .lifting import LiftCertificate, clip_accuracy, newton_drive
from .matrices import ValuedMatrix, jacobian
from .polynomials import MultiPoly, _zero_like
from .sampling import sample_near
from .values import (Ball, Value, ValuedVector, _as_value, value_at_least,
                     value_exceeds, value_min)


@dataclass(frozen=True)
class PseudoLinearWitness:
    """Sampled evidence that a map is pseudo-linear with the given slope
    on a ball: on every checked pair y != z,
    v(fy - fz - s(y - z)) > v(fy - fz) = v(s) + v(y - z)."""

    slope_value: Value
    domain_ball: Ball
    samples_checked: int


def witness_pseudo_linear(fmap: Callable, slope, ball: Ball, rng,
                          pairs: int = 50, attempts: int = 2000) -> PseudoLinearWitness:
    """Sample pairs from the ball and verify the pseudo-slope law; raises
    with the counterexample on the first failed pair."""
    vs = slope.value()
    checked = 0
    for _ in range(attempts):
        if checked >= pairs:
            break
        y = sample_near(ball.center, ball.radius, rng, strict=ball.strict)
        z = sample_near(ball.center, ball.radius, rng, strict=ball.strict)
        move = y - z
        if move.is_zero_mod_precision():
            continue
        gap = fmap(y) - fmap(z)
        linear = move * slope if not isinstance(move, ValuedVector) else \
            ValuedVector([m * slope for m in move])
        rem = gap - linear
        if gap.is_zero_mod_precision():
            continue
        if gap.value() != vs + move.value():
            raise HypothesisViolation(
                f"pseudo-slope law v(fy - fz) = v(s) + v(y - z) fails: "
                f"{gap.value()} != {vs + move.value()}",
                counterexample=(str(y), str(z)))
        if not rem.is_zero_mod_precision() and not rem.value() > gap.value():
            raise HypothesisViolation(
                "remainder bound v(fy - fz - s(y-z)) > v(fy - fz) fails",
                counterexample=(str(y), str(z)))
        checked += 1
    return PseudoLinearWitness(vs, ball, checked)


@dataclass(frozen=True)
class PseudoInversePair:
    """A matrix and a pseudo-inverse: both MM° - E and M°M - E have all
    entries of positive value.  Validated on construction."""

    M: ValuedMatrix
    Mo: ValuedMatrix

    def __post_init__(self):
        if not pseudo_inverse_pair_ok(self.M, self.Mo):
            raise HypothesisViolation(
                "not a pseudo-inverse pair: an entry of MM° - E or M°M - E "
                "has value <= 0")


def _require_ring_coeffs(f: MultiPoly, what: str):
    for idx, c in f.terms.items():
        if hasattr(c, "value") and not value_at_least(c, 0):
            raise HypothesisViolation(
                f"{what} has a coefficient of negative value at {idx}",
                index=idx, value=str(c.value()))


_clip = clip_accuracy


def _vfb(x) -> Value:
    return x.value()


def newton_1d(f: MultiPoly, b, precision) -> tuple:
    """Lift a root of a univariate polynomial from an approximate one.

    Requires v f(b) > 2 v f'(b); returns the root a with
    v(a - b) = v f(b) - v f'(b) together with the run certificate, whose
    ball b + f'(b)M carries the uniqueness claim.
    """
    precision = _as_value(precision)
    if f.nvars != 1:
        raise UsageError("newton_1d expects a univariate polynomial")
    _require_ring_coeffs(f, "f")
    if not value_at_least(b, 0):
        raise HypothesisViolation("the start must lie in the valuation ring",
                                  vb=str(b.value()))
    fb = f.eval([b])
    s = f.partial(0).eval([b])
    if s.is_zero_mod_precision():
        raise HypothesisViolation(
            "f'(b) vanishes modulo precision; no pseudo-slope available",
            cap=str(s.precision_cap()))
    vs = s.value()
    if not value_exceeds(fb, 2 * vs):
        raise HypothesisViolation(
            f"need v f(b) > 2 v f'(b): got {fb.value()} <= {2 * vs}",
            vfb=str(fb.value()), two_vs=str(2 * vs))
    ball = Ball(b, vs, strict=True)
    root, cert = newton_drive(
        lambda y: f.eval([y]),
        lambda r: r / s,
        b,
        _zero_like(b),
        precision,
        uniqueness_ball=ball,
    )
    if not fb.is_zero_mod_precision():
        gap = (root - b).value()
        expected = fb.value() - vs
        if gap != expected:
            raise HypothesisViolation(
                f"value identity v(a-b) = vf(b) - vf'(b) failed: {gap} != {expected}",
                gap=str(gap), expected=str(expected))
    # the returned representative carries `precision` digits: every element
    # of its accuracy class (width precision - vs) keeps v f(a) >= precision
    return _clip(root, precision), cert


def _as_vector(x) -> ValuedVector:
    return x if isinstance(x, ValuedVector) else ValuedVector(x)


def newton_nd(fs: Sequence[MultiPoly], b, precision) -> tuple:
    """Multi-dimensional Newton lifting via the adjugate reduction.

    The iteration is a <- a - J*_f(b) f(a) / det J_f(b) with the Jacobian
    data frozen at b; the driver watches the residual of the reduced map
    J*_f(b) f, which is pseudo-linear with slope det J_f(b).
    """
    precision = _as_value(precision)
    fs = list(fs)
    b = _as_vector(b)
    n = len(fs)
    if n != len(b):
        raise UsageError("system size and point size differ")
    for f in fs:
        _require_ring_coeffs(f, "system entry")
    if not value_at_least(b, 0):
        raise HypothesisViolation("the start must lie in the valuation ring",
                                  vb=str(b.value()))
    J = jacobian(fs, list(b))
    s = J.determinant()
    if s.is_zero_mod_precision():
        raise HypothesisViolation(
            "singular: det J_f(b) vanishes modulo precision",
            kind="singular", cap=str(s.precision_cap()))
    vs = s.value()
    Jstar = J.adjugate()
    fb = ValuedVector([f.eval(list(b)) for f in fs])
    if not (fb.is_zero_mod_precision() or fb.value() > 2 * vs):
        raise HypothesisViolation(
            f"need v f(b) > 2 v det J_f(b): got {fb.value()} <= {2 * vs}",
            vfb=str(fb.value()), two_vs=str(2 * vs))

    def reduced(y: ValuedVector) -> ValuedVector:
        vals = ValuedVector([f.eval(list(y)) for f in fs])
        return Jstar.apply(vals)

    target = ValuedVector([_zero_like(x) for x in b])
    ball = Ball(b, vs, strict=True)
    # drive the reduced residual past precision + vs so that the plain
    # residual f(a) is certified at the requested precision
    root, cert = newton_drive(
        reduced,
        lambda r: ValuedVector([x / s for x in r]),
        b,
        target,
        precision + vs,
        uniqueness_ball=ball,
    )
    g_b = Jstar.apply(fb)
    if not g_b.is_zero_mod_precision():
        gap = (root - b).value()
        expected = g_b.value() - vs
        if gap != expected:
            raise HypothesisViolation(
                f"value identity v(a-b) = v(J*f(b)) - v det J failed: "
                f"{gap} != {expected}", gap=str(gap), expected=str(expected))
    return _clip(root, precision), cert


def implicit_fn(fs: Sequence[MultiPoly], z, x_new, precision) -> tuple:
    """Solve f(x', Y) = 0 near a known common zero (x, y).

    ``fs`` are n polynomials in m+n variables (X block first); ``z`` is the
    known zero, ``x_new`` the replacement X block.  Requires
    v(x_i - x'_i) > 2 v det J(z) for the Y-block Jacobian J.
    """
    precision = _as_value(precision)
    fs = list(fs)
    z = list(z)
    x_new = list(x_new)
    n = len(fs)
    m = len(x_new)
    if any(f.nvars != m + n for f in fs):
        raise UsageError(f"system must live in {m}+{n} variables")
    for f in fs:
        _require_ring_coeffs(f, "system entry")
    fz = [f.eval(z) for f in fs]
    for k, v in enumerate(fz):
        if not v.is_zero_mod_precision():
            raise HypothesisViolation(
                f"z is not a common zero: v f_{k}(z) = {v.value()}", index=k)
    Jz = ValuedMatrix([[f.partial(m + i).eval(z) for i in range(n)] for f in fs])
    det = Jz.determinant()
    if det.is_zero_mod_precision():
        raise HypothesisViolation("singular Y-block Jacobian at z", kind="singular")
    vdet = det.value()
    shift = value_min([(xo - xn).value() for xo, xn in zip(z[:m], x_new)])
    for i, (xo, xn) in enumerate(zip(z[:m], x_new)):
        if not value_exceeds(xo - xn, 2 * vdet):
            raise HypothesisViolation(
                f"need v(x_{i} - x'_{i}) > 2 v det J(z): got "
                f"{(xo - xn).value()} <= {2 * vdet}", index=i)
    gs = [f.substitute({j: x_new[j] for j in range(m)}) for f in fs]
    y0 = ValuedVector(z[m:])
    roots, cert = newton_nd(gs, y0, precision)
    moved = roots - y0
    if not moved.is_zero_mod_precision():
        if not moved.value() >= shift - vdet:
            raise HypothesisViolation(
                f"bound min v(y - y') >= min v(x - x') - v det J(z) failed: "
                f"{moved.value()} < {shift - vdet}")
    return roots, cert


def pseudo_inverse_pair_ok(M: ValuedMatrix, Mo: ValuedMatrix) -> bool:
    """Both MM° - E and M°M - E must have entries of positive value."""
    E = M.identity_like()
    for prod in (M * Mo - E, Mo * M - E):
        for row in prod.rows:
            for e in row:
                if not value_exceeds(e, 0):
                    return False
    return True


def pseudo_inverse_lift(fs: Sequence[MultiPoly], b, Mo: ValuedMatrix,
                        precision) -> tuple:
    """Determinant-free lifting: iterate a <- a - M° f(a) where M° is a
    pseudo-inverse of the Jacobian at b.  The unique zero sits on the
    maximal-ideal ball around b and satisfies v(b - a) = v f(b)."""
    precision = _as_value(precision)
    fs = list(fs)
    b = _as_vector(b)
    if isinstance(Mo, PseudoInversePair):
        Mo = Mo.Mo
    for f in fs:
        _require_ring_coeffs(f, "system entry")
    if not value_at_least(b, 0):
        raise HypothesisViolation("the start must lie in the valuation ring")
    for row in Mo.rows:
        for e in row:
            if not value_at_least(e, 0):
                raise HypothesisViolation("pseudo-inverse entries must have value >= 0")
    J = jacobian(fs, list(b))
    PseudoInversePair(J, Mo)  # validates the pair invariant
    fb = ValuedVector([f.eval(list(b)) for f in fs])
    if not (fb.is_zero_mod_precision() or fb.value() > 0):
        raise HypothesisViolation(f"need v f(b) > 0: got {fb.value()}")

    def fmap(y: ValuedVector) -> ValuedVector:
        return ValuedVector([f.eval(list(y)) for f in fs])

    target = ValuedVector([_zero_like(x) for x in b])
    ball = Ball(b, Value(0), strict=True)
    root, cert = newton_drive(
        fmap,
        lambda r: Mo.apply(r),
        b,
        target,
        precision,
        uniqueness_ball=ball,
    )
    if not fb.is_zero_mod_precision():
        gap = (root - b).value()
        if gap != fb.value():
            raise HypothesisViolation(
                f"value map identity v(b - a) = v f(b) failed: {gap} != {fb.value()}")
    return _clip(root, precision), cert


def series_invert(coeffs: Sequence, z_prime, precision) -> tuple:
    """Invert y -> sum_i c_i y^i (c_1 a unit) on the valuation ideal:
    find y with v(y) > 0 and f(y) = z' modulo the precision."""
    precision = _as_value(precision)
    coeffs = list(coeffs)
    if not coeffs:
        raise UsageError("series_invert needs at least the linear coefficient")
    field = z_prime.field
    c1 = field.coerce(coeffs[0])
    if field.is_zero(c1):
        raise HypothesisViolation("the linear coefficient c_1 vanishes")
    if not (z_prime.is_zero_mod_precision() or z_prime.value() > Value(0)):
        raise HypothesisViolation(
            f"target must lie in the valuation ideal: v = {z_prime.value()}")

    def fmap(y):
        acc = y.zero_like()
        power = y.one_like()
        for c in coeffs:
            power = power * y
            acc = acc + power * field.coerce(c)
        return acc

    c1_inv = _coeff_inverse(field, c1)
    start = z_prime.zero_like()
    ball = Ball(start, Value(0), strict=True)
    root, cert = newton_drive(
        fmap,
        lambda r: r * c1_inv,
        start,
        z_prime,
        precision,
        uniqueness_ball=ball,
    )
    return _clip(root, precision), cert


def _coeff_inverse(field, c):
    from fractions import Fraction

    if isinstance(c, Fraction):
        return Fraction(1) / c
    return c.inverse()
