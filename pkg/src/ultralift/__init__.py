"""Finite-precision Hensel/Newton lifting over ultrametric structures.

Solves polynomial, operator-polynomial, and differential equations over
truncated p-adic numbers and truncated power series fields, and certifies
the valuation-theoretic contracts of the underlying correction iteration:
strictly increasing residual values, pseudo-slope laws, uniqueness balls,
and optimal approximation in windowed subgroup sums.
"""

from .errors import (HypothesisViolation, NoAsymptoticIntegral, ParseError,
                     PrecisionLossError, ResourceCapError, StallError,
                     UltraliftError, UsageError)
from .fftower import FFTower, FFTowerElem, additive_poly_solve, conway_modulus, tower
from .hensel import (PseudoInversePair, PseudoLinearWitness, implicit_fn,
                     newton_1d, newton_nd, pseudo_inverse_lift, series_invert,
                     witness_pseudo_linear)
from .lifting import LiftCertificate, LiftStep, newton_drive
from .matrices import ValuedMatrix, jacobian
from .padics import TruncatedPAdic, format_padic, parse_padic
from .polynomials import MultiPoly, taylor_expand
from .series import (RationalField, TowerField, TruncatedSeries, WeakCoeffMap,
                     field_by_name, format_series, parse_series, weak_coeff)
from .values import (INFINITY, Ball, Value, ValuedVector, ball_relation,
                     value_min)

__all__ = [
    "Ball", "FFTower", "FFTowerElem", "HypothesisViolation", "INFINITY",
    "LiftCertificate", "LiftStep", "MultiPoly", "NoAsymptoticIntegral",
    "ParseError", "PrecisionLossError", "PseudoInversePair",
    "PseudoLinearWitness", "RationalField", "ResourceCapError", "StallError",
    "TowerField", "TruncatedPAdic", "TruncatedSeries", "UltraliftError",
    "UsageError", "Value", "ValuedMatrix", "ValuedVector", "WeakCoeffMap",
    "additive_poly_solve", "ball_relation", "conway_modulus", "field_by_name",
    "format_padic", "format_series", "implicit_fn", "jacobian", "newton_1d",
    "newton_drive", "newton_nd", "parse_padic", "parse_series",
    "pseudo_inverse_lift", "series_invert", "taylor_expand", "tower",
    "value_min", "weak_coeff", "witness_pseudo_linear",
]
