"""Renormalization prediction for the leading free-energy singularity.

The predicted singular behavior in a small staggered field is
(beta_s)^e with e = 2/(2 - pi/(4 j)) and j = arccos(1 - exp(2 beta_eps)/2)/2.
This module evaluates j and the exponent, expands the exponent exactly about
the solvable point beta_eps = ln(2)/2 + U, and mechanically cross-checks the
predicted first-order amplitude of (beta_s)^2 ln^2|beta_s| against the exact
amplitude series computed independently from the free-fermion expansion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import OutOfDomain, VerificationFailed
from .model import FREE_FERMION_BETA_EPS
from .series import PiRational, Q, RationalSeries, b2_series

#: coupling below which the exponent formula diverges (KT regime)
KT_BETA_EPS = 0.5 * math.log(2.0 - math.sqrt(2.0))


def j_of_betaeps(beta_eps: float) -> float:
    """j = arccos(1 - exp(2 beta_eps)/2) / 2, in [0, pi/2]."""
    arg = 1.0 - 0.5 * math.exp(2.0 * beta_eps)
    if arg < -1.0:
        raise OutOfDomain(f"beta_eps={beta_eps!r} beyond the arccos domain")
    return 0.5 * math.acos(max(arg, -1.0))


def singular_exponent(beta_eps: float) -> float:
    """Predicted leading exponent 2/(2 - pi/(4 j)); +inf in the KT regime.

    Divergence is decided by the closed-form threshold
    beta_eps <= ln(2 - sqrt 2)/2 (where j = pi/8), so the boundary point
    itself is tagged divergent rather than left to rounding.
    """
    if beta_eps <= KT_BETA_EPS:
        return math.inf
    denom = 2.0 - math.pi / (4.0 * j_of_betaeps(beta_eps))
    if denom <= 0.0:
        return math.inf
    return 2.0 / denom


# --- exact expansion of the exponent about the solvable point ----------------
#
# Coefficients live in the ring Q[1/pi]: each series coefficient is a map
# {pi_power: rational} meaning sum_k q_k pi^{-k}.

def _pi_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Q(0)) + v
    return {k: v for k, v in out.items() if v != 0}


def _pi_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            out[k] = out.get(k, Q(0)) + va * vb
    return {k: v for k, v in out.items() if v != 0}


def _poly_mul(a: list, b: list, order: int) -> list:
    out = [dict() for _ in range(order + 1)]
    for i, ca in enumerate(a):
        if not ca:
            continue
        for jdx in range(order + 1 - i):
            if b[jdx]:
                out[i + jdx] = _pi_add(out[i + jdx], _pi_mul(ca, b[jdx]))
    return out


def _poly_reciprocal(a: list, order: int) -> list:
    c0 = a[0]
    if set(c0) != {0}:
        raise ValueError("reciprocal needs a pure rational constant term")
    inv0 = {0: 1 / c0[0]}
    out = [inv0] + [dict() for _ in range(order)]
    for d in range(1, order + 1):
        acc: dict = {}
        for jdx in range(1, d + 1):
            if a[jdx]:
                acc = _pi_add(acc, _pi_mul(a[jdx], out[d - jdx]))
        out[d] = _pi_mul({0: Q(-1)}, _pi_mul(inv0, acc))
    return out


def _j_shift_series(order: int) -> RationalSeries:
    """j(ln2/2 + U) - pi/4 as an exact rational series in U.

    dj/dU = exp(U) (2 - exp(2U))^{-1/2}, whose Taylor coefficients are
    rational; integrating term by term gives the shift.
    """
    k = order
    exp_u = RationalSeries([Q(1, math.factorial(d)) for d in range(k + 1)], k)
    y = RationalSeries([Q(0)] + [Q(2 ** d, math.factorial(d))
                                 for d in range(1, k + 1)], k)  # e^{2U} - 1
    inv_sqrt = RationalSeries(
        [comb(2 * d, d) * Q(1, 4 ** d) for d in range(k + 1)], k)  # (1-y)^{-1/2}
    deriv = exp_u * inv_sqrt.compose(y)
    return RationalSeries(
        [Q(0)] + [deriv[d] / (d + 1) for d in range(k)], k)


def exponent_u_expansion(order: int = 2) -> list[dict]:
    """Exact U-series of the exponent at beta_eps = ln(2)/2 + U.

    Returns one {pi_power: Fraction} coefficient map per U-degree:
    2 - (8/pi) U + ...; the linear coefficient is exactly -8/pi.
    """
    if order > 4:
        raise ValueError("order capped at 4")
    r = _j_shift_series(order)
    # x = 4 r / pi as a Q[1/pi]-coefficient polynomial in U
    x = [({1: 4 * r[d]} if r[d] else {}) for d in range(order + 1)]
    one_plus_x = [dict(c) for c in x]
    one_plus_x[0] = _pi_add(one_plus_x[0], {0: Q(1)})
    # denominator 2 - (1 + x)^{-1}
    denom = [_pi_mul({0: Q(-1)}, c) for c in _poly_reciprocal(one_plus_x, order)]
    denom[0] = _pi_add(denom[0], {0: Q(2)})
    result = _poly_mul([{0: Q(2)}] + [dict() for _ in range(order)],
                       _poly_reciprocal(denom, order), order)
    return result


def exponent_u_slope() -> PiRational:
    """The exact linear coefficient of the exponent expansion: -8/pi."""
    coeff = exponent_u_expansion(1)[1]
    if set(coeff) != {1}:
        raise VerificationFailed("exponent slope is not a pure 1/pi term")
    return PiRational(coeff[1], 1)


@dataclass(frozen=True)
class VerificationReport:
    predicted: PiRational
    computed: PiRational
    equal: bool
    details: dict

    def as_json(self) -> str:
        return json.dumps({
            "predicted": self.predicted.as_json(),
            "computed": self.computed.as_json(),
            "equal": self.equal,
            "details": self.details,
        }, sort_keys=True)


def verify_first_order() -> VerificationReport:
    """Cross-check the predicted (beta_s)^2 ln^2|beta_s| amplitude at O(U).

    Prediction side: (beta_s)^{e(U)} = (beta_s)^2 exp((e(U) - 2) ln|beta_s|)
    contributes (slope^2/2) U^2 ln^2 at degree (beta_s)^2; the meromorphic
    amplitude's pole 1/(4U) turns this into (slope^2/8) U = (8/pi^2) U.
    Computation side: the leading coefficient of the exact amplitude series
    from the free-fermion expansion.  Both are exact and must be equal.
    """
    slope = exponent_u_slope()
    half_square = slope * slope
    predicted = PiRational(half_square.rational / 8, half_square.pi_power)
    b2 = b2_series(2)
    computed = b2.coefficient(2)
    equal = predicted == computed
    report = VerificationReport(predicted, computed, equal, {
        "exponent_slope": str(slope),
        "amplitude_pole_residue": "1/4",
        "amplitude_degree": 2,
        "log_power": 2,
    })
    if not equal:
        raise VerificationFailed(report.as_json())
    return report
