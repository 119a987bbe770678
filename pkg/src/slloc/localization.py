"""Localization coefficient ``alpha(u) = ||u||_2^4 / ||u||_4^4`` and its bounds.

Non-asymptotic envelope (valid when a < 1 and b < 1)::

    beta ((1 - b)/(1 + a))^4 <= alpha(phi) / alpha(Phi) <= gamma ((1 + b)/(1 - a))^4

with ``Phi(y) = sin(sqrt(lambda) y)`` on ``[0, B]``. Asymptotic envelopes are
returned as leading-order constants plus a rate exponent, except for the
bounded-variation regime which has an explicit first-order ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CrossedEnvelope, DegenerateDenominator, NegativeDenominator, ZeroFunction
from .liouville import LiouvilleForm
from .numerics import SampledFn, lp_norm
from .problem import Problem

REGIMES = {"C": -0.5, "BV": -1.0, "C4AC": -1.5}

#: alpha_phi_closed_form refuses to divide once cancellation eats this fraction of the denominator
DENOMINATOR_RTOL = 1e-8


@dataclass(frozen=True)
class BoundCoefficients:
    a: float
    b: float
    beta: float
    gamma: float
    lam: float
    B: float


@dataclass(frozen=True)
class RegimeEnvelope:
    lower: float
    upper: float
    regime: str
    rate: float  # exponent of lambda in the neglected remainder

    def __iter__(self):
        return iter((self.lower, self.upper))


@dataclass(frozen=True)
class BoundReport:
    lam: float
    alpha_measured: float
    alpha_phi: float
    lower: float | None
    upper: float | None
    applicable: bool
    regime_bounds: RegimeEnvelope | None = None
    index: int | None = None


def alpha(u: SampledFn) -> float:
    l4 = lp_norm(u, 4)
    if l4 == 0.0:
        raise ZeroFunction("alpha is undefined for the zero function")
    return lp_norm(u, 2) ** 4 / l4**4


def alpha_phi_closed_form(lam: float, B: float) -> float:
    """alpha of ``sin(sqrt(lam) y)`` on ``[0, B]``, closed form."""
    if lam <= 0 or B <= 0:
        raise ValueError("lambda and B must be positive")
    r = np.sqrt(lam)
    c = np.cos(r * B)
    s = np.sin(r * B)
    num = B**2 / 4 + c**2 / (4 * lam) - B * c * s / (2 * r) - c**4 / (4 * lam)
    terms = (3 * B / 8, c**3 * s / (4 * r), -5 * c * s / (8 * r))
    den = sum(terms)
    if not np.isfinite(den) or abs(den) <= DENOMINATOR_RTOL * sum(abs(t) for t in terms):
        raise DegenerateDenominator(
            f"denominator {den:.3g} lost to cancellation at lambda={lam:.6g}, B={B:.6g}"
        )
    return float(num / den)


def a_coefficient(B, lam, q_sup):
    return B * q_sup / (2.0 * np.sqrt(lam))


def b_coefficient(B, lam, q_l4):
    return (B**3 / 12.0 + 5.0 * B / (32.0 * lam) + 5.0 / (32.0 * lam**1.5)) ** 0.25 * q_l4 / np.sqrt(lam)


def beta_gamma(prob: Problem) -> tuple:
    """Weighted-to-unweighted norm factors, sup norms taken on the audit grid."""
    x = prob.audit_grid()
    p, w = prob.p(x), prob.w(x)
    beta = 1.0 / (np.max(w) ** 2 * np.max(p**-0.5 * w**-1.5))
    gamma = np.max(1.0 / w) ** 2 * np.max(p**0.5 * w**1.5)
    if beta > gamma:
        raise CrossedEnvelope(f"beta={beta:.6g} exceeds gamma={gamma:.6g} for {prob.label}")
    return float(beta), float(gamma)


def bound_coefficients(lf: LiouvilleForm, prob: Problem, lam: float) -> BoundCoefficients:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    sup, l4, _ = lf.q_norms
    beta, gamma = beta_gamma(prob)
    return BoundCoefficients(
        a=float(a_coefficient(lf.B, lam, sup)),
        b=float(b_coefficient(lf.B, lam, l4)),
        beta=beta,
        gamma=gamma,
        lam=float(lam),
        B=float(lf.B),
    )


def theorem1_envelope(coeffs: BoundCoefficients, lam: float | None = None) -> tuple:
    """``(lower, upper, applicable)``; bounds are ``None`` when not applicable."""
    lam = coeffs.lam if lam is None else lam
    a, b = coeffs.a, coeffs.b
    if not (a < 1.0 and b < 1.0):
        return None, None, False
    ref = alpha_phi_closed_form(lam, coeffs.B)
    lower = coeffs.beta * ((1.0 - b) / (1.0 + a)) ** 4 * ref
    upper = coeffs.gamma * ((1.0 + b) / (1.0 - a)) ** 4 * ref
    return lower, upper, True


def assumption_threshold(B: float, q_norms, tol: float = 1e-6) -> float:
    """Smallest lambda beyond which both a(B, lambda) < 1 and b(B, lambda) < 1."""
    sup, l4 = q_norms[0], q_norms[1]
    if sup < 0 or l4 < 0:
        raise ValueError("norms must be nonnegative")

    def crossing(fn):
        # fn is strictly decreasing in lambda
        lo, hi = 0.0, 1.0
        while fn(hi) >= 1.0:
            lo, hi = hi, 2.0 * hi
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if fn(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
        return hi

    lam_a = crossing(lambda t: a_coefficient(B, t, sup)) if sup > 0 else 0.0
    lam_b = crossing(lambda t: b_coefficient(B, t, l4)) if l4 > 0 else 0.0
    return max(lam_a, lam_b)


def theorem2_envelope(regime: str, lam: float, B: float, beta: float, gamma: float, l1_norm_Q: float = 0.0):
    """Large-lambda envelope of alpha(phi) for the given regularity class of Q."""
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {sorted(REGIMES)}, got {regime!r}")
    if regime != "BV":
        lead = 2.0 * B / 3.0
        return RegimeEnvelope(beta * lead, gamma * lead, regime, REGIMES[regime])
    r = lam**-0.5
    c = B * (0.25 + l1_norm_Q * B) * r
    d = (9.0 / 32.0 + 2.0 * l1_norm_Q * B) * r
    if 3.0 * B / 8.0 - d <= 0:
        raise NegativeDenominator(f"BV envelope undefined at lambda={lam:.6g} (denominator <= 0)")
    lower = beta * (B**2 / 4.0 - c) / (3.0 * B / 8.0 + d)
    upper = gamma * (B**2 / 4.0 + c) / (3.0 * B / 8.0 - d)
    return RegimeEnvelope(lower, upper, regime, REGIMES[regime])


def bound_report(pair, lf: LiouvilleForm, regime: str | None = None) -> BoundReport:
    """Measured alpha of a direct-route eigenpair against both envelopes."""
    prob = lf.problem
    lam = pair.lam
    coeffs = bound_coefficients(lf, prob, lam)
    lower, upper, ok = theorem1_envelope(coeffs)
    t2 = None
    if regime is not None:
        try:
            t2 = theorem2_envelope(regime, lam, lf.B, coeffs.beta, coeffs.gamma, lf.q_norms[2])
        except NegativeDenominator:
            t2 = None
    return BoundReport(
        lam=lam,
        alpha_measured=alpha(pair.values),
        alpha_phi=alpha_phi_closed_form(lam, lf.B),
        lower=lower,
        upper=upper,
        applicable=ok,
        regime_bounds=t2,
        index=pair.index,
    )
