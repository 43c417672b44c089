"""Weibull-tailed edge weights and analytic tail bounds for sums.

The canonical weight law used by all samplers has exact two-sided tails

    P(|W| > t) = exp(-eta * t**alpha),   t >= 0,

with a fair independent sign.  Non-canonical specs (tail constants != 1 or a
polynomial correction) are bounds-only objects: their tail probabilities are
sandwiched, never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class UnsupportedSpecError(ValueError):
    """The operation requires the exact-tail (canonical) weight law."""


@dataclass(frozen=True)
class WeibullSpec:
    """Symmetric weight law with stretched-exponential tails.

    ``alpha`` is the shape: alpha > 2 is lighter than Gaussian, alpha < 2
    heavier.  ``c_lower``/``c_upper`` sandwich the tail, ``eta`` rescales the
    exponent and ``poly_power`` adds a t**-poly_power correction valid for
    t > 1.  The canonical instance (both constants 1, no polynomial
    correction) is the only one that can be sampled.
    """

    alpha: float
    c_lower: float = 1.0
    c_upper: float = 1.0
    eta: float = 1.0
    poly_power: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"shape alpha must be positive, got {self.alpha}")
        if not 0 < self.c_lower <= self.c_upper:
            raise ValueError("need 0 < c_lower <= c_upper")
        if not self.eta > 0:
            raise ValueError(f"scale eta must be positive, got {self.eta}")
        if self.poly_power < 0:
            raise ValueError("poly_power must be >= 0")

    @property
    def is_canonical(self) -> bool:
        return self.c_lower == 1.0 and self.c_upper == 1.0 and self.poly_power == 0.0

    def require_canonical(self, what: str) -> None:
        if not self.is_canonical:
            raise UnsupportedSpecError(
                f"{what} is only defined for the canonical exact-tail law "
                f"(c_lower=c_upper=1, poly_power=0); got {self}"
            )


def weibull_from_uniform(spec: WeibullSpec, u, sign):
    """Inverse-CDF transform: sign * (-log(u)/eta)**(1/alpha) for u in (0,1].

    Exact canonical law: P(|W| > t) = exp(-eta*t**alpha).  Array friendly.
    """
    spec.require_canonical("sampling")
    return sign * (-np.log(u) / spec.eta) ** (1.0 / spec.alpha)


def conditioned_from_uniform(spec: WeibullSpec, threshold: float, u, sign):
    """Inverse-CDF transform of |W| conditioned on |W| > threshold.

    Rejection-free: sign * (threshold**alpha - log(u)/eta)**(1/alpha).
    """
    spec.require_canonical("conditioned sampling")
    if threshold < 0:
        raise ValueError(f"conditioning threshold must be >= 0, got {threshold}")
    shift = threshold**spec.alpha
    return sign * (shift - np.log(u) / spec.eta) ** (1.0 / spec.alpha)


def _uniform_and_sign(rng: np.random.Generator, size):
    # 1 - random() lies in (0, 1], keeping log() finite.
    u = 1.0 - rng.random(size)
    sign = 2.0 * rng.integers(0, 2, size=size) - 1.0
    return u, sign


def sample(spec: WeibullSpec, rng: np.random.Generator, size=None):
    """Draw from the canonical Weibull law (scalar or array of ``size``)."""
    u, sign = _uniform_and_sign(rng, size)
    return weibull_from_uniform(spec, u, sign)


def sample_conditioned(spec: WeibullSpec, threshold: float, rng: np.random.Generator, size=None):
    """Draw W conditioned on |W| > threshold (scalar or array)."""
    u, sign = _uniform_and_sign(rng, size)
    return conditioned_from_uniform(spec, threshold, u, sign)


def tail_prob(spec: WeibullSpec, t: float) -> tuple[float, float]:
    """Sandwich (lower, upper) for P(|W| >= t).

    Canonical specs return the exact value on both sides.  Bounds-only specs
    return the defining sandwich for t > 1 and the trivial clamp (min(1, .), 1)
    for t <= 1 where the sandwich is not assumed.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    core = math.exp(-spec.eta * t**spec.alpha)
    if spec.is_canonical:
        return core, core
    if t > 1:
        poly = t**-spec.poly_power
        return min(1.0, spec.c_lower * poly * core), min(1.0, spec.c_upper * poly * core)
    if t == 0:
        return 1.0, 1.0
    poly = t**-spec.poly_power
    return min(1.0, spec.c_lower * poly * core), 1.0


def square_sum_tail_sandwich(k: int, t: float, spec: WeibullSpec) -> tuple[float, float]:
    """Bounds on P(Y_1^2 + ... + Y_k^2 >= t) for light tails (alpha > 2).

    Returns

        (C1**k * exp(-eta * t**(a/2) * k**(1-a/2)),
         C2**k * (2*e*t/k)**k * exp(-eta * (t-k)**(a/2) * k**(1-a/2)))

    with a = alpha.  Requires t > k >= 2.
    """
    if spec.alpha <= 2:
        raise ValueError(f"square-sum sandwich needs alpha > 2, got {spec.alpha}")
    if spec.poly_power != 0:
        raise UnsupportedSpecError("square-sum sandwich is not derived for polynomially corrected tails")
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if not t > k:
        raise ValueError(f"need t > k, got t={t}, k={k}")
    half = spec.alpha / 2.0
    scale = k ** (1.0 - half)
    lower = spec.c_lower**k * math.exp(-spec.eta * t**half * scale)
    upper = spec.c_upper**k * (2.0 * math.e * t / k) ** k * math.exp(-spec.eta * (t - k) ** half * scale)
    return lower, min(1.0, upper)


def power_sum_tail_bound(
    m: int,
    L: float,
    spec: WeibullSpec,
    epsilon: float,
    n: int,
    c: float | None = None,
) -> float:
    """Chernoff bound on P(|W~_1|^a + ... + |W~_m|^a >= L).

    Here W~ is the weight conditioned to exceed (epsilon * log log n)**(1/a)
    in absolute value.  Returns

        c**m * exp(-eta*L) * e**m * (eta*L/m)**m * exp(eta*epsilon*m*loglog n)

    with c defaulting to max(1, c_upper); for the canonical law this is the
    exact optimized Chernoff bound.  Requires L > m (s = eta - m/L must be a
    valid tilt; for eta != 1 the stronger eta*L > m is enforced).
    """
    if spec.poly_power != 0:
        raise UnsupportedSpecError("power-sum bound is not derived for polynomially corrected tails")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if not L > m:
        raise ValueError(f"need L > m, got L={L}, m={m}")
    if spec.eta * L <= m:
        raise ValueError(f"need eta*L > m for a valid tilt, got eta*L={spec.eta * L}, m={m}")
    if epsilon <= 0:
        raise ValueError(f"need epsilon > 0, got {epsilon}")
    if n < 3:
        raise ValueError(f"need n >= 3 so that log log n > 0, got {n}")
    if c is None:
        c = max(1.0, spec.c_upper)
    loglog = math.log(math.log(n))
    log_bound = (
        m * math.log(c)
        - spec.eta * L
        + m
        + m * math.log(spec.eta * L / m)
        + spec.eta * epsilon * m * loglog
    )
    return min(1.0, math.exp(log_bound))


def relative_entropy(p: float, q: float) -> float:
    """Bernoulli relative entropy q*log(q/p) + (1-q)*log((1-q)/(1-p)).

    Endpoints use the 0*log 0 = 0 convention; nonnegative, zero iff q == p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"reference probability p must be in (0,1), got {p}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0,1], got {q}")
    if q == 0.0:
        return -math.log1p(-p)
    if q == 1.0:
        return -math.log(p)
    return q * math.log(q / p) + (1.0 - q) * math.log((1.0 - q) / (1.0 - p))


# Constant from the proof of the entropy lower bound I_p(p/2) >= c*p.
ENTROPY_HALF_CONSTANT = (1.0 - math.log(2.0)) / 2.0


def binomial_tail_sandwich(m: int, q: float, theta: float) -> tuple[float, float]:
    """Sharp sandwich for a Binomial(m, q) tail at threshold theta*m.

    For theta > q this bounds P(X >= theta*m), for theta < q it bounds
    P(X <= theta*m):

        exp(-m*I_q(theta)) / sqrt(8*m*theta*(1-theta))
            <= P <= exp(-m*I_q(theta)).
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0,1), got {q}")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must be in (0,1), got {theta}")
    if theta == q:
        raise ValueError("theta == q is a degenerate threshold; no exponential decay")
    ent = relative_entropy(q, theta)
    upper = math.exp(-m * ent)
    lower = upper / math.sqrt(8.0 * m * theta * (1.0 - theta))
    return lower, upper
