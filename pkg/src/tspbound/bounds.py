"""Scaled-beta model of tour lengths and the iterated truncation bound.

A beta-family density on [A, B] (A = shortest, B = longest tour length)
models the distribution of locally-optimal tour lengths.  Iterating
"truncate at the previous mean, take the new mean" yields a shrinking
sequence of upper bounds whose closed form is
1 + 0.5 * ((alpha + 1) / (alpha + 2)) ** (K - 1) times A.

The incomplete beta integral is evaluated two independent ways (Gauss
hypergeometric series and adaptive quadrature) and the two routes are
cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "DomainError",
    "NumericError",
    "FitError",
    "GbParams",
    "TruncationState",
    "BoundReport",
    "beta_fn",
    "hypergeometric_f",
    "incomplete_beta",
    "incomplete_beta_series",
    "incomplete_beta_quadrature",
    "gb_pdf",
    "truncated_mean",
    "iterate_bound",
    "closed_form_ratio",
    "iterations_for_target",
    "fit_params",
]

# switch point between the series and quadrature evaluation routes
SERIES_MAX_T = 0.9
SERIES_RTOL = 1e-15
SERIES_MAX_TERMS = 10**6


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """An evaluation failed to converge; try the quadrature route."""


class FitError(ValueError):
    """Sample moments incompatible with a beta-family fit."""


@dataclass(frozen=True)
class GbParams:
    """Shape parameters and support [lower, upper] of the length model."""

    alpha: float
    beta: float
    lower: float
    upper: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise DomainError(f"shapes must be positive, got ({self.alpha}, {self.beta})")
        if not self.upper > self.lower:
            raise DomainError(f"need upper > lower, got [{self.lower}, {self.upper}]")

    @property
    def shape_precondition_met(self) -> bool:
        """The bound derivation additionally assumes both shapes > 1."""
        return self.alpha > 1 and self.beta > 1


@dataclass(frozen=True)
class TruncationState:
    """One iteration: index, normalized truncation point, truncated mean."""

    k: int
    truncation: float
    mean: float


@dataclass(frozen=True)
class BoundReport:
    """Iterated truncation states paired with the closed-form ratios."""

    params: GbParams
    states: tuple[TruncationState, ...]
    closed_form: tuple[float, ...]
    target_ratio: float | None = None
    required_k: int | None = None
    start_clipped: bool = False


def beta_fn(alpha: float, beta: float) -> float:
    """Complete beta function via the log-gamma identity."""
    if alpha <= 0 or beta <= 0:
        raise DomainError(f"shapes must be positive, got ({alpha}, {beta})")
    return math.exp(math.lgamma(alpha) + math.lgamma(beta) - math.lgamma(alpha + beta))


def hypergeometric_f(a: float, b: float, c: float, x: float) -> float:
    """Gauss series 2F1(a, b; c; x) by term recurrence.

    Valid for 0 <= x < 1, or any x when the series terminates (b a
    non-positive integer).
    """
    if c <= 0 and c == int(c):
        raise DomainError(f"c must not be a non-positive integer, got {c}")
    terminating = b <= 0 and b == int(b)
    if not terminating and not 0 <= x < 1:
        raise DomainError(f"series requires 0 <= x < 1, got {x}")
    total = 1.0
    term = 1.0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        total += term
        if abs(term) <= SERIES_RTOL * abs(total):
            return total
    raise NumericError(
        "hypergeometric series did not converge; use the quadrature route"
    )


def incomplete_beta_series(t: float, alpha: float, beta: float) -> float:
    """Lower incomplete beta integral via the hypergeometric identity
    (t^alpha / alpha) * 2F1(alpha, 1 - beta; alpha + 1; t)."""
    _check_incbeta_args(t, alpha, beta)
    if t == 0.0:
        return 0.0
    return t**alpha / alpha * hypergeometric_f(alpha, 1.0 - beta, alpha + 1.0, t)


def incomplete_beta_quadrature(t: float, alpha: float, beta: float) -> float:
    """Lower incomplete beta integral via adaptive quadrature."""
    _check_incbeta_args(t, alpha, beta)
    if t == 0.0:
        return 0.0
    val, _ = integrate.quad(
        lambda x: x ** (alpha - 1.0) * (1.0 - x) ** (beta - 1.0),
        0.0,
        t,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return val


def _check_incbeta_args(t: float, alpha: float, beta: float) -> None:
    if alpha <= 0 or beta <= 0:
        raise DomainError(f"shapes must be positive, got ({alpha}, {beta})")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"integration limit must be in [0, 1], got {t}")


def incomplete_beta(t: float, alpha: float, beta: float) -> float:
    """Lower incomplete beta integral on [0, t].

    Uses the hypergeometric series for t <= 0.9 and adaptive quadrature
    beyond, where the series converges slowly.
    """
    _check_incbeta_args(t, alpha, beta)
    if t <= SERIES_MAX_T:
        return incomplete_beta_series(t, alpha, beta)
    return incomplete_beta_quadrature(t, alpha, beta)


def gb_pdf(x: float, p: GbParams) -> float:
    """Density of the scaled beta model, normalized to integrate to 1."""
    if not p.lower <= x <= p.upper:
        raise DomainError(f"x = {x} outside support [{p.lower}, {p.upper}]")
    span = p.upper - p.lower
    return (
        (x - p.lower) ** (p.alpha - 1.0)
        * (p.upper - x) ** (p.beta - 1.0)
        / (span ** (p.alpha + p.beta - 1.0) * beta_fn(p.alpha, p.beta))
    )


def truncated_mean(p: GbParams, b_hat: float) -> float:
    """Mean of the model truncated above at lower + (upper - lower) * b_hat.

    The defining ratio of incomplete beta integrals is evaluated in the
    algebraically cancelled form
    b * alpha/(alpha+1) * 2F1(alpha+1, 1-beta; alpha+2; b)
                        / 2F1(alpha,   1-beta; alpha+1; b),
    which avoids the b**alpha underflow of the two integrals for large
    fitted shapes.
    """
    if not 0.0 < b_hat <= 1.0:
        raise DomainError(f"truncation point must be in (0, 1], got {b_hat}")
    a, b = p.alpha, p.beta
    if b_hat == 1.0:
        # complete-beta ratio: Beta(a+1, b) / Beta(a, b)
        g = a / (a + b)
    else:
        g = (
            b_hat
            * a
            / (a + 1.0)
            * hypergeometric_f(a + 1.0, 1.0 - b, a + 2.0, b_hat)
            / hypergeometric_f(a, 1.0 - b, a + 1.0, b_hat)
        )
    return p.lower + (p.upper - p.lower) * g


def iterate_bound(p: GbParams, k_max: int) -> tuple[tuple[TruncationState, ...], bool]:
    """Iterated truncation states for K = 1..k_max.

    State 1 is the construction-stage bound 1.5 * lower (as a truncated
    support point); each later state truncates at the previous mean and
    takes the new mean.  Returns (states, start_clipped); the flag is set
    when 1.5 * lower already exceeds the upper support and the iteration
    had to start at the full support instead.
    """
    if k_max < 1:
        raise DomainError(f"need k_max >= 1, got {k_max}")
    span = p.upper - p.lower
    b1 = 0.5 * p.lower / span
    clipped = b1 >= 1.0 or b1 <= 0.0
    if clipped:
        b1 = 1.0
    states = [TruncationState(k=1, truncation=b1, mean=p.lower + span * b1)]
    for k in range(2, k_max + 1):
        b = (states[-1].mean - p.lower) / span
        states.append(TruncationState(k=k, truncation=b, mean=truncated_mean(p, b)))
    return tuple(states), clipped


def closed_form_ratio(alpha: float, k: int) -> float:
    """Approximation ratio after k iterations:
    1 + 0.5 * ((alpha + 1) / (alpha + 2)) ** (k - 1)."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    return 1.0 + 0.5 * ((alpha + 1.0) / (alpha + 2.0)) ** (k - 1)


def iterations_for_target(alpha: float, target: float) -> int:
    """Smallest iteration count whose closed-form ratio is <= target."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if target <= 1.0:
        raise DomainError("ratio 1 unreachable in finite K")
    if target >= 1.5:
        return 1
    r = (alpha + 1.0) / (alpha + 2.0)
    k = 1 + max(1, math.ceil(math.log(2.0 * (target - 1.0)) / math.log(r)))
    while closed_form_ratio(alpha, k) > target:
        k += 1
    while k > 1 and closed_form_ratio(alpha, k - 1) <= target:
        k -= 1
    return k


def fit_params(samples, lower: float, upper: float) -> GbParams:
    """Method-of-moments fit of the shape parameters from tour lengths.

    Samples are normalized to [0, 1]; with mean m and (sample) variance v,
    c = m (1 - m) / v - 1, alpha = m c, beta = (1 - m) c.
    """
    xs = np.asarray(list(samples), dtype=float)
    if len(xs) < 2:
        raise FitError("need at least 2 samples")
    if not upper > lower:
        raise DomainError(f"need upper > lower, got [{lower}, {upper}]")
    if xs.min() < lower - 1e-9 * max(1.0, abs(lower)) or xs.max() > upper + 1e-9 * max(
        1.0, abs(upper)
    ):
        raise FitError("samples outside the [lower, upper] support")
    norm = (xs - lower) / (upper - lower)
    m = float(norm.mean())
    v = float(norm.var(ddof=1))
    if v <= 1e-12:
        # variance at rounding-noise level gives absurd shape parameters
        raise FitError("zero sample variance; cannot fit shape parameters")
    c = m * (1.0 - m) / v - 1.0
    if c <= 0.0:
        raise FitError(
            "sample variance too large for a beta-family fit; gather more samples"
        )
    return GbParams(alpha=m * c, beta=(1.0 - m) * c, lower=lower, upper=upper)
