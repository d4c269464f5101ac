"""Scalar Gamma-family functions evaluated in the log domain.

Every constant in this package is a ratio of Gamma values, often at
arguments large enough that Gamma itself overflows binary64, so nothing
here ever forms Gamma directly.
"""

import math

from scipy import integrate

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

# B_{2k} / (2k) for k = 1..7, used in the asymptotic digamma series.
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
# Shift point for the recurrence. At x >= 10 the first omitted term of the
# series, |B_16| / (16 x^16), is below 5e-17.
_DIGAMMA_SHIFT = 10.0


class PositiveReal(float):
    """A float that is finite and strictly positive."""

    def __new__(cls, value):
        x = float(value)
        if not math.isfinite(x) or x <= 0.0:
            raise DomainError(f"expected a finite positive real, got {value!r}")
        return super().__new__(cls, x)


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    return math.lgamma(PositiveReal(x))


def digamma(x):
    """Logarithmic derivative of Gamma for x > 0.

    Shifts the argument up to at least 10 with psi(x) = psi(x + 1) - 1/x,
    then sums the Bernoulli asymptotic series through the x^-14 term.
    """
    x = float(PositiveReal(x))
    shift = 0.0
    while x < _DIGAMMA_SHIFT:
        shift += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for coef in reversed(_DIGAMMA_ASYMPTOTIC):
        series = series * inv2 + coef
    return math.log(x) - 0.5 / x - series * inv2 - shift


def log_gamma_ratio(x, y):
    """ln[Gamma(x) / Gamma(y)]."""
    return log_gamma(x) - log_gamma(y)


def gamma_ratio(x, y, beta=0.0):
    """Gamma(x + beta) / Gamma(y + beta), computed as a log difference."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    a, b = x + beta, y + beta
    if a <= 0 or b <= 0:
        raise DomainError(f"shifted arguments must be positive, got {a}, {b}")
    return math.exp(log_gamma(a) - log_gamma(b))


def digamma_half_gap(w):
    """psi((w + 1)/2) - psi(w/2) for w > 1."""
    if not w > 1:
        raise DomainError(f"w must exceed 1, got {w}")
    return digamma(0.5 * (w + 1.0)) - digamma(0.5 * w)


def digamma_half_gap_integral(w, rel_tol=1e-13):
    """Same quantity from the Gauss integral 2 * int_0^inf e^{-wt} / (1 + e^{-t}) dt.

    Independent of :func:`digamma`; used to cross-check it.
    """
    if not w > 1:
        raise DomainError(f"w must exceed 1, got {w}")
    val, _ = integrate.quad(
        lambda t: math.exp(-w * t) / (1.0 + math.exp(-t)),
        0.0,
        math.inf,
        epsabs=0.0,
        epsrel=rel_tol,
        limit=200,
    )
    return 2.0 * val
