"""Closed-form sharp constants for power- and log-weighted L2 inequalities.

Naming follows the inequalities rather than symbols:

* ``pitt_C``          weighted Fourier inequality |x|^-a vs |y|^a
* ``stein_weiss_B``   bilinear fractional integral with power weights
* ``gradient_term``   one spherical-harmonic stratum of the gradient form
* ``pitt_gradient_D`` max of those strata (with argmax bookkeeping)
* ``iterated_*``      four-fold potential and its Sobolev-type form

All Gamma ratios go through :mod:`steinweiss.special` in the log domain.
"""

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .special import digamma, log_gamma

K_MAX_DEFAULT = 50

# Regime labels for which stratum realises the gradient constant.
REGIME_A = "A"  # k = 1
REGIME_B = "B"  # k = 0
REGIME_TRANSITION = "transition"


def _lg(x):
    if x <= 0:
        raise DomainError(f"Gamma argument must be positive, got {x:.17g}")
    return log_gamma(x)


def _sphere_area(dim):
    """Surface area of the unit sphere S^{dim-1} in R^dim."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class PittParams:
    n: int
    alpha: float
    open_interval: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n}")
        a = float(self.alpha)
        if not math.isfinite(a):
            raise DomainError("alpha must be finite")
        lo_ok = a > 0 if self.open_interval else a >= 0
        if not (lo_ok and a < self.n):
            bracket = "(0, n)" if self.open_interval else "[0, n)"
            raise DomainError(f"alpha={a} outside {bracket} for n={self.n}")


@dataclass(frozen=True)
class GradientTermParams:
    n: int
    alpha: float
    k: int

    def __post_init__(self):
        PittParams(self.n, self.alpha)
        if self.n < 2:
            raise DomainError("gradient constants need n >= 2")
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"harmonic degree k must be a non-negative integer, got {self.k}")


@dataclass(frozen=True)
class IteratedParams:
    n: int
    alpha: float
    rho: float
    sigma: float

    @property
    def beta(self):
        return self.alpha + self.sigma - self.rho

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("iterated potentials need n >= 2")
        for name in ("alpha", "rho", "sigma", "beta"):
            v = getattr(self, name)
            if not 0 < v < self.n:
                raise DomainError(f"{name}={v} outside (0, {self.n})")


@dataclass(frozen=True)
class IterGradParams:
    n: int
    alpha: float
    ell: int

    def __post_init__(self):
        PittParams(self.n, self.alpha)
        if self.n < 2:
            raise DomainError("gradient constants need n >= 2")
        if int(self.ell) != self.ell or self.ell < 0:
            raise DomainError(f"ell must be a non-negative integer, got {self.ell}")


@dataclass
class RegimeReport:
    argmax_k: int
    D_alpha: float
    per_k_terms: list = field(default_factory=list)
    regime_label: str = REGIME_TRANSITION

    def as_dict(self):
        return {
            "argmax_k": self.argmax_k,
            "D_alpha": self.D_alpha,
            "regime_label": self.regime_label,
            "per_k_terms": [[k, v] for k, v in self.per_k_terms],
        }


# ---------------------------------------------------------------------------
# Pitt, Stein-Weiss and logarithmic constants


def pitt_C(n, alpha):
    """pi^a [Gamma((n-a)/4) / Gamma((n+a)/4)]^2, valid for 0 <= a < n."""
    PittParams(n, alpha, open_interval=False)
    return math.exp(alpha * math.log(math.pi) + 2.0 * (_lg((n - alpha) / 4) - _lg((n + alpha) / 4)))


def log_uncertainty_D(n):
    """psi(n/4) - ln(pi). Negative for small n."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return digamma(n / 4.0) - math.log(math.pi)


def riesz_fourier_factor(n, p):
    """Coefficient c with F[|x|^-p] = c |y|^-(n-p), for 0 < p < n."""
    if not 0 < p < n:
        raise DomainError(f"need 0 < p < n, got p={p}, n={n}")
    return math.exp((p - n / 2.0) * math.log(math.pi) + _lg((n - p) / 2) - _lg(p / 2))


def stein_weiss_B(n, alpha):
    """Bound for the bilinear form f |x|^-a/2 |x-y|^-(n-a) |y|^-a/2 f."""
    PittParams(n, alpha)
    log_b = (
        0.5 * n * math.log(math.pi)
        + _lg(alpha / 2) - _lg((n - alpha) / 2)
        + 2.0 * (_lg((n - alpha) / 4) - _lg((n + alpha) / 4))
    )
    return math.exp(log_b)


def stein_weiss_operator_constant(n, alpha):
    """Norm of g -> |x|^-a/2 (|x|^-(n - a/2) * g) on L2(R^n)."""
    PittParams(n, alpha)
    log_c = (
        0.5 * n * math.log(math.pi)
        + _lg(alpha / 4) + _lg((n - alpha) / 4)
        - _lg(n / 2 - alpha / 4) - _lg((n + alpha) / 4)
    )
    return math.exp(log_c)


def weighted_sobolev_constant(n, alpha):
    """C in ||h|| <= C ||(-Delta)^{a/4} (|x|^{a/2} h)||."""
    PittParams(n, alpha)
    return 2.0 ** (-alpha / 2) * math.exp(_lg((n - alpha) / 4) - _lg((n + alpha) / 4))


def weighted_sobolev_constant_squared_form(n, alpha):
    """C in ||h|| <= C || |x|^{a/2} (-Delta)^{a/2} (|x|^{a/2} h)||."""
    return weighted_sobolev_constant(n, alpha) ** 2


# ---------------------------------------------------------------------------
# Gradient form: per-stratum terms and their maximum


def log_gradient_term(n, alpha, k):
    GradientTermParams(n, alpha, k)
    log_t = 2.0 * (_lg((n + 2 * k - alpha + 2) / 4) - _lg((n + 2 * k + alpha + 2) / 4))
    if k > 0:
        # k >= 1 keeps n + 2k - a - 2 > 0 because a < n.
        log_t += math.log1p(4.0 * k * alpha / (n + 2 * k - alpha - 2) ** 2)
    return log_t


def gradient_term(n, alpha, k):
    """Stratum-k term of the gradient constant, without the pi^a factor.

    The parenthesised factor 1 + 4ka/(n+2k-a-2)^2 is exactly 1 at k = 0.
    """
    return math.exp(log_gradient_term(n, alpha, k))


def regime_label(n, alpha):
    if n - 2 <= alpha < n:
        return REGIME_A
    if n >= 4 and 0 < alpha <= n - 3:
        return REGIME_B
    return REGIME_TRANSITION


def pitt_gradient_D(n, alpha, k_max=K_MAX_DEFAULT):
    """pi^a times the largest gradient_term over k = 0..k_max."""
    PittParams(n, alpha)
    if n < 2:
        raise DomainError("gradient constants need n >= 2")
    if int(k_max) != k_max or k_max < 1:
        raise DomainError(f"k_max must be an integer >= 1, got {k_max}")
    logs = [log_gradient_term(n, alpha, k) for k in range(k_max + 1)]
    best = max(range(len(logs)), key=logs.__getitem__)
    return RegimeReport(
        argmax_k=best,
        D_alpha=math.exp(alpha * math.log(math.pi) + logs[best]),
        per_k_terms=[(k, math.exp(v)) for k, v in enumerate(logs)],
        regime_label=regime_label(n, alpha),
    )


def n2_gradient_D(alpha):
    """Closed form of the gradient constant in dimension two (k = 1 wins)."""
    if not 0 < alpha < 2:
        raise DomainError(f"need 0 < alpha < 2, got {alpha}")
    log_d = (
        alpha * math.log(math.pi)
        + 2.0 * (_lg(1.5 - alpha / 4) - _lg(1.5 + alpha / 4))
        + math.log(4.0 + alpha * alpha)
        - 2.0 * math.log(2.0 - alpha)
    )
    return math.exp(log_d)


def trace_constant(n):
    """Constant for |grad f|^2 |x|^-1 against |(-Delta)^{3/4} f|^2."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if n == 2:
        return 2.5 * math.exp(2.0 * (_lg(1.25) - _lg(1.75)))
    if n == 3:
        return math.pi / 4.0
    return 0.5 * math.exp(2.0 * (_lg((n + 1) / 4) - _lg((n + 3) / 4)))


def regime_classify(n, alpha, k_max=K_MAX_DEFAULT):
    """Exhaustive argmax plus the A/B/transition label.

    Raises ``AssertionError`` if the search contradicts a proven label,
    which would mean a numerical fault rather than a user error.
    """
    report = pitt_gradient_D(n, alpha, k_max)
    expected = {REGIME_A: 1, REGIME_B: 0}.get(report.regime_label)
    if expected is not None and report.argmax_k != expected:
        raise AssertionError(
            f"argmax k={report.argmax_k} contradicts regime {report.regime_label} "
            f"at n={n}, alpha={alpha}"
        )
    return report


def asymptotic_D(n, alpha):
    """Large-dimension approximation (4 pi / n)^a."""
    PittParams(n, alpha)
    return (4.0 * math.pi / n) ** alpha


def log_gradient_E(n):
    """Constant of the log-weighted gradient inequality."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    if n == 2:
        return digamma(1.5) - math.log(math.pi) - 1.0
    return digamma(n / 4 + 0.5) - math.log(math.pi)


# ---------------------------------------------------------------------------
# Proof-internal log ratios (k = 1 term over k = 0 term)


def log_term_ratio(n, alpha):
    """ln(term_1 / term_0) for the gradient constant at (n, alpha)."""
    return log_gradient_term(n, alpha, 1) - log_gradient_term(n, alpha, 0)


def _lambda_trace(w):
    if not w >= 1:
        raise DomainError(f"trace parameter w must be >= 1, got {w}")
    return (
        4.0 * _lg(w + 0.75) - 2.0 * _lg(w + 0.25) - 2.0 * _lg(w + 1.25)
        + math.log1p(4.0 / (4.0 * w - 1.0) ** 2)
    )


def _lambda_n3(alpha):
    if not 0 < alpha < 3:
        raise DomainError(f"alpha must lie in (0, 3), got {alpha}")
    return (
        2.0 * (_lg((7 - alpha) / 4) + _lg((5 + alpha) / 4) - _lg((7 + alpha) / 4) - _lg((5 - alpha) / 4))
        + math.log((alpha * alpha - 2 * alpha + 9) / (3 - alpha) ** 2)
    )


def _lambda_a_boundary(w):
    # alpha = n - 2 with n = w treated as continuous.
    if not w > 1:
        raise DomainError(f"w must exceed 1, got {w}")
    return 2.0 * (_lg(1.5) + _lg(w / 2) - _lg((w + 1) / 2)) + math.log(w - 1.0)


_LAMBDA_KINDS = {
    "trace_w": _lambda_trace,
    "n3_alpha": _lambda_n3,
    "A_boundary": _lambda_a_boundary,
}


def lambda_diagnostics(kind, x):
    """Log ratio of the k = 1 to the k = 0 term along one proof parameterisation.

    ``trace_w``: alpha = 1, n = 4w.  ``n3_alpha``: n = 3.  ``A_boundary``:
    alpha = n - 2 with n = x.
    """
    try:
        fn = _LAMBDA_KINDS[kind]
    except KeyError:
        raise DomainError(f"unknown lambda kind {kind!r}; choose from {sorted(_LAMBDA_KINDS)}") from None
    return fn(float(x))


def lambda_n3_slope_at_zero():
    """d/d(alpha) of the n = 3 log ratio at alpha = 0."""
    return -digamma(1.75) + digamma(1.25) + 4.0 / 9.0


def lambda_trace_printed(w=1.0):
    """The trace log ratio at w = 1 as printed in the source: ln[117/25 G(3/4)^4 / G(1/4)^4].

    Differs from the true value ``lambda_diagnostics('trace_w', 1)`` by
    exactly ln 16; kept so reports can show both.
    """
    if w != 1.0:
        raise DomainError("the printed closed form exists only at w = 1")
    return math.log(117.0 / 25.0) + 4.0 * (_lg(0.75) - _lg(0.25))


# ---------------------------------------------------------------------------
# Kernel norms and iterated potentials


def psi_L1_closed(n, alpha, ell):
    """Closed-form L1(dt/t) norm of the sphere-averaged kernel with (xi_1)^ell."""
    PittParams(n, alpha)
    if n < 2:
        raise DomainError("kernel norms need n >= 2")
    if ell not in (0, 1, 2):
        raise DomainError(
            f"no closed form for ell={ell}; use iterated_gradient_D (even ell) "
            "or kernels.psi_L1_numeric"
        )
    pre = _lg(n / 2) + _lg(alpha / 2) - math.log(2.0) - _lg((n - alpha) / 2)
    if ell == 1:
        return math.exp(pre + 2.0 * (_lg((n - alpha + 2) / 4) - _lg((n + alpha + 2) / 4)))
    base = math.exp(pre + 2.0 * (_lg((n - alpha) / 4) - _lg((n + alpha) / 4)))
    if ell == 0:
        return base
    return base * ((n - alpha) ** 2 + 4.0 * alpha) / (n + alpha) ** 2


def kernel_normalization(n, alpha):
    """Factor N with D_{alpha,ell} = N * ||psi_{alpha,ell}||_1."""
    PittParams(n, alpha)
    return math.exp(
        math.log(2.0) + alpha * math.log(math.pi) + _lg((n - alpha) / 2) - _lg(n / 2) - _lg(alpha / 2)
    )


def iterated_gradient_closed_ell2(n, alpha):
    """pi^a [G((n-a)/4)/G((n+a)/4)]^2 ((n-a)^2 + 4a)/(n+a)^2."""
    return pitt_C(n, alpha) * ((n - alpha) ** 2 + 4.0 * alpha) / (n + alpha) ** 2


def recursion_coefficient(n, alpha, corrected=True):
    """Weight on D_{a+2, n+2, ell} in the step ell -> ell + 2.

    ``corrected=False`` gives the coefficient a(n-1)/4 as printed in the
    source, which is off by a factor pi^2.
    """
    c = alpha * (n - 1) / 4.0
    return c / math.pi**2 if corrected else c


def iterated_gradient_D(n, alpha, ell, corrected=True):
    """Radial constant D_{alpha,n,ell} for the iterated gradient form.

    Even ``ell`` uses the recursion
    D_{a,n,l+2} = D_{a,n,l} - a(n-1)/(4 pi^2) D_{a+2,n+2,l}
    from D_{a,n,0} = pitt_C(n, a); ``ell = 1`` returns the radial (k = 0)
    gradient constant.
    """
    IterGradParams(n, alpha, ell)
    if ell == 1:
        return math.pi**alpha * gradient_term(n, alpha, 0)
    if ell % 2:
        raise DomainError(f"odd ell={ell} >= 3 has no radial closed form")
    return _iter_grad_even(n, alpha, ell, corrected)


def _iter_grad_even(n, alpha, ell, corrected):
    if not 0 < alpha < n:
        raise DomainError(f"recursion left the range: alpha={alpha}, n={n}")
    if ell == 0:
        return pitt_C(n, alpha)
    lower = _iter_grad_even(n, alpha, ell - 2, corrected)
    shifted = _iter_grad_even(n + 2, alpha + 2, ell - 2, corrected)
    return lower - recursion_coefficient(n, alpha, corrected) * shifted


def _rho_divisor(printed):
    return 2.0 if printed else 4.0


def kappa_L1_closed(n, rho, sigma, printed=False):
    """Closed-form L1(dt/t) norm of t^{-rho/2 + sigma/4} psi_{sigma/2}(t).

    The norm equals the Riesz convolution constant for exponents
    (n - sigma/2, (n + rho)/2) divided by |S^{n-1}|, which puts (n -+ rho)/4
    into the rho-dependent Gamma pair.  ``printed=True`` uses (n -+ rho)/2
    instead, the published form, which disagrees with quadrature.
    """
    d = _rho_divisor(printed)
    log_k = (
        _lg(n / 2) + _lg(sigma / 4) + _lg((n - rho) / d) + _lg((n + rho - sigma) / 4)
        - math.log(2.0)
        - _lg(n / 2 - sigma / 4) - _lg((rho + n) / d) - _lg((n + sigma - rho) / 4)
    )
    return math.exp(log_k)


def _iterated_log_ratios(n, alpha, rho, sigma, printed=False):
    d = _rho_divisor(printed)
    r1 = _lg((n - alpha) / 4) - _lg((n + alpha) / 4)
    r2 = _lg(sigma / 4) - _lg(n / 2 - sigma / 4)
    r3 = _lg((n - rho) / d) - _lg((n + rho) / d)
    r4 = _lg((n + rho - sigma) / 4) - _lg((n + sigma - rho) / 4)
    return r1, r2, r3, r4


def iterated_B(n, alpha, rho, sigma, printed=False):
    """Bound for the four-fold Stein-Weiss form; beta = alpha + sigma - rho."""
    IteratedParams(n, alpha, rho, sigma)
    r1, r2, r3, r4 = _iterated_log_ratios(n, alpha, rho, sigma, printed)
    log_b = (
        1.5 * n * math.log(math.pi)
        + _lg(alpha / 2) - _lg((n - alpha) / 2)
        + 2.0 * (r1 + r2 + r3 + r4)
    )
    return math.exp(log_b)


def iterated_B_assembled(n, alpha, rho, sigma, printed=False):
    """(2 pi^{n/2} / Gamma(n/2))^3 ||kappa||_1^2 ||psi_alpha||_1 from the kernel norms."""
    IteratedParams(n, alpha, rho, sigma)
    kappa = kappa_L1_closed(n, rho, sigma, printed)
    return _sphere_area(n) ** 3 * kappa**2 * psi_L1_closed(n, alpha, 0)


def iterated_C(n, alpha, rho, sigma, printed=False):
    """Constant of ||h|| <= C ||(-D)^{rho/4} |x|^{sigma/2} (-D)^{beta/4} (|x|^{alpha/2} h)||."""
    IteratedParams(n, alpha, rho, sigma)
    r1, _, r3, r4 = _iterated_log_ratios(n, alpha, rho, sigma, printed)
    return math.exp(-(alpha + sigma) / 2 * math.log(2.0) + r1 + r3 + r4)
