"""Sphere-averaged kernels on the multiplicative group and their L1 norms.

The basic object is

    psi_{alpha,n,ell}(t) = avg_{xi in S^{n-1}} xi_1^ell (t + 1/t - 2 xi_1)^{-(n-alpha)/2}

Projecting the normalised surface measure onto xi_1 = s gives the density
c_n (1 - s^2)^{(n-3)/2} on (-1, 1).  With x = 1 - s and t = e^u the integrand
becomes (1 - x)^ell [2(delta + x)]^{-p} x^a (2 - x)^a, delta = cosh u - 1,
which is nearly singular at x = 0 when u is small.  The x-interval is
therefore split into panels that grow geometrically from delta, with a
Gauss-Jacobi rule absorbing x^a on the first panel and (2 - x)^a on [1, 2].

L1 norms on (R_+, dt/t) are integrals over u; the t <-> 1/t symmetry folds
them onto u >= 0, where panels shrink geometrically toward u = 0 (the
kernel behaves like |u|^{alpha-1} there) and have fixed width in the
exponentially decaying tail.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import constants
from ._quadrature import gauss_jacobi, gauss_legendre, map_rule, pairwise_sum
from .errors import (
    BoundaryLeakError,
    DivergenceError,
    DomainError,
    GridMismatchError,
    QuadratureError,
    SingularEvaluationError,
)

DEFAULT_REL_TOL = 1e-8
DEFAULT_GRID_HALF_WIDTH = 60.0
DEFAULT_GRID_POINTS = 8193

_U_GRADING_LEVELS = 60
_MAX_ORDER = 96
_CHUNK = 2048


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    est_error: float
    evaluations: int

    def __post_init__(self):
        if not math.isfinite(self.est_error) or self.est_error < 0:
            raise ValueError(f"bad error estimate {self.est_error}")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be positive")


@dataclass(frozen=True)
class KernelSpec:
    """A member of the psi family, or the kappa kernel t^{sigma/4 - rho/2} psi_{sigma/2}."""

    n: int
    alpha: float = 0.0
    ell: int = 0
    family: str = "psi"
    rho: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise DomainError(f"ell must be a non-negative integer, got {self.ell}")
        if self.family == "psi":
            if not 0 < self.alpha < self.n:
                raise DomainError(f"psi kernel needs 0 < alpha < n, got alpha={self.alpha}")
        elif self.family == "kappa":
            if not 0 < self.sigma < 2 * self.n:
                raise DomainError(f"kappa kernel needs 0 < sigma < 2n, got sigma={self.sigma}")
        else:
            raise DomainError(f"unknown kernel family {self.family!r}")

    @property
    def alpha_eff(self):
        """Parameter of the underlying psi kernel."""
        return self.alpha if self.family == "psi" else self.sigma / 2.0

    @property
    def exponent(self):
        """p in (t + 1/t - 2 xi_1)^{-p}."""
        return (self.n - self.alpha_eff) / 2.0

    @property
    def log_weight(self):
        """q in the extra factor t^q (zero for psi)."""
        return 0.0 if self.family == "psi" else self.sigma / 4.0 - self.rho / 2.0

    @property
    def decay_rate(self):
        return self.exponent - abs(self.log_weight)

    def closed_L1(self):
        if self.family == "psi":
            return constants.psi_L1_closed(self.n, self.alpha, self.ell)
        return constants.kappa_L1_closed(self.n, self.rho, self.sigma)


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in u = ln t on [-L, L] with an odd number of points."""

    half_width: float = DEFAULT_GRID_HALF_WIDTH
    points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if not self.half_width > 0:
            raise DomainError("half_width must be positive")
        if self.points < 3 or self.points % 2 == 0:
            raise DomainError(f"points must be odd and >= 3, got {self.points}")

    @property
    def step(self):
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def nodes(self):
        return np.linspace(-self.half_width, self.half_width, self.points)

    @property
    def center(self):
        return (self.points - 1) // 2


# ---------------------------------------------------------------------------
# s-integral (sphere average) machinery


def _sphere_density_constant(n):
    return math.exp(math.lgamma(n / 2) - 0.5 * math.log(math.pi) - math.lgamma((n - 1) / 2))


def _s_rule(n, delta_min, order):
    """Nodes x = 1 - s in (0, 2) and weights that include c_n x^a (2 - x)^a.

    Panels on [0, 1] double in width starting from delta_min, the distance
    to the nearest singularity at x = -delta.
    """
    a = (n - 3) / 2.0
    cn = _sphere_density_constant(n)
    xs, ws = [], []
    d = min(delta_min, 0.5)
    # first panel [0, d] carries x^a in the rule
    y, wy = gauss_jacobi(order, 0.0, a)
    xs.append(0.5 * d * (1.0 + y))
    ws.append(wy * (0.5 * d) ** (a + 1) * (2.0 - xs[-1]) ** a)
    lo = d
    yl, wl = gauss_legendre(order)
    while lo < 1.0:
        hi = 1.0 if 4.0 * lo > 1.0 else 2.0 * lo
        x, w = map_rule(yl, wl, lo, hi)
        xs.append(x)
        ws.append(w * x**a * (2.0 - x) ** a)
        lo = hi
    y, wy = gauss_jacobi(order, a, 0.0)
    x = 1.5 + 0.5 * y
    xs.append(x)
    ws.append(wy * 0.5 ** (a + 1) * x**a)
    return np.concatenate(xs), cn * np.concatenate(ws)


def _log_two_delta_plus_x(u, x):
    """log(t + 1/t - 2s) = log(2(cosh u - 1) + 2x) for u >= 0, broadcast."""
    u = np.asarray(u, dtype=float)
    big = u > 20.0
    out = np.empty(np.broadcast(u, x).shape)
    us = np.where(big, 0.0, u)
    delta = 2.0 * np.sinh(0.5 * us) ** 2
    small_val = np.log(2.0 * (delta + x))
    ub = np.where(big, u, 20.0)
    eb = np.exp(-ub)
    big_val = ub + np.log1p(eb * eb - 2.0 * (1.0 - x) * eb)
    out[...] = np.where(big, big_val, small_val)
    return out


def _psi_scaled(n, alpha, ell, u, shifts, order):
    """Sum over the s-rule of (1-x)^ell exp(shift - p log(...)) for u > 0.

    ``u`` is a 1-D array of positive values sharing one graded rule;
    ``shifts`` is a sequence of arrays (same shape as u) giving extra log
    factors.  Returns one array per shift and the number of evaluations.
    """
    p = (n - alpha) / 2.0
    delta_min = 2.0 * math.sinh(0.5 * float(np.min(u))) ** 2
    if delta_min <= 0.0:
        raise SingularEvaluationError("u = 0 must be handled by the exact endpoint rule")
    x, w = _s_rule(n, delta_min, order)
    sl = (1.0 - x) ** ell if ell else np.ones_like(x)
    ws = w * sl
    outs = [np.empty(u.shape) for _ in shifts]
    for start in range(0, u.size, _CHUNK):
        sl_u = slice(start, start + _CHUNK)
        lg = _log_two_delta_plus_x(u[sl_u, None], x[None, :])
        for out, sh in zip(outs, shifts):
            out[sl_u] = np.exp(sh[sl_u, None] - p * lg) @ ws
    return outs, u.size * x.size


def _psi_at_one(n, alpha, ell, order):
    p = (n - alpha) / 2.0
    if alpha <= 1.0:
        raise SingularEvaluationError(
            f"psi is infinite at t = 1 when alpha <= 1 (alpha={alpha})"
        )
    a = (n - 3) / 2.0
    cn = _sphere_density_constant(n)
    # [0, 1] with weight x^{a-p}: integrand (1-x)^ell (2-x)^a 2^{-p}
    y, wy = gauss_jacobi(order, 0.0, a - p)
    x = 0.5 * (1.0 + y)
    left = np.sum(wy * 0.5 ** (a - p + 1) * (1.0 - x) ** ell * (2.0 - x) ** a) * 2.0**-p
    y, wy = gauss_jacobi(order, a, 0.0)
    x = 1.5 + 0.5 * y
    right = np.sum(wy * 0.5 ** (a + 1) * x**a * (1.0 - x) ** ell * (2.0 * x) ** -p)
    return cn * (left + right), 2 * order


def sphere_average(n, g, rel_tol=1e-12):
    """Normalised average of g(xi_1) over S^{n-1} by Gauss-Jacobi quadrature.

    ``g`` must accept numpy arrays.  The order doubles from 16 until two
    consecutive rules agree to ``rel_tol``.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    a = (n - 3) / 2.0
    cn = _sphere_density_constant(n)

    def rule(order):
        x, w = gauss_jacobi(order, a, a)
        gx = np.asarray(g(x), dtype=float)
        # the |g| integral sets the scale when the average itself cancels to ~0
        return cn * float(np.dot(w, gx)), cn * float(np.dot(w, np.abs(gx)))

    order = 16
    prev, _ = rule(order)
    evaluations = order
    while order < 2048:
        order *= 2
        cur, mag = rule(order)
        evaluations += order
        err = abs(cur - prev)
        if not math.isfinite(cur):
            break
        if err <= rel_tol * max(abs(cur), mag, 1e-300):
            return QuadratureResult(cur, err, evaluations)
        prev = cur
    raise QuadratureError("sphere average did not converge; is g integrable?", abs(cur - prev))


def _psi_point(n, alpha, ell, t, order):
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"t must be a positive finite real, got {t}")
    u = abs(math.log(t))
    if u == 0.0:
        return _psi_at_one(n, alpha, ell, order)
    (val,), evals = _psi_scaled(n, alpha, ell, np.array([u]), [np.zeros(1)], order)
    return float(val[0]), evals


def psi_eval(spec, t, rel_tol=1e-12):
    """Pointwise psi_{alpha,n,ell}(t) (kappa specs include their t^q factor)."""
    n, alpha, ell = spec.n, spec.alpha_eff, spec.ell
    order = 16
    prev, _ = _psi_point(n, alpha, ell, t, order)
    # |xi_1^ell| <= 1, so the ell = 0 kernel bounds the size of the integrand;
    # odd ell can cancel well below it.
    scale = abs(prev) if ell == 0 else _psi_point(n, alpha, 0, t, order)[0]
    while True:
        order *= 2
        cur, _ = _psi_point(n, alpha, ell, t, order)
        tol = rel_tol * max(abs(cur), scale)
        if abs(cur - prev) <= tol or order >= _MAX_ORDER:
            break
        prev = cur
    if abs(cur - prev) > max(tol, 1e-13 * scale):
        raise QuadratureError("pointwise kernel evaluation did not converge", abs(cur - prev))
    return cur * t**spec.log_weight


# ---------------------------------------------------------------------------
# u-integral (L1 norms on the multiplicative group)


def _u_panels(alpha, upper, rate):
    """Yield (lo, hi, beta) panels covering [0, upper] for the folded integral.

    ``beta`` is the Jacobi exponent at the left end (u^beta weight), used
    only on the innermost panel.
    """
    u0 = min(1.0, upper)
    edges = [u0 * 2.0**-k for k in range(_U_GRADING_LEVELS, -1, -1)]
    first_beta = alpha - 1.0 if alpha < 1.0 else 0.0
    yield 0.0, edges[0], first_beta
    for lo, hi in zip(edges[:-1], edges[1:]):
        yield lo, hi, 0.0
    if upper <= 1.0:
        return
    width = min(4.0, 4.0 / rate) if rate > 0 else 4.0
    lo = 1.0
    while lo < upper:
        hi = min(upper, lo + width)
        yield lo, hi, 0.0
        lo = hi


def _fold_integral(n, alpha, ell, q, upper, order, absolute=True):
    """int_0^upper [K(e^u) + K(e^-u)] du with K(t) = t^q psi_{alpha,n,ell}(t).

    With ``upper = inf`` this is the L1(dt/t) norm (or integral, if
    ``absolute`` is false).  Returns (value, evaluations).
    """
    p = (n - alpha) / 2.0
    rate = p - abs(q)
    if math.isinf(upper) and rate <= 0:
        raise DivergenceError(f"kernel does not decay: exponent {p} vs weight {q}")
    total_parts = []
    evaluations = 0
    running = 0.0
    for lo, hi, beta in _u_panels(alpha, upper, rate):
        if beta != 0.0:
            y, wy = gauss_jacobi(order, 0.0, beta)
            u = lo + 0.5 * (hi - lo) * (1.0 + y)
            wu = wy * (0.5 * (hi - lo)) ** (beta + 1.0) * u ** (-beta)
        else:
            y, wy = gauss_legendre(order)
            u, wu = map_rule(y, wy, lo, hi)
        (plus, minus), ev = _psi_scaled(n, alpha, ell, u, [q * u, -q * u], order)
        evaluations += ev
        if absolute:
            vals = np.abs(plus) + np.abs(minus)
        else:
            vals = plus + minus
        contrib = float(np.dot(wu, vals))
        total_parts.append(contrib)
        running += contrib
        if math.isinf(upper) and lo >= 1.0 and abs(contrib) <= 1e-18 * abs(running) and rate * hi > 10:
            break
        if len(total_parts) > 20000:
            raise QuadratureError("tail of the kernel integral did not terminate", abs(contrib))
    return pairwise_sum(total_parts), evaluations


def _nested_fold(n, alpha, ell, q, upper, rel_tol, absolute=True, start_order=12):
    order = start_order
    prev, evals = _fold_integral(n, alpha, ell, q, upper, order, absolute)
    while True:
        order *= 2
        cur, ev = _fold_integral(n, alpha, ell, q, upper, order, absolute)
        evals += ev
        err = abs(cur - prev)
        if err <= rel_tol * abs(cur):
            return QuadratureResult(cur, err, evals)
        if order >= _MAX_ORDER:
            raise QuadratureError(
                f"kernel integral stalled at relative error {err / abs(cur):.3g}", err
            )
        prev = cur


def psi_L1_numeric(spec, rel_tol=DEFAULT_REL_TOL):
    """||psi||_{L1(dt/t)} (or ||kappa||) by nested 2-D quadrature in (u, s)."""
    if spec.family == "psi" and not 0 < spec.alpha < spec.n:
        raise DivergenceError(f"psi kernel norm diverges for alpha={spec.alpha}, n={spec.n}")
    return _nested_fold(spec.n, spec.alpha_eff, spec.ell, spec.log_weight, math.inf, rel_tol)


def kappa_L1_numeric(n, rho, sigma, rel_tol=DEFAULT_REL_TOL):
    """Numeric L1 norm of t^{sigma/4 - rho/2} psi_{sigma/2}(t)."""
    bad = [
        name for name, v in (
            ("sigma/4", sigma / 4), ("n/2 - sigma/4", n / 2 - sigma / 4),
            ("(n - rho)/2", (n - rho) / 2), ("(n + rho)/2", (n + rho) / 2),
            ("(n + rho - sigma)/4", (n + rho - sigma) / 4), ("(n + sigma - rho)/4", (n + sigma - rho) / 4),
        ) if v <= 0
    ]
    if bad:
        raise DivergenceError(f"kappa norm diverges: nonpositive {', '.join(bad)}")
    return psi_L1_numeric(KernelSpec(n, family="kappa", rho=rho, sigma=sigma), rel_tol)


def kernel_recursion_residual(n, alpha, ell, t, rel_tol=1e-13):
    """psi_{a,n,l+2}(t) - psi_{a,n,l}(t) + ((n-1)/n) psi_{a+2,n+2,l}(t)."""
    hi = psi_eval(KernelSpec(n, alpha, ell + 2), t, rel_tol)
    lo = psi_eval(KernelSpec(n, alpha, ell), t, rel_tol)
    up = psi_eval(KernelSpec(n + 2, alpha + 2, ell), t, rel_tol)
    return hi - lo + (n - 1) / n * up


# ---------------------------------------------------------------------------
# Riesz potentials


def _check_riesz(n, beta, delta):
    if not (0 < beta < n and 0 < delta < n and n < beta + delta < 2 * n):
        raise DomainError(
            f"need 0 < beta, delta < n and n < beta + delta < 2n; got n={n}, beta={beta}, delta={delta}"
        )


def riesz_convolution_constant(n, beta, delta):
    """Constant c with |x|^-beta * |x|^-delta = c |x|^-(beta + delta - n)."""
    _check_riesz(n, beta, delta)
    lg = math.lgamma
    return math.exp(
        0.5 * n * math.log(math.pi)
        + lg((n - beta) / 2) + lg((n - delta) / 2) + lg((beta + delta - n) / 2)
        - lg(beta / 2) - lg(delta / 2) - lg((2 * n - beta - delta) / 2)
    )


def riesz_convolution_numeric(n, beta, delta, rel_tol=1e-9):
    """int |x - y|^-beta |y|^-delta dy at |x| = 1 by (r, s) quadrature.

    In polar coordinates y = r xi the angular average of |x - r xi|^-beta is
    r^{-beta/2} psi_{n-beta}(r), so the integral is
    |S^{n-1}| int e^{u(n - delta - beta/2)} psi_{n-beta}(e^u) du.
    """
    _check_riesz(n, beta, delta)
    res = _nested_fold(n, n - beta, 0, n - delta - beta / 2.0, math.inf, rel_tol)
    area = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    return QuadratureResult(area * res.value, area * res.est_error, res.evaluations)


# ---------------------------------------------------------------------------
# Convolution on the log grid


def _check_samples(arr, grid, name):
    arr = np.asarray(arr, dtype=float)
    if arr.shape != (grid.points,):
        raise GridMismatchError(f"{name} has shape {arr.shape}, grid expects ({grid.points},)")
    return arr


def multiplicative_convolve(kernel, h, grid):
    """Trapezoidal convolution in u = ln t, returned on the same grid.

    (K * h)(u_i) = step * sum_j K(u_j) h(u_i - u_j); values outside the
    grid count as zero.  Error O(step^2) for smooth inputs.
    """
    kernel = _check_samples(kernel, grid, "kernel")
    h = _check_samples(h, grid, "h")
    return grid.step * np.convolve(kernel, h, mode="same")


def kernel_cell_averages(spec, grid, order=10, scale=1.0):
    """Cell averages (1/step) int_{cell} K(e^u) du of a kernel on the grid.

    Cell averages make step * sum(weights) equal to the kernel's integral
    over [-L - step/2, L + step/2], so discrete Young bounds inherit the
    continuous constant.  The centre cell uses the singular u-rule.
    """
    n, alpha, ell, q = spec.n, spec.alpha_eff, spec.ell, spec.log_weight
    step = grid.step
    c = grid.center
    centre, _ = _fold_integral(n, alpha, ell, q, 0.5 * step, 24, absolute=False)
    k = np.arange(1, c + 1)
    y, wy = gauss_legendre(order)
    # nodes in the positive cells, shape (c, order)
    u = (k[:, None] + 0.5 * y[None, :]) * step
    flat = u.ravel()
    (plus, minus), _ = _psi_scaled(n, alpha, ell, flat, [q * flat, -q * flat], 24)
    pos = (plus.reshape(u.shape) @ wy) * 0.5
    neg = (minus.reshape(u.shape) @ wy) * 0.5
    out = np.empty(grid.points)
    out[c] = centre / step
    out[c + 1:] = pos
    out[:c] = neg[::-1]
    return scale * out


def _check_leak(weights, name="kernel", tol=1e-14):
    peak = np.max(np.abs(weights))
    edge = max(abs(weights[0]), abs(weights[-1]))
    if edge > tol * peak:
        raise BoundaryLeakError(
            f"{name} is {edge / peak:.3g} of its peak at the grid edge; widen the grid"
        )


def discrete_operator_ratio(weights, h, grid):
    """||K * h||_2 / ||h||_2 using the full discrete convolution."""
    h = _check_samples(h, grid, "h")
    weights = _check_samples(weights, grid, "kernel")
    out = grid.step * np.convolve(weights, h, mode="full")
    return math.sqrt(pairwise_sum(out * out) / pairwise_sum(h * h))


def gaussian_on_grid(grid, sigma_u):
    if not sigma_u > 0:
        raise DomainError("sigma_u must be positive")
    u = grid.nodes
    return np.exp(-0.5 * (u / sigma_u) ** 2)


def young_sharpness_ratio(spec, sigma_u, grid=None):
    """||K * h_sigma|| / ||h_sigma|| for a Gaussian h_sigma(u) = exp(-u^2 / 2 sigma_u^2).

    The Gaussian is used as sampled (zero outside the grid); only the kernel
    has to vanish at the grid edge.  Approaches ||K||_1 from below as
    sigma_u grows.
    """
    grid = grid or LogGrid()
    weights = kernel_cell_averages(spec, grid)
    _check_leak(weights)
    return discrete_operator_ratio(weights, gaussian_on_grid(grid, sigma_u), grid)
