"""Scalar kernels for exponential fitting.

All functions accept Python floats or numpy arrays and return the same
shape. Arguments outside the documented domain raise ``ValueError``.
"""

from fractions import Fraction
from math import comb, factorial

import numpy as np

#: Below this magnitude the Taylor series of sigma is used instead of expm1.
SERIES_THRESHOLD = 1e-2
#: The kernels use their (longer) series below this argument; above it the
#: difference of reciprocals no longer cancels more than one binary digit.
KERNEL_SERIES_MAX = 2.0

# x/(1 - e^{-x}) = sum_n B_n^+ x^n / n!, truncated after x^10
_SIGMA_SERIES = (
    1.0,
    1.0 / 2.0,
    1.0 / 12.0,
    0.0,
    -1.0 / 720.0,
    0.0,
    1.0 / 30240.0,
    0.0,
    -1.0 / 1209600.0,
    0.0,
    1.0 / 47900160.0,
)


def _as_float_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _poly(coeffs, x):
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _unwrap(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def sigma(x):
    """Fitting factor ``x / (1 - exp(-x))``.

    The removable singularity at 0 is handled by a series, negative
    arguments by the equivalent form ``x e^x / expm1(x)`` so that large
    negative ``x`` underflows to zero instead of overflowing.
    """
    x = _as_float_array(x, "x")
    small = np.abs(x) < SERIES_THRESHOLD
    pos = (x > 0) & ~small
    neg = (x < 0) & ~small
    out = np.empty_like(x)
    with np.errstate(over="ignore", under="ignore"):
        out[small] = _poly(_SIGMA_SERIES, x[small])
        xp = x[pos]
        out[pos] = xp / -np.expm1(-xp)
        xn = x[neg]
        out[neg] = xn * np.exp(xn) / np.expm1(xn)
    return _unwrap(out, x)


def _check_rho(rho):
    rho = _as_float_array(rho, "rho")
    if np.any(rho <= 0):
        raise ValueError("rho must be strictly positive")
    return rho


def _bernoulli(n_max):
    """Exact Bernoulli numbers ``B_0 .. B_n_max`` (``B_1 = -1/2`` convention)."""
    b = [Fraction(1)]
    for m in range(1, n_max + 1):
        b.append(-sum(comb(m + 1, k) * b[k] for k in range(m)) / Fraction(m + 1))
    return b


# kernel_a(r) - 1/2 = sum_{k>=1} B_2k r^(2k-1) / (2k)!, an odd series in r; the
# terms shrink like (r / 2 pi)^2k, so 20 terms reach 1e-20 at r = 2.
_B = _bernoulli(40)
_KERNEL_TAIL = tuple(float(_B[2 * k] / factorial(2 * k)) for k in range(1, 21))


def _kernel_tail(r):
    """``kernel_a(r) - 1/2`` by its series."""
    r2 = r * r
    return r * _poly(_KERNEL_TAIL, r2)


def kernel_a(rho):
    """``(sigma(rho) - 1) / rho`` for ``rho > 0``; tends to 1/2 as rho -> 0."""
    rho = _check_rho(rho)
    small = rho < KERNEL_SERIES_MAX
    out = np.empty_like(rho)
    out[small] = 0.5 + _kernel_tail(rho[small])
    r = rho[~small]
    out[~small] = 1.0 / -np.expm1(-r) - 1.0 / r
    return _unwrap(out, rho)


def kernel_b(rho):
    """``(1 - sigma(-rho)) / rho`` for ``rho > 0``; equals ``1 - kernel_a(rho)``."""
    rho = _check_rho(rho)
    small = rho < KERNEL_SERIES_MAX
    out = np.empty_like(rho)
    out[small] = 0.5 - _kernel_tail(rho[small])
    r = rho[~small]
    with np.errstate(over="ignore"):
        out[~small] = 1.0 / r - 1.0 / np.expm1(r)
    return _unwrap(out, rho)


def _check_positive(value, name):
    value = _as_float_array(value, name)
    if np.any(value <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return value


def layer_exp(x, a, eps):
    """Outflow layer ``exp(-a (1 - x) / eps)``; underflows quietly to 0."""
    x = _as_float_array(x, "x")
    a = _check_positive(a, "a")
    eps = _check_positive(eps, "eps")
    with np.errstate(under="ignore"):
        out = np.exp(-a * (1.0 - x) / eps)
    return _unwrap(out, x)


def scaled_ratio(x, beta, eps):
    """``(exp(beta x/eps) - 1) / (exp(beta/eps) - 1)`` without overflow.

    Evaluated as ``exp(-beta (1-x)/eps) * expm1(-beta x/eps) / expm1(-beta/eps)``.
    """
    x = _as_float_array(x, "x")
    beta = _check_positive(beta, "beta")
    eps = _check_positive(eps, "eps")
    with np.errstate(under="ignore"):
        out = np.exp(-beta * (1.0 - x) / eps) * (
            np.expm1(-beta * x / eps) / np.expm1(-beta / eps)
        )
    return _unwrap(out, x)

