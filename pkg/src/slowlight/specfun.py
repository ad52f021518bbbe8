"""Complex gamma function and Bessel J of complex order.

Both work elementwise on numpy arrays as well as on Python scalars.
The Bessel function is evaluated from its ascending power series,

    J_nu(x) = (x/2)**nu * sum_k (-x**2/4)**k / (k! * Gamma(nu + k + 1)),

which is reliable for moderate arguments only; ``|x| > 30`` is refused.

Branch convention: ``(x/2)**nu = exp(nu * Log(x/2))`` with the principal
logarithm, and a point exactly on the negative real axis gets
``arg = +pi``.  Passing ``branch=-1`` selects ``arg = -pi`` instead; this
only exists so callers can check that their results are branch-free.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "MAX_ARGUMENT",
    "bessel_j",
    "bessel_series",
    "gamma",
    "half_power",
    "log_half",
    "rgamma",
]

MAX_ARGUMENT = 30.0
POLE_TOL = 1e-12
SERIES_RTOL = 1e-18
MAX_TERMS = 400

# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficient set).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_P = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _unwrap(arr, scalar):
    return complex(arr) if scalar else arr


def _lanczos_gamma(z):
    """Gamma(z) for Re z >= 1/2 (no checks)."""
    zm = z - 1.0
    acc = np.full_like(zm, _LANCZOS_P[0])
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc = acc + p / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return np.exp(_HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t) * acc


def _pole_mask(z, tol):
    n = np.round(z.real)
    return (n <= 0) & (np.abs(z - n) <= tol)


def gamma(z):
    """Complex gamma function.

    Raises PoleError when any input lies within 1e-12 of 0, -1, -2, ...
    """
    z, scalar = _as_complex(z)
    if np.any(_pole_mask(z, POLE_TOL)):
        raise PoleError(f"gamma evaluated at a pole: {z[_pole_mask(z, POLE_TOL)].ravel()[0]}")
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_gamma(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = np.pi / (np.sin(np.pi * zl) * _lanczos_gamma(1.0 - zl))
    return _unwrap(out, scalar)


def rgamma(z):
    """Reciprocal gamma 1/Gamma(z); entire, exactly zero at the poles."""
    z, scalar = _as_complex(z)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = 1.0 / _lanczos_gamma(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = np.sin(np.pi * zl) * _lanczos_gamma(1.0 - zl) / np.pi
        exact = _pole_mask(zl, 0.0)
        if np.any(exact):
            tmp = out[left]
            tmp[exact] = 0.0
            out[left] = tmp
    return _unwrap(out, scalar)


def log_half(x, branch=1):
    """Log(x/2) with the documented treatment of the negative real axis."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    x, scalar = _as_complex(x)
    half = x / 2.0
    with np.errstate(divide="ignore"):
        re = np.log(np.abs(half))
    im = np.angle(half)
    on_cut = (half.imag == 0.0) & (half.real < 0.0)
    im = np.where(on_cut, branch * np.pi, im)
    return _unwrap(re + 1j * im, scalar)


def half_power(x, nu, branch=1):
    """(x/2)**nu under the package branch convention.

    x = 0 gives 1 for nu = 0, 0 for Re nu > 0 and DomainError otherwise.
    """
    x, scalar = _as_complex(x)
    nu = complex(nu)
    zero = x == 0
    if np.any(zero) and nu != 0 and nu.real <= 0:
        raise DomainError(f"(x/2)**nu is unbounded at x=0 for nu={nu}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(nu * log_half(np.where(zero, 1.0, x), branch))
    out = np.where(zero, 1.0 if nu == 0 else 0.0, out)
    return _unwrap(out, scalar)


def _first_nonzero_index(nu):
    # 1/Gamma(nu+k+1) vanishes for k < n when nu == -n exactly.
    if nu.imag == 0.0 and nu.real < 0 and nu.real == math.floor(nu.real):
        return int(-nu.real)
    return 0


def bessel_series(nu, x):
    """Entire part of J_nu: sum_k (-x**2/4)**k / (k! Gamma(nu+k+1)).

    ``J_nu(x) = half_power(x, nu) * bessel_series(nu, x)``.  The series is
    summed with Neumaier compensation and stopped once a term falls below
    1e-18 of the running sum.
    """
    nu = complex(nu)
    x, scalar = _as_complex(x)
    if np.any(np.abs(x) > MAX_ARGUMENT):
        raise DomainError(
            f"|x| = {np.max(np.abs(x)):.6g} exceeds the power-series limit {MAX_ARGUMENT}"
        )
    q = -(x * x) / 4.0
    k0 = _first_nonzero_index(nu)
    if k0:
        term = q**k0 / math.factorial(k0)
    else:
        term = np.full_like(x, rgamma(nu + 1.0))
    total = term.copy()
    comp = np.zeros_like(total)
    active = np.ones(x.shape, dtype=bool)
    for k in range(k0 + 1, k0 + MAX_TERMS):
        term = term * q / (k * (nu + k))
        s = total + term
        big = np.abs(total) >= np.abs(term)
        comp = comp + np.where(big, (total - s) + term, (term - s) + total)
        total = s
        active = np.abs(term) > SERIES_RTOL * np.abs(total + comp)
        if not np.any(active):
            break
    return _unwrap(total + comp, scalar)


def bessel_j(nu, x, branch=1):
    """Bessel function of the first kind J_nu(x), complex nu and x.

    Valid for |x| <= 30; DomainError beyond that.  PoleError from the
    gamma layer cannot occur because the series uses the reciprocal gamma.
    """
    s = bessel_series(nu, x)
    return half_power(x, nu, branch) * s
