"""Jacobi, generalised Laguerre and Hermite polynomials by three-term recurrence.

All three evaluators accept real or complex scalars or arrays. The output
dtype follows the argument: a real ``z`` gives real values, a complex ``z``
gives complex values, and the real part of a complex evaluation at a real
point is identical to the real evaluation.

Parameters are allowed to be arbitrary finite reals (including negative
ones); no gamma-function normalisation is applied.
"""
import numpy as np

from .errors import DomainError

__all__ = ["jacobi_eval", "laguerre_eval", "hermite_eval"]


def _check_degree(n):
    if int(n) != n or n < 0:
        raise DomainError(f"polynomial degree must be a non-negative integer, got {n!r}")
    return int(n)


def _check_arg(z):
    z = np.asarray(z)
    if not np.issubdtype(z.dtype, np.number):
        raise DomainError("polynomial argument must be numeric")
    if not np.all(np.isfinite(z)):
        raise DomainError("polynomial argument must be finite")
    if not np.iscomplexobj(z):
        z = z.astype(float)
    return z


def _check_param(name, value):
    value = float(value)
    if not np.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def _out(values, scalar):
    return values[()] if scalar else values


def _div(values, d):
    # complex / float would promote d to complex and round differently from
    # the real path; divide the parts separately so real inputs stay exact
    if np.iscomplexobj(values):
        out = np.empty_like(values)
        out.real = values.real / d
        out.imag = values.imag / d
        return out
    return values / d


# below this |k + a + b| or |2k + a + b - 2| the recurrence is replaced by the
# explicit sum, which has no division
_DEGENERATE = 1e-6


def _jacobi_sum(n, a, b, z):
    """P_n^{(a,b)}(z) = sum_s C(n+a, n-s) C(n+b, s) ((z-1)/2)^s ((z+1)/2)^(n-s)."""
    def binom(top, k):
        out = 1.0
        for i in range(k):
            out *= (top - i) / (i + 1)
        return out

    zm = _div(z - 1.0, 2.0)
    zp = _div(z + 1.0, 2.0)
    # powers by repeated multiplication; complex ** rounds differently
    pm = [np.ones_like(z)]
    pp = [np.ones_like(z)]
    for _ in range(n):
        pm.append(pm[-1] * zm)
        pp.append(pp[-1] * zp)
    total = np.zeros_like(z)
    for s in range(n + 1):
        total = total + binom(n + a, n - s) * binom(n + b, s) * pm[s] * pp[n - s]
    return total


def jacobi_eval(n, a, b, z):
    """Jacobi polynomial P_n^{(a,b)}(z).

    Uses the recurrence in the degree

        2k(k+a+b)(2k+a+b-2) P_k = (2k+a+b-1)[(2k+a+b)(2k+a+b-2) z + a^2 - b^2] P_{k-1}
                                   - 2(k+a-1)(k+b-1)(2k+a+b) P_{k-2}

    starting from P_0 = 1 and P_1 = ((a+b+2) z + (a-b)) / 2.

    Parameter pairs for which a recurrence coefficient vanishes (or nearly
    does, e.g. a + b = -2) fall back to the explicit binomial sum.

    Raises
    ------
    DomainError
        Non-finite inputs.
    """
    n = _check_degree(n)
    a = _check_param("a", a)
    b = _check_param("b", b)
    scalar = np.ndim(z) == 0
    z = _check_arg(z)

    p_prev = np.ones_like(z)
    if n == 0:
        return _out(p_prev, scalar)
    if any(min(abs(k + a + b), abs(2 * k + a + b - 2)) < _DEGENERATE for k in range(2, n + 1)):
        return _out(_jacobi_sum(n, a, b, z), scalar)
    p = _div((a + b + 2.0) * z + (a - b), 2.0)
    for k in range(2, n + 1):
        s = 2 * k + a + b
        lead = 2 * k * (k + a + b) * (s - 2)
        c1 = (s - 1) * s * (s - 2)
        c0 = (s - 1) * (a * a - b * b)
        c2 = 2 * (k + a - 1) * (k + b - 1) * s
        p_prev, p = p, _div((c1 * z + c0) * p - c2 * p_prev, lead)
    return _out(p, scalar)


def laguerre_eval(n, alpha, z):
    """Generalised Laguerre polynomial L_n^{alpha}(z).

    (k+1) L_{k+1} = (2k+1+alpha-z) L_k - (k+alpha) L_{k-1}
    """
    n = _check_degree(n)
    alpha = _check_param("alpha", alpha)
    scalar = np.ndim(z) == 0
    z = _check_arg(z)

    p_prev = np.ones_like(z)
    if n == 0:
        return _out(p_prev, scalar)
    p = 1.0 + alpha - z
    for k in range(1, n):
        p_prev, p = p, _div((2 * k + 1 + alpha - z) * p - (k + alpha) * p_prev, k + 1)
    return _out(p, scalar)


def hermite_eval(n, z):
    """Physicists' Hermite polynomial H_n(z), H_{k+1} = 2z H_k - 2k H_{k-1}."""
    n = _check_degree(n)
    scalar = np.ndim(z) == 0
    z = _check_arg(z)

    p_prev = np.ones_like(z)
    if n == 0:
        return _out(p_prev, scalar)
    p = 2.0 * z
    for k in range(1, n):
        p_prev, p = p, 2.0 * z * p - 2.0 * k * p_prev
    return _out(p, scalar)
