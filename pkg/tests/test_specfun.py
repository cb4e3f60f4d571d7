import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgshape.errors import DomainError
from kgshape.specfun import hermite_eval, jacobi_eval, laguerre_eval


def pochhammer(x, k):
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


def jacobi_series(n, a, b, z):
    """(a+1)_n / n! * 2F1(-n, n+a+b+1; a+1; (1-z)/2), summed term by term."""
    w = (1.0 - z) / 2.0
    total = 0.0
    for k in range(n + 1):
        total += (pochhammer(-n, k) * pochhammer(n + a + b + 1, k)
                  / (pochhammer(a + 1, k) * math.factorial(k))) * w**k
    return pochhammer(a + 1, n) / math.factorial(n) * total


def jacobi_series_exact(n, a, b, z):
    """Hypergeometric sum in exact rationals; returns (value, sum of |terms|)."""
    a, b, w = Fraction(a), Fraction(b), (1 - Fraction(z)) / 2
    front = pochhammer(a + 1, n) / math.factorial(n)
    total = Fraction(0)
    size = Fraction(0)
    for k in range(n + 1):
        term = front * pochhammer(-n, k) * pochhammer(n + a + b + 1, k) / (
            pochhammer(a + 1, k) * math.factorial(k)) * w**k
        total += term
        size += abs(term)
    return float(total), float(size)


def laguerre_sum(n, alpha, z):
    # binom(n + alpha, n - k) = (alpha + k + 1)_{n-k} / (n - k)!
    return sum(
        (-1) ** k * pochhammer(alpha + k + 1, n - k) / math.factorial(n - k) * z**k / math.factorial(k)
        for k in range(n + 1)
    )


def hermite_sum(n, z):
    return math.factorial(n) * sum(
        (-1) ** j * (2 * z) ** (n - 2 * j) / (math.factorial(j) * math.factorial(n - 2 * j))
        for j in range(n // 2 + 1)
    )


def test_jacobi_low_degrees():
    assert jacobi_eval(0, 3.98281, 3.049, 0.3) == 1.0
    a, b, z = 1.7, -0.4, 0.35
    assert jacobi_eval(1, a, b, z) == pytest.approx(((a + b + 2) * z + (a - b)) / 2, rel=1e-15)


def test_jacobi_against_series():
    expected = jacobi_series(2, 1.0, 1.0, 0.5)
    assert jacobi_eval(2, 1.0, 1.0, 0.5) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", range(7))
@pytest.mark.parametrize("a,b", [(3.98281, 3.049), (2.96043, 0.071382), (-0.5, 1.25), (0.0, 0.0)])
def test_jacobi_series_sweep(n, a, b):
    for z in np.linspace(-0.95, 0.95, 9):
        exact, size = jacobi_series_exact(n, a, b, z)
        assert abs(jacobi_eval(n, a, b, z) - exact) <= 1e-12 * max(size, 1.0)


def test_laguerre_examples():
    assert laguerre_eval(0, 2.34, 1.7) == 1.0
    assert laguerre_eval(1, 2.34, 1.7) == pytest.approx(1 + 2.34 - 1.7)
    assert laguerre_eval(2, 0.0, 1.0) == pytest.approx(-0.5, rel=1e-15)


@pytest.mark.parametrize("n", range(8))
def test_laguerre_against_explicit_sum(n):
    for alpha in (0.0, 0.34278, 2.00588, -0.7):
        for z in (0.1, 1.7, 6.0):
            assert laguerre_eval(n, alpha, z) == pytest.approx(laguerre_sum(n, alpha, z), rel=1e-11, abs=1e-12)


def test_hermite_examples():
    assert hermite_eval(0, 0.4) == 1.0
    assert hermite_eval(1, 0.4) == pytest.approx(0.8)
    assert hermite_eval(3, 1.0) == -4.0


@pytest.mark.parametrize("n", range(12))
def test_hermite_against_explicit_sum(n):
    for z in (-2.2, -0.3, 0.0, 0.9, 3.1):
        assert hermite_eval(n, z) == pytest.approx(hermite_sum(n, z), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(0, 10),
    a=st.floats(-1.9, 5.0),
    b=st.floats(-1.9, 5.0),
    z=st.floats(-1.0, 1.0),
)
def test_jacobi_reflection(n, a, b, z):
    lhs = jacobi_eval(n, a, b, -z)
    rhs = (-1) ** n * jacobi_eval(n, b, a, z)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    # cancellation near a root limits relative accuracy; compare against term magnitude
    terms = max(1.0, abs(jacobi_eval(n, abs(a), abs(b), 1.0)))
    assert abs(lhs - rhs) <= 1e-12 * max(scale, terms)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(2, 10), a=st.floats(-0.9, 5.0), b=st.floats(-0.9, 5.0), z=st.floats(-1.0, 1.0))
def test_jacobi_recurrence_residual(n, a, b, z):
    p2, p1, p0 = (jacobi_eval(k, a, b, z) for k in (n, n - 1, n - 2))
    s = 2 * n + a + b
    lhs = 2 * n * (n + a + b) * (s - 2) * p2
    rhs = (s - 1) * (s * (s - 2) * z + a * a - b * b) * p1 - 2 * (n + a - 1) * (n + b - 1) * s * p0
    scale = max(abs(lhs), abs((s - 1) * s * (s - 2) * p1), abs(2 * (n + a - 1) * (n + b - 1) * s * p0), 1.0)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 10), alpha=st.floats(-0.9, 6.0), z=st.floats(0.0, 20.0))
def test_laguerre_recurrence_residual(n, alpha, z):
    l2, l1, l0 = (laguerre_eval(k, alpha, z) for k in (n + 1, n, n - 1))
    lhs = (n + 1) * l2
    rhs = (2 * n + 1 + alpha - z) * l1 - (n + alpha) * l0
    scale = max(abs(lhs), abs((2 * n + 1 + alpha - z) * l1), abs((n + alpha) * l0), 1.0)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 12), z=st.floats(-6.0, 6.0))
def test_hermite_recurrence_residual(n, z):
    h2, h1, h0 = (hermite_eval(k, z) for k in (n + 1, n, n - 1))
    scale = max(abs(h2), abs(2 * z * h1), abs(2 * n * h0), 1.0)
    assert abs(h2 - (2 * z * h1 - 2 * n * h0)) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(n=st.integers(0, 8), a=st.floats(-1.5, 4.0), b=st.floats(-1.5, 4.0), z=st.floats(-3.0, 3.0))
def test_complex_embedding_is_exact(n, a, b, z):
    zc = complex(z, 0.0)
    assert jacobi_eval(n, a, b, zc).real == jacobi_eval(n, a, b, z)
    assert laguerre_eval(n, a, zc).real == laguerre_eval(n, a, z)
    assert hermite_eval(n, zc).real == hermite_eval(n, z)
    assert jacobi_eval(n, a, b, zc).imag == 0.0


def test_array_arguments_and_dtypes():
    z = np.linspace(-1, 1, 5)
    out = jacobi_eval(3, 0.5, 1.5, z)
    assert out.shape == (5,) and out.dtype == float
    assert np.iscomplexobj(hermite_eval(2, z + 0.5j))
    np.testing.assert_allclose(out, [jacobi_eval(3, 0.5, 1.5, v) for v in z], rtol=0, atol=0)


def test_complex_argument_matches_series():
    z = 0.3 - 0.7j
    assert jacobi_eval(3, 1.2, 0.4, z) == pytest.approx(jacobi_series(3, 1.2, 0.4, z), rel=1e-12)


@pytest.mark.parametrize(
    "call",
    [
        lambda: jacobi_eval(2, 1.0, 1.0, float("nan")),
        lambda: jacobi_eval(2, float("inf"), 1.0, 0.2),
        lambda: laguerre_eval(3, 0.0, complex(1.0, float("inf"))),
        lambda: hermite_eval(-1, 0.2),
        lambda: hermite_eval(1.5, 0.2),
    ],
)
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


@pytest.mark.parametrize("a,b", [(-1.0, -1.0), (-0.5, -1.5), (0.0, -3.0)])
def test_jacobi_degenerate_parameters_are_continuous(a, b):
    # the explicit-sum fallback must agree with the recurrence just off the degenerate line
    z = np.linspace(-0.9, 0.9, 7)
    for n in range(2, 7):
        exact = jacobi_eval(n, a, b, z)
        near = jacobi_eval(n, a + 1e-5, b, z)
        np.testing.assert_allclose(exact, near, atol=1e-3)
