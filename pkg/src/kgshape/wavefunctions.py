"""Closed-form eigenfunctions on grids, normalisation and Klein-Gordon residuals.

The eigenfunctions are known only up to a constant factor:

    tanh    (1 - t)^{s1/2} (1 + t)^{s2/2} P_n^{(s1, s2)}(t),   t = tanh x
    exp     y^{A-n} e^{-y/2} L_n^{2A-2n}(y),                  y = 2B e^{-x}
    linear  e^{-y^2/2} H_n(y),                                 y = sqrt(A) (x + B/A)

Prefactors are assembled in log space so that tails neither overflow nor lose
precision. Complex arguments are accepted; this is what the complex
coordinate shift in :mod:`kgshape.nonhermitian` uses.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import CoarseGridWarning, DegenerateInputError, DomainError, UnderflowWarning
from .models import BoundState, Family, ShapeData, scalar_potential, vector_potential
from .specfun import hermite_eval, jacobi_eval, laguerre_eval

__all__ = [
    "GridSpec",
    "WavefunctionSamples",
    "default_grid",
    "eval_wavefunction",
    "sample_wavefunction",
    "normalize",
    "norm",
    "ode_residual",
    "node_count",
    "ground_state",
    "ladder_first_excited",
]

# exp(-745) is the smallest subnormal double
_LOG_FLOOR = -740.0
COARSE_THRESHOLD = 0.05


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise DomainError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise DomainError(f"grid needs x_min < x_max, got {self.x_min}, {self.x_max}")
        if int(self.count) != self.count or self.count < 3:
            raise DomainError(f"grid needs at least 3 points, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"min:max:count"``."""
        try:
            lo, hi, count = text.split(":")
            return cls(float(lo), float(hi), int(count))
        except ValueError as exc:
            raise DomainError(f"grid must look like 'min:max:count', got {text!r}") from exc

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.count - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.count)

    def is_symmetric(self, tol=1e-12) -> bool:
        return abs(self.x_min + self.x_max) <= tol * max(1.0, abs(self.x_max))


@dataclass(frozen=True)
class WavefunctionSamples:
    grid: GridSpec
    values: np.ndarray
    state: BoundState | None = None
    normalized: bool = False
    underflow: bool = False
    shift: float = 0.0

    def __post_init__(self):
        if len(self.values) != self.grid.count:
            raise DomainError("sample count does not match the grid")


def default_grid(state: BoundState, count: int = 4001) -> GridSpec:
    """Grid holding the classically allowed region plus several decay lengths."""
    sd = state.shape
    if state.family is Family.TANH:
        return GridSpec(-15.0, 15.0, count)
    if state.family is Family.EXP:
        lo = -2.0 - math.log(max(sd.B, 1.0))
        hi = 20.0 / max(math.sqrt(abs(state.epsilon)), 0.3)
        return GridSpec(lo, hi, count)
    centre = -sd.B / sd.A
    half = 10.0 / math.sqrt(sd.A)
    return GridSpec(centre - half, centre + half, count)


def _log1pexp(w):
    """Principal log(1 + e^w), accurate for large |Re w|."""
    w = np.asarray(w, dtype=complex)
    big = w.real > 0
    out = np.empty_like(w)
    out[big] = w[big] + np.log1p(np.exp(-w[big]))
    out[~big] = np.log1p(np.exp(w[~big]))
    return out


def _closed_form(family: Family, shape: ShapeData, n: int, z):
    """(log-prefactor, polynomial factor) of the level-n eigenfunction at shape."""
    z = np.asarray(z, dtype=complex)
    A, B = shape.A, shape.B
    if family is Family.TANH:
        a = A - n
        s1, s2 = a + B / a, a - B / a
        ln2 = math.log(2.0)
        # 1 - tanh z = 2 / (1 + e^{2z}),  1 + tanh z = 2 / (1 + e^{-2z})
        logp = 0.5 * s1 * (ln2 - _log1pexp(2 * z)) + 0.5 * s2 * (ln2 - _log1pexp(-2 * z))
        poly = jacobi_eval(n, s1, s2, np.tanh(z))
        return logp, poly
    if family is Family.EXP:
        a = A - n
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(-z)
            logp = a * (math.log(2.0 * B) - z) - B * e
        y = 2.0 * B * e
        finite = np.isfinite(y)
        poly = np.zeros_like(z)
        if np.any(finite):
            poly[finite] = laguerre_eval(n, 2.0 * a, y[finite])
        logp = np.where(finite, logp, -np.inf)
        return logp, poly
    y = math.sqrt(A) * (z + B / A)
    return -0.5 * y * y, hermite_eval(n, y)


def _evaluate(family, shape, n, z):
    logp, poly = _closed_form(family, shape, n, z)
    clamped = ~np.isfinite(logp) | (logp.real < _LOG_FLOOR)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        values = np.exp(np.where(clamped, 0.0, logp)) * poly
    values = np.where(clamped, 0.0, values)
    return values, clamped


def eval_wavefunction(state: BoundState, x):
    """Unnormalised closed-form eigenfunction of ``state`` at real or complex ``x``.

    Points deep in the forbidden region where the value underflows are set
    to zero; use :func:`sample_wavefunction` to learn whether that happened.
    """
    scalar = np.ndim(x) == 0
    values, _ = _evaluate(state.family, state.shape, state.n, np.atleast_1d(x))
    return values[0] if scalar else values


def sample_wavefunction(state: BoundState, grid: GridSpec | None = None, shift: float = 0.0):
    """Sample psi(x - i*shift) on the grid."""
    grid = grid or default_grid(state)
    x = grid.x
    z = x - 1j * shift if shift else x
    values, clamped = _evaluate(state.family, state.shape, state.n, z)
    underflow = bool(np.any(clamped))
    if underflow:
        warnings.warn(
            f"{int(clamped.sum())} wavefunction samples underflowed and were set to 0",
            UnderflowWarning,
            stacklevel=2,
        )
    return WavefunctionSamples(grid, values, state, False, underflow, float(shift))


def _trapezoid(values, h):
    return h * (np.sum(values) - 0.5 * (values[0] + values[-1]))


def norm(samples: WavefunctionSamples) -> float:
    """Trapezoid estimate of the integral of |psi|^2."""
    return float(_trapezoid(np.abs(samples.values) ** 2, samples.grid.h))


def normalize(samples: WavefunctionSamples) -> WavefunctionSamples:
    total = norm(samples)
    if not total > 0:
        raise DegenerateInputError("cannot normalise an identically zero wavefunction")
    return replace(samples, values=samples.values / math.sqrt(total), normalized=True)


def _kg_coefficient(state: BoundState, z):
    """(m + S)^2 - (E - V)^2 at (possibly complex) points z."""
    c = state.couplings
    S = scalar_potential(state.family, c, z)
    V = vector_potential(state.family, c, z)
    return (c.m + S) ** 2 - (state.energy - V) ** 2


def kg_residual(state: BoundState, grid: GridSpec, shift: float = 0.0) -> float:
    """max |-phi'' + [(m+S)^2 - (E-V)^2] phi| / max |phi| at interior points.

    ``phi(x) = psi(x - i*shift)`` and the potentials are evaluated at the
    same shifted points. The second derivative is the three-point central
    difference, so the result is O(h^2).
    """
    x = grid.x
    z = x - 1j * shift if shift else x
    psi, _ = _evaluate(state.family, state.shape, state.n, z)
    scale = np.max(np.abs(psi))
    if not scale > 0:
        raise DegenerateInputError("wavefunction vanishes on the whole grid")
    h = grid.h
    d2 = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / (h * h)
    coef = _kg_coefficient(state, z[1:-1])
    res = -d2 + coef * psi[1:-1]

    weight = np.abs(psi[1:-1]) / scale
    resolution = float(np.max(h * h * np.abs(coef) * weight))
    if resolution > COARSE_THRESHOLD:
        warnings.warn(
            f"grid spacing {h:.3g} under-resolves the state (h^2 |U - eps| = {resolution:.3g})",
            CoarseGridWarning,
            stacklevel=2,
        )
    return float(np.max(np.abs(res)) / scale)


def ode_residual(state: BoundState, grid: GridSpec | None = None) -> float:
    """Relative residual of the closed form in the original Klein-Gordon equation."""
    return kg_residual(state, grid or default_grid(state))


def node_count(samples: WavefunctionSamples, floor: float = 1e-8) -> int:
    """Sign changes of Re psi over interior points above ``floor * max|psi|``."""
    v = np.real(samples.values[1:-1])
    cut = floor * np.max(np.abs(samples.values))
    v = v[np.abs(v) > cut]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def ground_state(family, shape: ShapeData, a: float, x):
    """Ground state of U_-(x; a), the zero mode of d/dx + W(x; a)."""
    family = Family.parse(family)
    values, _ = _evaluate(family, replace(shape, A=a), 0, np.atleast_1d(x))
    return values


def ladder_first_excited(family, shape: ShapeData, x):
    """A^dagger(a_1) psi_0(a_2) with A^dagger = -d/dx + W(x; a_1).

    The derivative is analytic: psi_0(a_2)' = -W(x; a_2) psi_0(a_2), so the
    result is (W(x; a_1) + W(x; a_2)) psi_0(x; a_2). Up to a constant it must
    equal the n = 1 closed form at the same shape.
    """
    family = Family.parse(family)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a1 = shape.param(1)
    a2 = shape.next_param(a1)
    psi0 = ground_state(family, shape, a2, x)
    dpsi0 = -shape.W(x, a2) * psi0
    return -dpsi0 + shape.W(x, a1) * psi0
