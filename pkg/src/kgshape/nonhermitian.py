"""Complex coordinate shift x -> x - ic of the potentials.

Shifting both potentials by an imaginary constant gives a non-Hermitian
effective potential whose coupling constants are unchanged, so the real
closed-form spectrum carries over. The similarity transform
eta = exp(c d/dx) maps psi(x) to psi(x - ic); shifted eigenfunctions are the
closed forms evaluated at complex argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .models import BoundState, Couplings, Family, enumerate_spectrum, profile
from .wavefunctions import GridSpec, default_grid, eval_wavefunction, kg_residual

__all__ = [
    "ShiftParam",
    "shifted_potential",
    "pt_defect",
    "shifted_residual",
    "shifted_grid",
    "shifted_spectrum",
    "eta",
    "shifted_wavefunction",
]

POLE_MARGIN = 0.05
MAX_STEP = 0.004


@dataclass(frozen=True)
class ShiftParam:
    """Imaginary coordinate shift ``c``; for tanh |c| must stay off the pole at pi/2."""

    c: float
    margin: float = POLE_MARGIN

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise DomainError(f"shift must be finite, got {self.c!r}")

    def validate(self, family) -> "ShiftParam":
        family = Family.parse(family)
        if family is Family.TANH and abs(self.c) >= math.pi / 2 - self.margin:
            raise DomainError(
                f"tanh shift |c|={abs(self.c)} reaches the pole band (limit {math.pi / 2 - self.margin:.4f})"
            )
        return self


def _as_shift(shift) -> ShiftParam:
    return shift if isinstance(shift, ShiftParam) else ShiftParam(float(shift))


def shifted_potential(family, c: Couplings, E: float, shift, x):
    """U(x - ic) = (S0^2 - V0^2) f(x - ic)^2 + 2 (m S0 + E V0) f(x - ic)."""
    family = Family.parse(family)
    shift = _as_shift(shift).validate(family)
    z = np.asarray(x, dtype=float) - 1j * shift.c
    f = profile(family, z)
    return c.gap * f * f + 2.0 * c.coupling_b(E) * f


def pt_defect(family, c: Couplings, E: float, shift, grid: GridSpec, part: str = "full") -> float:
    """max_x |U(x) - conj(U(-x))| for the shifted potential on a symmetric grid.

    ``part="imag"`` restricts the comparison to imaginary parts.
    """
    if not grid.is_symmetric():
        raise PreconditionError("pt_defect needs a grid symmetric about x = 0")
    x = grid.x
    u = shifted_potential(family, c, E, shift, x)
    u_reflected = np.conj(u[::-1])
    diff = u - u_reflected
    if part == "imag":
        diff = diff.imag
    elif part != "full":
        raise DomainError(f"part must be 'full' or 'imag', got {part!r}")
    return float(np.max(np.abs(diff)))


def shifted_grid(state: BoundState, shift, count: int = 4001, max_step: float = MAX_STEP) -> GridSpec:
    """Default grid for the shifted residual.

    Same interval as the unshifted default except for exp with cos(c) <= 0,
    where |psi(x - ic)| grows like exp(-B e^{-x} cos c) to the left; the grid
    then starts where B e^{-x} = A + n + 1. The point count is raised until
    the spacing is at most ``max_step``, since the shift adds oscillation.
    """
    shift = _as_shift(shift)
    grid = default_grid(state, count)
    if shift.c == 0:
        return grid
    lo, hi = grid.x_min, grid.x_max
    if state.family is Family.EXP and math.cos(shift.c) <= 0:
        sd = state.shape
        lo = -math.log((abs(sd.A) + state.n + 1.0) / sd.B)
    count = max(count, math.ceil((hi - lo) / max_step) + 1)
    return GridSpec(lo, hi, count)


def shifted_residual(state: BoundState, shift, grid: GridSpec | None = None) -> float:
    """Residual of phi(x) = psi(x - ic) in the shifted problem at the real energy.

    With c = 0 this is exactly :func:`kgshape.wavefunctions.ode_residual`.
    """
    shift = _as_shift(shift).validate(state.family)
    grid = grid or shifted_grid(state, shift)
    return kg_residual(state, grid, shift.c)


def shifted_spectrum(family, c: Couplings, shift, n_max_scan: int = 64, pairing: str = "row"):
    """Closed-form spectrum of the shifted problem.

    The shift leaves m S0 + E V0 and S0^2 - V0^2 untouched, so the shape data
    and hence every level coincide with the unshifted ones.
    """
    _as_shift(shift).validate(family)
    return enumerate_spectrum(family, c, n_max_scan=n_max_scan, pairing=pairing)


def eta(fn, c: float):
    """The shift operator exp(c d/dx) acting on a function of one complex variable."""
    return lambda x: fn(np.asarray(x) - 1j * c)


def shifted_wavefunction(state: BoundState, shift):
    shift = _as_shift(shift).validate(state.family)
    return eta(lambda z: eval_wavefunction(state, z), shift.c)
