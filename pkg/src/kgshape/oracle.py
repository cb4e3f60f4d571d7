"""Independent finite-difference check of the closed-form energies.

For a frozen energy E the operator -d^2/dx^2 + U_E(x) is discretised with
three-point central differences and Dirichlet ends. The result is a
symmetric tridiagonal matrix whose n-th eigenvalue lambda_n(E) is located by
Sturm-sequence bisection. The Klein-Gordon level is then the root of

    g(E) = lambda_n(E) - (E^2 - m^2),

found by bisection. Nothing here uses superpotentials or the closed-form
quadratics; closed-form values only seed the bracket and size the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketError, DomainError, NoBoundStateError
from .models import Couplings, Family, SpectrumReport, effective_potential, shape_data, solve_level

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


__all__ = [
    "OracleConfig",
    "OracleResult",
    "ComparisonRow",
    "sturm_count",
    "tridiagonal_eigenvalue",
    "dirichlet_eigenvalue",
    "oracle_domain",
    "continuum_edge",
    "nth_inner_eigenvalue",
    "selfconsistency_gap",
    "solve_selfconsistent",
    "compare_spectra",
]


@njit(cache=True)
def _sturm_count(diag, offsq, lam):
    # number of eigenvalues strictly below lam (LDL^T pivots of T - lam I)
    count = 0
    q = diag[0] - lam
    if q < 0.0:
        count += 1
    for i in range(1, diag.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - lam - offsq[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect_eigenvalue(diag, offsq, k, lo, hi, tol):
    while hi - lo > tol * max(1.0, abs(lo) + abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _sturm_count(diag, offsq, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sturm_count(diag, off, lam) -> int:
    """Number of eigenvalues below ``lam`` of the symmetric tridiagonal (diag, off)."""
    diag = np.ascontiguousarray(diag, dtype=float)
    offsq = np.ascontiguousarray(np.asarray(off, dtype=float) ** 2)
    return int(_sturm_count(diag, offsq, float(lam)))


def tridiagonal_eigenvalue(diag, off, k: int, tol: float = 1e-14) -> float:
    """k-th smallest eigenvalue (k = 0 is the lowest) by Sturm bisection."""
    diag = np.ascontiguousarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    if not 0 <= k < diag.size:
        raise DomainError(f"eigenvalue index {k} out of range for size {diag.size}")
    r = np.zeros(diag.size)
    r[:-1] += np.abs(off)
    r[1:] += np.abs(off)
    lo = float(np.min(diag - r))
    hi = float(np.max(diag + r))
    offsq = np.ascontiguousarray(off**2)
    return float(_bisect_eigenvalue(diag, offsq, int(k), lo, hi, tol))


def _operator(u, h):
    diag = 2.0 / (h * h) + np.asarray(u, dtype=float)
    off = np.full(diag.size - 1, -1.0 / (h * h))
    return diag, off


def dirichlet_eigenvalue(u_interior, h: float, k: int) -> float:
    """k-th eigenvalue of -d^2/dx^2 + u on a uniform grid, psi = 0 at both ends.

    ``u_interior`` holds the potential at the interior nodes only.
    """
    diag, off = _operator(u_interior, h)
    return tridiagonal_eigenvalue(diag, off, k)


@dataclass(frozen=True)
class OracleConfig:
    """Numerical controls. ``half_width=None`` selects the automatic domain."""

    half_width: float | None = None
    points: int = 6001
    bracket_halfwidth: float = 0.5
    root_tol: float = 1e-8
    marginal_threshold: float = 1e-2
    decay_lengths: float = 12.0

    def __post_init__(self):
        if self.points < 101:
            raise DomainError(f"oracle needs at least 101 points, got {self.points}")
        if not self.root_tol > 0:
            raise DomainError("root_tol must be positive")
        if self.half_width is not None and not self.half_width > 0:
            raise DomainError("half_width must be positive")


@dataclass
class OracleResult:
    energy: float
    inner_eigenvalue: float
    iterations: int
    converged: bool
    skipped_marginal: bool = False
    domain: tuple = ()

    def as_dict(self):
        return {
            "energy": None if math.isnan(self.energy) else self.energy,
            "inner_eigenvalue": None if math.isnan(self.inner_eigenvalue) else self.inner_eigenvalue,
            "iterations": self.iterations,
            "converged": self.converged,
            "skipped_marginal": self.skipped_marginal,
            "domain": list(self.domain),
        }


def _decay_rates(family, c, n, E):
    """Closed-form asymptotic decay rates (left, right) at energy E."""
    sd = shape_data(family, c, E)
    if family is Family.TANH:
        a = sd.A - n
        if a == 0:
            return 0.0, 0.0
        return a - sd.B / a, a + sd.B / a
    if family is Family.EXP:
        return math.inf, sd.A - n
    return math.inf, math.inf


def oracle_domain(family, c: Couplings, n: int, E: float, cfg: OracleConfig):
    """Truncation interval (x_min, x_max) for level n near energy E.

    Automatic rule: tanh extends each side to at least 18 and to
    ``decay_lengths`` decay lengths; exp starts where B e^{-x} = A + n + 20 and
    ends at 25 / max(sqrt|eps|, 0.25); linear is centred on -B/A with
    half-width 12 / sqrt(A).
    """
    family = Family.parse(family)
    sd = shape_data(family, c, E)
    hw = cfg.half_width
    if family is Family.TANH:
        if hw is not None:
            return -hw, hw
        left, right = _decay_rates(family, c, n, E)
        L = cfg.decay_lengths
        lo = -max(18.0, L / left) if left > 0 else -18.0
        hi = max(18.0, L / right) if right > 0 else 18.0
        return lo, hi
    if family is Family.EXP:
        if hw is not None:
            # centre on the minimum of the Morse well
            x0 = -math.log(max(2.0 * sd.A + 1.0, 1e-3) / (2.0 * sd.B))
            return x0 - hw, x0 + hw
        lo = -math.log((abs(sd.A) + n + 20.0) / sd.B)
        eps = E * E - c.m * c.m
        hi = 25.0 / max(math.sqrt(abs(eps)), 0.25)
        return lo, hi
    centre = -sd.B / sd.A
    half = hw if hw is not None else 12.0 / math.sqrt(sd.A)
    return centre - half, centre + half


def continuum_edge(family, c: Couplings, E: float) -> float:
    """Lowest asymptotic value of U_E; +inf when the spectrum is purely discrete."""
    family = Family.parse(family)
    if family is Family.TANH:
        return c.gap - 2.0 * abs(c.coupling_b(E))
    if family is Family.EXP:
        return 0.0
    return math.inf


def _grid(domain, points):
    x = np.linspace(domain[0], domain[1], points)
    return x, x[1] - x[0]


def _inner(family, c, E, n, x, h):
    u = effective_potential(family, c, E, x[1:-1])
    diag, off = _operator(u, h)
    offsq = np.ascontiguousarray(off**2)
    lo = float(np.min(u))
    hi = float(np.max(diag) + 2.0 / (h * h))
    return diag, offsq, float(_bisect_eigenvalue(diag, offsq, int(n), lo, hi, 1e-15))


def nth_inner_eigenvalue(family, c: Couplings, E_frozen: float, n: int, cfg: OracleConfig | None = None,
                         domain=None) -> float:
    """lambda_n of -d^2/dx^2 + U_{E_frozen} on the truncated grid.

    Raises NoBoundStateError when fewer than n + 1 eigenvalues lie below the
    continuum edge.
    """
    family = Family.parse(family)
    cfg = cfg or OracleConfig()
    c.require_bound_regime()
    if domain is None:
        domain = oracle_domain(family, c, n, E_frozen, cfg)
    x, h = _grid(domain, cfg.points)
    diag, offsq, lam = _inner(family, c, E_frozen, n, x, h)
    edge = continuum_edge(family, c, E_frozen)
    if math.isfinite(edge) and _sturm_count(diag, offsq, edge) <= n:
        raise NoBoundStateError(
            f"level {n} is not below the continuum edge {edge:.6g} at E={E_frozen:.6g}"
        )
    return lam


def selfconsistency_gap(family, c: Couplings, n: int, E: float, domain, points: int) -> float:
    """g(E) = lambda_n(E) - (E^2 - m^2) on a fixed grid.

    No continuum check is made: near the bracket ends the discretised level
    may sit above the continuum edge and still be a valid box eigenvalue.
    """
    family = Family.parse(family)
    x, h = _grid(domain, points)
    return _inner(family, c, E, n, x, h)[2] - (E * E - c.m * c.m)


def _marginal_rate(family, c, n, E):
    left, right = _decay_rates(family, c, n, E)
    return min(left, right)


def solve_selfconsistent(family, c: Couplings, n: int, sign, cfg: OracleConfig | None = None,
                         seed_energy: float | None = None) -> OracleResult:
    """Self-consistent energy of level n from bisection on g(E) = lambda_n(E) - (E^2 - m^2).

    The bracket is seed_energy +/- cfg.bracket_halfwidth and the domain is
    fixed from the seed. Weakly bound levels (decay rate below
    cfg.marginal_threshold) are reported as skipped, not solved.
    """
    family = Family.parse(family)
    cfg = cfg or OracleConfig()
    c.require_bound_regime()
    if seed_energy is None:
        seed = solve_level(family, c, n, sign)
        if seed is None:
            raise DomainError(f"no closed-form seed for level {n}; pass seed_energy")
        seed_energy = seed.energy
    if _marginal_rate(family, c, n, seed_energy) < cfg.marginal_threshold:
        return OracleResult(math.nan, math.nan, 0, False, True)

    domain = oracle_domain(family, c, n, seed_energy, cfg)
    x, h = _grid(domain, cfg.points)
    m2 = c.m * c.m

    def g(E):
        lam = _inner(family, c, E, n, x, h)[2]
        return lam - (E * E - m2), lam

    lo = seed_energy - cfg.bracket_halfwidth
    hi = seed_energy + cfg.bracket_halfwidth
    g_lo, _ = g(lo)
    g_hi, _ = g(hi)
    if g_lo * g_hi > 0:
        raise BracketError(
            f"g(E) has no sign change on [{lo:.6g}, {hi:.6g}]: g={g_lo:.3g}, {g_hi:.3g}",
            g_lo,
            g_hi,
        )
    iterations = 0
    while hi - lo > cfg.root_tol:
        mid = 0.5 * (lo + hi)
        g_mid, _ = g(mid)
        iterations += 1
        if g_lo * g_mid <= 0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    E = 0.5 * (lo + hi)
    _, lam = g(E)
    return OracleResult(E, lam, iterations, True, False, tuple(domain))


@dataclass
class ComparisonRow:
    n: int
    sign: int
    closed_form: float
    oracle: float | None = None
    abs_diff: float | None = None
    skipped: bool = False
    error: str | None = None
    result: OracleResult | None = field(default=None, repr=False)

    def as_dict(self):
        return {
            "n": self.n,
            "sign": "+" if self.sign > 0 else "-",
            "closed_form": self.closed_form,
            "oracle": self.oracle,
            "abs_diff": self.abs_diff,
            "skipped_marginal": self.skipped,
            "error": self.error,
        }


def compare_spectra(report: SpectrumReport, cfg: OracleConfig | None = None) -> list:
    """Run the oracle for every accepted level; failures become per-row errors."""
    cfg = cfg or OracleConfig()
    rows = []
    for state in report.accepted:
        row = ComparisonRow(state.n, state.sign, state.energy)
        try:
            res = solve_selfconsistent(report.family, report.couplings, state.n, state.sign, cfg,
                                       seed_energy=state.energy)
        except (BracketError, NoBoundStateError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        else:
            row.result = res
            row.skipped = res.skipped_marginal
            if res.converged:
                row.oracle = res.energy
                row.abs_diff = abs(res.energy - state.energy)
        rows.append(row)
    return rows
