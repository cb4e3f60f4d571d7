"""Potential families, shape-invariance data and closed-form bound-state energies.

The stationary Klein-Gordon equation with vector potential ``V = V0 f(x)`` and
scalar potential ``S = S0 f(x)`` reduces to a Schrodinger-type problem

    -psi'' + U(x) psi = eps psi,    U = (S0^2 - V0^2) f^2 + 2 (m S0 + E V0) f,
    eps = E^2 - m^2.

For the three profiles ``f = tanh x``, ``f = -exp(-x)`` and ``f = x/2`` the
effective potential is a shape-invariant supersymmetric partner (Rosen-Morse
II, Morse and the shifted oscillator, respectively). Because ``U`` depends on
``E`` through ``m S0 + E V0``, every level is fixed by a quadratic in ``E``.

Energies are in units of the rest mass scale with hbar = c = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, PreconditionError

__all__ = [
    "Family",
    "Reason",
    "Couplings",
    "ShapeData",
    "BoundState",
    "Rejection",
    "SpectrumReport",
    "profile",
    "profile_derivative",
    "vector_potential",
    "scalar_potential",
    "effective_potential",
    "superpotential_W",
    "superpotential_dW",
    "remainder_R",
    "shape_data",
    "quadratic_coefficients",
    "closure_pair",
    "solve_level",
    "level_rejection",
    "enumerate_spectrum",
    "classify_level",
    "shape_invariance_defect",
]


class Family(str, Enum):
    TANH = "tanh"
    EXP = "exp"
    LINEAR = "linear"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown potential family {value!r}") from None


class Reason(str, Enum):
    """Machine-readable reason for rejecting a candidate level."""

    NO_REAL_ROOT = "NoRealRoot"
    S1_NON_POSITIVE = "S1NonPositive"
    S2_NON_POSITIVE = "S2NonPositive"
    A_NON_POSITIVE = "ANonPositive"
    LEVEL_BOUND_EXCEEDED = "LevelBoundExceeded"
    # row pairing only: this branch passed, the other branch at the same n did not
    PARTNER_REJECTED = "PartnerRejected"


@dataclass(frozen=True)
class Couplings:
    """Rest mass ``m`` and the scalar/vector coupling strengths ``S0``, ``V0``."""

    m: float
    S0: float
    V0: float

    def __post_init__(self):
        for name in ("m", "S0", "V0"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.m <= 0:
            raise DomainError(f"rest mass must be positive, got m={self.m!r}")

    @property
    def gap(self) -> float:
        """S0^2 - V0^2, the coefficient of f^2 in the effective potential."""
        return self.S0 * self.S0 - self.V0 * self.V0

    def require_bound_regime(self):
        if not self.gap > 0:
            raise PreconditionError(
                f"discrete spectrum requires S0^2 > V0^2 (S0={self.S0}, V0={self.V0})"
            )

    def coupling_b(self, E):
        """m S0 + E V0, the energy-dependent coefficient of 2 f(x) in U."""
        return self.m * self.S0 + E * self.V0

    def as_dict(self):
        return {"m": self.m, "S0": self.S0, "V0": self.V0}


def profile(family, x):
    """The common shape f(x) of the vector and scalar potentials."""
    family = Family.parse(family)
    x = np.asarray(x)
    if family is Family.TANH:
        out = np.tanh(x)
    elif family is Family.EXP:
        out = -np.exp(-x)
    else:
        out = x / 2.0
    return out[()] if out.ndim == 0 else out


def profile_derivative(family, x):
    family = Family.parse(family)
    x = np.asarray(x)
    if family is Family.TANH:
        out = 1.0 / np.cosh(x) ** 2
    elif family is Family.EXP:
        out = np.exp(-x)
    else:
        out = np.full_like(x, 0.5, dtype=np.result_type(x, float))
    return out[()] if out.ndim == 0 else out


def vector_potential(family, c: Couplings, x):
    return c.V0 * profile(family, x)


def scalar_potential(family, c: Couplings, x):
    return c.S0 * profile(family, x)


def effective_potential(family, c: Couplings, E, x):
    """U(x) = (S0^2 - V0^2) f(x)^2 + 2 (m S0 + E V0) f(x).

    The constant-free form is used for every family so that the eigenvalue of
    ``-d^2/dx^2 + U`` is always ``E^2 - m^2``. For ``tanh`` this differs from
    the ``-sech^2`` form by the constant ``S0^2 - V0^2``.
    """
    if not (np.all(np.isfinite(x)) and math.isfinite(E)):
        raise DomainError("effective_potential requires finite E and x")
    f = profile(family, x)
    return c.gap * f * f + 2.0 * c.coupling_b(E) * f


# --- superpotentials ---------------------------------------------------------


def superpotential_W(family, A, B, x):
    """W(x) for the family: A tanh x + B/A, A - B e^{-x}, or A x + B."""
    family = Family.parse(family)
    if family is Family.TANH:
        if A == 0:
            raise DomainError("tanh superpotential needs A != 0")
        return A * np.tanh(x) + B / A
    if family is Family.EXP:
        return A - B * np.exp(-x)
    return A * x + B


def superpotential_dW(family, A, B, x):
    family = Family.parse(family)
    if family is Family.TANH:
        return A / np.cosh(x) ** 2
    if family is Family.EXP:
        return B * np.exp(-x)
    return A + 0.0 * np.asarray(x)


@dataclass(frozen=True)
class ShapeData:
    """Shape-invariance parameters of one family at a fixed energy.

    ``A`` is the translated parameter (``a_i = A - i + 1`` for tanh and exp,
    ``a_i = A`` for linear) and ``B`` is carried unchanged along the hierarchy.
    """

    family: Family
    A: float
    B: float

    def param(self, i: int) -> float:
        """The parameter a_i of the i-th member of the hierarchy (i >= 1)."""
        if i < 1:
            raise DomainError(f"hierarchy index starts at 1, got {i}")
        if self.family is Family.LINEAR:
            return self.A
        return self.A - i + 1

    def next_param(self, a: float) -> float:
        return a if self.family is Family.LINEAR else a - 1.0

    def W(self, x, a=None):
        return superpotential_W(self.family, self.A if a is None else a, self.B, x)

    def dW(self, x, a=None):
        return superpotential_dW(self.family, self.A if a is None else a, self.B, x)

    def partner(self, x, sign: int, a=None):
        """U_{+/-}(x; a) = W^2 +/- W'."""
        w = self.W(x, a)
        return w * w + sign * self.dW(x, a)

    def remainder(self, i: int) -> float:
        return remainder_R(self.family, self, i)

    def level_epsilon(self, k: int) -> float:
        """eps_k = E^2 - m^2 of the k-th level of the hierarchy at this shape.

        For tanh this includes the constant S0^2 - V0^2 = A(A+1).
        """
        A, B = self.A, self.B
        if self.family is Family.TANH:
            a = A - k
            return A * (A + 1) - a * a - B * B / (a * a)
        if self.family is Family.EXP:
            return -((A - k) ** 2)
        return (2 * k + 1) * A - B * B


def remainder_R(family, shape: ShapeData, i: int) -> float:
    """R(a_i) in U_+(x; a_i) = U_-(x; a_{i+1}) + R(a_i).

    The partial sums reproduce the level spacings:
    sum_{i=1..n} R(a_i) = eps_n - eps_0.
    """
    family = Family.parse(family)
    if i < 1:
        raise DomainError(f"remainder index starts at 1, got {i}")
    A, B = shape.A, shape.B
    if family is Family.LINEAR:
        return 2.0 * A
    a, a_next = A - i + 1, A - i
    r = a * a - a_next * a_next
    if family is Family.TANH:
        r += B * B * (1.0 / (a * a) - 1.0 / (a_next * a_next))
    return r


def shape_data(family, c: Couplings, E: float) -> ShapeData:
    """Shape parameters (A, B) of the effective potential at energy E."""
    family = Family.parse(family)
    c.require_bound_regime()
    g = c.gap
    b = c.coupling_b(E)
    if family is Family.TANH:
        A = (-1.0 + math.sqrt(1.0 + 4.0 * g)) / 2.0
        return ShapeData(family, A, b)
    root = math.sqrt(g)
    if family is Family.EXP:
        return ShapeData(family, b / root - 0.5, root)
    return ShapeData(family, root / 2.0, b / root)


def shape_invariance_defect(family, shape: ShapeData, grid, shift: float = 0.0) -> float:
    """max_x |U_+(x; a_1) - U_-(x; a_2) - R(a_1)| over ``grid``.

    With a non-zero ``shift`` the partner potentials are evaluated at the
    complex point x - i*shift.
    """
    family = Family.parse(family)
    x = np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("shape_invariance_defect needs a non-empty grid")
    z = x - 1j * shift if shift else x
    a1 = shape.param(1)
    a2 = shape.next_param(a1)
    diff = shape.partner(z, +1, a1) - shape.partner(z, -1, a2) - shape.remainder(1)
    return float(np.max(np.abs(diff)))


# --- closed-form levels -----------------------------------------------------


def quadratic_coefficients(family, c: Couplings, n: int):
    """The published (P, Q, R) of the energy quadratic for level ``n``.

    tanh and exp levels solve P E^2 + Q E + R = 0; linear levels solve
    P E^2 + Q E - R = 0 (hence the ``Q^2 + 4 P R`` discriminant there).
    """
    family = Family.parse(family)
    c.require_bound_regime()
    m, S0, V0, g = c.m, c.S0, c.V0, c.gap
    if family is Family.TANH:
        A = (-1.0 + math.sqrt(1.0 + 4.0 * g)) / 2.0
        a2 = (A - n) ** 2
        P = a2 + V0 * V0
        Q = 2.0 * m * S0 * V0
        R = a2 * a2 + m * m * S0 * S0 - a2 * (m * m + S0 * S0 - V0 * V0)
    elif family is Family.EXP:
        k = n + 0.5
        root = math.sqrt(g)
        P = S0 * S0
        Q = -2.0 * k * V0 * root + 2.0 * m * V0 * S0
        R = k * k * g + m * m * V0 * V0 - 2.0 * k * m * S0 * root
    else:
        P = S0 * S0
        Q = 2.0 * m * S0 * V0
        R = g**1.5 * (n + 0.5) - m * m * V0 * V0
    return P, Q, R


def _roots(P, Q, C):
    """Real roots (larger, smaller) of P E^2 + Q E + C = 0 with P > 0, or None."""
    disc = Q * Q - 4.0 * P * C
    if disc < 0 or P == 0:
        return None
    sq = math.sqrt(disc)
    q = -0.5 * (Q + math.copysign(sq, Q))
    if q == 0:
        return 0.0, 0.0
    r1, r2 = q / P, C / q
    return max(r1, r2), min(r1, r2)


def closure_pair(family, c: Couplings, n: int, E: float):
    """The two independent evaluations of the effective eigenvalue at level n.

    Returns ``(kinematic, shape)``: for tanh, E^2 - m^2 - S0^2 + V0^2 against
    -(A-n)^2 - B^2/(A-n)^2; for exp, E^2 - m^2 against -(A(E)-n)^2; for linear,
    E^2 - m^2 against (2n+1)A - B(E)^2.
    """
    family = Family.parse(family)
    sd = shape_data(family, c, E)
    kinematic = E * E - c.m * c.m
    if family is Family.TANH:
        a = sd.A - n
        return kinematic - c.gap, -a * a - sd.B * sd.B / (a * a)
    return kinematic, sd.level_epsilon(n)


@dataclass(frozen=True)
class BoundState:
    """One closed-form level: quantum number, branch and energy plus extras.

    ``s1``/``s2`` are set for tanh, ``a_pm`` (the shape parameter A at this
    energy) for exp. ``level_bound`` is the informational tanh count bound
    A - sqrt|B|.
    """

    family: Family
    couplings: Couplings
    n: int
    sign: int
    energy: float
    shape: ShapeData
    s1: float | None = None
    s2: float | None = None
    a_pm: float | None = None
    level_bound: float | None = None

    @property
    def epsilon(self) -> float:
        return self.energy**2 - self.couplings.m**2

    @property
    def branch(self) -> str:
        return "+" if self.sign > 0 else "-"

    def decay_rates(self):
        """Asymptotic decay rates (left, right) of the wavefunction, inf if Gaussian."""
        if self.family is Family.TANH:
            return self.s2, self.s1
        if self.family is Family.EXP:
            return math.inf, self.a_pm - self.n
        return math.inf, math.inf

    def as_dict(self):
        d = {
            "n": self.n,
            "sign": self.branch,
            "energy": self.energy,
            "epsilon": self.epsilon,
            "A": self.shape.A,
            "B": self.shape.B,
        }
        if self.family is Family.TANH:
            d.update(s1=self.s1, s2=self.s2, level_bound=self.level_bound)
        elif self.family is Family.EXP:
            d.update(A_pm=self.a_pm)
        return d


def _check_sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise DomainError(f"branch sign must be +1/-1, got {sign!r}")


def solve_level(family, c: Couplings, n: int, sign) -> BoundState | None:
    """Closed-form energy of level ``n`` on the ``sign`` branch.

    The ``+`` branch takes the ``+`` root of the quadratic, i.e. the larger
    one. Returns None when the discriminant is negative. The returned state
    is not filtered for normalisability; see :func:`level_rejection`.
    """
    family = Family.parse(family)
    sign = _check_sign(sign)
    if int(n) != n or n < 0:
        raise DomainError(f"level index must be a non-negative integer, got {n!r}")
    n = int(n)
    c.require_bound_regime()
    P, Q, R = quadratic_coefficients(family, c, n)
    roots = _roots(P, Q, -R if family is Family.LINEAR else R)
    if roots is None:
        return None
    E = roots[0] if sign > 0 else roots[1]
    sd = shape_data(family, c, E)
    extras = {}
    if family is Family.TANH:
        a = sd.A - n
        if a == 0:
            return None
        extras = dict(
            s1=a + sd.B / a,
            s2=a - sd.B / a,
            level_bound=sd.A - math.sqrt(abs(sd.B)),
        )
    elif family is Family.EXP:
        extras = dict(a_pm=sd.A)
    return BoundState(family, c, n, sign, E, sd, **extras)


def level_rejection(state: BoundState) -> Reason | None:
    """Normalisability test of a single level; None means acceptable.

    Checks are strict (> 0, no slack).
    """
    if state.family is Family.TANH:
        if not state.s2 > 0:
            return Reason.S2_NON_POSITIVE
        if not state.s1 > 0:
            return Reason.S1_NON_POSITIVE
    elif state.family is Family.EXP:
        if not (state.a_pm - state.n > 0 and state.shape.B > 0):
            return Reason.A_NON_POSITIVE
    return None


@dataclass(frozen=True)
class Rejection:
    n: int
    sign: int
    reason: Reason

    def as_dict(self):
        return {"n": self.n, "sign": "+" if self.sign > 0 else "-", "reason": self.reason.value}


@dataclass
class SpectrumReport:
    family: Family
    couplings: Couplings
    n_max_scan: int
    pairing: str
    accepted: list = field(default_factory=list)
    rejected: list = field(default_factory=list)

    def branch(self, sign) -> list:
        sign = _check_sign(sign)
        return [s for s in self.accepted if s.sign == sign]

    def level_counts(self):
        return {"+": len(self.branch(1)), "-": len(self.branch(-1))}

    def energies(self, sign) -> list:
        return [s.energy for s in self.branch(sign)]

    def find(self, n, sign):
        sign = _check_sign(sign)
        for s in self.accepted:
            if s.n == n and s.sign == sign:
                return s
        return None

    def as_dict(self):
        return {
            "family": self.family.value,
            "couplings": self.couplings.as_dict(),
            "n_max_scan": self.n_max_scan,
            "pairing": self.pairing,
            "accepted": [s.as_dict() for s in self.accepted],
            "rejected": [r.as_dict() for r in self.rejected],
        }


PAIRINGS = ("row", "branch")


def _attempt(family, c, n, sign):
    state = solve_level(family, c, n, sign)
    if state is None:
        return None, Reason.NO_REAL_ROOT
    return state, level_rejection(state)


def enumerate_spectrum(family, c: Couplings, n_max_scan: int = 64, pairing: str = "row"):
    """Scan n = 0..n_max_scan on both branches and filter by normalisability.

    ``pairing="row"`` accepts level n on both branches only when both pass
    (a failing row rejects its partner with ``PartnerRejected``); this is the
    rule that reproduces the published level counts. ``pairing="branch"``
    filters each branch on its own. A branch stops at its first rejection
    once it has accepted at least one level.
    """
    family = Family.parse(family)
    if n_max_scan < 0:
        raise DomainError(f"n_max_scan must be >= 0, got {n_max_scan}")
    if pairing not in PAIRINGS:
        raise DomainError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")
    c.require_bound_regime()
    report = SpectrumReport(family, c, int(n_max_scan), pairing)
    active = {1: True, -1: True}
    seen = {1: False, -1: False}
    for n in range(int(n_max_scan) + 1):
        signs = [s for s in (1, -1) if active[s]]
        if not signs:
            break
        results = {s: _attempt(family, c, n, s) for s in signs}
        row_ok = all(reason is None for _, reason in results.values())
        for s in signs:
            state, reason = results[s]
            if pairing == "row" and reason is None and not row_ok:
                reason = Reason.PARTNER_REJECTED
            if reason is None:
                report.accepted.append(state)
                seen[s] = True
            else:
                report.rejected.append(Rejection(n, s, reason))
                if seen[s]:
                    active[s] = False
    return report


def classify_level(family, c: Couplings, n: int, sign, pairing: str = "row"):
    """Return ``(state, None)`` for an accepted level or ``(state_or_None, reason)``.

    A level that passes its own test but lies beyond the point where the
    scan of its branch stopped is rejected with ``LevelBoundExceeded``.
    """
    family = Family.parse(family)
    sign = _check_sign(sign)
    report = enumerate_spectrum(family, c, n_max_scan=n, pairing=pairing)
    hit = report.find(n, sign)
    if hit is not None:
        return hit, None
    for r in report.rejected:
        if r.n == n and r.sign == sign:
            return solve_level(family, c, n, sign), r.reason
    state, reason = _attempt(family, c, n, sign)
    return state, reason or Reason.LEVEL_BOUND_EXCEEDED
