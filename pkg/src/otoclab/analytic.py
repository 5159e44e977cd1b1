"""Closed-form expressions for the concurrence-to-trace ratio k.

For each state family and each pair of scrambling Paulis (W(0), V), the ratio
k = |Tr((sy x sy) M(t))| / |Tr M(t)| computed by the engine reduces to one of
five closed forms. The forms are implemented here exactly as published so the
brute-force engine can confirm or refute them; the verification suite is the
arbiter whenever the two disagree.

Phase conventions are data, not derivation: the X family's forms are stated
in terms of phi = 8 * jz * t and the Werner family's in terms of
phi = 4 * jz * t, each paired with the Hamiltonian multiplier the
verification suite resolves empirically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .engine import Pauli
from .states import (
    BellFamilyParams,
    StateFamily,
    StateFamilyParams,
    WernerParams,
    XStateParams,
)

# Denominators below this are reported as degenerate instead of divided out.
DEGENERATE_DENOMINATOR = 1e-12


class DegenerateParametersError(ValueError):
    """Raised when a closed form's denominator vanishes (limit undefined)."""


class InfeasibleConstraintsError(ValueError):
    """Raised when a bound-case construction has no parameter solution."""


class KClass(str, Enum):
    """Which closed form governs a (family, W(0), V) combination."""

    L_TILDE = "l_tilde"
    L_DTILDE = "l_double_tilde"
    K_TILDE = "k_tilde"
    M_TILDE = "m_tilde"
    M_DTILDE = "m_double_tilde"


@dataclass(frozen=True)
class PhaseConvention:
    """Phase argument per unit jz*t used by a family's closed forms."""

    family: StateFamily
    phi_per_jz_t: float

    def phi(self, jz: float, t: float) -> float:
        return self.phi_per_jz_t * jz * t


X_PHASE = PhaseConvention(StateFamily.X, 8.0)
WERNER_PHASE = PhaseConvention(StateFamily.WERNER, 4.0)

PHASE_CONVENTIONS = {StateFamily.X: X_PHASE, StateFamily.WERNER: WERNER_PHASE}


def classify_pair(family: StateFamily, w0: Pauli, v: Pauli) -> KClass:
    """Assign the closed form for one (family, W(0), V) combination.

    Bell vectors take the time-independent k_tilde for every pair. For the X
    and Werner families the time-dependent form applies exactly when both
    operators are drawn from {x, y}; any pair containing the z Pauli commutes
    with the coupling (or squares to +/- identity), pinning the ratio to the
    static form. The published pair lists cover seven of the nine cells and
    agree with this rule; the remaining two cells, (x, z) and (y, z), follow
    the same static behavior, which the verification suite confirms
    numerically.
    """
    family, w0, v = StateFamily(family), Pauli(w0), Pauli(v)
    if family is StateFamily.BELL:
        return KClass.K_TILDE
    time_dependent = w0 is not Pauli.Z and v is not Pauli.Z
    if family is StateFamily.X:
        return KClass.L_TILDE if time_dependent else KClass.L_DTILDE
    if family is StateFamily.WERNER:
        return KClass.M_TILDE if time_dependent else KClass.M_DTILDE
    raise ValueError(f"unsupported family {family!r}")


def l_tilde(p: XStateParams, phi: float) -> float:
    """Time-dependent X-family ratio.

    2 sqrt(w^2 + z^2 - 2 w z cos(phi))
    ----------------------------------------------------------------------
    sqrt((b+c)^2 + (a+d)^2 + 2 (b+c)(a+d) cos(phi))
    """
    cos = np.cos(phi)
    num = 2.0 * np.sqrt(max(p.w**2 + p.z**2 - 2.0 * p.w * p.z * cos, 0.0))
    pq = (p.b + p.c, p.a + p.d)
    den_sq = pq[0] ** 2 + pq[1] ** 2 + 2.0 * pq[0] * pq[1] * cos
    den = np.sqrt(max(den_sq, 0.0))
    if den < DEGENERATE_DENOMINATOR:
        raise DegenerateParametersError(
            f"denominator {den!r} vanishes for populations (b+c, a+d) = {pq!r} at cos(phi) = {cos!r}"
        )
    return float(num / den)


def l_tilde_restricted(a: float, d: float, phi: float) -> float:
    """:func:`l_tilde` specialized to w = a, z = d, b + c = 1 - (a + d)."""
    if a < 0.0 or d < 0.0 or a + d > 1.0 + 1e-12:
        raise ValueError(f"need a, d >= 0 with a + d <= 1, got a = {a!r}, d = {d!r}")
    cos = np.cos(phi)
    num = 2.0 * np.sqrt(max(a**2 + d**2 - 2.0 * a * d * cos, 0.0))
    s = a + d
    den_sq = (1.0 - s) ** 2 + s**2 + 2.0 * (1.0 - s) * s * cos
    den = np.sqrt(max(den_sq, 0.0))
    if den < DEGENERATE_DENOMINATOR:
        raise DegenerateParametersError(
            f"denominator vanishes for a + d = {s!r} at cos(phi) = {cos!r}"
        )
    return float(num / den)


def l_double_tilde(p: XStateParams) -> float:
    """Static X-family ratio 2(w - z); time-independent.

    Written as published, i.e. signed. The engine's ratio is a quotient of
    absolute values, so it reproduces |2(w - z)|; a negative value here flags
    that the publication's implicit w >= z ordering does not hold.
    """
    return float(2.0 * (p.w - p.z))


def k_tilde(alpha: float) -> float:
    """Bell-family ratio 2 alpha / (1 + alpha^2); the same for all nine Pauli pairs."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    return float(2.0 * alpha / (1.0 + alpha**2))


def m_tilde(gamma: float, phi: float) -> float:
    """Time-dependent Werner ratio as published: gamma / sqrt(cos^2(phi) + gamma sin^2(phi)).

    Note: the verification suite finds this expression does NOT reproduce the
    engine for 0 < gamma < 1. The numerically exact ratio carries gamma^2
    under the radical, equivalently :func:`l_tilde` evaluated on the Werner
    state's X-form parameters at doubled phase. The published expression is
    kept here verbatim so the disagreement is measured rather than papered
    over; see the verify report.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    den_sq = np.cos(phi) ** 2 + gamma * np.sin(phi) ** 2
    den = np.sqrt(max(den_sq, 0.0))
    if den < DEGENERATE_DENOMINATOR:
        raise DegenerateParametersError(
            f"limit undefined: gamma = {gamma!r} with cos(phi) = {np.cos(phi)!r}"
        )
    return float(gamma / den)


def m_double_tilde(gamma: float) -> float:
    """Static Werner ratio: gamma itself."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    return float(gamma)


def k_for_class(kclass: KClass, params: StateFamilyParams, phi: float) -> float:
    """Evaluate the classified closed form at the given phase."""
    kclass = KClass(kclass)
    if kclass is KClass.L_TILDE:
        assert isinstance(params, XStateParams)
        return l_tilde(params, phi)
    if kclass is KClass.L_DTILDE:
        assert isinstance(params, XStateParams)
        return l_double_tilde(params)
    if kclass is KClass.K_TILDE:
        assert isinstance(params, BellFamilyParams)
        return k_tilde(params.alpha)
    if kclass is KClass.M_TILDE:
        assert isinstance(params, WernerParams)
        return m_tilde(params.gamma, phi)
    assert isinstance(params, WernerParams)
    return m_double_tilde(params.gamma)


def predict_concurrence_from_otoc(k: float, otoc: float, im_z: float) -> float:
    """k * sqrt((1 - otoc/2)^2 + (Im Z)^2); reduces to k (1 - otoc/2) for real Z."""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"k must lie in [0, 1], got {k!r}")
    return float(k * np.sqrt((1.0 - otoc / 2.0) ** 2 + im_z**2))


def predict_concurrence_from_bures(k: float, bures: float) -> float:
    """k * (1 - bures^2 / 2) on the regime 0 <= bures <= sqrt(2)."""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"k must lie in [0, 1], got {k!r}")
    if not 0.0 <= bures <= np.sqrt(2.0) + 1e-12:
        raise ValueError(f"bures must lie in [0, sqrt(2)], got {bures!r}")
    return float(k * (1.0 - bures**2 / 2.0))


def case1_bound_state() -> XStateParams:
    """The all-1/4 X state: populations and coherences all 1/4.

    At cos(phi) = 0 its l_tilde reaches the upper bound 1, which the engine
    reproduces as k = 1 at the matching times.
    """
    return XStateParams(a=0.25, b=0.25, c=0.25, d=0.25, w=0.25, z=0.25)


def case2_bound_family(a: float) -> XStateParams:
    """Parameter recipe for the static-window upper bound: a - d = 1/2, w = a, z = d.

    ``b`` and ``c`` split the remaining trace equally. The recipe is only
    population-feasible for a in [1/2, 3/4] (outside, d or b + c turns
    negative and InfeasibleConstraintsError names the violated condition).
    Even inside that window the returned parameters never satisfy the
    positivity bound |w| <= sqrt(a*d) (w = a > sqrt(a*(a - 1/2)) for every
    a > 0), so no physical density matrix attains this bound:
    :func:`otoclab.states.make_x_state` rejects the recipe, surfacing the
    infeasibility rather than repairing it. The companion constraint
    4a <= 1 that was published alongside the recipe contradicts d >= 0
    outright and is not enforced.
    """
    if not np.isfinite(a):
        raise InfeasibleConstraintsError(f"a must be finite, got {a!r}")
    d = a - 0.5
    if d < 0.0:
        raise InfeasibleConstraintsError(f"d = a - 1/2 = {d!r} is a negative population")
    rest = 1.0 - a - d
    if rest < 0.0:
        raise InfeasibleConstraintsError(f"b + c = 1 - (a + d) = {rest!r} is negative")
    return XStateParams(a=a, b=rest / 2.0, c=rest / 2.0, d=d, w=a, z=d)
