"""Two-qubit state families, purification, and concurrence measures.

The three families supported here are X-form mixed states, non-maximally
entangled Bell vectors, and Werner (singlet + white noise) mixtures. All
constructors return validated, read-only arrays in the computational basis
|00>, |01>, |10>, |11>.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Union

import numpy as np

from .linalg import (
    DEFAULT_ATOL,
    I4,
    SIGMA_Y,
    as_matrix,
    as_vector,
    kron,
    outer_product,
)

# Largest admissible negative eigenvalue for a density matrix.
PSD_EIGENVALUE_FLOOR = -1e-9

# Tolerance on parameter-level constraints (trace of populations, coherence bounds).
PARAM_ATOL = 1e-12

SPIN_FLIP = kron(SIGMA_Y, SIGMA_Y)
SPIN_FLIP.setflags(write=False)


class InvalidStateError(ValueError):
    """Raised when a matrix or parameter set fails a state invariant."""


class StateFamily(str, Enum):
    X = "x"
    BELL = "bell"
    WERNER = "werner"


class BellVariant(str, Enum):
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"


@dataclass(frozen=True)
class XStateParams:
    """Parameters of an X-form density matrix.

    ``a, b, c, d`` are the diagonal populations; ``w`` sits on the outer
    anti-diagonal corners and ``z`` on the inner ones. Population validity
    (nonnegative, unit sum) is enforced here; the positive-semidefiniteness
    bounds |w| <= sqrt(a*d) and |z| <= sqrt(b*c) are enforced when an actual
    density matrix is built (see :func:`make_x_state`), so that bound-case
    parameter recipes that violate them remain representable.
    """

    a: float
    b: float
    c: float
    d: float
    w: float
    z: float

    family: ClassVar[StateFamily] = StateFamily.X

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d, self.w, self.z)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidStateError("X-state parameters must be finite")
        if min(self.a, self.b, self.c, self.d) < -PARAM_ATOL:
            raise InvalidStateError("X-state populations must be nonnegative")
        total = self.a + self.b + self.c + self.d
        if abs(total - 1.0) > PARAM_ATOL:
            raise InvalidStateError(f"X-state populations must sum to 1, got {total!r}")

    def coherence_bound_violation(self) -> str | None:
        """Name the violated PSD coherence bound, or None if both hold."""
        if abs(self.w) > np.sqrt(max(self.a * self.d, 0.0)) + PARAM_ATOL:
            return f"|w| = {abs(self.w)!r} exceeds sqrt(a*d) = {np.sqrt(max(self.a * self.d, 0.0))!r}"
        if abs(self.z) > np.sqrt(max(self.b * self.c, 0.0)) + PARAM_ATOL:
            return f"|z| = {abs(self.z)!r} exceeds sqrt(b*c) = {np.sqrt(max(self.b * self.c, 0.0))!r}"
        return None


@dataclass(frozen=True)
class BellFamilyParams:
    """A non-maximally entangled Bell vector: variant plus real weight alpha in [0, 1]."""

    variant: BellVariant
    alpha: float

    family: ClassVar[StateFamily] = StateFamily.BELL

    def __post_init__(self):
        object.__setattr__(self, "variant", BellVariant(self.variant))
        if not np.isfinite(self.alpha) or not 0.0 <= self.alpha <= 1.0:
            raise InvalidStateError(f"alpha must lie in [0, 1], got {self.alpha!r}")


@dataclass(frozen=True)
class WernerParams:
    """Werner mixing weight gamma in [0, 1]."""

    gamma: float

    family: ClassVar[StateFamily] = StateFamily.WERNER

    def __post_init__(self):
        if not np.isfinite(self.gamma) or not 0.0 <= self.gamma <= 1.0:
            raise InvalidStateError(f"gamma must lie in [0, 1], got {self.gamma!r}")


StateFamilyParams = Union[XStateParams, BellFamilyParams, WernerParams]


def validate_density_matrix(
    mat, atol: float = DEFAULT_ATOL, psd_floor: float = PSD_EIGENVALUE_FLOOR
) -> np.ndarray:
    """Check Hermiticity, unit trace, and positive semidefiniteness of a 4x4 matrix."""
    m = as_matrix(mat)
    if m.shape != (4, 4):
        raise InvalidStateError(f"density matrix must be 4x4, got {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > atol:
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > atol:
        raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
    eig_min = float(np.min(np.linalg.eigvalsh(m)))
    if eig_min < psd_floor:
        raise InvalidStateError(
            f"density matrix has eigenvalue {eig_min!r} below the PSD floor {psd_floor!r}"
        )
    return m


def validate_pure_state(vec, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Check that ``vec`` is a unit vector of length 4 or 16."""
    v = as_vector(vec)
    if v.shape[0] not in (4, 16):
        raise InvalidStateError(f"pure state must have length 4 or 16, got {v.shape[0]}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > atol:
        raise InvalidStateError(f"pure state norm is {norm!r}, expected 1")
    return v


def make_x_state(p: XStateParams) -> np.ndarray:
    """Build the X-form density matrix for ``p``.

    Diagonal (a, b, c, d); corners w; inner anti-diagonal z; zeros elsewhere.
    Raises :class:`InvalidStateError` when the coherences break positivity.
    """
    violation = p.coherence_bound_violation()
    if violation is not None:
        raise InvalidStateError(f"X-state parameters are not PSD-constructible: {violation}")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = p.a, p.b, p.c, p.d
    rho[0, 3] = rho[3, 0] = p.w
    rho[1, 2] = rho[2, 1] = p.z
    rho = validate_density_matrix(rho)
    rho.setflags(write=False)
    return rho


def make_nonmax_bell(p: BellFamilyParams) -> np.ndarray:
    """Build the normalized 4-vector for the chosen Bell variant and weight.

    phi_plus:  (|00> + a|11>) / sqrt(1 + a^2)
    phi_minus: (a|00> - |11>) / sqrt(1 + a^2)
    psi_plus:  (|01> + a|10>) / sqrt(1 + a^2)
    psi_minus: (a|01> - |10>) / sqrt(1 + a^2)
    """
    n = 1.0 / np.sqrt(1.0 + p.alpha**2)
    v = np.zeros(4, dtype=complex)
    if p.variant is BellVariant.PHI_PLUS:
        v[0], v[3] = n, p.alpha * n
    elif p.variant is BellVariant.PHI_MINUS:
        v[0], v[3] = p.alpha * n, -n
    elif p.variant is BellVariant.PSI_PLUS:
        v[1], v[2] = n, p.alpha * n
    else:
        v[1], v[2] = p.alpha * n, -n
    v = validate_pure_state(v)
    v.setflags(write=False)
    return v


def make_werner(p: WernerParams) -> np.ndarray:
    """Mix the singlet projector with white noise: gamma |psi-><psi-| + (1-gamma) I/4."""
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1.0 / np.sqrt(2.0)
    singlet[2] = -1.0 / np.sqrt(2.0)
    rho = p.gamma * outer_product(singlet, singlet) + (1.0 - p.gamma) * I4 / 4.0
    rho = validate_density_matrix(rho)
    rho.setflags(write=False)
    return rho


def werner_x_params(gamma: float) -> XStateParams:
    """The Werner state written as X-form parameters (it is one)."""
    g = WernerParams(gamma).gamma
    return XStateParams(
        a=(1.0 - g) / 4.0,
        b=(1.0 + g) / 4.0,
        c=(1.0 + g) / 4.0,
        d=(1.0 - g) / 4.0,
        w=0.0,
        z=-g / 2.0,
    )


def density_matrix_for(params: StateFamilyParams) -> np.ndarray:
    """Dispatch any family's parameters to a density matrix."""
    if isinstance(params, XStateParams):
        return make_x_state(params)
    if isinstance(params, BellFamilyParams):
        vec = make_nonmax_bell(params)
        rho = outer_product(vec, vec)
        rho.setflags(write=False)
        return rho
    if isinstance(params, WernerParams):
        return make_werner(params)
    raise TypeError(f"unsupported parameter type {type(params)!r}")


def purify(rho) -> np.ndarray:
    """Embed a 4x4 density matrix as a unit 16-vector whose B-marginal is ``rho``.

    Uses the eigendecomposition rho = sum_i p_i |psi_i><psi_i| and the
    computational ancilla basis: |Psi> = sum_i sqrt(p_i) |psi_i>|e_i>. The
    ancilla basis choice is immaterial; the contract is the round trip
    partial_trace_b(|Psi><Psi|, 4, 4) == rho.
    """
    rho = validate_density_matrix(rho)
    vals, vecs = np.linalg.eigh(rho)
    if float(np.min(vals)) < PSD_EIGENVALUE_FLOOR:
        raise InvalidStateError("eigendecomposition produced a significantly negative weight")
    psi = np.zeros(16, dtype=complex)
    for i, p in enumerate(vals):
        if p <= 0.0:
            continue
        ancilla = np.zeros(4, dtype=complex)
        ancilla[i] = 1.0
        psi += np.sqrt(p) * np.kron(vecs[:, i], ancilla)
    psi = validate_pure_state(psi)
    psi.setflags(write=False)
    return psi


def wootters_concurrence(rho) -> float:
    """Mixed-state two-qubit concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the decreasingly sorted square roots of the eigenvalues of
    rho . (sy x sy) . rho* . (sy x sy). Serves as the independent oracle for
    the spin-flip trace measure below.
    """
    rho = validate_density_matrix(rho)
    product = rho @ SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    eigs = np.linalg.eigvals(product)
    lam = np.sqrt(np.clip(np.sort(eigs.real)[::-1], 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def flip_concurrence(m) -> float:
    """|Tr((sy x sy) m)| for any 4x4 matrix, Hermitian or not.

    For a real density matrix this equals the concurrence of the state;
    applied to the non-Hermitian butterfly product it defines the evolved
    concurrence tracked by the engine.
    """
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    return float(abs(np.trace(SPIN_FLIP @ m)))
