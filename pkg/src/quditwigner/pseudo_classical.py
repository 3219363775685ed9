"""
Linear Hamiltonians on the lattice and the shift regime of their propagators.

For H_W(mu) = sum_a (a_a m_a + b_a n_a) + c the single-slice kernel reduces to
a deterministic lattice shift when every k = coefficient * d * tau / pi is an
even integer. Odd k leaves a wraparound sign (-1)^k that spreads the kernel.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Sequence

import numpy
from numpy.typing import NDArray

from .config import get_settings
from .field_arith import PhaseVector
from .field_arith import PrimeDim
from .field_arith import get_lattice
from .linalg_core import hermitian_expm
from .path_integral import short_time_kernel
from .propagator import WignerKernel
from .propagator import kernel_fourier_form
from .struclogger import get_logger
from .weyl_transform import quantize

__all__ = [
    "Commensurability",
    "CommensurabilityReport",
    "LinearHamiltonian",
    "ShiftVerification",
    "classify_commensurability",
    "compose_shift",
    "shift_kernel",
    "single_step_kernel",
    "verify_shift_kernel",
    "wraparound_sign",
]

logger = get_logger()

Shift = tuple[int, int]


class Commensurability(enum.Enum):
    STRICT = "strict"
    WEAK_ODD = "weak_odd"
    INCOMMENSURATE = "incommensurate"


@dataclasses.dataclass(frozen=True)
class LinearHamiltonian:
    """
    H_W(mu) = sum_a (a_a m_a + b_a n_a) + offset, in units of the coupling.

    Attributes:
        coefficients: One (a, b) pair per qudit.
        offset: Constant term; it cancels in every kernel.
    """

    coefficients: tuple[tuple[float, float], ...]
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValueError("A linear Hamiltonian needs at least one qudit.")

    @classmethod
    def single(cls, a: float, b: float, offset: float = 0.0) -> LinearHamiltonian:
        return cls(((a, b),), offset)

    @property
    def n_qudits(self) -> int:
        return len(self.coefficients)

    def lattice_symbol(self, dim: PrimeDim) -> NDArray[numpy.float64]:
        """Evaluate H_W on the canonical representatives of every lattice point."""
        points = get_lattice(dim, self.n_qudits).points.astype(numpy.float64)
        slopes = numpy.array(
            [value for pair in self.coefficients for value in pair], dtype=numpy.float64
        )
        return numpy.asarray(points @ slopes + self.offset)

    def operator(self, dim: PrimeDim) -> NDArray[numpy.complex128]:
        """The operator whose phase-space function is lattice_symbol."""
        return quantize(self.lattice_symbol(dim), dim, self.n_qudits)

    def lifted_difference(self, delta_gamma: PhaseVector, xi: PhaseVector) -> float:
        """
        Return H_W(gamma_i + xi_i) - H_W(gamma_(i-1) - xi_i) on the integer lift.

        On integers this is (a, b) . (dgamma + 2 xi), with no reduction mod d.
        """
        total = 0.0
        steps = (delta_gamma + xi.scaled(2)).coords
        for (a, b), m, n in zip(self.coefficients, steps[0::2], steps[1::2]):
            total += a * m + b * n

        return total


@dataclasses.dataclass(frozen=True)
class CommensurabilityReport:
    """
    Classification of one slice of length tau.

    Attributes:
        k_values: (k_a, k_b) per qudit, k = coefficient * d * tau / pi.
        classes: Classification per coefficient, flattened (a1, b1, a2, b2, ...).
        predicted_shift: (dm, dn) per qudit for strict slices, else None.
        offset: The inert constant term.
    """

    dim: int
    tau: float
    k_values: tuple[tuple[float, float], ...]
    classes: tuple[Commensurability, ...]
    overall: Commensurability
    predicted_shift: tuple[Shift, ...] | None
    offset: float


def _classify_k(k: float, tolerance: float) -> Commensurability:
    nearest = round(k)
    if abs(k - nearest) >= tolerance:
        return Commensurability.INCOMMENSURATE

    return Commensurability.STRICT if nearest % 2 == 0 else Commensurability.WEAK_ODD


def classify_commensurability(
    hamiltonian: LinearHamiltonian,
    tau: float,
    dim: PrimeDim,
    *,
    k_tolerance: float | None = None,
) -> CommensurabilityReport:
    """
    Classify a slice of length tau as strict, weak_odd or incommensurate.

    Raises:
        ValueError: If tau is not positive.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}.")

    tolerance = get_settings().k_tolerance if k_tolerance is None else k_tolerance
    k_values = tuple(
        (a * dim.d * tau / math.pi, b * dim.d * tau / math.pi)
        for a, b in hamiltonian.coefficients
    )
    classes = tuple(
        _classify_k(k, tolerance) for pair in k_values for k in pair
    )

    if Commensurability.INCOMMENSURATE in classes:
        overall = Commensurability.INCOMMENSURATE
    elif Commensurability.WEAK_ODD in classes:
        overall = Commensurability.WEAK_ODD
    else:
        overall = Commensurability.STRICT

    predicted = None
    if overall is Commensurability.STRICT:
        predicted = tuple(
            (dim.reduce(round(k_b) // 2), dim.reduce(-(round(k_a) // 2)))
            for k_a, k_b in k_values
        )

    return CommensurabilityReport(
        dim=dim.d,
        tau=tau,
        k_values=k_values,
        classes=classes,
        overall=overall,
        predicted_shift=predicted,
        offset=hamiltonian.offset,
    )


def wraparound_sign(k: float, *, k_tolerance: float | None = None) -> int:
    """
    Return (-1)^k, the phase picked up when a lifted coordinate wraps around.

    Raises:
        ValueError: If k is not an integer within tolerance.
    """
    tolerance = get_settings().k_tolerance if k_tolerance is None else k_tolerance
    nearest = round(k)
    if abs(k - nearest) >= tolerance:
        raise ValueError(f"The wraparound sign needs an integer k, got {k}.")

    return -1 if nearest % 2 else 1


def compose_shift(
    shifts: Sequence[Shift], steps: int, dim: PrimeDim
) -> tuple[Shift, ...]:
    """Return the shift of `steps` repeated slices, added mod d per qudit."""
    return tuple(
        (dim.reduce(steps * dm), dim.reduce(steps * dn)) for dm, dn in shifts
    )


def shift_kernel(shifts: Sequence[Shift], dim: PrimeDim) -> WignerKernel:
    """Return the permutation kernel moving every point mu to mu + shift."""
    n_qudits = len(shifts)
    lattice = get_lattice(dim, n_qudits)
    offset = numpy.array([value for pair in shifts for value in pair])

    targets = lattice.indices(lattice.points + offset)
    entries = numpy.zeros((lattice.size, lattice.size))
    entries[targets, numpy.arange(lattice.size)] = 1.0

    return WignerKernel(dim, n_qudits, entries)


def single_step_kernel(
    hamiltonian: LinearHamiltonian, tau: float, dim: PrimeDim
) -> WignerKernel:
    """Return the short-time kernel of one slice built on the lattice symbol."""
    return short_time_kernel(
        hamiltonian.lattice_symbol(dim), tau, dim, hamiltonian.n_qudits
    )


@dataclasses.dataclass(frozen=True)
class ShiftVerification:
    """
    Outcome of checking a slice kernel against its classification.

    Attributes:
        kernel_is_permutation: The slice kernel is a 0/1 permutation.
        matches_prediction: For strict slices, the permutation is the predicted
            shift. None otherwise.
        spread: Some column holds two or more entries above tolerance.
        matches_exact: The slice kernel equals the kernel of exp(-i tau H) for the
            quantized symbol. None when a qudit couples both coordinates.
        wraparound_phases: Real part of exp(-i tau dH) when one lifted coordinate
            moves by d, per coefficient (a1, b1, a2, b2, ...). Strict slices give
            +1 everywhere, odd k gives -1.
    """

    report: CommensurabilityReport
    kernel_is_permutation: bool
    matches_prediction: bool | None
    spread: bool
    matches_exact: bool | None
    wraparound_phases: tuple[float, ...] = ()

    @property
    def consistent(self) -> bool:
        if self.matches_exact is False:
            return False

        if self.report.overall is Commensurability.STRICT:
            lifts_cleanly = all(phase > 0 for phase in self.wraparound_phases)
            return (
                self.kernel_is_permutation
                and bool(self.matches_prediction)
                and lifts_cleanly
            )

        return self.spread and not self.kernel_is_permutation


def _wraparound_phases(
    hamiltonian: LinearHamiltonian, tau: float, dim: PrimeDim
) -> tuple[float, ...]:
    width = 2 * hamiltonian.n_qudits
    still = PhaseVector((0,) * width)
    phases = []
    for axis in range(width):
        lift = PhaseVector(tuple(dim.d if i == axis else 0 for i in range(width)))
        phases.append(math.cos(tau * hamiltonian.lifted_difference(lift, still)))

    return tuple(phases)


def verify_shift_kernel(
    hamiltonian: LinearHamiltonian,
    tau: float,
    dim: PrimeDim,
    *,
    tolerance: float | None = None,
    k_tolerance: float | None = None,
) -> ShiftVerification:
    """
    Build the slice kernel and check it against the commensurability class.

    Strict slices must give the permutation of the predicted shift; weak_odd and
    incommensurate slices must give a spread kernel.
    """
    limit = get_settings().tolerance if tolerance is None else tolerance
    report = classify_commensurability(hamiltonian, tau, dim, k_tolerance=k_tolerance)
    kernel = single_step_kernel(hamiltonian, tau, dim)

    is_permutation = kernel.is_permutation(limit)
    above = numpy.abs(kernel.entries) > limit
    spread = bool(numpy.any(above.sum(axis=0) >= 2))

    matches_prediction = None
    if report.predicted_shift is not None:
        expected = shift_kernel(report.predicted_shift, dim)
        matches_prediction = bool(
            numpy.max(numpy.abs(kernel.entries - expected.entries)) <= limit
        )

    matches_exact = None
    if all(a == 0 or b == 0 for a, b in hamiltonian.coefficients):
        unitary = hermitian_expm(hamiltonian.operator(dim), -1j * tau)
        exact = kernel_fourier_form(unitary, dim, hamiltonian.n_qudits)
        matches_exact = bool(
            numpy.max(numpy.abs(kernel.entries - exact.entries)) <= limit
        )

    logger.debug(
        "Slice tau=%.6g d=%d class=%s permutation=%s spread=%s",
        tau,
        dim.d,
        report.overall.value,
        is_permutation,
        spread,
    )

    return ShiftVerification(
        report=report,
        kernel_is_permutation=is_permutation,
        matches_prediction=matches_prediction,
        spread=spread,
        matches_exact=matches_exact,
        wraparound_phases=_wraparound_phases(hamiltonian, tau, dim),
    )
