"""
Two-qudit entanglement under H = x (x) x from the product state |p,0>|p,0>.

The linear entropy of subsystem 1 is computed three ways: by direct state
evolution, by the exact Wigner kernel, and by composed path-integral slices.
The Wigner routes marginalize onto subsystem 1 and rebuild rho_1 from the
reduced Wigner function.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Iterable

import numpy
from numpy.typing import ArrayLike

from .field_arith import PrimeDim
from .field_arith import make_prime_dim
from .linalg_core import ComplexMatrix
from .linalg_core import partial_trace
from .path_integral import PathConfig
from .path_integral import hamiltonian_symbol
from .path_integral import path_sum_kernel
from .presets import density
from .presets import make_hamiltonian
from .presets import momentum_state
from .propagator import WignerKernel
from .propagator import apply_kernel
from .propagator import exact_kernel
from .struclogger import get_logger
from .weyl_transform import WignerFunction
from .weyl_transform import density_from_wigner
from .weyl_transform import negativity
from .weyl_transform import reduce_wigner
from .weyl_transform import wigner_function

__all__ = [
    "EntanglementRecord",
    "Route",
    "entanglement_table",
    "evolved_negativity",
    "general_short_time_law",
    "linear_entropy_closed_form",
    "linear_entropy_exact",
    "position_variance",
    "product_position_variance_law",
    "purity_closed_form",
    "short_time_law",
]

logger = get_logger()

QUTRIT = 3


class Route(enum.Enum):
    EXACT = "exact"
    KERNEL = "kernel"
    PATH_INTEGRAL = "path_integral"
    CLOSED_FORM = "closed_form"


@dataclasses.dataclass(frozen=True)
class EntanglementRecord:
    """Reduced-state purity and linear entropy at one time, with its source."""

    chi_t: float
    purity: float
    linear_entropy: float
    source: Route
    steps: int | None = None
    closed_form_error: float | None = None


def purity_closed_form(chi_t: float) -> float:
    """Tr[rho_1^2] = [27 + 4(1 + 2cos t)^2 + 2(1 + 2cos 2t)^2] / 81 for qutrits."""
    first = 1.0 + 2.0 * math.cos(chi_t)
    second = 1.0 + 2.0 * math.cos(2.0 * chi_t)
    return (27.0 + 4.0 * first**2 + 2.0 * second**2) / 81.0


def linear_entropy_closed_form(chi_t: float) -> float:
    return 1.0 - purity_closed_form(chi_t)


def short_time_law(chi_t: float) -> float:
    """Leading order S_L = 8 (chi t)^2 / 9 for qutrits."""
    return 8.0 * chi_t**2 / 9.0


def general_short_time_law(chi_t: float, variance_a: float, variance_b: float) -> float:
    """Leading order S_L = 2 (chi t)^2 Var(A) Var(B) for H = A (x) B, product state."""
    return 2.0 * chi_t**2 * variance_a * variance_b


def position_variance(state: ArrayLike, dim: PrimeDim) -> float:
    """Var(x) = <x^2> - <x>^2 in a pure state."""
    vector = numpy.asarray(state, dtype=numpy.complex128)
    vector = vector / numpy.linalg.norm(vector)
    probabilities = numpy.abs(vector) ** 2
    positions = numpy.arange(dim.d, dtype=numpy.float64)

    mean = float(probabilities @ positions)
    return float(probabilities @ positions**2) - mean**2


def _initial_density(dim: PrimeDim) -> ComplexMatrix:
    product = numpy.kron(momentum_state(dim, 0), momentum_state(dim, 0))
    return density(product)


def _purity_of(matrix: ComplexMatrix) -> float:
    return float(numpy.real(numpy.trace(matrix @ matrix)))


def _evolved_wigner(kernel: WignerKernel, dim: PrimeDim) -> WignerFunction:
    return apply_kernel(kernel, wigner_function(_initial_density(dim), dim, 2))


def _purity_from_wigner(wigner: WignerFunction) -> float:
    reduced = reduce_wigner(wigner, 0)
    return _purity_of(density_from_wigner(reduced))


def linear_entropy_exact(
    chi_t: float,
    route: Route = Route.EXACT,
    *,
    steps: int = 1,
    dim: PrimeDim | None = None,
) -> EntanglementRecord:
    """
    Return the linear entropy of subsystem 1 at time chi_t along one route.

    Args:
        chi_t: Dimensionless time.
        route: How rho_1 is obtained.
        steps: Slice count for the path-integral route.
        dim: Qudit dimension; the closed form exists only for qutrits.

    Raises:
        ValueError: If the closed form is requested for a dimension other than 3.
    """
    dim = make_prime_dim(QUTRIT) if dim is None else dim
    hamiltonian, _ = make_hamiltonian("xx", dim)

    if route is Route.CLOSED_FORM:
        if dim.d != QUTRIT:
            raise ValueError("The closed-form purity is defined for qutrits only.")
        purity = purity_closed_form(chi_t)

    elif route is Route.EXACT:
        unitary = hamiltonian.evolution(chi_t)
        evolved = unitary @ _initial_density(dim) @ unitary.conj().T
        purity = _purity_of(partial_trace(evolved, 0, [dim.d, dim.d]))

    elif route is Route.KERNEL:
        kernel = exact_kernel(hamiltonian, chi_t, dim, 2)
        purity = _purity_from_wigner(_evolved_wigner(kernel, dim))

    else:
        h_w = hamiltonian_symbol(hamiltonian.matrix, dim, 2)
        kernel = path_sum_kernel(h_w, PathConfig(steps, chi_t), dim, 2)
        purity = _purity_from_wigner(_evolved_wigner(kernel, dim))

    error = None
    if dim.d == QUTRIT:
        error = abs(purity - purity_closed_form(chi_t))

    return EntanglementRecord(
        chi_t=chi_t,
        purity=purity,
        linear_entropy=1.0 - purity,
        source=route,
        steps=steps if route is Route.PATH_INTEGRAL else None,
        closed_form_error=error,
    )


def evolved_negativity(chi_t: float, dim: PrimeDim | None = None) -> float:
    """Sum negativity of the two-qudit Wigner function at time chi_t."""
    dim = make_prime_dim(QUTRIT) if dim is None else dim
    hamiltonian, _ = make_hamiltonian("xx", dim)
    return negativity(_evolved_wigner(exact_kernel(hamiltonian, chi_t, dim, 2), dim))


def entanglement_table(
    chi_ts: Iterable[float],
    routes: Iterable[Route] = (Route.CLOSED_FORM, Route.EXACT, Route.KERNEL),
    *,
    steps: int = 1,
    dim: PrimeDim | None = None,
) -> list[EntanglementRecord]:
    """Return one record per (chi_t, route), chi_t-major."""
    selected = tuple(routes)
    records = []
    for chi_t in chi_ts:
        for route in selected:
            records.append(linear_entropy_exact(chi_t, route, steps=steps, dim=dim))

    logger.info("Built entanglement table with %d records", len(records))
    return records


def product_position_variance_law(chi_t: float, dim: PrimeDim) -> float:
    """General short-time law evaluated on |p,0>|p,0> with A = B = x."""
    variance = position_variance(momentum_state(dim, 0), dim)
    return general_short_time_law(chi_t, variance, variance)
