"""
Discrete Weyl machinery: Fourier, clock/shift and displacement operators,
phase-point operators, and the forward/inverse Weyl and Wigner transforms.

Composite systems use tensor products of single-qudit operators with every
prefactor applied per qudit. Lattice arrays are flat and indexed as described
on field_arith.PhaseLattice.
"""

from __future__ import annotations

import dataclasses
import functools
import math
import string

import numpy
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .field_arith import PhaseLattice
from .field_arith import PhaseVector
from .field_arith import PrimeDim
from .field_arith import get_lattice
from .field_arith import omega_powers
from .linalg_core import ComplexMatrix
from .linalg_core import ShapeMismatchError
from .linalg_core import as_matrix
from .linalg_core import is_hermitian
from .struclogger import get_logger

__all__ = [
    "DisplacementSet",
    "NotADensityMatrixError",
    "PhasePointOperatorSet",
    "WeylSymbol",
    "WignerFunction",
    "clock_shift",
    "density_from_wigner",
    "dft_operator",
    "displacement",
    "displacement_set",
    "inverse_weyl",
    "lattice_fourier_matrix",
    "momentum_marginal",
    "negativity",
    "phase_point_operators",
    "phase_space_function",
    "position_marginal",
    "quantize",
    "real_phase_space_function",
    "reduce_wigner",
    "weyl_symbol",
    "wigner_function",
    "wigner_from_phase_points",
]

logger = get_logger()

RealArray = NDArray[numpy.float64]
ComplexArray = NDArray[numpy.complex128]

DEFAULT_TOLERANCE = 1e-12


class NotADensityMatrixError(ValueError):
    """Raised when an input is not a normalized, Hermitian, PSD matrix."""


@dataclasses.dataclass(frozen=True, eq=False)
class DisplacementSet:
    """All d^2 displacement operators D(k, j), stored as operators[k, j]."""

    dim: PrimeDim
    operators: ComplexArray

    def __getitem__(self, key: tuple[int, int]) -> ComplexMatrix:
        k, j = key
        return self.operators[self.dim.reduce(k), self.dim.reduce(j)]

    def adjoints(self) -> ComplexArray:
        """Return D(k, j)^dagger stacked the same way."""
        return self.operators.conj().transpose(0, 1, 3, 2)


@dataclasses.dataclass(frozen=True, eq=False)
class WeylSymbol:
    """Weyl symbol Tr[A D(k, j)] over the flat (k1, j1, ..., kn, jn) lattice."""

    dim: PrimeDim
    n_qudits: int
    values: ComplexArray

    @property
    def lattice(self) -> PhaseLattice:
        return get_lattice(self.dim, self.n_qudits)

    def at(self, *coords: int) -> complex:
        return complex(self.values[self.lattice.index(coords)])

    def grid(self) -> ComplexArray:
        return self.values.reshape(self.lattice.shape)


@dataclasses.dataclass(frozen=True, eq=False)
class WignerFunction:
    """A real quasi-probability over the flat phase lattice."""

    dim: PrimeDim
    n_qudits: int
    values: RealArray

    @property
    def lattice(self) -> PhaseLattice:
        return get_lattice(self.dim, self.n_qudits)

    def at(self, point: PhaseVector | tuple[int, ...]) -> float:
        return float(self.values[self.lattice.index(point)])

    def grid(self) -> RealArray:
        return self.values.reshape(self.lattice.shape)

    def total(self) -> float:
        return math.fsum(self.values.tolist())


@dataclasses.dataclass(frozen=True, eq=False)
class PhasePointOperatorSet:
    """Hermitian phase-point operators A(mu), operators[flat index of mu]."""

    dim: PrimeDim
    n_qudits: int
    operators: ComplexArray

    def __getitem__(self, point: PhaseVector | tuple[int, ...]) -> ComplexMatrix:
        return self.operators[get_lattice(self.dim, self.n_qudits).index(point)]


def dft_operator(dim: PrimeDim) -> ComplexMatrix:
    """The unitary DFT with entries omega^(mn) / sqrt(d)."""
    indices = numpy.arange(dim.d)
    return omega_powers(dim, numpy.outer(indices, indices)) / math.sqrt(dim.d)


def clock_shift(dim: PrimeDim) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Return (Z, X): Z|n> = omega^n |n>, X|n> = |n+1 mod d>."""
    indices = numpy.arange(dim.d)
    clock = numpy.diag(omega_powers(dim, indices))
    shift = numpy.zeros((dim.d, dim.d), dtype=numpy.complex128)
    shift[(indices + 1) % dim.d, indices] = 1.0

    return clock, shift


def displacement(dim: PrimeDim, k: int, j: int) -> ComplexMatrix:
    """
    Return D(k, j) = omega^(-kj 2^-1) Z^k X^j.

    The matrix is assembled from integer exponents: column b holds the single
    entry omega^(k(b+j) - kj 2^-1) in row b + j.
    """
    d = dim.d
    k, j = dim.reduce(k), dim.reduce(j)
    columns = numpy.arange(d)
    rows = (columns + j) % d

    matrix = numpy.zeros((d, d), dtype=numpy.complex128)
    matrix[rows, columns] = omega_powers(dim, k * rows - k * j * dim.half_inv)

    return matrix


@functools.lru_cache(maxsize=None)
def displacement_set(dim: PrimeDim) -> DisplacementSet:
    """Return the cached table of all displacement operators for dim."""
    logger.debug("Building displacement table for d=%d", dim.d)

    operators = numpy.array(
        [[displacement(dim, k, j) for j in range(dim.d)] for k in range(dim.d)]
    )
    operators.setflags(write=False)

    return DisplacementSet(dim=dim, operators=operators)


def _letters(count: int, offset: int = 0) -> str:
    return string.ascii_letters[offset : offset + count]


def _check_operator_size(matrix: ComplexMatrix, dim: PrimeDim, n_qudits: int) -> None:
    size = dim.d**n_qudits
    if matrix.shape != (size, size):
        raise ShapeMismatchError(
            f"Expected a {size}x{size} operator for {n_qudits} qudit(s) of "
            f"dimension {dim.d}, got {matrix.shape}."
        )


def weyl_symbol(operator: ArrayLike, dim: PrimeDim, n_qudits: int = 1) -> WeylSymbol:
    """
    Return the Weyl symbol Tr[A (D(k1, j1) x ... x D(kn, jn))].

    Raises:
        ShapeMismatchError: If A is not d^n x d^n.
    """
    matrix = as_matrix(operator)
    _check_operator_size(matrix, dim, n_qudits)

    rows, cols = _letters(n_qudits), _letters(n_qudits, n_qudits)
    symbols = _letters(2 * n_qudits, 2 * n_qudits)
    factors = [
        f"{symbols[2 * q]}{symbols[2 * q + 1]}{cols[q]}{rows[q]}"
        for q in range(n_qudits)
    ]
    subscripts = f"{rows}{cols},{','.join(factors)}->{symbols}"

    table = displacement_set(dim).operators
    tensor = matrix.reshape((dim.d,) * (2 * n_qudits))
    values = numpy.einsum(subscripts, tensor, *([table] * n_qudits))

    return WeylSymbol(dim, n_qudits, numpy.asarray(values).reshape(-1))


def inverse_weyl(symbol: WeylSymbol) -> ComplexMatrix:
    """Return A = d^-n sum_c symbol(c) (D(k1, j1) x ... x D(kn, jn))^dagger."""
    dim, n_qudits = symbol.dim, symbol.n_qudits

    rows, cols = _letters(n_qudits), _letters(n_qudits, n_qudits)
    symbols = _letters(2 * n_qudits, 2 * n_qudits)
    factors = [
        f"{symbols[2 * q]}{symbols[2 * q + 1]}{rows[q]}{cols[q]}"
        for q in range(n_qudits)
    ]
    subscripts = f"{symbols},{','.join(factors)}->{rows}{cols}"

    adjoints = displacement_set(dim).adjoints()
    tensor = numpy.einsum(subscripts, symbol.grid(), *([adjoints] * n_qudits))
    size = dim.d**n_qudits

    return numpy.asarray(tensor).reshape(size, size) / size


@functools.lru_cache(maxsize=None)
def lattice_fourier_matrix(dim: PrimeDim, n_qudits: int) -> ComplexArray:
    """Phase matrix omega^(sum_a j_a n_a - k_a m_a), rows mu, columns (k, j)."""
    matrix = omega_powers(dim, get_lattice(dim, n_qudits).fourier)
    matrix.setflags(write=False)
    return matrix


def phase_space_function(symbol: WeylSymbol) -> ComplexArray:
    """Return A_W(mu) = d^-n sum_(k, j) symbol(k, j) omega^(jn - km) per qudit."""
    matrix = lattice_fourier_matrix(symbol.dim, symbol.n_qudits)
    return (matrix @ symbol.values) / symbol.dim.d**symbol.n_qudits


def real_phase_space_function(
    operator: ArrayLike,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> RealArray:
    """
    Return the real phase-space function of a Hermitian operator.

    Raises:
        ValueError: If the imaginary residue exceeds tolerance.
    """
    values = phase_space_function(weyl_symbol(operator, dim, n_qudits))
    residue = float(numpy.max(numpy.abs(values.imag), initial=0.0))
    if residue > tolerance:
        raise ValueError(
            f"Phase-space function has imaginary residue {residue:.3e}; "
            "is the operator Hermitian?"
        )

    return numpy.ascontiguousarray(values.real)


def quantize(values: ArrayLike, dim: PrimeDim, n_qudits: int = 1) -> ComplexMatrix:
    """
    Return the operator whose phase-space function is values.

    This inverts phase_space_function: A = d^-n sum_mu A_W(mu) A(mu).
    """
    function = numpy.asarray(values, dtype=numpy.complex128).reshape(-1)
    operators = phase_point_operators(dim, n_qudits).operators
    if function.shape[0] != operators.shape[0]:
        raise ShapeMismatchError(
            f"Expected {operators.shape[0]} lattice values, got {function.shape[0]}."
        )

    return numpy.einsum("p,pab->ab", function, operators) / dim.d**n_qudits


def _require_density_matrix(
    matrix: ComplexMatrix, dim: PrimeDim, n_qudits: int, tolerance: float
) -> None:
    _check_operator_size(matrix, dim, n_qudits)

    trace = complex(numpy.trace(matrix))
    if abs(trace - 1.0) > tolerance:
        raise NotADensityMatrixError(f"Density matrix has trace {trace:.6g}, not 1.")

    if not is_hermitian(matrix, tolerance):
        raise NotADensityMatrixError("Density matrix is not Hermitian.")

    smallest = float(numpy.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0])
    if smallest < -tolerance:
        raise NotADensityMatrixError(
            f"Density matrix has negative eigenvalue {smallest:.3e}."
        )


def _real_lattice(values: ComplexArray, tolerance: float, label: str) -> RealArray:
    residue = float(numpy.max(numpy.abs(values.imag), initial=0.0))
    if residue > tolerance:
        raise ValueError(f"{label} has imaginary residue {residue:.3e}.")

    return numpy.ascontiguousarray(values.real)


def wigner_function(
    rho: ArrayLike,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> WignerFunction:
    """
    Return the discrete Wigner function d^-2n sum symbol(k, j) omega^(jn - km).

    Raises:
        NotADensityMatrixError: If rho is not a normalized density matrix.
    """
    matrix = as_matrix(rho)
    _require_density_matrix(matrix, dim, n_qudits, tolerance)

    symbol = weyl_symbol(matrix, dim, n_qudits)
    values = phase_space_function(symbol) / dim.d**n_qudits

    return WignerFunction(dim, n_qudits, _real_lattice(values, tolerance, "Wigner"))


@functools.lru_cache(maxsize=None)
def _single_phase_points(dim: PrimeDim) -> ComplexArray:
    lattice = get_lattice(dim, 1)
    adjoints = displacement_set(dim).adjoints().reshape(lattice.size, dim.d, dim.d)
    # A(m, n) = d^-1 sum omega^(km - jn) D(k, j)^dagger, the conjugate phase.
    phases = lattice_fourier_matrix(dim, 1).conj()

    operators = numpy.einsum("pc,cab->pab", phases, adjoints) / dim.d
    operators.setflags(write=False)
    return operators


@functools.lru_cache(maxsize=None)
def phase_point_operators(dim: PrimeDim, n_qudits: int = 1) -> PhasePointOperatorSet:
    """
    Return the (tensor-product) phase-point operators for n_qudits qudits.

    The composite operator at (mu_1, ..., mu_n) is A(mu_1) x ... x A(mu_n).
    """
    single = _single_phase_points(dim)
    operators = single
    for _ in range(n_qudits - 1):
        count, size = operators.shape[0], operators.shape[1]
        operators = numpy.einsum("pab,qcd->pqacbd", operators, single).reshape(
            count * single.shape[0], size * dim.d, size * dim.d
        )

    logger.debug(
        "Built %d phase-point operators for d=%d n_qudits=%d",
        operators.shape[0],
        dim.d,
        n_qudits,
    )
    operators.setflags(write=False)

    return PhasePointOperatorSet(dim=dim, n_qudits=n_qudits, operators=operators)


def wigner_from_phase_points(
    rho: ArrayLike,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> WignerFunction:
    """
    Return the Wigner function as d^-n Tr[rho A(mu)].

    Raises:
        NotADensityMatrixError: If rho is not a normalized density matrix.
    """
    matrix = as_matrix(rho)
    _require_density_matrix(matrix, dim, n_qudits, tolerance)

    operators = phase_point_operators(dim, n_qudits).operators
    values = numpy.einsum("ab,pba->p", matrix, operators) / dim.d**n_qudits

    return WignerFunction(dim, n_qudits, _real_lattice(values, tolerance, "Wigner"))


def density_from_wigner(wigner: WignerFunction) -> ComplexMatrix:
    """Return rho = sum_mu W(mu) A(mu)."""
    operators = phase_point_operators(wigner.dim, wigner.n_qudits).operators
    return numpy.einsum("p,pab->ab", wigner.values.astype(numpy.complex128), operators)


def negativity(wigner: WignerFunction) -> float:
    """Return the sum negativity sum_mu max(0, -W(mu))."""
    return math.fsum(numpy.clip(-wigner.values, 0.0, None).tolist())


def position_marginal(wigner: WignerFunction) -> RealArray:
    """Sum a single-qudit Wigner function over n: the position distribution."""
    return numpy.asarray(wigner.grid().sum(axis=1))


def momentum_marginal(wigner: WignerFunction) -> RealArray:
    """Sum a single-qudit Wigner function over m: the momentum distribution."""
    return numpy.asarray(wigner.grid().sum(axis=0))


def reduce_wigner(
    wigner: WignerFunction, keep: int | tuple[int, ...]
) -> WignerFunction:
    """
    Marginalize a composite Wigner function onto the kept qudits.

    Raises:
        ShapeMismatchError: If a kept qudit index is out of range.
    """
    kept = (keep,) if isinstance(keep, int) else tuple(sorted(keep))
    if not kept or any(not 0 <= q < wigner.n_qudits for q in kept):
        raise ShapeMismatchError(
            f"Cannot keep qudits {kept} of a {wigner.n_qudits}-qudit function."
        )

    summed = tuple(
        axis
        for q in range(wigner.n_qudits)
        if q not in kept
        for axis in (2 * q, 2 * q + 1)
    )
    values = wigner.grid().sum(axis=summed) if summed else wigner.grid()

    return WignerFunction(wigner.dim, len(kept), numpy.asarray(values).reshape(-1))
