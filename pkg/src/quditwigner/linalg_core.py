"""Dense complex matrix arithmetic at qudit scale."""

from __future__ import annotations

import dataclasses
import string
from collections.abc import Sequence

import numpy
import scipy.linalg
from numpy.typing import ArrayLike
from numpy.typing import NDArray

__all__ = [
    "ComplexMatrix",
    "HamiltonianSpec",
    "NotHermitianError",
    "ShapeMismatchError",
    "add",
    "adjoint",
    "as_matrix",
    "hermitian_expm",
    "hs_inner",
    "identity",
    "is_hermitian",
    "is_unitary",
    "kron",
    "matmul",
    "partial_trace",
    "scale",
    "trace",
]

ComplexMatrix = NDArray[numpy.complex128]

HERMITIAN_TOLERANCE = 1e-12


class ShapeMismatchError(ValueError):
    """Raised when operand shapes are incompatible."""


class NotHermitianError(ValueError):
    """Raised when a Hermitian matrix is required and the input is not one."""


def as_matrix(values: ArrayLike) -> ComplexMatrix:
    """
    Return values as a 2-D complex128 array.

    Raises:
        ShapeMismatchError: If values is not two-dimensional.
    """
    matrix = numpy.asarray(values, dtype=numpy.complex128)
    if matrix.ndim != 2:
        raise ShapeMismatchError(f"Expected a matrix, got shape {matrix.shape}.")

    return matrix


def _require_square(matrix: ComplexMatrix) -> None:
    if matrix.shape[0] != matrix.shape[1]:
        raise ShapeMismatchError(f"Expected a square matrix, got {matrix.shape}.")


def identity(size: int) -> ComplexMatrix:
    return numpy.eye(size, dtype=numpy.complex128)


def matmul(left: ArrayLike, right: ArrayLike) -> ComplexMatrix:
    """
    Return the product left @ right.

    Raises:
        ShapeMismatchError: If the inner dimensions differ.
    """
    a, b = as_matrix(left), as_matrix(right)
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"Cannot multiply {a.shape} by {b.shape}.")

    return a @ b


def adjoint(matrix: ArrayLike) -> ComplexMatrix:
    return as_matrix(matrix).conj().T


def trace(matrix: ArrayLike) -> complex:
    """
    Return the trace, summing the diagonal left to right.

    Raises:
        ShapeMismatchError: If the matrix is not square.
    """
    a = as_matrix(matrix)
    _require_square(a)

    total = 0j
    for value in numpy.diagonal(a):
        total += complex(value)

    return total


def add(left: ArrayLike, right: ArrayLike) -> ComplexMatrix:
    """
    Return left + right.

    Raises:
        ShapeMismatchError: If the shapes differ.
    """
    a, b = as_matrix(left), as_matrix(right)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"Cannot add {a.shape} and {b.shape}.")

    return a + b


def scale(matrix: ArrayLike, factor: complex) -> ComplexMatrix:
    return as_matrix(matrix) * factor


def hs_inner(left: ArrayLike, right: ArrayLike) -> complex:
    """Return the Hilbert-Schmidt inner product Tr[left^dagger right]."""
    return trace(matmul(adjoint(left), right))


def kron(left: ArrayLike, right: ArrayLike) -> ComplexMatrix:
    """Kronecker product with composite index i1 * dim(right) + i2."""
    return numpy.kron(as_matrix(left), as_matrix(right))


def partial_trace(
    rho: ArrayLike,
    subsystem_kept: int | Sequence[int],
    dims: Sequence[int],
) -> ComplexMatrix:
    """
    Trace out every subsystem except the kept one(s).

    Args:
        rho: Square matrix over the composite space, subsystem-1-major.
        subsystem_kept: Index, or indices in ascending order, of kept subsystems.
        dims: Dimension of each subsystem.

    Raises:
        ShapeMismatchError: If dims do not multiply to the size of rho or a kept
            index is out of range.
    """
    matrix = as_matrix(rho)
    _require_square(matrix)

    total = int(numpy.prod(dims))
    if total != matrix.shape[0]:
        raise ShapeMismatchError(
            f"Subsystem dims {tuple(dims)} do not match a {matrix.shape} matrix."
        )

    kept = (
        [subsystem_kept] if isinstance(subsystem_kept, int) else list(subsystem_kept)
    )
    if not kept or any(not 0 <= index < len(dims) for index in kept):
        raise ShapeMismatchError(f"Kept subsystems {kept} out of range for {dims}.")

    count = len(dims)
    letters = string.ascii_letters
    rows = letters[:count]
    cols = [letters[count + index] for index in range(count)]
    for index in range(count):
        if index not in kept:
            cols[index] = rows[index]

    out_rows = "".join(rows[index] for index in sorted(kept))
    out_cols = "".join(cols[index] for index in sorted(kept))
    subscripts = f"{rows}{''.join(cols)}->{out_rows}{out_cols}"

    reduced = numpy.einsum(subscripts, matrix.reshape(tuple(dims) * 2))
    size = int(numpy.prod([dims[index] for index in kept]))

    return numpy.asarray(reduced, dtype=numpy.complex128).reshape(size, size)


def is_hermitian(matrix: ArrayLike, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
    a = as_matrix(matrix)
    if a.shape[0] != a.shape[1]:
        return False

    return bool(numpy.max(numpy.abs(a - a.conj().T), initial=0.0) <= tolerance)


def is_unitary(matrix: ArrayLike, tolerance: float = 1e-10) -> bool:
    a = as_matrix(matrix)
    if a.shape[0] != a.shape[1]:
        return False

    residue = a @ a.conj().T - identity(a.shape[0])
    return bool(numpy.max(numpy.abs(residue), initial=0.0) <= tolerance)


def hermitian_expm(
    hamiltonian: ArrayLike,
    factor: complex,
    *,
    tolerance: float = HERMITIAN_TOLERANCE,
) -> ComplexMatrix:
    """
    Return exp(factor * H) through the spectral decomposition of Hermitian H.

    Raises:
        NotHermitianError: If H differs from its adjoint by more than tolerance.
    """
    matrix = as_matrix(hamiltonian)
    _require_square(matrix)
    if not is_hermitian(matrix, tolerance):
        raise NotHermitianError("hermitian_expm requires a Hermitian matrix.")

    # Symmetrize away the sub-tolerance residue so eigh sees an exact Hermitian.
    eigenvalues, vectors = scipy.linalg.eigh((matrix + matrix.conj().T) / 2)
    phases = numpy.exp(factor * eigenvalues)

    return numpy.asarray((vectors * phases) @ vectors.conj().T, dtype=numpy.complex128)


@dataclasses.dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """
    A Hermitian generator H = hbar * coupling * matrix.

    Times enter only as the dimensionless product coupling * t, with hbar = 1.
    """

    matrix: ComplexMatrix
    coupling: float = 1.0
    hbar: float = 1.0
    name: str = "custom"

    def __post_init__(self) -> None:
        matrix = as_matrix(self.matrix)
        _require_square(matrix)
        if not is_hermitian(matrix):
            raise NotHermitianError(f"Hamiltonian {self.name!r} is not Hermitian.")

        object.__setattr__(self, "matrix", matrix)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def operator(self) -> ComplexMatrix:
        """Return H itself, coupling folded in."""
        return self.matrix * (self.hbar * self.coupling)

    def evolution(self, t: float) -> ComplexMatrix:
        """Return U(t) = exp(-i H t / hbar)."""
        return hermitian_expm(self.matrix, -1j * self.coupling * t)
