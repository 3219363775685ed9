"""Named Hamiltonians, basis states and matrix-file input."""

from __future__ import annotations

import json
import re
from collections.abc import Callable

import numpy
from numpy.typing import NDArray

from .field_arith import PrimeDim
from .linalg_core import ComplexMatrix
from .linalg_core import HamiltonianSpec
from .linalg_core import ShapeMismatchError
from .linalg_core import kron
from .weyl_transform import dft_operator

__all__ = [
    "HAMILTONIAN_PRESETS",
    "UnknownPresetError",
    "density",
    "load_matrix_file",
    "make_hamiltonian",
    "make_state",
    "momentum_operator",
    "momentum_state",
    "position_operator",
    "position_state",
    "read_matrix_file",
]

ComplexVector = NDArray[numpy.complex128]

_STATE_PATTERN = re.compile(r"^(?P<basis>[xp])(?P<index>\d+)$")


class UnknownPresetError(KeyError):
    """Raised for a preset name that is not registered."""


def position_operator(dim: PrimeDim) -> ComplexMatrix:
    """x = diag(0, 1, ..., d-1)."""
    return numpy.diag(numpy.arange(dim.d)).astype(numpy.complex128)


def momentum_operator(dim: PrimeDim) -> ComplexMatrix:
    """p = F x F^dagger."""
    fourier = dft_operator(dim)
    return fourier @ position_operator(dim) @ fourier.conj().T


def position_state(dim: PrimeDim, index: int) -> ComplexVector:
    """|x, index>."""
    state = numpy.zeros(dim.d, dtype=numpy.complex128)
    state[dim.reduce(index)] = 1.0
    return state


def momentum_state(dim: PrimeDim, index: int) -> ComplexVector:
    """|p, index> = F |x, index>."""
    return dft_operator(dim) @ position_state(dim, index)


def density(state: ComplexVector) -> ComplexMatrix:
    """Return the normalized projector onto a state vector."""
    vector = numpy.asarray(state, dtype=numpy.complex128)
    vector = vector / numpy.linalg.norm(vector)
    return numpy.outer(vector, vector.conj())


def make_state(name: str, dim: PrimeDim) -> ComplexVector:
    """
    Return a named basis state: p0, p1, ... or x0, x1, ...

    Raises:
        UnknownPresetError: If the name is not a basis state label.
    """
    match = _STATE_PATTERN.match(name.strip().lower())
    if match is None:
        raise UnknownPresetError(
            f"Unknown state {name!r}; use x<k> or p<k>, e.g. p0 or x1."
        )

    index = int(match.group("index"))
    if match.group("basis") == "x":
        return position_state(dim, index)

    return momentum_state(dim, index)


def _diag012(dim: PrimeDim) -> tuple[HamiltonianSpec, int]:
    return HamiltonianSpec(position_operator(dim), name="diag012"), 1


def _xx(dim: PrimeDim) -> tuple[HamiltonianSpec, int]:
    position = position_operator(dim)
    return HamiltonianSpec(kron(position, position), name="xx"), 2


def _xplusp(dim: PrimeDim) -> tuple[HamiltonianSpec, int]:
    matrix = position_operator(dim) + momentum_operator(dim)
    # p carries rounding residue; its exact form is Hermitian.
    matrix = (matrix + matrix.conj().T) / 2
    return HamiltonianSpec(matrix, name="xplusp"), 1


HAMILTONIAN_PRESETS: dict[str, Callable[[PrimeDim], tuple[HamiltonianSpec, int]]] = {
    "diag012": _diag012,
    "xx": _xx,
    "xplusp": _xplusp,
}


def make_hamiltonian(name: str, dim: PrimeDim) -> tuple[HamiltonianSpec, int]:
    """
    Return a named Hamiltonian and its qudit count.

    Raises:
        UnknownPresetError: If the name is not registered.
    """
    try:
        builder = HAMILTONIAN_PRESETS[name]

    except KeyError as err:
        known = ", ".join(sorted(HAMILTONIAN_PRESETS))
        raise UnknownPresetError(
            f"Unknown Hamiltonian {name!r}; known presets: {known}."
        ) from err

    return builder(dim)


def load_matrix_file(
    path: str, dim: PrimeDim, *, name: str = "file"
) -> tuple[HamiltonianSpec, int]:
    """
    Load a Hamiltonian from a matrix file; see read_matrix_file.

    Raises:
        NotHermitianError: If the matrix is not Hermitian.
    """
    matrix, n_qudits = read_matrix_file(path, dim)
    return HamiltonianSpec(matrix, name=name), n_qudits


def read_matrix_file(path: str, dim: PrimeDim) -> tuple[ComplexMatrix, int]:
    """
    Read JSON {"dim": int, "entries": [[re, im], ...]} and return (matrix, n_qudits).

    "dim" is the matrix size, d^n for n qudits; entries are row-major.

    Raises:
        FileNotFoundError: If the file does not exist.
        ShapeMismatchError: If the size is not a power of d, or the entries are
            missing or not [re, im] pairs.
    """
    with open(path, encoding="utf-8") as infile:
        payload = json.load(infile)

    try:
        size = int(payload["dim"])
        entries = [
            complex(float(real), float(imag)) for real, imag in payload["entries"]
        ]

    except (KeyError, TypeError, ValueError) as err:
        raise ShapeMismatchError(
            f"{path}: needs an integer dim and entries as [re, im] pairs."
        ) from err

    if len(entries) != size * size:
        raise ShapeMismatchError(
            f"{path}: expected {size * size} entries, got {len(entries)}."
        )

    n_qudits, power = 0, 1
    while power < size:
        power *= dim.d
        n_qudits += 1
    if power != size or n_qudits == 0:
        raise ShapeMismatchError(f"{path}: dim {size} is not a power of d={dim.d}.")

    matrix = numpy.array(entries, dtype=numpy.complex128).reshape(size, size)
    return matrix, n_qudits
