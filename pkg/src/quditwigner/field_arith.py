"""Exact arithmetic in Z_d for odd prime d and the phase lattice built on it."""

from __future__ import annotations

import cmath
import dataclasses
import functools
import math
from collections.abc import Sequence

import numpy
from numpy.typing import NDArray

from .config import get_settings
from .struclogger import get_logger

__all__ = [
    "CoordinateLengthError",
    "PhaseLattice",
    "PhasePoint",
    "PhaseVector",
    "PrimeDim",
    "UnsupportedDimensionError",
    "get_lattice",
    "make_prime_dim",
    "omega_power",
    "omega_powers",
    "symplectic",
]

logger = get_logger()

IntArray = NDArray[numpy.int64]
ComplexArray = NDArray[numpy.complex128]


class UnsupportedDimensionError(ValueError):
    """Raised for dimensions outside the odd primes this library supports."""


class CoordinateLengthError(ValueError):
    """Raised when phase-space coordinates do not line up."""


def _is_prime(value: int) -> bool:
    if value < 2:
        return False

    return all(value % factor for factor in range(2, math.isqrt(value) + 1))


@dataclasses.dataclass(frozen=True)
class PrimeDim:
    """A validated odd-prime Hilbert space dimension with 2^-1 mod d precomputed."""

    d: int
    half_inv: int = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        if self.d < 3 or self.d % 2 == 0 or not _is_prime(self.d):
            raise UnsupportedDimensionError(
                f"Unsupported dimension {self.d}: d must be an odd prime."
            )

        object.__setattr__(self, "half_inv", (self.d + 1) // 2)

    def reduce(self, value: int) -> int:
        """Return the canonical representative of value in [0, d)."""
        return value % self.d


def make_prime_dim(d: int, *, max_dimension: int | None = None) -> PrimeDim:
    """
    Validate d and return its PrimeDim.

    Args:
        d: The Hilbert space dimension.
        max_dimension: Upper bound on d. Defaults to the configured maximum.

    Raises:
        UnsupportedDimensionError: If d is not an odd prime or exceeds the maximum.
    """
    limit = get_settings().max_dimension if max_dimension is None else max_dimension
    dim = PrimeDim(d)

    if d > limit:
        raise UnsupportedDimensionError(
            f"Unsupported dimension {d}: exceeds the configured maximum of {limit}."
        )

    return dim


@dataclasses.dataclass(frozen=True)
class PhasePoint:
    """A single-qudit phase point (m, n) with canonical residues."""

    m: int
    n: int

    def reduced(self, dim: PrimeDim) -> PhasePoint:
        return PhasePoint(dim.reduce(self.m), dim.reduce(self.n))

    def as_vector(self) -> PhaseVector:
        return PhaseVector((self.m, self.n))


@dataclasses.dataclass(frozen=True)
class PhaseVector:
    """A composite phase point ordered (m1, n1, m2, n2, ...)."""

    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) % 2:
            raise CoordinateLengthError(
                f"A phase vector needs an even coordinate count, got {self.coords}."
            )

    @classmethod
    def of(cls, *coords: int) -> PhaseVector:
        return cls(tuple(int(value) for value in coords))

    @property
    def n_qudits(self) -> int:
        return len(self.coords) // 2

    def reduced(self, dim: PrimeDim) -> PhaseVector:
        return PhaseVector(tuple(dim.reduce(value) for value in self.coords))

    def __add__(self, other: PhaseVector) -> PhaseVector:
        _require_same_length(self, other)
        return PhaseVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: PhaseVector) -> PhaseVector:
        _require_same_length(self, other)
        return PhaseVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> PhaseVector:
        return PhaseVector(tuple(-value for value in self.coords))

    def scaled(self, factor: int) -> PhaseVector:
        return PhaseVector(tuple(factor * value for value in self.coords))


def _require_same_length(mu: PhaseVector, nu: PhaseVector) -> None:
    if len(mu.coords) != len(nu.coords):
        raise CoordinateLengthError(
            f"Phase vectors differ in length: {len(mu.coords)} != {len(nu.coords)}."
        )


def symplectic(
    mu: PhaseVector | PhasePoint,
    nu: PhaseVector | PhasePoint,
    dim: PrimeDim,
) -> int:
    """
    Return the discrete symplectic product sum_a (m_a n~_a - n_a m~_a) mod d.

    Raises:
        CoordinateLengthError: If the vectors have different lengths.
    """
    left = mu.as_vector() if isinstance(mu, PhasePoint) else mu
    right = nu.as_vector() if isinstance(nu, PhasePoint) else nu
    _require_same_length(left, right)

    total = 0
    for m, n, m_t, n_t in zip(
        left.coords[0::2], left.coords[1::2], right.coords[0::2], right.coords[1::2]
    ):
        total += m * n_t - n * m_t

    return dim.reduce(total)


def omega_power(dim: PrimeDim, exponent: int) -> complex:
    """Return exp(2 pi i (exponent mod d) / d)."""
    return cmath.exp(2j * math.pi * dim.reduce(exponent) / dim.d)


@functools.lru_cache(maxsize=None)
def _omega_table(dim: PrimeDim) -> ComplexArray:
    table = numpy.array([omega_power(dim, k) for k in range(dim.d)])
    table.setflags(write=False)
    return table


def omega_powers(dim: PrimeDim, exponents: NDArray[numpy.integer]) -> ComplexArray:
    """Vectorized omega_power: integer exponents are reduced before lookup."""
    return _omega_table(dim)[numpy.mod(exponents, dim.d)]


@dataclasses.dataclass(frozen=True, eq=False)
class PhaseLattice:
    """
    The d^(2n) point phase lattice with its index arithmetic precomputed.

    Points are stored flat, subsystem-1-major and m-major within a qudit, so the
    flat index of (m1, n1, ..., mn, nn) is its base-d reading. The same layout
    indexes Weyl symbols with (k, j) in place of (m, n).

    Attributes:
        points: (L, 2n) canonical coordinates.
        add: add[a, b] is the index of point a + point b.
        sub: sub[a, b] is the index of point a - point b.
        neg: neg[a] is the index of -point a.
        symplectic: symplectic[a, b] is point a wedge point b, mod d.
        fourier: fourier[mu, c] is sum_a (j_a n_a - k_a m_a) mod d for the
            lattice point mu = (m, n) and the symbol index c = (k, j).
    """

    dim: PrimeDim
    n_qudits: int
    points: IntArray
    add: IntArray
    sub: IntArray
    neg: IntArray
    symplectic: IntArray
    fourier: IntArray

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def hilbert_dim(self) -> int:
        return self.dim.d**self.n_qudits

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.dim.d,) * (2 * self.n_qudits)

    def index(self, point: PhaseVector | PhasePoint | Sequence[int]) -> int:
        """
        Return the flat index of a point, reducing coordinates mod d first.

        Raises:
            CoordinateLengthError: If the point has the wrong number of coordinates.
        """
        if isinstance(point, PhasePoint):
            coords: Sequence[int] = (point.m, point.n)
        elif isinstance(point, PhaseVector):
            coords = point.coords
        else:
            coords = tuple(point)

        if len(coords) != 2 * self.n_qudits:
            raise CoordinateLengthError(
                f"Expected {2 * self.n_qudits} coordinates, got {len(coords)}."
            )

        flat = 0
        for value in coords:
            flat = flat * self.dim.d + self.dim.reduce(int(value))

        return flat

    def point(self, index: int) -> PhaseVector:
        return PhaseVector(tuple(int(value) for value in self.points[index]))

    def indices(self, coords: IntArray) -> IntArray:
        """Vectorized index: rows of (..., 2n) integer coordinates to flat indices."""
        weights = self.dim.d ** numpy.arange(
            2 * self.n_qudits - 1, -1, -1, dtype=numpy.int64
        )
        return numpy.asarray(numpy.mod(coords, self.dim.d) @ weights)


def _readonly(array: IntArray) -> IntArray:
    array.setflags(write=False)
    return array


@functools.lru_cache(maxsize=None)
def get_lattice(dim: PrimeDim, n_qudits: int = 1) -> PhaseLattice:
    """
    Return the cached phase lattice for n_qudits qudits of dimension dim.

    Raises:
        UnsupportedDimensionError: If d^(2n) exceeds the configured point cap.
    """
    if n_qudits < 1:
        raise UnsupportedDimensionError(f"n_qudits must be positive, got {n_qudits}.")

    d = dim.d
    size = d ** (2 * n_qudits)
    limit = get_settings().max_lattice_points
    if size > limit and n_qudits > 1:
        raise UnsupportedDimensionError(
            f"A {n_qudits}-qudit lattice for d={d} has {size} points, "
            f"above the configured cap of {limit}."
        )

    logger.debug("Building phase lattice d=%d n_qudits=%d", d, n_qudits)

    points = numpy.array(
        numpy.unravel_index(numpy.arange(size), (d,) * (2 * n_qudits))
    ).T.astype(numpy.int64)
    weights = d ** numpy.arange(2 * n_qudits - 1, -1, -1, dtype=numpy.int64)

    add = numpy.zeros((size, size), dtype=numpy.int64)
    sub = numpy.zeros((size, size), dtype=numpy.int64)
    for axis, weight in enumerate(weights):
        column = points[:, axis]
        add += ((column[:, None] + column[None, :]) % d) * weight
        sub += ((column[:, None] - column[None, :]) % d) * weight

    neg = ((-points) % d) @ weights

    m = points[:, 0::2]
    n = points[:, 1::2]
    wedge = (m @ n.T - n @ m.T) % d
    # The symbol index c = (k, j) reuses the (m, n) slots.
    fourier = (n @ points[:, 1::2].T - m @ points[:, 0::2].T) % d

    return PhaseLattice(
        dim=dim,
        n_qudits=n_qudits,
        points=_readonly(points),
        add=_readonly(add),
        sub=_readonly(sub),
        neg=_readonly(neg),
        symplectic=_readonly(wedge),
        fourier=_readonly(fourier),
    )
