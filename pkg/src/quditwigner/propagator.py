"""
Exact Wigner-function propagators and the twisted convolution of symbols.

Three equivalent kernel constructions are provided. The phase-point trace form
is the reference, the Fourier form over U_W is the production path, and the
Weyl-space kernel propagates symbols directly and maps onto the lattice through
the lattice Fourier matrix.
"""

from __future__ import annotations

import dataclasses
import math

import numpy
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .config import get_settings
from .field_arith import PrimeDim
from .field_arith import get_lattice
from .field_arith import omega_powers
from .linalg_core import ComplexMatrix
from .linalg_core import HamiltonianSpec
from .linalg_core import ShapeMismatchError
from .linalg_core import as_matrix
from .linalg_core import is_unitary
from .struclogger import get_logger
from .weyl_transform import WeylSymbol
from .weyl_transform import WignerFunction
from .weyl_transform import lattice_fourier_matrix
from .weyl_transform import phase_point_operators
from .weyl_transform import phase_space_function
from .weyl_transform import weyl_symbol

__all__ = [
    "KernelRealityError",
    "NotUnitaryError",
    "WignerKernel",
    "apply_kernel",
    "compose_kernels",
    "exact_kernel",
    "kernel_fourier_form",
    "kernel_from_weyl_space",
    "kernel_trace_form",
    "phase_space_purity",
    "twisted_convolution",
    "weyl_space_kernel",
]

logger = get_logger()

RealArray = NDArray[numpy.float64]
ComplexArray = NDArray[numpy.complex128]


class NotUnitaryError(ValueError):
    """Raised when a kernel is requested for a non-unitary operator."""


class KernelRealityError(ValueError):
    """Raised when a kernel's imaginary residue exceeds tolerance."""


@dataclasses.dataclass(frozen=True, eq=False)
class WignerKernel:
    """
    A real lattice-to-lattice propagator, entries[final, initial].

    Attributes:
        imag_residue: max|Im| discarded when the kernel was cast to real.
    """

    dim: PrimeDim
    n_qudits: int
    entries: RealArray
    imag_residue: float = 0.0

    @classmethod
    def from_complex(
        cls,
        values: ArrayLike,
        dim: PrimeDim,
        n_qudits: int,
        *,
        tolerance: float | None = None,
    ) -> WignerKernel:
        """
        Verify that values are real to tolerance and build the kernel.

        Raises:
            KernelRealityError: If max|Im| exceeds tolerance.
        """
        limit = get_settings().tolerance if tolerance is None else tolerance
        array = numpy.asarray(values, dtype=numpy.complex128)
        residue = float(numpy.max(numpy.abs(array.imag), initial=0.0))

        logger.debug(
            "Kernel d=%d n_qudits=%d imaginary residue %.3e",
            dim.d,
            n_qudits,
            residue,
        )
        if residue > limit:
            raise KernelRealityError(
                f"Kernel imaginary residue {residue:.3e} exceeds tolerance {limit:.1e}."
            )

        return cls(dim, n_qudits, numpy.ascontiguousarray(array.real), residue)

    @classmethod
    def identity(cls, dim: PrimeDim, n_qudits: int = 1) -> WignerKernel:
        size = get_lattice(dim, n_qudits).size
        return cls(dim, n_qudits, numpy.eye(size))

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    def column_sums(self) -> RealArray:
        return numpy.asarray(self.entries.sum(axis=0))

    def is_permutation(self, tolerance: float = 1e-10) -> bool:
        """True when every entry is 0 or 1 and each row and column holds one 1."""
        entries = self.entries
        ones = numpy.abs(entries - 1.0) <= tolerance
        zeros = numpy.abs(entries) <= tolerance
        if not numpy.all(ones | zeros):
            return False

        return bool(
            numpy.all(ones.sum(axis=0) == 1) and numpy.all(ones.sum(axis=1) == 1)
        )

    def permutation_targets(self, tolerance: float = 1e-10) -> list[int] | None:
        """Return the final index each initial index maps to, or None."""
        if not self.is_permutation(tolerance):
            return None

        return [int(index) for index in numpy.argmax(self.entries, axis=0)]


def _require_unitary(matrix: ComplexMatrix, dim: PrimeDim, n_qudits: int) -> None:
    size = dim.d**n_qudits
    if matrix.shape != (size, size):
        raise ShapeMismatchError(
            f"Expected a {size}x{size} unitary, got {matrix.shape}."
        )

    if not is_unitary(matrix, get_settings().tolerance):
        raise NotUnitaryError("Propagators require a unitary operator.")


def twisted_convolution(g: WeylSymbol, h: WeylSymbol) -> WeylSymbol:
    """
    Return the symbol of the operator product A_g A_h.

    f(c) = d^-n sum_c' omega^(2^-1 c' ^ c) g(c + c') h(-c'), with ^ the
    symplectic product on (k, j) coordinates.

    Raises:
        ShapeMismatchError: If the symbols differ in dimension or qudit count.
    """
    if g.dim != h.dim or g.n_qudits != h.n_qudits:
        raise ShapeMismatchError("Twisted convolution needs matching symbols.")

    dim = g.dim
    lattice = get_lattice(dim, g.n_qudits)

    # Rows are c, columns c'.
    phases = omega_powers(dim, dim.half_inv * lattice.symplectic.T)
    terms = phases * g.values[lattice.add] * h.values[lattice.neg][None, :]
    values = terms.sum(axis=1) / dim.d**g.n_qudits

    return WeylSymbol(dim, g.n_qudits, numpy.asarray(values))


def kernel_trace_form(
    unitary: ArrayLike,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    tolerance: float | None = None,
) -> WignerKernel:
    """
    Return G(mu', mu) = d^-n Tr[A(mu') U A(mu) U^dagger].

    Raises:
        NotUnitaryError: If U is not unitary.
        KernelRealityError: If the result is not real to tolerance.
    """
    matrix = as_matrix(unitary)
    _require_unitary(matrix, dim, n_qudits)

    operators = phase_point_operators(dim, n_qudits).operators
    evolved = numpy.einsum(
        "ab,pbc,dc->pad", matrix, operators, matrix.conj(), optimize=True
    )
    values = numpy.einsum("qab,pba->qp", operators, evolved, optimize=True)

    return WignerKernel.from_complex(
        values / dim.d**n_qudits, dim, n_qudits, tolerance=tolerance
    )


def kernel_fourier_form(
    unitary: ArrayLike,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    tolerance: float | None = None,
) -> WignerKernel:
    """
    Return the kernel as a lattice sum over U_W.

    G(mu', mu) = d^-2n sum_v omega^(2 (mu' - mu) ^ v) U_W(mu + v) conj(U_W(mu' - v)).

    Raises:
        NotUnitaryError: If U is not unitary.
        KernelRealityError: If the result is not real to tolerance.
    """
    matrix = as_matrix(unitary)
    _require_unitary(matrix, dim, n_qudits)

    lattice = get_lattice(dim, n_qudits)
    function = phase_space_function(weyl_symbol(matrix, dim, n_qudits))
    shifted = function[lattice.add]

    values = numpy.empty((lattice.size, lattice.size), dtype=numpy.complex128)
    for final in range(lattice.size):
        # Rows mu, columns v.
        phases = omega_powers(dim, 2 * lattice.symplectic[lattice.sub[final]])
        backward = function[lattice.sub[final]].conj()
        values[final] = (phases * shifted * backward[None, :]).sum(axis=1)

    return WignerKernel.from_complex(
        values / dim.d ** (2 * n_qudits), dim, n_qudits, tolerance=tolerance
    )


def weyl_space_kernel(
    unitary: ArrayLike, dim: PrimeDim, n_qudits: int = 1
) -> ComplexArray:
    """
    Return the complex kernel that propagates Weyl symbols.

    G~(e; c) = d^-2n sum_a omega^(2^-1 a ^ (c + e)) U~(e + a) conj(U~(a + c)),
    so that rho~_t = G~ @ rho~_0.

    Raises:
        NotUnitaryError: If U is not unitary.
    """
    matrix = as_matrix(unitary)
    _require_unitary(matrix, dim, n_qudits)

    lattice = get_lattice(dim, n_qudits)
    symbol = weyl_symbol(matrix, dim, n_qudits).values
    backward = symbol[lattice.add].conj()

    values = numpy.empty((lattice.size, lattice.size), dtype=numpy.complex128)
    for final in range(lattice.size):
        # Rows c, columns a.
        forward = symbol[lattice.add[final]]
        total = lattice.add[:, final]
        phases = omega_powers(dim, dim.half_inv * lattice.symplectic[:, total].T)
        values[final] = (phases * forward[None, :] * backward).sum(axis=1)

    return values / dim.d ** (2 * n_qudits)


def kernel_from_weyl_space(
    symbol_kernel: ArrayLike,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    tolerance: float | None = None,
) -> WignerKernel:
    """
    Transform a Weyl-space kernel onto the lattice: G = d^-2n Phi G~ Phi^dagger.

    Raises:
        ShapeMismatchError: If the kernel does not match the lattice size.
        KernelRealityError: If the result is not real to tolerance.
    """
    kernel = numpy.asarray(symbol_kernel, dtype=numpy.complex128)
    phi = lattice_fourier_matrix(dim, n_qudits)
    if kernel.shape != phi.shape:
        raise ShapeMismatchError(
            f"Expected a {phi.shape} Weyl-space kernel, got {kernel.shape}."
        )

    values = phi @ kernel @ phi.conj().T / dim.d ** (2 * n_qudits)

    return WignerKernel.from_complex(values, dim, n_qudits, tolerance=tolerance)


def exact_kernel(
    hamiltonian: HamiltonianSpec,
    chi_t: float,
    dim: PrimeDim,
    n_qudits: int = 1,
) -> WignerKernel:
    """Return the Fourier-form kernel of exp(-i H t) at dimensionless time chi_t."""
    unitary = hamiltonian.evolution(chi_t / hamiltonian.coupling)
    return kernel_fourier_form(unitary, dim, n_qudits)


def _require_matching(left: WignerKernel, right: WignerKernel | WignerFunction) -> None:
    if left.dim != right.dim or left.n_qudits != right.n_qudits:
        raise ShapeMismatchError(
            f"Kernel for d={left.dim.d}, n={left.n_qudits} cannot act on "
            f"d={right.dim.d}, n={right.n_qudits}."
        )


def apply_kernel(kernel: WignerKernel, wigner: WignerFunction) -> WignerFunction:
    """
    Return the evolved Wigner function G @ W.

    Raises:
        ShapeMismatchError: If kernel and function live on different lattices.
    """
    _require_matching(kernel, wigner)
    return WignerFunction(wigner.dim, wigner.n_qudits, kernel.entries @ wigner.values)


def compose_kernels(later: WignerKernel, earlier: WignerKernel) -> WignerKernel:
    """
    Return the kernel of earlier followed by later.

    Raises:
        ShapeMismatchError: If the kernels live on different lattices.
    """
    _require_matching(later, earlier)
    return WignerKernel(
        later.dim,
        later.n_qudits,
        later.entries @ earlier.entries,
        max(later.imag_residue, earlier.imag_residue),
    )


def phase_space_purity(wigner: WignerFunction) -> float:
    """Return Tr[rho^2] = d^n sum_mu W(mu)^2."""
    squares = (wigner.values**2).tolist()
    return wigner.dim.d**wigner.n_qudits * math.fsum(squares)
