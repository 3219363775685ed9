"""
Time-sliced phase-space path integral on the discrete lattice.

A slice of length tau propagates with the symbol-level short-time kernel built
from exp(-i tau H_W). Composing N slices is the path sum over intermediate
points; the literal enumeration over (gamma, xi) paths is kept as an oracle and
is guarded by the configured path budget.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
import math
from collections.abc import Iterable
from collections.abc import Sequence

import numpy
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from .config import get_settings
from .field_arith import PhaseVector
from .field_arith import PrimeDim
from .field_arith import get_lattice
from .field_arith import omega_power
from .field_arith import omega_powers
from .linalg_core import ShapeMismatchError
from .linalg_core import as_matrix
from .linalg_core import hermitian_expm
from .propagator import KernelRealityError
from .propagator import WignerKernel
from .propagator import twisted_convolution
from .struclogger import get_logger
from .weyl_transform import phase_space_function
from .weyl_transform import real_phase_space_function
from .weyl_transform import weyl_symbol

__all__ = [
    "DiscreteAction",
    "EndpointMismatchError",
    "PathBudgetExceededError",
    "PathConfig",
    "PathSumRecord",
    "ShortTimeErrorReport",
    "ShortTimeForm",
    "XiZeroSummary",
    "discrete_action",
    "hamiltonian_symbol",
    "path_sum_entry",
    "path_sum_kernel",
    "path_sum_propagator",
    "path_sum_records",
    "short_time_error",
    "short_time_kernel",
    "xi_zero_kernel",
    "xi_zero_summary",
]

logger = get_logger()

RealArray = NDArray[numpy.float64]
ComplexArray = NDArray[numpy.complex128]


class PathBudgetExceededError(RuntimeError):
    """Raised when a literal path enumeration would exceed the term budget."""


class EndpointMismatchError(ValueError):
    """Raised when a path does not fit its configuration."""


class ShortTimeForm(enum.Enum):
    """Equivalent ways of writing the single-slice lattice sum."""

    MARINOV = "marinov"
    FLIPPED = "flipped"
    MIDPOINT = "midpoint"


@dataclasses.dataclass(frozen=True)
class PathConfig:
    """
    Time slicing of a total dimensionless time t into `steps` slices.

    Endpoints are optional; they are required only by single-entry sums.
    """

    steps: int
    t: float
    initial: PhaseVector | None = None
    final: PhaseVector | None = None

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"A path needs at least one slice, got {self.steps}.")

    @property
    def tau(self) -> float:
        return self.t / self.steps

    def endpoints(self) -> tuple[PhaseVector, PhaseVector]:
        """
        Return (initial, final).

        Raises:
            EndpointMismatchError: If either endpoint is unset.
        """
        if self.initial is None or self.final is None:
            raise EndpointMismatchError("This operation needs both path endpoints.")

        return self.initial, self.final


@dataclasses.dataclass(frozen=True)
class DiscreteAction:
    """
    The lattice action of one (gamma, xi) path.

    The symplectic part is kept as an exact residue: sum_i dgamma_i ^ xi_i mod d.
    """

    dim: PrimeDim
    symplectic: int
    hamiltonian: float

    @property
    def value(self) -> float:
        return -4.0 * math.pi * self.symplectic / self.dim.d + self.hamiltonian

    def phase(self) -> complex:
        """Return exp(i S) with the symplectic factor taken from the exact residue."""
        return omega_power(self.dim, -2 * self.symplectic) * complex(
            math.cos(self.hamiltonian), math.sin(self.hamiltonian)
        )


@dataclasses.dataclass(frozen=True)
class PathSumRecord:
    steps: int = dataclasses.field(metadata={"key": "N"})
    t: float
    mu0: tuple[int, ...]
    mu_n: tuple[int, ...] = dataclasses.field(metadata={"key": "muN"})
    value: float
    exact_value: float
    abs_error: float


@dataclasses.dataclass(frozen=True)
class XiZeroSummary:
    steps: int = dataclasses.field(metadata={"key": "N"})
    t: float
    max_imag: float
    max_uniform_deviation: float
    distance_to_exact: float | None


@dataclasses.dataclass(frozen=True)
class ShortTimeErrorReport:
    """Error of exp(-i tau H_W) against the exact U_W over a tau sequence."""

    taus: tuple[float, ...]
    errors: tuple[float, ...]
    ratios: tuple[float, ...]
    predicted_constant: float

    @property
    def limiting_ratio(self) -> float:
        return self.ratios[-1]

    @property
    def relative_deviation(self) -> float:
        """Relative distance of the last ratio from the predicted constant."""
        if self.predicted_constant == 0:
            return abs(self.limiting_ratio)

        return abs(self.limiting_ratio / self.predicted_constant - 1.0)


def hamiltonian_symbol(
    hamiltonian: ArrayLike, dim: PrimeDim, n_qudits: int = 1
) -> RealArray:
    """Return H_W on the lattice for a Hermitian generator, in units of the coupling."""
    return real_phase_space_function(
        hamiltonian, dim, n_qudits, tolerance=get_settings().tolerance
    )


def _check_symbol(h_w: ArrayLike, dim: PrimeDim, n_qudits: int) -> RealArray:
    values = numpy.asarray(h_w, dtype=numpy.float64).reshape(-1)
    size = get_lattice(dim, n_qudits).size
    if values.shape[0] != size:
        raise ShapeMismatchError(
            f"Expected H_W with {size} lattice values, got {values.shape[0]}."
        )

    return values


def _slice_rows(
    h_w: RealArray,
    tau: float,
    dim: PrimeDim,
    n_qudits: int,
    form: ShortTimeForm,
) -> ComplexArray:
    lattice = get_lattice(dim, n_qudits)
    size = lattice.size
    points = lattice.points
    values = numpy.empty((size, size), dtype=numpy.complex128)

    for final in range(size):
        delta = lattice.sub[final]
        wedge = lattice.symplectic[delta]

        # Rows are the initial point, columns the summation variable.
        if form is ShortTimeForm.MARINOV:
            exponent = -2 * wedge
            difference = h_w[lattice.add[final]][None, :] - h_w[lattice.sub]
        elif form is ShortTimeForm.FLIPPED:
            exponent = 2 * wedge
            difference = h_w[lattice.sub[final]][None, :] - h_w[lattice.add]
        else:
            midpoint = lattice.indices(dim.half_inv * (points[final] + points))
            exponent = -2 * wedge
            difference = h_w[lattice.add[midpoint]] - h_w[lattice.sub[midpoint]]

        values[final] = (
            omega_powers(dim, exponent) * numpy.exp(1j * tau * difference)
        ).sum(axis=1)

    return values / dim.d ** (2 * n_qudits)


def short_time_kernel(
    h_w: ArrayLike,
    tau: float,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    form: ShortTimeForm = ShortTimeForm.MARINOV,
    tolerance: float | None = None,
) -> WignerKernel:
    """
    Return the single-slice kernel built from the lattice function exp(-i tau H_W).

    G(mu', mu) = d^-2n sum_v omega^(-2 (mu' - mu) ^ v)
                 exp(i tau [H_W(mu' + v) - H_W(mu - v)])

    Raises:
        ShapeMismatchError: If H_W does not cover the lattice.
        KernelRealityError: If the kernel is not real to tolerance.
    """
    values = _slice_rows(_check_symbol(h_w, dim, n_qudits), tau, dim, n_qudits, form)
    return WignerKernel.from_complex(values, dim, n_qudits, tolerance=tolerance)


def path_sum_kernel(
    h_w: ArrayLike,
    cfg: PathConfig,
    dim: PrimeDim,
    n_qudits: int = 1,
) -> WignerKernel:
    """Return the N-slice path sum over all endpoint pairs, by composing slices."""
    step = short_time_kernel(h_w, cfg.tau, dim, n_qudits)
    entries = numpy.linalg.matrix_power(step.entries, cfg.steps)

    return WignerKernel(dim, n_qudits, entries, step.imag_residue)


def _check_path(
    path: Sequence[PhaseVector], expected: int, n_qudits: int, label: str
) -> None:
    if len(path) != expected:
        raise EndpointMismatchError(
            f"{label} path has {len(path)} points, expected {expected}."
        )

    if any(point.n_qudits != n_qudits for point in path):
        raise EndpointMismatchError(f"{label} path mixes qudit counts.")


def discrete_action(
    gamma: Sequence[PhaseVector],
    xi: Sequence[PhaseVector],
    h_w: ArrayLike,
    cfg: PathConfig,
    dim: PrimeDim,
) -> DiscreteAction:
    """
    Evaluate the discrete action of one path.

    S = -(4 pi / d) sum_i dgamma_i ^ xi_i
        + tau sum_i [H_W(gamma_i + xi_i) - H_W(gamma_(i-1) - xi_i)]

    Raises:
        EndpointMismatchError: If the path lengths or endpoints disagree with cfg.
    """
    n_qudits = gamma[0].n_qudits if gamma else 0
    _check_path(gamma, cfg.steps + 1, n_qudits, "gamma")
    _check_path(xi, cfg.steps, n_qudits, "xi")

    if cfg.initial is not None and gamma[0].reduced(dim) != cfg.initial.reduced(dim):
        raise EndpointMismatchError("gamma does not start at the initial point.")
    if cfg.final is not None and gamma[-1].reduced(dim) != cfg.final.reduced(dim):
        raise EndpointMismatchError("gamma does not end at the final point.")

    lattice = get_lattice(dim, n_qudits)
    values = _check_symbol(h_w, dim, n_qudits)

    wedge = 0
    hamiltonian = 0.0
    for before, after, fluctuation in zip(gamma, gamma[1:], xi):
        wedge += lattice.symplectic[
            lattice.index(after - before), lattice.index(fluctuation)
        ]
        hamiltonian += float(
            values[lattice.index(after + fluctuation)]
            - values[lattice.index(before - fluctuation)]
        )

    return DiscreteAction(dim, dim.reduce(int(wedge)), hamiltonian * cfg.tau)


def path_sum_entry(
    h_w: ArrayLike,
    cfg: PathConfig,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    budget: int | None = None,
    tolerance: float | None = None,
) -> float:
    """
    Sum exp(i S) over every (gamma, xi) path between the configured endpoints.

    Raises:
        EndpointMismatchError: If cfg has no endpoints.
        PathBudgetExceededError: If L^(2N-1) exceeds the term budget.
        KernelRealityError: If the sum is not real to tolerance.
    """
    initial, final = cfg.endpoints()
    limit = get_settings().path_budget if budget is None else budget
    limit_imag = get_settings().tolerance if tolerance is None else tolerance

    lattice = get_lattice(dim, n_qudits)
    size = lattice.size
    steps = cfg.steps
    terms = size ** (2 * steps - 1)
    if terms > limit:
        raise PathBudgetExceededError(
            f"Enumerating {terms} paths exceeds the budget of {limit}; "
            "compose short-time kernels instead."
        )

    values = _check_symbol(h_w, dim, n_qudits)
    logger.debug("Enumerating %d paths for N=%d", terms, steps)

    # Every xi path at once: column i is xi_(i+1).
    xi = numpy.indices((size,) * steps).reshape(steps, -1).T
    start, end = lattice.index(initial), lattice.index(final)

    total = 0j
    for middle in itertools.product(range(size), repeat=steps - 1):
        gamma = (start, *middle, end)
        wedge = numpy.zeros(xi.shape[0], dtype=numpy.int64)
        difference = numpy.zeros(xi.shape[0], dtype=numpy.float64)
        for slice_index in range(steps):
            before, after = gamma[slice_index], gamma[slice_index + 1]
            column = xi[:, slice_index]
            wedge += lattice.symplectic[lattice.sub[after, before], column]
            difference += values[lattice.add[after, column]]
            difference -= values[lattice.sub[before, column]]

        phases = omega_powers(dim, -2 * wedge) * numpy.exp(1j * cfg.tau * difference)
        total += complex(phases.sum())

    total /= dim.d ** (2 * n_qudits * steps)
    if abs(total.imag) > limit_imag:
        raise KernelRealityError(
            f"Path sum has imaginary part {total.imag:.3e} above {limit_imag:.1e}."
        )

    return total.real


def path_sum_propagator(
    h_w: ArrayLike,
    cfg: PathConfig,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    brute_force: bool = False,
) -> float:
    """
    Return the path-sum kernel entry G(mu_N, t; mu_0, 0).

    Raises:
        EndpointMismatchError: If cfg has no endpoints.
        PathBudgetExceededError: If brute_force is set and the budget is exceeded.
    """
    initial, final = cfg.endpoints()
    if brute_force:
        return path_sum_entry(h_w, cfg, dim, n_qudits)

    lattice = get_lattice(dim, n_qudits)
    kernel = path_sum_kernel(h_w, cfg, dim, n_qudits)

    return float(kernel.entries[lattice.index(final), lattice.index(initial)])


def path_sum_records(
    h_w: ArrayLike,
    exact: WignerKernel,
    cfg: PathConfig,
    *,
    brute_force: bool = False,
) -> list[PathSumRecord]:
    """
    Compare the path sum against an exact kernel.

    With endpoints set in cfg a single record is returned, otherwise one per
    endpoint pair.
    """
    dim, n_qudits = exact.dim, exact.n_qudits
    lattice = get_lattice(dim, n_qudits)

    if cfg.initial is not None and cfg.final is not None:
        pairs: Iterable[tuple[int, int]] = [
            (lattice.index(cfg.initial), lattice.index(cfg.final))
        ]
        value_of = {
            pair: path_sum_propagator(h_w, cfg, dim, n_qudits, brute_force=brute_force)
            for pair in pairs
        }
    else:
        kernel = path_sum_kernel(h_w, cfg, dim, n_qudits)
        pairs = itertools.product(range(lattice.size), repeat=2)
        value_of = {
            (start, end): float(kernel.entries[end, start]) for start, end in pairs
        }

    records = []
    for (start, end), value in value_of.items():
        exact_value = float(exact.entries[end, start])
        records.append(
            PathSumRecord(
                steps=cfg.steps,
                t=cfg.t,
                mu0=lattice.point(start).coords,
                mu_n=lattice.point(end).coords,
                value=value,
                exact_value=exact_value,
                abs_error=abs(value - exact_value),
            )
        )

    return records


def xi_zero_kernel(
    h_w: ArrayLike, cfg: PathConfig, dim: PrimeDim, n_qudits: int = 1
) -> ComplexArray:
    """
    Return the xi = 0 sector of the path sum: d^-2n exp(i tau [H_W(mu') - H_W(mu)]).

    The result is complex in general and tends to the uniform d^-2n as N grows.
    """
    values = _check_symbol(h_w, dim, n_qudits)
    difference = values[:, None] - values[None, :]

    return numpy.exp(1j * cfg.tau * difference) / dim.d ** (2 * n_qudits)


def xi_zero_summary(
    h_w: ArrayLike,
    cfg: PathConfig,
    dim: PrimeDim,
    n_qudits: int = 1,
    *,
    exact: WignerKernel | None = None,
) -> XiZeroSummary:
    """Report how far the xi = 0 sector is from real, uniform and exact."""
    kernel = xi_zero_kernel(h_w, cfg, dim, n_qudits)
    uniform = 1.0 / dim.d ** (2 * n_qudits)

    distance = None
    if exact is not None:
        distance = float(numpy.max(numpy.abs(kernel - exact.entries)))

    return XiZeroSummary(
        steps=cfg.steps,
        t=cfg.t,
        max_imag=float(numpy.max(numpy.abs(kernel.imag))),
        max_uniform_deviation=float(numpy.max(numpy.abs(kernel - uniform))),
        distance_to_exact=distance,
    )


def short_time_error(
    hamiltonian: ArrayLike,
    taus: Sequence[float],
    dim: PrimeDim,
    n_qudits: int = 1,
) -> ShortTimeErrorReport:
    """
    Measure max|U_W(tau) - exp(-i tau H_W)| / tau^2 over a decreasing tau sequence.

    The predicted limit is (1/2) max|(H_W * H_W) - H_W^2| with * the twisted
    product evaluated on symbols.

    Raises:
        NotHermitianError: If H is not Hermitian.
        ValueError: If taus is empty or holds a non-positive value.
    """
    if not taus or any(tau <= 0 for tau in taus):
        raise ValueError("short_time_error needs a non-empty sequence of tau > 0.")

    matrix = as_matrix(hamiltonian)
    h_w = hamiltonian_symbol(matrix, dim, n_qudits)

    symbol = weyl_symbol(matrix, dim, n_qudits)
    star = phase_space_function(twisted_convolution(symbol, symbol))
    predicted = 0.5 * float(numpy.max(numpy.abs(star - h_w**2)))

    errors = []
    for tau in taus:
        unitary = hermitian_expm(matrix, -1j * tau)
        exact = phase_space_function(weyl_symbol(unitary, dim, n_qudits))
        errors.append(float(numpy.max(numpy.abs(exact - numpy.exp(-1j * tau * h_w)))))

    return ShortTimeErrorReport(
        taus=tuple(taus),
        errors=tuple(errors),
        ratios=tuple(error / tau**2 for error, tau in zip(errors, taus)),
        predicted_constant=predicted,
    )
