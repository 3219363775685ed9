"""
The acceptance suite: named numerical checks with timing and dimension filters.

Each check raises CheckFailure with a message when a quantity is out of
tolerance. Library errors raised inside a check count as failures too.
"""

from __future__ import annotations

import dataclasses
import math
import time
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Sequence

import numpy
from numpy.typing import ArrayLike
from scipy.stats import unitary_group

from .composite_entanglement import Route
from .composite_entanglement import linear_entropy_exact
from .config import get_settings
from .field_arith import PrimeDim
from .field_arith import get_lattice
from .field_arith import make_prime_dim
from .linalg_core import ComplexMatrix
from .linalg_core import hermitian_expm
from .path_integral import PathConfig
from .path_integral import hamiltonian_symbol
from .path_integral import path_sum_entry
from .path_integral import path_sum_kernel
from .path_integral import short_time_error
from .path_integral import xi_zero_summary
from .presets import density
from .presets import make_hamiltonian
from .presets import momentum_state
from .presets import position_operator
from .propagator import apply_kernel
from .propagator import exact_kernel
from .propagator import kernel_fourier_form
from .propagator import kernel_from_weyl_space
from .propagator import kernel_trace_form
from .propagator import phase_space_purity
from .propagator import twisted_convolution
from .propagator import weyl_space_kernel
from .pseudo_classical import Commensurability
from .pseudo_classical import LinearHamiltonian
from .pseudo_classical import verify_shift_kernel
from .struclogger import get_logger
from .weyl_transform import displacement_set
from .weyl_transform import inverse_weyl
from .weyl_transform import momentum_marginal
from .weyl_transform import position_marginal
from .weyl_transform import weyl_symbol
from .weyl_transform import wigner_function

__all__ = [
    "CHECKS",
    "CheckContext",
    "CheckFailure",
    "CheckResult",
    "DEFAULT_DIMS",
    "GOLDEN_QUTRIT",
    "ENTANGLEMENT_TABLE",
    "run_checks",
]

logger = get_logger()

DEFAULT_DIMS = (3, 5, 7, 11)
VERIFY_SEED = 1_729

# Evolved |p,0> under H = x at chi t = pi, keyed by (m, n).
GOLDEN_QUTRIT = {
    (0, 0): -1 / 9,
    (1, 0): 1 / 3,
    (2, 0): -1 / 9,
    (0, 1): 2 / 9,
    (0, 2): 2 / 9,
    (2, 1): 2 / 9,
    (2, 2): 2 / 9,
    (1, 1): 0.0,
    (1, 2): 0.0,
}

ENTANGLEMENT_TABLE = (
    (0.25, 0.053),
    (0.5, 0.185),
    (math.pi / 2, 0.593),
    (2 * math.pi / 3, 0.667),
    (math.pi, 0.395),
    (4 * math.pi / 3, 0.667),
    (2 * math.pi, 0.000),
)


class CheckFailure(AssertionError):
    """Raised by a check whose quantity is out of tolerance."""


@dataclasses.dataclass(frozen=True)
class CheckContext:
    """
    Inputs shared by every check.

    Attributes:
        dims: Dimensions to exercise; checks pinned to qutrits skip when 3 is absent.
        dim_factory: Builds a PrimeDim from d.
    """

    dims: tuple[int, ...]
    tolerance: float
    strict_tolerance: float
    dim_factory: Callable[[int], PrimeDim] = make_prime_dim
    seed: int = VERIFY_SEED

    def rng(self) -> numpy.random.Generator:
        return numpy.random.default_rng(self.seed)

    def prime_dims(self) -> list[PrimeDim]:
        return [self.dim_factory(d) for d in self.dims]

    @property
    def has_qutrit(self) -> bool:
        return 3 in self.dims

    def qutrit(self) -> PrimeDim:
        return self.dim_factory(3)


@dataclasses.dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    skipped: bool
    seconds: float
    detail: str


class _Skip(Exception):
    pass


CheckFunction = Callable[[CheckContext], str]

CHECKS: dict[str, CheckFunction] = {}


def _register(name: str) -> Callable[[CheckFunction], CheckFunction]:
    def decorator(func: CheckFunction) -> CheckFunction:
        CHECKS[name] = func
        return func

    return decorator


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailure(message)


def _max_abs(values: ArrayLike) -> float:
    return float(numpy.max(numpy.abs(numpy.asarray(values)), initial=0.0))


def _random_density(size: int, rng: numpy.random.Generator) -> ComplexMatrix:
    gaussian = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    matrix = gaussian @ gaussian.conj().T
    return matrix / numpy.trace(matrix)


def _random_unitary(size: int, rng: numpy.random.Generator) -> ComplexMatrix:
    return numpy.asarray(unitary_group.rvs(size, random_state=rng))


def _p0(dim: PrimeDim, n_qudits: int = 1) -> ComplexMatrix:
    state = momentum_state(dim, 0)
    product = state
    for _ in range(n_qudits - 1):
        product = numpy.kron(product, state)

    return density(product)


@_register("golden-qutrit")
def _check_golden_qutrit(ctx: CheckContext) -> str:
    if not ctx.has_qutrit:
        raise _Skip("needs d=3")

    dim = ctx.qutrit()
    hamiltonian, _ = make_hamiltonian("diag012", dim)
    unitary = hamiltonian.evolution(math.pi)

    for label, kernel in (
        ("fourier", kernel_fourier_form(unitary, dim)),
        ("trace", kernel_trace_form(unitary, dim)),
    ):
        evolved = apply_kernel(kernel, wigner_function(_p0(dim), dim))
        for (m, n), expected in GOLDEN_QUTRIT.items():
            value = evolved.at((m, n))
            _require(
                abs(value - expected) <= ctx.tolerance,
                f"{label} form: W({m},{n}) = {value:.12f}, expected {expected:.12f}",
            )
        _require(abs(evolved.total() - 1.0) <= ctx.tolerance, "Wigner sum is not 1")

    return "9 cells match for both kernel forms"


@_register("kernel-forms")
def _check_kernel_forms(ctx: CheckContext) -> str:
    rng = ctx.rng()
    worst = 0.0
    for dim in ctx.prime_dims():
        for _ in range(5):
            unitary = _random_unitary(dim.d, rng)
            reference = kernel_trace_form(unitary, dim).entries
            fourier = kernel_fourier_form(unitary, dim).entries
            weyl = kernel_from_weyl_space(weyl_space_kernel(unitary, dim), dim).entries

            difference = max(
                _max_abs(reference - fourier), _max_abs(reference - weyl)
            )
            _require(
                difference <= ctx.tolerance,
                f"d={dim.d}: kernel forms differ by {difference:.3e}",
            )
            worst = max(worst, difference)

    return f"max form difference {worst:.3e}"


@_register("kernel-reality")
def _check_kernel_reality(ctx: CheckContext) -> str:
    rng = ctx.rng()
    cases: list[tuple[PrimeDim, int]] = [(dim, 1) for dim in ctx.prime_dims()]
    if ctx.has_qutrit:
        cases.append((ctx.qutrit(), 2))

    worst = 0.0
    for dim, n_qudits in cases:
        unitary = _random_unitary(dim.d**n_qudits, rng)
        kernel = kernel_trace_form(unitary, dim, n_qudits, tolerance=ctx.tolerance)
        drift = _max_abs(kernel.column_sums() - 1.0)
        _require(
            drift <= ctx.tolerance,
            f"d={dim.d} n={n_qudits}: column sums drift by {drift:.3e}",
        )
        worst = max(worst, kernel.imag_residue)

    return f"max imaginary residue {worst:.3e} over {len(cases)} kernels"


@_register("path-exactness")
def _check_path_exactness(ctx: CheckContext) -> str:
    worst = 0.0
    for dim in ctx.prime_dims():
        h_w = hamiltonian_symbol(position_operator(dim), dim)
        unitary = hermitian_expm(position_operator(dim), -1j * math.pi)
        exact = kernel_fourier_form(unitary, dim)
        for steps in range(1, 5):
            composed = path_sum_kernel(h_w, PathConfig(steps, math.pi), dim)
            error = _max_abs(composed.entries - exact.entries)
            _require(error <= ctx.tolerance, f"d={dim.d} N={steps}: error {error:.3e}")
            worst = max(worst, error)

    if ctx.has_qutrit:
        dim = ctx.qutrit()
        worst = max(worst, _two_qutrit_paths(dim, ctx.tolerance))

    return f"max path-sum error {worst:.3e}"


def _two_qutrit_paths(dim: PrimeDim, tolerance: float) -> float:
    hamiltonian, n_qudits = make_hamiltonian("xx", dim)
    h_w = hamiltonian_symbol(hamiltonian.matrix, dim, n_qudits)
    exact = exact_kernel(hamiltonian, 0.1, dim, n_qudits)
    lattice = get_lattice(dim, n_qudits)

    worst = 0.0
    for steps in (1, 2):
        composed = path_sum_kernel(h_w, PathConfig(steps, 0.1), dim, n_qudits)
        error = _max_abs(composed.entries - exact.entries)
        _require(error <= tolerance, f"two-qutrit N={steps}: error {error:.3e}")
        worst = max(worst, error)

        for start, end in ((0, 0), (4, 40)):
            cfg = PathConfig(steps, 0.1, lattice.point(start), lattice.point(end))
            value = path_sum_entry(h_w, cfg, dim, n_qudits)
            error = abs(value - exact.entries[end, start])
            _require(
                error <= tolerance,
                f"two-qutrit brute force N={steps} ({start}->{end}): error {error:.3e}",
            )
            worst = max(worst, error)

    return worst


@_register("short-time-error")
def _check_short_time_error(ctx: CheckContext) -> str:
    if not ctx.has_qutrit:
        raise _Skip("needs d=3")

    dim = ctx.qutrit()
    hamiltonian, _ = make_hamiltonian("xplusp", dim)
    report = short_time_error(hamiltonian.matrix, (1e-1, 1e-2, 1e-3, 1e-4), dim)
    _require(
        report.relative_deviation <= 0.05,
        f"ratio {report.limiting_ratio:.6f} vs predicted "
        f"{report.predicted_constant:.6f}",
    )

    diagonal = short_time_error(position_operator(dim), (0.5,), dim)
    _require(
        diagonal.errors[0] <= ctx.strict_tolerance,
        f"diagonal H error {diagonal.errors[0]:.3e} at tau=0.5",
    )

    return (
        f"ratio {report.limiting_ratio:.6f} -> {report.predicted_constant:.6f} "
        f"({100 * report.relative_deviation:.2f}%)"
    )


@_register("xi-zero")
def _check_xi_zero(ctx: CheckContext) -> str:
    if not ctx.has_qutrit:
        raise _Skip("needs d=3")

    dim = ctx.qutrit()
    hamiltonian, n_qudits = make_hamiltonian("xx", dim)
    h_w = hamiltonian_symbol(hamiltonian.matrix, dim, n_qudits)

    single = xi_zero_summary(h_w, PathConfig(1, 0.5), dim, n_qudits)
    _require(
        5e-3 <= single.max_imag <= 5e-2,
        f"N=1 max|Im| {single.max_imag:.3e} outside [5e-3, 5e-2]",
    )

    many = xi_zero_summary(h_w, PathConfig(64, 0.5), dim, n_qudits)
    _require(
        many.max_uniform_deviation <= 1e-3,
        f"N=64 deviation from uniform {many.max_uniform_deviation:.3e}",
    )
    _require(
        many.max_imag <= 1e-2 / 8, f"N=64 max|Im| {many.max_imag:.3e} not suppressed"
    )

    return f"max|Im| {single.max_imag:.3e} at N=1, {many.max_imag:.3e} at N=64"


@_register("commensurability")
def _check_commensurability(ctx: CheckContext) -> str:
    count = 0
    for dim in ctx.prime_dims():
        if dim.d not in (3, 5):
            continue

        tau = math.pi / dim.d
        for k in range(2 * dim.d):
            for hamiltonian in (
                LinearHamiltonian.single(float(k), 0.0),
                LinearHamiltonian.single(0.0, float(k)),
            ):
                outcome = verify_shift_kernel(
                    hamiltonian, tau, dim, tolerance=ctx.tolerance
                )
                expected = (
                    Commensurability.STRICT if k % 2 == 0 else Commensurability.WEAK_ODD
                )
                _require(
                    outcome.report.overall is expected and outcome.consistent,
                    f"d={dim.d} k={k} {hamiltonian.coefficients}: classified "
                    f"{outcome.report.overall.value}, consistent={outcome.consistent}",
                )
                count += 1

    if count == 0:
        raise _Skip("needs d=3 or d=5")

    return f"{count} slices classified without error"


@_register("entanglement-table")
def _check_entanglement_table(ctx: CheckContext) -> str:
    if not ctx.has_qutrit:
        raise _Skip("needs d=3")

    dim = ctx.qutrit()
    routes = (Route.EXACT, Route.KERNEL, Route.PATH_INTEGRAL)
    for chi_t, expected in ENTANGLEMENT_TABLE:
        for route in routes:
            record = linear_entropy_exact(chi_t, route, steps=2, dim=dim)
            _require(
                abs(record.linear_entropy - expected) <= 1e-3,
                f"{route.value} S_L({chi_t:.4f}) = {record.linear_entropy:.6f}, "
                f"table {expected}",
            )
            _require(
                record.closed_form_error is not None
                and record.closed_form_error <= ctx.tolerance,
                f"{route.value} at {chi_t:.4f} misses the closed form by "
                f"{record.closed_form_error}",
            )

    short = linear_entropy_exact(0.1, Route.EXACT, dim=dim).linear_entropy
    _require(abs(short - 8.823e-3) <= 1e-6, f"S_L(0.1) = {short:.9f}")

    return f"{len(ENTANGLEMENT_TABLE) * len(routes)} records, S_L(0.1) = {short:.6e}"


@_register("properties")
def _check_properties(ctx: CheckContext) -> str:
    rng = ctx.rng()
    strict = ctx.strict_tolerance

    if ctx.has_qutrit:
        _displacement_algebra(ctx.qutrit(), strict)

    for dim in ctx.prime_dims():
        for _ in range(20):
            operator = rng.normal(size=(dim.d, dim.d)) + 1j * rng.normal(
                size=(dim.d, dim.d)
            )
            back = inverse_weyl(weyl_symbol(operator, dim))
            _require(
                _max_abs(back - operator) <= strict,
                f"d={dim.d}: Weyl round trip drift {_max_abs(back - operator):.3e}",
            )

        if dim.d in (3, 5):
            rho = _random_density(dim.d, rng)
            wigner = wigner_function(rho, dim)
            basis = _dft_columns(dim)
            momentum = numpy.einsum("ai,ab,bi->i", basis.conj(), rho, basis).real
            _require(
                _max_abs(position_marginal(wigner) - numpy.real(numpy.diag(rho)))
                <= strict,
                f"d={dim.d}: position marginal mismatch",
            )
            _require(
                _max_abs(momentum_marginal(wigner) - momentum) <= strict,
                f"d={dim.d}: momentum marginal mismatch",
            )

        unitary = _random_unitary(dim.d, rng)
        rho = _random_density(dim.d, rng)
        before = wigner_function(rho, dim)
        after = apply_kernel(kernel_fourier_form(unitary, dim), before)
        drift = abs(phase_space_purity(after) - phase_space_purity(before))
        _require(drift <= ctx.tolerance, f"d={dim.d}: purity drift {drift:.3e}")

    if ctx.has_qutrit:
        dim = ctx.qutrit()
        for _ in range(20):
            left = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            right = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            star = twisted_convolution(weyl_symbol(left, dim), weyl_symbol(right, dim))
            product = weyl_symbol(left @ right, dim)
            _require(
                _max_abs(star.values - product.values) <= strict,
                "twisted convolution differs from the operator product",
            )

    return "displacement algebra, round trips, marginals, products and purity hold"


def _dft_columns(dim: PrimeDim) -> ComplexMatrix:
    """Columns are the momentum states |p, i>."""
    return numpy.stack([momentum_state(dim, i) for i in range(dim.d)], axis=1)


def _displacement_algebra(dim: PrimeDim, tolerance: float) -> None:
    table = displacement_set(dim)
    d = dim.d
    for k1, j1, k2, j2 in numpy.ndindex(d, d, d, d):
        first, second = table[k1, j1], table[k2, j2]

        overlap = numpy.trace(first.conj().T @ second)
        expected = d if (k1, j1) == (k2, j2) else 0.0
        _require(
            abs(overlap - expected) <= tolerance,
            f"Tr[D({k1},{j1})^dagger D({k2},{j2})] = {overlap:.6g}",
        )

        phase = numpy.exp(2j * math.pi * dim.half_inv * (k1 * j2 - k2 * j1) / d)
        composed = phase * table[k1 + k2, j1 + j2]
        _require(
            _max_abs(first @ second - composed) <= tolerance,
            f"D({k1},{j1}) D({k2},{j2}) breaks the multiplication rule",
        )


def run_checks(
    only: Iterable[str] | None = None,
    dims: Sequence[int] = DEFAULT_DIMS,
    *,
    dim_factory: Callable[[int], PrimeDim] = make_prime_dim,
) -> list[CheckResult]:
    """
    Run the selected checks in registry order.

    Raises:
        KeyError: If a name in only is not a registered check.
    """
    names = list(CHECKS) if only is None else list(only)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise KeyError(f"Unknown check(s) {unknown}; known: {', '.join(CHECKS)}.")

    settings = get_settings()
    ctx = CheckContext(
        dims=tuple(dims),
        tolerance=settings.tolerance,
        strict_tolerance=settings.strict_tolerance,
        dim_factory=dim_factory,
    )

    results = []
    for name in names:
        results.append(_run_one(name, CHECKS[name], ctx))

    return results


def _run_one(name: str, check: CheckFunction, ctx: CheckContext) -> CheckResult:
    logger.info("Starting check %s on dims %s", name, ctx.dims)
    started = time.perf_counter()

    passed, skipped = True, False
    try:
        detail = check(ctx)

    except _Skip as skip:
        skipped, detail = True, f"skipped: {skip}"

    except (CheckFailure, ValueError, RuntimeError) as err:
        passed, detail = False, f"{type(err).__name__}: {err}"

    seconds = time.perf_counter() - started
    logger.info("Finished check %s passed=%s in %.3fs", name, passed, seconds)

    return CheckResult(name, passed, skipped, round(seconds, 3), detail)
