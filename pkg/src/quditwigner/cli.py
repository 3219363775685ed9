"""Command-line entry point: scenario subcommands and the verify suite."""

from __future__ import annotations

import argparse
import dataclasses
import math
import re
import sys
from collections.abc import Sequence

import numpy

from . import struclogger
from .composite_entanglement import Route
from .composite_entanglement import entanglement_table
from .config import get_settings
from .field_arith import PhaseVector
from .field_arith import PrimeDim
from .field_arith import make_prime_dim
from .formats import FORMATS
from .formats import kernel_to_json
from .formats import render_records
from .formats import render_table
from .formats import wigner_to_csv
from .formats import wigner_to_json
from .formats import wigner_to_table
from .linalg_core import ComplexMatrix
from .linalg_core import HamiltonianSpec
from .path_integral import PathConfig
from .path_integral import hamiltonian_symbol
from .path_integral import path_sum_records
from .path_integral import xi_zero_summary
from .presets import HAMILTONIAN_PRESETS
from .presets import density
from .presets import load_matrix_file
from .presets import make_hamiltonian
from .presets import make_state
from .presets import read_matrix_file
from .propagator import WignerKernel
from .propagator import apply_kernel
from .propagator import kernel_fourier_form
from .propagator import kernel_from_weyl_space
from .propagator import kernel_trace_form
from .propagator import weyl_space_kernel
from .pseudo_classical import Commensurability
from .pseudo_classical import LinearHamiltonian
from .pseudo_classical import Shift
from .pseudo_classical import verify_shift_kernel
from .verify import CHECKS
from .verify import DEFAULT_DIMS
from .verify import run_checks
from .weyl_transform import negativity
from .weyl_transform import wigner_function

__all__ = [
    "RunConfig",
    "TimeLiteral",
    "build_parser",
    "main",
    "parse_time",
    "snap_tau",
]

logger = struclogger.get_logger()

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2

_TIME_PATTERN = re.compile(
    r"^(?P<coeff>[+-]?(\d+(\.\d*)?|\.\d+)?)\*?pi(/(?P<denom>\d+(\.\d*)?|\.\d+))?$"
)


def parse_time(text: str) -> float:
    """
    Parse a time given as a number or in pi notation: 0.5, pi, 2pi/3, -pi/2.

    Raises:
        argparse.ArgumentTypeError: If the text is neither.
    """
    cleaned = text.strip().lower().replace(" ", "").replace("π", "pi")
    match = _TIME_PATTERN.match(cleaned)
    if match is None:
        try:
            return float(cleaned)

        except ValueError as err:
            raise argparse.ArgumentTypeError(f"Cannot read time {text!r}.") from err

    coeff = match.group("coeff")
    if coeff in ("", "+", None):
        factor = 1.0
    elif coeff == "-":
        factor = -1.0
    else:
        factor = float(coeff)
    denom = float(match.group("denom")) if match.group("denom") else 1.0
    if denom == 0:
        raise argparse.ArgumentTypeError(f"Division by zero in {text!r}.")

    return factor * math.pi / denom


_DECIMAL_PATTERN = re.compile(r"^\+?\d*\.\d+$")


@dataclasses.dataclass(frozen=True)
class TimeLiteral:
    """A parsed time plus the decimal places it was written with, if plain decimal."""

    value: float
    decimal_places: int | None = None


def _time_literal(text: str) -> TimeLiteral:
    value = parse_time(text)
    cleaned = text.strip()
    if _DECIMAL_PATTERN.match(cleaned) is None:
        return TimeLiteral(value)

    return TimeLiteral(value, len(cleaned.partition(".")[2]))


def snap_tau(
    literal: TimeLiteral,
    hamiltonian: LinearHamiltonian,
    dim: PrimeDim,
    k_tolerance: float | None = None,
) -> float:
    """
    Move a decimal tau onto the nearest commensurate time it rounds to.

    Each nonzero coefficient c has commensurate times on the grid pi / (d |c|).
    A grid time within half a unit of the literal's last decimal place replaces
    the literal; the one making the most k integral wins. Times in pi notation
    are returned unchanged.
    """
    if literal.decimal_places is None:
        return literal.value

    tolerance = get_settings().k_tolerance if k_tolerance is None else k_tolerance
    half_unit = 0.5 * 10.0 ** -literal.decimal_places
    coefficients = [value for pair in hamiltonian.coefficients for value in pair]

    def integral_count(tau: float) -> int:
        ks = [value * dim.d * tau / math.pi for value in coefficients]
        return sum(abs(k - round(k)) < tolerance for k in ks)

    candidates = []
    for value in coefficients:
        if value == 0:
            continue
        unit = math.pi / (dim.d * abs(value))
        snapped = round(literal.value / unit) * unit
        if snapped > 0 and abs(snapped - literal.value) <= half_unit:
            candidates.append(snapped)

    if not candidates:
        return literal.value

    best = max(
        candidates,
        key=lambda tau: (integral_count(tau), -abs(tau - literal.value)),
    )
    logger.info("Snapped tau %r to %.12g", literal.value, best)
    return best


def _time_list(text: str) -> list[float]:
    return [parse_time(part) for part in text.split(",") if part.strip()]


def _coords(text: str) -> PhaseVector:
    try:
        return PhaseVector.of(*(int(part) for part in text.split(",")))

    except ValueError as err:
        raise argparse.ArgumentTypeError(f"Cannot read phase point {text!r}.") from err


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """The options shared by every subcommand."""

    subcommand: str
    d: int
    output_format: str
    output: str | None
    tolerance: float

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        settings = get_settings()
        return cls(
            subcommand=args.command,
            d=getattr(args, "d", 3),
            output_format=args.format,
            output=args.output,
            tolerance=args.tolerance if args.tolerance else settings.tolerance,
        )


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
        return

    path = get_settings().output_path(cfg.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)


def _hamiltonian(
    args: argparse.Namespace, dim: PrimeDim
) -> tuple[HamiltonianSpec, int]:
    if args.matrix_file:
        return load_matrix_file(args.matrix_file, dim)

    return make_hamiltonian(args.preset, dim)


def _state(args: argparse.Namespace, dim: PrimeDim) -> tuple[ComplexMatrix, int]:
    if args.state_file:
        return read_matrix_file(args.state_file, dim)

    names = [name.strip() for name in (args.state or "").split(",") if name.strip()]
    if not names:
        raise ValueError("Give at least one basis state, e.g. --state p0.")

    vector = make_state(names[0], dim)
    for name in names[1:]:
        vector = numpy.kron(vector, make_state(name, dim))

    return density(vector), len(names)


def cmd_wigner(args: argparse.Namespace, cfg: RunConfig) -> int:
    dim = make_prime_dim(cfg.d)
    rho, n_qudits = _state(args, dim)

    if args.evolve:
        hamiltonian, h_qudits = make_hamiltonian(args.evolve, dim)
        if h_qudits != n_qudits:
            raise ValueError(
                f"Hamiltonian {args.evolve!r} acts on {h_qudits} qudit(s), "
                f"the state has {n_qudits}."
            )
        unitary = hamiltonian.evolution(args.chi_t)
        rho = unitary @ rho @ unitary.conj().T

    wigner = wigner_function(rho, dim, n_qudits, tolerance=cfg.tolerance)

    if cfg.output_format == "csv":
        text = wigner_to_csv(wigner)
    elif cfg.output_format == "json":
        text = wigner_to_json(wigner) + "\n"
    else:
        text = wigner_to_table(wigner)
        text += f"\nsum: {wigner.total():.12f}\n"
        text += f"negativity: {negativity(wigner):.12f}\n"

    _emit(cfg, text)
    return EXIT_OK


def _kernel(
    form: str, unitary: ComplexMatrix, dim: PrimeDim, n_qudits: int
) -> WignerKernel:
    if form == "trace":
        return kernel_trace_form(unitary, dim, n_qudits)

    if form == "weyl":
        weyl = weyl_space_kernel(unitary, dim, n_qudits)
        return kernel_from_weyl_space(weyl, dim, n_qudits)

    return kernel_fourier_form(unitary, dim, n_qudits)


def cmd_propagate(args: argparse.Namespace, cfg: RunConfig) -> int:
    dim = make_prime_dim(cfg.d)
    hamiltonian, n_qudits = _hamiltonian(args, dim)
    unitary = hamiltonian.evolution(args.chi_t)

    kernel = _kernel(args.form, unitary, dim, n_qudits)
    reference = kernel_trace_form(unitary, dim, n_qudits)

    form_error = float(numpy.max(numpy.abs(kernel.entries - reference.entries)))
    column_drift = float(numpy.max(numpy.abs(kernel.column_sums() - 1.0)))
    passed = form_error <= cfg.tolerance and column_drift <= cfg.tolerance

    if args.state or args.state_file:
        rho, state_qudits = _state(args, dim)
        if state_qudits != n_qudits:
            raise ValueError(
                f"The state has {state_qudits} qudit(s), H has {n_qudits}."
            )
        evolved = apply_kernel(kernel, wigner_function(rho, dim, n_qudits))
        if cfg.output_format == "csv":
            text = wigner_to_csv(evolved)
        elif cfg.output_format == "json":
            text = wigner_to_json(evolved) + "\n"
        else:
            text = wigner_to_table(evolved)
    else:
        text = kernel_to_json(kernel) + "\n"

    if cfg.output_format == "table":
        text += render_table(
            ["form", "trace_form_error", "column_sum_drift", "imag_residue"],
            [[args.form, form_error, column_drift, kernel.imag_residue]],
        )

    _emit(cfg, text)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_path_integral(args: argparse.Namespace, cfg: RunConfig) -> int:
    dim = make_prime_dim(cfg.d)
    hamiltonian, n_qudits = _hamiltonian(args, dim)
    h_w = hamiltonian_symbol(hamiltonian.matrix, dim, n_qudits)
    path = PathConfig(args.steps, args.chi_t, args.mu0, args.mun)
    exact = kernel_fourier_form(hamiltonian.evolution(args.chi_t), dim, n_qudits)

    if args.xi_zero:
        summary = xi_zero_summary(h_w, path, dim, n_qudits, exact=exact)
        _emit(cfg, render_records([summary], cfg.output_format))
        return EXIT_OK

    records = path_sum_records(h_w, exact, path, brute_force=args.brute_force)
    worst = max(record.abs_error for record in records)

    text = render_records(records, cfg.output_format)
    if cfg.output_format == "table":
        text += f"\n{len(records)} entries, max abs error {worst:.3e}\n"

    _emit(cfg, text)

    if args.compare_exact and worst > cfg.tolerance:
        logger.warning("Path sum misses the exact kernel by %.3e", worst)
        return EXIT_CHECK_FAILED

    return EXIT_OK


@dataclasses.dataclass(frozen=True)
class _CommensurabilityRow:
    tau: float
    k_values: tuple[tuple[float, float], ...]
    commensurability: Commensurability = dataclasses.field(metadata={"key": "class"})
    predicted_shift: tuple[Shift, ...] | None
    kernel_is_permutation: bool
    spread: bool
    consistent: bool


def cmd_commensurability(args: argparse.Namespace, cfg: RunConfig) -> int:
    dim = make_prime_dim(cfg.d)
    if len(args.a) != len(args.b):
        raise ValueError("Give one --a and one --b per qudit.")

    hamiltonian = LinearHamiltonian(tuple(zip(args.a, args.b)), args.c)
    tau = snap_tau(args.tau, hamiltonian, dim, args.k_tolerance)
    outcome = verify_shift_kernel(
        hamiltonian,
        tau,
        dim,
        tolerance=cfg.tolerance,
        k_tolerance=args.k_tolerance,
    )

    row = _CommensurabilityRow(
        tau=tau,
        k_values=outcome.report.k_values,
        commensurability=outcome.report.overall,
        predicted_shift=outcome.report.predicted_shift,
        kernel_is_permutation=outcome.kernel_is_permutation,
        spread=outcome.spread,
        consistent=outcome.consistent,
    )
    _emit(cfg, render_records([row], cfg.output_format))
    return EXIT_OK if outcome.consistent else EXIT_CHECK_FAILED


def cmd_entanglement(args: argparse.Namespace, cfg: RunConfig) -> int:
    dim = make_prime_dim(cfg.d)
    routes = [Route(name) for name in args.routes.split(",") if name]
    records = entanglement_table(args.chi_t_list, routes, steps=args.steps, dim=dim)

    _emit(cfg, render_records(records, cfg.output_format))

    failed = [
        record
        for record in records
        if record.closed_form_error is not None
        and record.closed_form_error > cfg.tolerance
    ]
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    only = None
    if args.only:
        only = [name for chunk in args.only for name in chunk.split(",") if name]

    dims = tuple(args.dims) if args.dims else DEFAULT_DIMS
    results = run_checks(only, dims)

    _emit(cfg, render_records(results, cfg.output_format))

    failed = [result.name for result in results if not result.passed]
    if failed:
        sys.stderr.write(f"failed: {', '.join(failed)}\n")
        return EXIT_CHECK_FAILED

    return EXIT_OK


def _common(parser: argparse.ArgumentParser, *, with_dim: bool = True) -> None:
    if with_dim:
        parser.add_argument("--d", type=int, default=3, help="Odd prime dimension.")
    parser.add_argument("--format", choices=FORMATS, default="table")
    parser.add_argument("--output", help="Write to this file instead of stdout.")
    parser.add_argument("--tolerance", type=float, help="Override the tolerance.")


def _hamiltonian_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--preset", choices=sorted(HAMILTONIAN_PRESETS), default="diag012"
    )
    group.add_argument("--matrix-file", help="JSON matrix file, see README.")


def _state_options(parser: argparse.ArgumentParser, default: str | None) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--state", default=default, help="Basis states, comma separated: p0,x1."
    )
    group.add_argument("--state-file", help="Density matrix in the matrix-file format.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditwigner",
        description="Discrete Wigner functions, propagators and path sums for qudits.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log at INFO.")
    verbosity.add_argument("--debug", action="store_true", help="Log at DEBUG.")

    commands = parser.add_subparsers(dest="command", required=True)

    wigner = commands.add_parser("wigner", help="Print the Wigner function of a state.")
    _common(wigner)
    _state_options(wigner, "p0")
    wigner.add_argument("--evolve", choices=sorted(HAMILTONIAN_PRESETS))
    wigner.add_argument("--chi-t", type=parse_time, default=0.0)
    wigner.set_defaults(handler=cmd_wigner)

    propagate = commands.add_parser("propagate", help="Build an exact Wigner kernel.")
    _common(propagate)
    _hamiltonian_options(propagate)
    _state_options(propagate, None)
    propagate.add_argument("--chi-t", type=parse_time, required=True)
    propagate.add_argument(
        "--form", choices=("fourier", "trace", "weyl"), default="fourier"
    )
    propagate.set_defaults(handler=cmd_propagate)

    path = commands.add_parser("path-integral", help="Evaluate the sliced path sum.")
    _common(path)
    _hamiltonian_options(path)
    path.add_argument("--chi-t", type=parse_time, required=True)
    path.add_argument("--N", dest="steps", type=int, default=1)
    path.add_argument("--mu0", type=_coords, help="Initial point, e.g. 0,0.")
    path.add_argument("--mun", type=_coords, help="Final point, e.g. 1,0.")
    path.add_argument("--compare-exact", action="store_true")
    path.add_argument("--brute-force", action="store_true")
    path.add_argument("--xi-zero", action="store_true", help="Summarize xi = 0 only.")
    path.set_defaults(handler=cmd_path_integral)

    comm = commands.add_parser("commensurability", help="Classify a linear slice.")
    _common(comm)
    comm.add_argument("--a", type=float, action="append", required=True)
    comm.add_argument("--b", type=float, action="append", required=True)
    comm.add_argument("--c", type=float, default=0.0)
    comm.add_argument("--tau", type=_time_literal, required=True)
    comm.add_argument("--k-tolerance", type=float)
    comm.set_defaults(handler=cmd_commensurability)

    ent = commands.add_parser("entanglement", help="Linear entropy of subsystem 1.")
    _common(ent)
    ent.add_argument("--chi-t-list", type=_time_list, required=True)
    ent.add_argument(
        "--routes",
        default="closed_form,exact,kernel,path_integral",
        help="Comma separated: " + ",".join(route.value for route in Route),
    )
    ent.add_argument("--N", dest="steps", type=int, default=1)
    ent.set_defaults(handler=cmd_entanglement)

    verify = commands.add_parser("verify", help="Run the acceptance suite.")
    _common(verify, with_dim=False)
    verify.add_argument(
        "--only", action="append", help="Check names: " + ", ".join(CHECKS)
    )
    verify.add_argument("--d", dest="dims", type=int, action="append")
    verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
        level = settings.log_level
        if args.debug:
            level = "DEBUG"
        elif args.verbose:
            level = "INFO"
        struclogger.init_struclogger(level)

        cfg = RunConfig.from_args(args)
        return int(args.handler(args, cfg))

    except (ValueError, KeyError, RuntimeError, OSError) as err:
        logger.error("%s failed: %s", args.command, err)
        sys.stderr.write(f"error: {err}\n")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
