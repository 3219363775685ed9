from __future__ import annotations

import numpy
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from quditwigner import weyl_transform
from quditwigner.field_arith import make_prime_dim
from quditwigner.field_arith import omega_power
from quditwigner.linalg_core import ShapeMismatchError
from quditwigner.presets import density
from quditwigner.presets import momentum_state
from quditwigner.presets import position_operator
from quditwigner.presets import position_state
from quditwigner.propagator import phase_space_purity
from quditwigner.weyl_transform import NotADensityMatrixError
from quditwigner.weyl_transform import WignerFunction

DIMS = [3, 5, 7]


def _random_density(size: int, seed: int) -> numpy.ndarray:
    rng = numpy.random.default_rng(seed)
    values = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    rho = values @ values.conj().T
    return rho / numpy.trace(rho)


@pytest.mark.parametrize("d", DIMS)
def test_dft_is_unitary(d: int) -> None:
    fourier = weyl_transform.dft_operator(make_prime_dim(d))

    assert numpy.allclose(fourier @ fourier.conj().T, numpy.eye(d))


@pytest.mark.parametrize("d", DIMS)
def test_clock_shift_commutation(d: int) -> None:
    dim = make_prime_dim(d)
    clock, shift = weyl_transform.clock_shift(dim)

    assert numpy.allclose(clock @ shift, omega_power(dim, 1) * shift @ clock)
    assert numpy.allclose(shift @ position_state(dim, 0), position_state(dim, 1))


@pytest.mark.parametrize("d", DIMS)
def test_displacement_matches_clock_shift_definition(d: int) -> None:
    dim = make_prime_dim(d)
    clock, shift = weyl_transform.clock_shift(dim)
    k, j = 2, 1

    expected = (
        omega_power(dim, -k * j * dim.half_inv)
        * numpy.linalg.matrix_power(clock, k)
        @ numpy.linalg.matrix_power(shift, j)
    )

    assert numpy.allclose(weyl_transform.displacement(dim, k, j), expected)


@settings(max_examples=40)
@given(
    st.sampled_from(DIMS),
    st.integers(0, 10),
    st.integers(0, 10),
    st.integers(0, 10),
    st.integers(0, 10),
)
def test_displacement_multiplication_rule(
    d: int, k1: int, j1: int, k2: int, j2: int
) -> None:
    dim = make_prime_dim(d)
    table = weyl_transform.displacement_set(dim)

    product = table[k1, j1] @ table[k2, j2]
    phase = omega_power(dim, dim.half_inv * (k1 * j2 - k2 * j1))

    assert numpy.allclose(product, phase * table[k1 + k2, j1 + j2])


@pytest.mark.parametrize("d", DIMS)
def test_displacement_adjoint_and_trace(d: int) -> None:
    dim = make_prime_dim(d)
    table = weyl_transform.displacement_set(dim)
    adjoints = table.adjoints()

    for k in range(d):
        for j in range(d):
            assert numpy.allclose(adjoints[k, j], table[-k, -j])
            expected = d if k == j == 0 else 0
            assert numpy.trace(table[k, j]) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n_qudits", [1, 2])
def test_inverse_weyl_recovers_operator(n_qudits: int) -> None:
    dim = make_prime_dim(3)
    size = 3**n_qudits
    rng = numpy.random.default_rng(11)
    operator = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))

    symbol = weyl_transform.weyl_symbol(operator, dim, n_qudits)

    assert numpy.allclose(weyl_transform.inverse_weyl(symbol), operator)


def test_weyl_symbol_of_identity() -> None:
    dim = make_prime_dim(5)

    symbol = weyl_transform.weyl_symbol(numpy.eye(5), dim)

    assert symbol.at(0, 0) == pytest.approx(5)
    assert numpy.allclose(numpy.delete(symbol.values, 0), 0)
    assert symbol.grid().shape == (5, 5)


def test_weyl_symbol_checks_size() -> None:
    with pytest.raises(ShapeMismatchError):
        weyl_transform.weyl_symbol(numpy.eye(4), make_prime_dim(3), 1)


@pytest.mark.parametrize("d", DIMS)
def test_phase_point_operators_are_a_trace_orthogonal_hermitian_frame(d: int) -> None:
    dim = make_prime_dim(d)
    operators = weyl_transform.phase_point_operators(dim).operators

    gram = numpy.einsum("pab,qba->pq", operators, operators)

    assert numpy.allclose(operators, operators.conj().transpose(0, 2, 1))
    assert numpy.allclose(numpy.einsum("paa->p", operators), 1.0)
    assert numpy.allclose(gram, d * numpy.eye(d * d))
    assert numpy.allclose(operators.sum(axis=0), d * numpy.eye(d))


def test_composite_phase_points_are_tensor_products() -> None:
    dim = make_prime_dim(3)
    single = weyl_transform.phase_point_operators(dim, 1)
    double = weyl_transform.phase_point_operators(dim, 2)

    expected = numpy.kron(single[(1, 2)], single[(0, 1)])

    assert numpy.allclose(double[(1, 2, 0, 1)], expected)


@pytest.mark.parametrize("d", DIMS)
def test_position_state_wigner_is_a_vertical_line(d: int) -> None:
    dim = make_prime_dim(d)

    wigner = weyl_transform.wigner_function(density(position_state(dim, 1)), dim)

    expected = numpy.zeros((d, d))
    expected[1, :] = 1 / d
    assert numpy.allclose(wigner.grid(), expected)
    assert numpy.allclose(weyl_transform.position_marginal(wigner), numpy.eye(d)[1])
    assert numpy.allclose(weyl_transform.momentum_marginal(wigner), 1 / d)


@pytest.mark.parametrize("d", DIMS)
def test_momentum_state_wigner_is_a_horizontal_line(d: int) -> None:
    dim = make_prime_dim(d)

    wigner = weyl_transform.wigner_function(density(momentum_state(dim, 0)), dim)

    expected = numpy.zeros((d, d))
    expected[:, 0] = 1 / d
    assert numpy.allclose(wigner.grid(), expected)
    assert weyl_transform.negativity(wigner) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("n_qudits", [1, 2])
def test_wigner_routes_agree_and_invert(n_qudits: int) -> None:
    dim = make_prime_dim(3)
    rho = _random_density(3**n_qudits, 17 + n_qudits)

    wigner = weyl_transform.wigner_function(rho, dim, n_qudits)
    via_phase_points = weyl_transform.wigner_from_phase_points(rho, dim, n_qudits)

    assert numpy.allclose(wigner.values, via_phase_points.values)
    assert wigner.total() == pytest.approx(1.0)
    assert numpy.allclose(weyl_transform.density_from_wigner(wigner), rho)
    assert phase_space_purity(wigner) == pytest.approx(
        numpy.trace(rho @ rho).real
    )


def test_wigner_function_rejects_bad_inputs() -> None:
    dim = make_prime_dim(3)

    with pytest.raises(NotADensityMatrixError):
        weyl_transform.wigner_function(2 * numpy.eye(3) / 3, dim)

    with pytest.raises(NotADensityMatrixError):
        weyl_transform.wigner_function(numpy.diag([1.5, -0.5, 0.0]), dim)

    with pytest.raises(NotADensityMatrixError):
        non_hermitian = numpy.eye(3) / 3
        non_hermitian[0, 1] = 0.2
        weyl_transform.wigner_function(non_hermitian, dim)


def test_negativity_of_evolved_state() -> None:
    dim = make_prime_dim(3)
    unitary = unitary_group.rvs(3, random_state=numpy.random.default_rng(23))
    rho = density(unitary @ position_state(dim, 0))

    wigner = weyl_transform.wigner_function(rho, dim)

    expected = -wigner.values[wigner.values < 0].sum()
    assert weyl_transform.negativity(wigner) == pytest.approx(expected)


def test_phase_space_function_of_position_operator() -> None:
    dim = make_prime_dim(5)

    values = weyl_transform.real_phase_space_function(position_operator(dim), dim)

    expected = numpy.repeat(numpy.arange(5.0), 5)
    assert numpy.allclose(values, expected)
    assert numpy.allclose(weyl_transform.quantize(values, dim), position_operator(dim))


def test_real_phase_space_function_rejects_non_hermitian() -> None:
    dim = make_prime_dim(3)
    _, shift = weyl_transform.clock_shift(dim)

    with pytest.raises(ValueError):
        weyl_transform.real_phase_space_function(shift, dim)


def test_quantize_checks_length() -> None:
    with pytest.raises(ShapeMismatchError):
        weyl_transform.quantize(numpy.zeros(8), make_prime_dim(3))


def test_reduce_wigner_of_product_state() -> None:
    dim = make_prime_dim(3)
    first = density(position_state(dim, 2))
    second = density(momentum_state(dim, 1))

    joint = weyl_transform.wigner_function(numpy.kron(first, second), dim, 2)

    kept_first = weyl_transform.reduce_wigner(joint, 0)
    kept_second = weyl_transform.reduce_wigner(joint, (1,))
    assert numpy.allclose(
        kept_first.values, weyl_transform.wigner_function(first, dim).values
    )
    assert numpy.allclose(
        kept_second.values, weyl_transform.wigner_function(second, dim).values
    )
    assert weyl_transform.reduce_wigner(joint, (0, 1)).n_qudits == 2


def test_reduce_wigner_rejects_bad_index() -> None:
    dim = make_prime_dim(3)
    wigner = WignerFunction(dim, 1, numpy.full(9, 1 / 9))

    with pytest.raises(ShapeMismatchError):
        weyl_transform.reduce_wigner(wigner, 1)


def test_wigner_at_reads_points() -> None:
    dim = make_prime_dim(3)
    wigner = weyl_transform.wigner_function(density(position_state(dim, 0)), dim)

    assert wigner.at((0, 2)) == pytest.approx(1 / 3)
    assert wigner.at((3, 2)) == pytest.approx(1 / 3)
    assert wigner.at((2, 2)) == pytest.approx(0.0, abs=1e-14)
