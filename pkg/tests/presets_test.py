from __future__ import annotations

import json

import numpy
import pytest

from quditwigner import presets
from quditwigner.field_arith import make_prime_dim
from quditwigner.linalg_core import NotHermitianError
from quditwigner.linalg_core import ShapeMismatchError
from quditwigner.linalg_core import is_hermitian
from quditwigner.presets import UnknownPresetError


def _write_matrix(path, size: int, matrix: numpy.ndarray) -> str:
    entries = [[value.real, value.imag] for value in matrix.reshape(-1).tolist()]
    path.write(json.dumps({"dim": size, "entries": entries}))
    return str(path)


def test_momentum_operator_is_hermitian_with_position_spectrum() -> None:
    dim = make_prime_dim(5)

    momentum = presets.momentum_operator(dim)

    assert is_hermitian(momentum, 1e-12)
    assert numpy.allclose(numpy.linalg.eigvalsh(momentum), numpy.arange(5))


def test_momentum_state_is_eigenstate() -> None:
    dim = make_prime_dim(3)

    state = presets.momentum_state(dim, 2)

    assert numpy.allclose(presets.momentum_operator(dim) @ state, 2 * state)


def test_position_state_wraps_index() -> None:
    dim = make_prime_dim(3)

    assert numpy.allclose(presets.position_state(dim, 4), [0, 1, 0])


def test_density_normalizes() -> None:
    rho = presets.density(numpy.array([1.0, 1.0, 0.0]))

    assert numpy.trace(rho) == pytest.approx(1.0)
    assert numpy.allclose(rho @ rho, rho)


@pytest.mark.parametrize("name", ["p0", "x1", "P2", " x0 "])
def test_make_state_labels(name: str) -> None:
    state = presets.make_state(name, make_prime_dim(3))

    assert numpy.linalg.norm(state) == pytest.approx(1.0)


@pytest.mark.parametrize("name", ["", "y0", "p", "x-1"])
def test_make_state_rejects_unknown(name: str) -> None:
    with pytest.raises(UnknownPresetError):
        presets.make_state(name, make_prime_dim(3))


@pytest.mark.parametrize(
    ("name", "n_qudits"), [("diag012", 1), ("xx", 2), ("xplusp", 1)]
)
def test_hamiltonian_presets(name: str, n_qudits: int) -> None:
    dim = make_prime_dim(3)

    hamiltonian, count = presets.make_hamiltonian(name, dim)

    assert count == n_qudits
    assert hamiltonian.size == 3**n_qudits
    assert hamiltonian.name == name


def test_unknown_hamiltonian() -> None:
    with pytest.raises(UnknownPresetError, match="known presets"):
        presets.make_hamiltonian("zz", make_prime_dim(3))


def test_load_matrix_file(tmpdir) -> None:
    dim = make_prime_dim(3)
    matrix = presets.momentum_operator(dim)
    path = _write_matrix(tmpdir.join("h.json"), 3, matrix)

    hamiltonian, n_qudits = presets.load_matrix_file(path, dim, name="p")

    assert n_qudits == 1
    assert hamiltonian.name == "p"
    assert numpy.allclose(hamiltonian.matrix, matrix)


def test_read_matrix_file_two_qudits(tmpdir) -> None:
    dim = make_prime_dim(3)
    path = _write_matrix(tmpdir.join("rho.json"), 9, numpy.eye(9) / 9)

    matrix, n_qudits = presets.read_matrix_file(path, dim)

    assert n_qudits == 2
    assert numpy.allclose(matrix, numpy.eye(9) / 9)


def test_read_matrix_file_rejects_bad_sizes(tmpdir) -> None:
    dim = make_prime_dim(3)
    short = tmpdir.join("short.json")
    short.write(json.dumps({"dim": 3, "entries": [[1, 0]] * 8}))
    wrong_power = _write_matrix(tmpdir.join("four.json"), 4, numpy.eye(4))

    with pytest.raises(ShapeMismatchError):
        presets.read_matrix_file(str(short), dim)

    with pytest.raises(ShapeMismatchError):
        presets.read_matrix_file(wrong_power, dim)


def test_load_matrix_file_rejects_non_hermitian(tmpdir) -> None:
    dim = make_prime_dim(3)
    matrix = numpy.zeros((3, 3), dtype=complex)
    matrix[0, 1] = 1.0
    path = _write_matrix(tmpdir.join("bad.json"), 3, matrix)

    with pytest.raises(NotHermitianError):
        presets.load_matrix_file(path, dim)


def test_missing_matrix_file() -> None:
    with pytest.raises(FileNotFoundError):
        presets.read_matrix_file("thisfiledoesnotexist.json", make_prime_dim(3))


@pytest.mark.parametrize(
    "payload",
    [
        {"dim": 3, "entries": 7},
        {"dim": 3, "entries": "abc"},
        {"dim": "three", "entries": [[1, 0]] * 9},
        {"entries": [[1, 0]] * 9},
        [[1, 0]] * 9,
    ],
)
def test_read_matrix_file_rejects_malformed_payload(tmpdir, payload: object) -> None:
    path = tmpdir.join("malformed.json")
    path.write(json.dumps(payload))

    with pytest.raises(ShapeMismatchError):
        presets.read_matrix_file(str(path), make_prime_dim(3))
