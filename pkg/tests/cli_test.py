from __future__ import annotations

import argparse
import json
import math
import pathlib

import pytest
from pytest import CaptureFixture

from quditwigner import cli
from quditwigner.field_arith import make_prime_dim
from quditwigner.pseudo_classical import LinearHamiltonian
from quditwigner.verify import GOLDEN_QUTRIT


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("pi", math.pi),
        ("2pi/3", 2 * math.pi / 3),
        ("2*pi/3", 2 * math.pi / 3),
        ("-pi/2", -math.pi / 2),
        ("π/4", math.pi / 4),
        ("0.5pi", math.pi / 2),
        ("0.5", 0.5),
        ("1e-3", 1e-3),
    ],
)
def test_parse_time(text: str, expected: float) -> None:
    assert cli.parse_time(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["abc", "pi/0", "2pi3", ""])
def test_parse_time_rejects(text: str) -> None:
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_time(text)


def test_argparse_rejects_bad_time() -> None:
    with pytest.raises(SystemExit):
        cli.main(["commensurability", "--a", "1", "--b", "0", "--tau", "soon"])


def test_wigner_table(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["wigner", "--d", "3", "--state", "p0"])

    out = capsys.readouterr().out
    assert code == 0
    assert "sum: 1.000000000000" in out
    assert "negativity: 0.000000000000" in out


def test_wigner_golden_values_as_json(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["wigner", "--evolve", "diag012", "--chi-t", "pi", "--format", "json"]
    )

    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    for (m, n), expected in GOLDEN_QUTRIT.items():
        assert payload["values"][3 * m + n] == pytest.approx(expected, abs=1e-10)


def test_wigner_two_qudit_csv(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["wigner", "--state", "p0,x1", "--format", "csv"])

    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert lines[0] == "m1,n1,m2,n2,value"
    assert len(lines) == 82


def test_wigner_evolve_needs_matching_qudits(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["wigner", "--state", "p0", "--evolve", "xx", "--chi-t", "1"])

    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_wigner_writes_output_file(
    capsys: CaptureFixture[str], tmp_path: pathlib.Path
) -> None:
    target = tmp_path / "nested" / "w.csv"

    code = cli.main(["wigner", "--format", "csv", "--output", str(target)])

    assert code == 0
    assert capsys.readouterr().out == ""
    assert target.read_text(encoding="utf-8").startswith("m1,n1,value")


@pytest.mark.parametrize("form", ["fourier", "trace", "weyl"])
def test_propagate_forms(form: str, capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["propagate", "--preset", "xplusp", "--chi-t", "0.7", "--form", form]
    )

    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out.splitlines()[0])["dim"] == 3
    assert "trace_form_error" in out


def test_propagate_state(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["propagate", "--chi-t", "pi", "--state", "p0", "--format", "json"]
    )

    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["values"][3] == pytest.approx(GOLDEN_QUTRIT[(1, 0)], abs=1e-10)


def test_propagate_matrix_file(capsys: CaptureFixture[str], tmpdir) -> None:
    path = tmpdir.join("h.json")
    entries = [[float(row == col), 0.0] for row in range(3) for col in range(3)]
    path.write(json.dumps({"dim": 3, "entries": entries}))

    code = cli.main(["propagate", "--matrix-file", str(path), "--chi-t", "0.3"])

    assert code == 0
    assert "fourier" in capsys.readouterr().out


def test_path_integral_is_exact_for_diagonal(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["path-integral", "--chi-t", "0.5", "--N", "2", "--compare-exact"]
    )

    out = capsys.readouterr().out
    assert code == 0
    assert "81 entries" in out


def test_path_integral_flags_trotter_error(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        [
            "path-integral",
            "--preset",
            "xplusp",
            "--chi-t",
            "1.0",
            "--N",
            "1",
            "--compare-exact",
        ]
    )

    assert code == 1
    assert "81 entries" in capsys.readouterr().out


def test_path_integral_single_entry(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        [
            "path-integral",
            "--chi-t",
            "0.5",
            "--N",
            "2",
            "--mu0",
            "0,0",
            "--mun",
            "1,0",
            "--brute-force",
            "--format",
            "json",
        ]
    )

    (record,) = json.loads(capsys.readouterr().out)
    assert code == 0
    assert list(record) == [
        "N",
        "t",
        "mu0",
        "muN",
        "value",
        "exact_value",
        "abs_error",
    ]
    assert record["N"] == 2
    assert record["mu0"] == [0, 0]
    assert record["muN"] == [1, 0]
    assert record["abs_error"] < 1e-10


def test_path_integral_xi_zero(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        [
            "path-integral",
            "--preset",
            "xx",
            "--chi-t",
            "0.5",
            "--xi-zero",
            "--format",
            "json",
        ]
    )

    (summary,) = json.loads(capsys.readouterr().out)
    assert code == 0
    assert summary["max_imag"] == pytest.approx(math.sin(1.5) / 81, rel=1e-9)
    assert summary["distance_to_exact"] > 0


def test_commensurability_strict(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["commensurability", "--a", "2", "--b", "0", "--tau", "pi/3"]
        + ["--format", "json"]
    )

    (row,) = json.loads(capsys.readouterr().out)
    assert code == 0
    assert row["class"] == "strict"
    assert "commensurability" not in row
    assert row["predicted_shift"] == [[0, 2]]
    assert row["kernel_is_permutation"] is True


def test_commensurability_decimal_tau_snaps_to_grid(
    capsys: CaptureFixture[str],
) -> None:
    code = cli.main(
        ["commensurability", "--d", "3", "--a", "1", "--b", "0", "--tau", "2.0944"]
        + ["--format", "json"]
    )

    (row,) = json.loads(capsys.readouterr().out)
    assert code == 0
    assert row["tau"] == pytest.approx(2 * math.pi / 3, abs=1e-12)
    assert row["class"] == "strict"
    # (0, -1) mod 3
    assert row["predicted_shift"] == [[0, 2]]
    assert row["kernel_is_permutation"] is True


def test_commensurability_coarse_decimal_is_not_snapped(
    capsys: CaptureFixture[str],
) -> None:
    code = cli.main(
        ["commensurability", "--a", "1", "--b", "0", "--tau", "2.5"]
        + ["--format", "json"]
    )

    (row,) = json.loads(capsys.readouterr().out)
    assert code == 0
    assert row["tau"] == pytest.approx(2.5)
    assert row["class"] == "incommensurate"
    assert row["predicted_shift"] is None


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("2.0944", 2 * math.pi / 3),
        ("1.0472", math.pi / 3),
        ("2pi/3", 2 * math.pi / 3),
        ("2.1", 2 * math.pi / 3),
        ("2.5", 2.5),
        ("2", 2.0),
    ],
)
def test_snap_tau(text: str, expected: float) -> None:
    hamiltonian = LinearHamiltonian.single(1.0, 0.0)

    result = cli.snap_tau(cli._time_literal(text), hamiltonian, make_prime_dim(3))

    assert result == pytest.approx(expected, abs=1e-12)


def test_commensurability_two_qudits(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        [
            "commensurability",
            "--a",
            "2",
            "--b",
            "0",
            "--a",
            "0",
            "--b",
            "4",
            "--tau",
            "pi/3",
            "--format",
            "csv",
        ]
    )

    out = capsys.readouterr().out
    assert code == 0
    assert "strict" in out


def test_commensurability_needs_pairs(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["commensurability", "--a", "2", "--a", "1", "--b", "0", "--tau", "pi/3"]
    )

    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_entanglement_csv(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        [
            "entanglement",
            "--chi-t-list",
            "0.25,2pi/3",
            "--routes",
            "closed_form,exact",
            "--format",
            "csv",
        ]
    )

    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert lines[0].startswith("chi_t,purity,linear_entropy,source")
    assert len(lines) == 5


def test_entanglement_unknown_route(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["entanglement", "--chi-t-list", "0.1", "--routes", "guess"])

    assert code == 2


def test_verify_subset(capsys: CaptureFixture[str]) -> None:
    code = cli.main(
        ["verify", "--only", "golden-qutrit,kernel-forms", "--d", "3"]
        + ["--format", "json"]
    )

    results = json.loads(capsys.readouterr().out)
    assert code == 0
    assert [result["name"] for result in results] == ["golden-qutrit", "kernel-forms"]
    assert all(result["passed"] for result in results)


def test_verify_unknown_check(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["verify", "--only", "nope"])

    assert code == 2
    assert "Unknown check" in capsys.readouterr().err


def test_unsupported_dimension(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["wigner", "--d", "4"])

    assert code == 2
    assert "odd prime" in capsys.readouterr().err


def test_empty_state_is_bad_input(capsys: CaptureFixture[str]) -> None:
    code = cli.main(["wigner", "--state", ""])

    assert code == 2
    assert "basis state" in capsys.readouterr().err


def test_malformed_matrix_file_is_bad_input(
    tmp_path: pathlib.Path, capsys: CaptureFixture[str]
) -> None:
    path = tmp_path / "h.json"
    path.write_text(json.dumps({"dim": 3, "entries": 12}), encoding="utf-8")

    code = cli.main(["propagate", "--matrix-file", str(path), "--chi-t", "0.5"])

    assert code == 2
    assert "error:" in capsys.readouterr().err
