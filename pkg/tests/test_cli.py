import json

import pytest

from mbqc_gauge.cli import CommandConfig, InputError, main, parse_inputs
from mbqc_gauge.graph_state import pattern_from_dict, pattern_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def rx_circuit(tmp_path):
    path = tmp_path / "rx.json"
    path.write_text(json.dumps({"n": 1, "gates": [{"axis": "X1", "theta": 0.4}]}))
    return path


def compile_to(capsys, circuit, out, *extra):
    code, _, err = run(capsys, "compile", "--input", str(circuit), "--out", str(out), *extra)
    assert code == 0, err
    return out


def test_resources_plain_and_json(capsys):
    assert run(capsys, "resources", "--algo", "qft", "--n", "4", "--method", "mcalculus")[:2] == (0, "56\n")
    code, out, _ = run(capsys, "resources", "--algo", "qaoa-complete", "--n", "4", "--json")
    assert code == 0
    assert json.loads(out) == {
        "method": "fully-symmetric",
        "algo": "qaoa-complete",
        "n": 4,
        "p": 1,
        "qubit_count": 18,
        "table_value": 6,
    }


def test_empty_circuit_compile_verify(capsys, tmp_path):
    circuit = tmp_path / "c.json"
    circuit.write_text(json.dumps({"n": 2, "gates": []}))
    pattern = compile_to(capsys, circuit, tmp_path / "p.json")
    code, out, _ = run(capsys, "verify", "--circuit", str(circuit), "--pattern", str(pattern))
    assert code == 0 and out.endswith("PASS\n")


@pytest.mark.parametrize("mode", ["postselect", "byproduct"])
def test_rx_round_trip(capsys, tmp_path, rx_circuit, mode):
    pattern = compile_to(capsys, rx_circuit, tmp_path / "p.json", "--inputs", "0.6,0.8j")
    code, out, _ = run(
        capsys, "verify", "--circuit", str(rx_circuit), "--pattern", str(pattern),
        "--input", "0.6,0.8j", "--mode", mode, "--json",
    )
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["fidelity"] > 1 - 1e-12


def test_clifford_gauge_compile(capsys, tmp_path, rx_circuit):
    pattern = compile_to(capsys, rx_circuit, tmp_path / "p.json", "--gauge", "clifford")
    code, _, _ = run(capsys, "verify", "--circuit", str(rx_circuit), "--pattern", str(pattern), "--mode", "byproduct")
    assert code == 0


def test_corrupted_pattern_fails(capsys, tmp_path, rx_circuit):
    pattern = compile_to(capsys, rx_circuit, tmp_path / "p.json", "--inputs", "0.6,0.8")
    obj = json.loads(pattern.read_text())
    broken = pattern_to_dict(pattern_from_dict(obj).toggle_edge(2, 3))
    pattern.write_text(json.dumps(broken))
    code, out, _ = run(capsys, "verify", "--circuit", str(rx_circuit), "--pattern", str(pattern), "--input", "0.6,0.8")
    assert code == 1 and out.endswith("FAIL\n")


def test_export_dot(capsys, tmp_path, rx_circuit):
    pattern = compile_to(capsys, rx_circuit, tmp_path / "p.json")
    code, out, _ = run(capsys, "export", "--pattern", str(pattern))
    assert code == 0 and out.startswith("graph") and "1 -- 2" in out


def test_residual_command(capsys, tmp_path, rx_circuit):
    pattern = compile_to(capsys, rx_circuit, tmp_path / "p.json")
    code, out, _ = run(capsys, "residual", "--graph", str(pattern))
    terms = json.loads(out)
    assert code == 0 and {tuple(t["zs"]) for t in terms} <= {(), (3,)}


def test_deterministic_with_seed(capsys, tmp_path):
    circuit = tmp_path / "c.json"
    circuit.write_text(json.dumps({"n": 1, "gates": [{"axis": "Z1", "theta": 0.1}] * 14}))
    pattern = compile_to(capsys, circuit, tmp_path / "p.json")
    argv = ["verify", "--circuit", str(circuit), "--pattern", str(pattern), "--mode", "byproduct", "--seed", "3"]
    first = run(capsys, *argv)
    assert first == run(capsys, *argv)
    assert first[0] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["resources", "--algo", "shor", "--n", "4"],
        ["resources", "--algo", "generic", "--n", "4", "--method", "mcalculus"],
        ["compile", "--input", "/nonexistent.json"],
        ["verify", "--circuit", "x", "--pattern", "y", "--tol", "-1"],
        [],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert "error" in json.loads(err)


def test_malformed_files_exit_2(capsys, tmp_path, rx_circuit):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "compile", "--input", str(bad))[0] == 2
    bad.write_text(json.dumps({"n": 1, "gates": [{"axis": "X1 Z1", "theta": 1}]}))
    assert run(capsys, "compile", "--input", str(bad))[0] == 2
    assert run(capsys, "compile", "--input", str(rx_circuit), "--inputs", "1,2,3")[0] == 2


def test_parse_inputs():
    assert parse_inputs(None, 2) == [(1.0, 0.0)] * 2
    ((a, b),) = parse_inputs("3,4j", 1)
    assert (a, b) == (0.6, 0.8j)
    with pytest.raises(InputError, match="zero"):
        parse_inputs("0,0", 1)
    with pytest.raises(InputError, match="expected 2"):
        parse_inputs("1,0", 2)
    with pytest.raises(InputError):
        CommandConfig("verify", tol=0)
