"""Command-line front end: compile, verify, residual, resources, export.

Exit codes: 0 success, 1 verification failure, 2 input error.  Errors go to
stderr as one line of JSON ``{"error": ...}``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .compiler import (
    ALGOS,
    METHODS,
    Circuit,
    CompileError,
    compile,
    compile_clifford_gauge_rx,
    count_resources,
)
from .graph_state import PatternError, build_state, export, pattern_from_dict
from .residual import MeasGenerator, pattern_measgens, residual_by_recursion
from .simulator import SimulatorError, verify_compiled


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would print usage text instead
        raise InputError(message)


@dataclass(frozen=True)
class CommandConfig:
    subcommand: str
    tol: float = 1e-9
    seed: int = 0
    as_json: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError(f"tolerance must be positive, got {self.tol}")


def parse_inputs(text: str | None, n: int) -> list[tuple[complex, complex]]:
    """``"a,b;a,b"`` with Python complex literals, e.g. ``"0.6,0.8j"``."""
    if text is None:
        return [(1.0, 0.0)] * n
    pairs = []
    for chunk in text.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2:
            raise InputError(f"input {chunk!r} must be 'a,b'")
        try:
            a, b = complex(parts[0]), complex(parts[1])
        except ValueError as exc:
            raise InputError(f"cannot parse input {chunk!r}: {exc}") from None
        nrm = math.hypot(abs(a), abs(b))
        if nrm == 0:
            raise InputError(f"input {chunk!r} is the zero vector")
        pairs.append((a / nrm, b / nrm))
    if len(pairs) != n:
        raise InputError(f"expected {n} input pairs, got {len(pairs)}")
    return pairs


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _clifford_rx(circuit: Circuit, coeffs):
    if circuit.n != 1 or circuit.clifford_prefix or any(g.kind != "X" for g in circuit.gates):
        raise InputError("the clifford gauge handles single-qubit X rotations only")
    theta = sum(g.theta for g in circuit.gates)
    # the Clifford-gauge pattern implements cos(t/2) - i sin(t/2) X
    return compile_clifford_gauge_rx(-2 * theta, coeffs)


def cmd_compile(args, cfg: CommandConfig) -> int:
    circuit = Circuit.from_json(_read_json(args.input))
    coeffs = parse_inputs(args.inputs, circuit.n)
    if args.gauge == "clifford":
        pattern = _clifford_rx(circuit, coeffs)
    else:
        pattern = compile(circuit, coeffs)
    fmt = "json" if cfg.as_json else args.emit
    _write(export(pattern, fmt), args.out)
    return 0


def cmd_verify(args, cfg: CommandConfig) -> int:
    circuit = Circuit.from_json(_read_json(args.circuit))
    pattern = pattern_from_dict(_read_json(args.pattern))
    coeffs = parse_inputs(args.input, circuit.n)
    if len(pattern.outputs) != circuit.n:
        raise InputError(f"pattern has {len(pattern.outputs)} outputs, circuit {circuit.n} qubits")
    fid = verify_compiled(circuit, pattern, coeffs, args.mode, seed=cfg.seed)
    ok = fid >= 1 - cfg.tol
    if cfg.as_json:
        print(json.dumps({"fidelity": fid, "pass": ok, "mode": args.mode, "tol": cfg.tol}, sort_keys=True))
    else:
        print(f"fidelity {fid:.15f} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _meas_from_json(items) -> list[MeasGenerator]:
    out = []
    for d in items:
        out.append(MeasGenerator(complex(*d["alpha"]), complex(*d["beta"]), int(d["qubit"])))
    return out


def cmd_residual(args, cfg: CommandConfig) -> int:
    pattern = pattern_from_dict(_read_json(args.graph))
    measgens = _meas_from_json(_read_json(args.meas)) if args.meas else pattern_measgens(pattern)
    _, res = residual_by_recursion(build_state(pattern), measgens)
    print(json.dumps(res.to_json(), sort_keys=True))
    return 0


def cmd_resources(args, cfg: CommandConfig) -> int:
    report = count_resources(args.algo, args.n, args.p, args.method)
    if cfg.as_json:
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        print(report.to_json()["qubit_count"])
    return 0


def cmd_export(args, cfg: CommandConfig) -> int:
    pattern = pattern_from_dict(_read_json(args.pattern))
    fmt = "json" if cfg.as_json else args.format
    _write(export(pattern, fmt), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="mbqc-gauge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", parents=[common], help="circuit JSON -> pattern")
    p.add_argument("--input", required=True, help="circuit JSON file")
    p.add_argument("--gauge", choices=["fully-symmetric", "clifford"], default="fully-symmetric")
    p.add_argument("--emit", choices=["json", "dot"], default="json")
    p.add_argument("--inputs", help="input coefficients 'a,b;a,b' (default |0>)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", parents=[common], help="simulate pattern against circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--input", help="input coefficients 'a,b;a,b' (default |0>)")
    p.add_argument("--mode", choices=["postselect", "byproduct"], default="postselect")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("residual", parents=[common], help="residual of a graph's measurements")
    p.add_argument("--graph", required=True)
    p.add_argument("--meas", help='JSON list of {"qubit", "alpha": [re,im], "beta": [re,im]}')
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("resources", parents=[common], help="qubit counts")
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--method", choices=METHODS, default="fully-symmetric")
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("export", parents=[common], help="pattern JSON -> DOT or JSON")
    p.add_argument("--pattern", required=True)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def _fail(message: str) -> int:
    sys.stderr.write(json.dumps({"error": message}) + "\n")
    return 2


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = CommandConfig(args.cmd, getattr(args, "tol", 1e-9), args.seed, args.json)
        return args.func(args, cfg)
    except (InputError, CompileError, PatternError, SimulatorError) as exc:
        return _fail(str(exc))
    except (KeyError, TypeError, ValueError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail(f"{exc.filename}: {exc.strerror}")


if __name__ == "__main__":
    sys.exit(main())
