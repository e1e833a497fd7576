"""Compile random rotation circuits and report the worst fidelity per mode.

    python3 scripts/soundness_sweep.py --trials 500 --max-qubits 3 --mode byproduct
"""

import argparse
import math
import time
from dataclasses import dataclass

import numpy as np

from mbqc_gauge.compiler import Circuit, RotationGate, compile
from mbqc_gauge.pauli import CliffordGate
from mbqc_gauge.simulator import verify_compiled


@dataclass
class SweepConfig:
    trials: int = 200
    max_qubits: int = 3
    max_gates: int = 5
    clifford_prob: float = 0.3
    mode: str = "postselect"
    seed: int = 0


def random_instance(rng, cfg: SweepConfig):
    n = int(rng.integers(1, cfg.max_qubits + 1))
    gates = []
    for _ in range(int(rng.integers(0, cfg.max_gates + 1))):
        support = [q for q in range(1, n + 1) if rng.random() < 0.5] or [int(rng.integers(1, n + 1))]
        kind = "X" if rng.random() < 0.5 else "Z"
        gates.append(RotationGate.parse(" ".join(f"{kind}{q}" for q in support), rng.uniform(-math.pi, math.pi)))
    prefix = []
    if n > 1 and rng.random() < cfg.clifford_prob:
        i, j = (int(q) for q in rng.choice(np.arange(1, n + 1), 2, replace=False))
        prefix = [CliffordGate.h(i), CliffordGate.cx(i, j)]
    coeffs = []
    for _ in range(n):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        coeffs.append((complex(v[0]), complex(v[1])))
    return Circuit(n, tuple(gates), tuple(prefix)), coeffs


def sweep(cfg: SweepConfig):
    rng = np.random.default_rng(cfg.seed)
    worst, sizes = 1.0, []
    for _ in range(cfg.trials):
        circuit, coeffs = random_instance(rng, cfg)
        pattern = compile(circuit, coeffs)
        sizes.append(len(pattern.vertices))
        worst = min(worst, verify_compiled(circuit, pattern, coeffs, cfg.mode, seed=cfg.seed))
    return worst, sizes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=SweepConfig.trials)
    ap.add_argument("--max-qubits", type=int, default=SweepConfig.max_qubits)
    ap.add_argument("--max-gates", type=int, default=SweepConfig.max_gates)
    ap.add_argument("--mode", choices=["postselect", "byproduct"], default=SweepConfig.mode)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = ap.parse_args()
    cfg = SweepConfig(args.trials, args.max_qubits, args.max_gates, mode=args.mode, seed=args.seed)
    start = time.perf_counter()
    worst, sizes = sweep(cfg)
    print(f"trials {cfg.trials}  mode {cfg.mode}  worst fidelity {worst:.15f}")
    print(f"pattern size mean {np.mean(sizes):.1f}  max {max(sizes)}  elapsed {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()
