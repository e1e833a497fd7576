"""Print qubit counts and M-Calculus / fully symmetric ratios.

    python3 scripts/resource_table.py --n 4 16 64 256 --p 1 2
"""

import argparse
from dataclasses import dataclass, field

from mbqc_gauge.compiler import count_resources


@dataclass
class TableConfig:
    ns: list = field(default_factory=lambda: [4, 16, 64, 256])
    ps: list = field(default_factory=lambda: [1])
    algos: tuple = ("qft", "qaoa-cyclic", "qaoa-complete")


def rows(cfg: TableConfig):
    for algo in cfg.algos:
        for p in cfg.ps:
            for n in cfg.ns:
                mc = count_resources(algo, n, p, "mcalculus")
                fs = count_resources(algo, n, p, "fully-symmetric")
                yield algo, n, p, mc.qubit_count, fs.qubit_count, fs.table_value, float(mc.qubit_count / fs.qubit_count)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=TableConfig().ns)
    ap.add_argument("--p", type=int, nargs="+", default=TableConfig().ps)
    args = ap.parse_args()
    cfg = TableConfig(ns=args.n, ps=args.p)
    print(f"{'algo':<14}{'n':>6}{'p':>5}{'mcalc':>10}{'fully':>10}{'tabulated':>11}{'ratio':>8}")
    for algo, n, p, mc, fs, tab, ratio in rows(cfg):
        print(f"{algo:<14}{n:>6}{p:>5}{mc:>10}{fs:>10}{str(tab):>11}{ratio:>8.3f}")


if __name__ == "__main__":
    main()
