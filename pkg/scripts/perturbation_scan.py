"""Limit cycles of x' = eps cos(kt)|x| + sin t across a range of eps.

    python scripts/perturbation_scan.py --k 4 --eps 0.2 0.1 0.05 0.025 --out runs/perturbation
"""

import argparse
import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

from pwlcenter.analysis import center_classify
from pwlcenter.families import cos_perturbation


@dataclass
class ScanConfig:
    k: int = 4
    eps: list = field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    out: Path | None = None


def run(cfg: ScanConfig) -> list:
    rows = []
    for eps in cfg.eps:
        t0 = time.perf_counter()
        rep = center_classify(cos_perturbation(cfg.k, eps))
        dt = time.perf_counter() - t0
        rows.append((eps, rep, dt))
        cycles = ", ".join(f"{c:.6f}" for c in rep.limit_cycles)
        print(f"eps={eps:<7g} {rep.verdict:<18} witness={rep.witness.kind:<5} "
              f"max|D|={rep.max_abs_displacement:.3e} cycles=[{cycles}] ({dt:.2f}s)")
        if cfg.out is not None:
            cfg.out.mkdir(parents=True, exist_ok=True)
            with open(cfg.out / f"displacement_k{cfg.k}_eps{eps:g}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["x", "displacement"])
                w.writerows((f"{x:.17g}", f"{d:.17g}") for x, d in rep.samples)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    run(ScanConfig(args.k, args.eps, args.out))


if __name__ == "__main__":
    main()
