"""Regenerate the shipped ``random10`` scenario.

Ten heterogeneous swing-turbine generators on a connected Erdos-Renyi graph
(p = 0.5, edge weights uniform in [0.5, 1.5]).
"""

import argparse
from pathlib import Path

import numpy as np

from coherent_reduction.network import random_network

SEED = 20190704
OUT = Path(__file__).resolve().parents[1] / "src" / "coherent_reduction" / "scenarios" / "random10.toml"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=SEED)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()

    net = random_network(10, 0.5, args.seed)
    rng = np.random.default_rng(args.seed + 1)
    lines = [
        f"# Generated by scripts/make_random10.py --seed {args.seed}",
        "",
        "[generators]",
        "units = [",
    ]
    for _ in range(10):
        m, d, r, tau = rng.uniform([0.01, 0.001, 0.015, 2.0], [0.02, 0.003, 0.03, 9.0])
        lines.append(
            f'  {{ kind = "swing_turbine", m = {m:.6g}, d = {d:.6g}, r_inv = {r:.6g}, tau = {tau:.6g} }},'
        )
    lines += ["]", "", "[network]", "edges = ["]
    L = net.laplacian
    for i in range(10):
        for j in range(i + 1, 10):
            if L[i, j] != 0:
                lines.append(f"  [{i}, {j}, {-L[i, j]:.10g}],")
    lines += ["]", ""]
    args.out.write_text("\n".join(lines))
    print(f"wrote {args.out} (lambda2 = {net.algebraic_connectivity:.6g})")


if __name__ == "__main__":
    main()
