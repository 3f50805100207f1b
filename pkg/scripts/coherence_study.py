"""Coherence gap of a network as its Laplacian is scaled up, with the analytic bound."""

import argparse

import numpy as np

from coherent_reduction.errors import NotApplicable
from coherent_reduction.network import band_constants, coherence_gap, lemma2_bound
from coherent_reduction.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="random10")
    ap.add_argument("--eta0", type=float, default=5.0)
    ap.add_argument("--decades", type=int, default=4)
    ap.add_argument("--grid", type=int, default=200)
    args = ap.parse_args()

    s = load_scenario(args.scenario)
    if s.network is None:
        raise SystemExit(f"scenario {args.scenario!r} has no network")
    m1, m2 = band_constants(s.group, args.eta0, args.grid)
    print(f"band [-{args.eta0}, {args.eta0}] rad/s: M1 = {m1:.5g}, M2 = {m2:.5g}")
    print(f"{'alpha':>8s} {'lambda2':>10s} {'gap':>12s} {'bound':>12s}")
    for alpha in np.logspace(0, args.decades, 2 * args.decades + 1):
        net = s.network.scaled(alpha)
        lam2 = net.algebraic_connectivity
        gap = coherence_gap(s.group, net, args.eta0, args.grid)
        try:
            bound = f"{lemma2_bound(m1, m2, lam2, args.eta0):12.5g}"
        except NotApplicable:
            bound = f"{'N/A':>12s}"
        print(f"{alpha:8.3g} {lam2:10.4g} {gap:12.5g} {bound}")


if __name__ == "__main__":
    main()
