"""Error table of the reduced models for a scenario, next to the reference values.

Step errors scale linearly with the step amplitude; use ``--step -1`` to
compare against the reference L2/Linf columns.
"""

import argparse

from coherent_reduction.metrics import compare_models
from coherent_reduction.reduction import parse_method
from coherent_reduction.scenario import load_scenario

REFERENCE = {
    "BT2-tb": (4.3737, 2.1454, 7.5879),
    "BT2-cl": (2.0376, 0.9934, 2.0381),
    "BT3-tb": (0.0967, 0.0361, 0.1315),
    "BT3-cl": (0.0704, 0.0249, 0.0317),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="testcase_table1")
    ap.add_argument("--step", type=float, help="override the scenario step amplitude (p.u.)")
    ap.add_argument("--rescale-dc", default="after", choices=("before", "after", "off"))
    args = ap.parse_args()

    s = load_scenario(args.scenario)
    step = s.step if args.step is None else args.step
    methods = [parse_method(x, s.weights) for x in ("tb2", "cl2", "tb3", "cl3")]
    rep = compare_models(s.group, methods, step, s.horizon, s.dt, args.rescale_dc)
    print(f"scenario {args.scenario}, step {step} p.u., DC rescale {args.rescale_dc}")
    print(f"{'model':8s} {'L2':>10s} {'Linf':>10s} {'Hinf':>10s}   reference")
    for row in rep.rows:
        ref = REFERENCE.get(row.label)
        ref_text = " ".join(f"{v:8.4f}" for v in ref) if ref else ""
        print(f"{row.label:8s} " + " ".join(f"{v:10.4f}" for v in row.errors) + "   " + ref_text)
    for row in rep.rows:
        eq = row.equivalent
        if eq is None:
            continue
        turbines = ", ".join(f"{r:.4g}/({t:.4g}s+1)" for r, t in eq.turbines)
        flag = " [not a physical generator]" if eq.residual_flag else ""
        print(f"{row.label}: m={eq.m:.5g} d={eq.d:.5g} turbines {turbines or '-'}{flag}")


if __name__ == "__main__":
    main()
