"""Command-line entry point.

Each command writes one CSV file (``<command>.csv`` under ``--out``, or
stdout). Exit codes: 0 success, 2 scenario/usage errors, 3 numerical
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import NotApplicable, NumericalError, ScenarioError, ValidationError
from .lti import dc_gain, step_response
from .metrics import RESCALE_MODES, compare_models, inertia_sweep
from .network import band_constants, coherence_gap, coherent_aggregate, lemma2_bound
from .reduction import interpret_reduced, lookup_weight, match_dc, parse_method, reduce
from .scenario import DEFAULT_METHODS, Scenario, load_scenario

log = logging.getLogger("coherent_reduction")

COMMANDS = ("aggregate", "reduce", "respond", "compare", "sweep", "coherence")
DEFAULT_SCALES = (1.0, 10.0, 100.0, 1000.0)
DEFAULT_ETA0 = 5.0
GRID_SIZE = 200


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{float(x):.10g}"


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _methods(scenario: Scenario, opts: argparse.Namespace):
    if opts.methods:
        labels = [m for m in opts.methods.split(",") if m.strip()]
    elif scenario.methods:
        labels = None
    else:
        labels = list(DEFAULT_METHODS)
    try:
        methods = [parse_method(x, scenario.weights) for x in labels] if labels is not None else list(scenario.methods)
        if opts.order is not None:
            methods = [m for m in methods if m.order == opts.order] or [
                parse_method(f"{p}{opts.order}", scenario.weights) for p in ("tb", "cl")
            ]
        if opts.weight:
            w = lookup_weight(opts.weight, scenario.weights)
            methods = [m._replace(weight=w) for m in methods]
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    for m in methods:
        if m.order < 2:
            raise ValidationError(f"{m.label}: order >= 2")
    return methods


def _settings(scenario: Scenario, opts: argparse.Namespace) -> Scenario:
    updates = {
        k: getattr(opts, k) for k in ("step", "horizon", "dt") if getattr(opts, k) is not None
    }
    s = replace(scenario, **updates)
    if not s.dt > 0 or not s.horizon >= s.dt:
        raise ValidationError("simulation needs dt > 0 and horizon >= dt")
    return s


def cmd_aggregate(s: Scenario, opts) -> str:
    g = coherent_aggregate(s.group)
    size = g.den.size
    num = np.pad(g.num, (size - g.num.size, 0))
    rows = [(size - 1 - i, num[i], g.den[i]) for i in range(size)]
    return _csv(["power (s^k)", "numerator (coefficient)", "denominator (coefficient)"], rows)


def cmd_reduce(s: Scenario, opts) -> str:
    ghat = coherent_aggregate(s.group)
    target = dc_gain(ghat)
    rows = []
    for m in _methods(s, opts):
        raw = reduce(s.group, m)
        tf = match_dc(raw, target) if opts.rescale_dc == "before" else raw
        for part, coeffs in (("num", tf.num), ("den", tf.den)):
            for i, c in enumerate(coeffs):
                rows.append((m.label, f"{part}", coeffs.size - 1 - i, c, "coefficient"))
        rows.append((m.label, "dc_gain", "", dc_gain(tf), "rad/s per p.u."))
        if m.order in (2, 3):
            eq = interpret_reduced(raw)
            rows.append((m.label, "m", "", eq.m, "s^2/rad"))
            rows.append((m.label, "d", "", eq.d, "p.u."))
            for j, (r, tau) in enumerate(eq.turbines, 1):
                rows.append((m.label, "r_inv", j, r, "p.u."))
                rows.append((m.label, "tau", j, tau, "s"))
            rows.append((m.label, "residual_flag", "", str(eq.residual_flag).lower(), "bool"))
    return _csv(["method", "field", "index", "value", "unit"], rows)


def cmd_respond(s: Scenario, opts) -> str:
    ghat = coherent_aggregate(s.group)
    target = dc_gain(ghat)
    methods = _methods(s, opts)
    ref = step_response(ghat, s.step, s.horizon, s.dt)
    columns = [ref.values]
    for m in methods:
        raw = reduce(s.group, m)
        tf = raw if opts.rescale_dc == "off" else match_dc(raw, target)
        columns.append(step_response(tf, s.step, s.horizon, s.dt).values)
    header = ["time (s)", "ghat (rad/s)"] + [f"{m.label} (rad/s)" for m in methods]
    return _csv(header, zip(ref.times, *columns))


def cmd_compare(s: Scenario, opts) -> str:
    rep = compare_models(s.group, _methods(s, opts), s.step, s.horizon, s.dt, opts.rescale_dc)
    rows = [(r.label, *r.errors) for r in rep.rows]
    return _csv(["model", "L2 (rad/s^0.5)", "Linf (rad/s)", "Hinf (rad/s per p.u.)"], rows)


def cmd_sweep(s: Scenario, opts) -> str:
    values = opts.m_values or list(s.sweep_m_hat)
    reports = inertia_sweep(s.group, values, _methods(s, opts), s.step, s.horizon, s.dt, opts.rescale_dc)
    units = {"L2": "rad/s^0.5", "Linf": "rad/s", "Hinf": "rad/s per p.u."}
    rows = []
    for m_hat, rep in zip(values, reports):
        for r in rep.rows:
            for metric, value in zip(units, r.errors):
                rows.append((m_hat, r.label, metric, value, units[metric]))
    return _csv(["m_hat (s^2/rad)", "method", "metric", "value", "unit"], rows)


def cmd_coherence(s: Scenario, opts) -> str:
    if s.network is None:
        raise ValidationError("coherence needs a [network] section")
    eta0 = opts.eta0
    scales = opts.scales or list(DEFAULT_SCALES)
    m1, m2 = band_constants(s.group, eta0, GRID_SIZE)
    rows = []
    for alpha in scales:
        net = s.network.scaled(alpha)
        lam2 = net.algebraic_connectivity
        gap = coherence_gap(s.group, net, eta0, GRID_SIZE)
        try:
            bound = lemma2_bound(m1, m2, lam2, eta0)
        except NotApplicable:
            bound = "N/A"
        rows.append((alpha, lam2, gap, bound))
    header = ["scale (-)", "lambda2 (p.u./rad)", "gap (rad/s per p.u.)", "lemma2_bound (rad/s per p.u.)"]
    return _csv(header, rows)


HANDLERS = {
    "aggregate": cmd_aggregate,
    "reduce": cmd_reduce,
    "respond": cmd_respond,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "coherence": cmd_coherence,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="coherent-reduction",
        description="Aggregate coherent generators and build reduced-order equivalents.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scenario", help="scenario file or shipped scenario name")
    p.add_argument("--methods", help="comma-separated methods, e.g. tb2,tb3,cl2,cl3 (cl3:name picks a weight)")
    p.add_argument("--order", type=int, help="keep only methods of this order")
    p.add_argument("--weight", help="weight name applied to every method")
    p.add_argument("--step", type=float, help="step amplitude in p.u.")
    p.add_argument("--horizon", type=float, help="simulation horizon in s")
    p.add_argument("--dt", type=float, help="sampling interval in s")
    p.add_argument("--rescale-dc", choices=RESCALE_MODES, default="after",
                   help="DC-match reduced models before all metrics, after H-inf only, or never")
    p.add_argument("--eta0", type=float, default=DEFAULT_ETA0, help="band edge in rad/s (coherence)")
    p.add_argument("--scales", type=_floats, help="Laplacian scalings, e.g. 1,10,100 (coherence)")
    p.add_argument("--m-values", type=_floats, help="aggregate inertias to sweep (sweep)")
    p.add_argument("--out", type=Path, help="directory for <command>.csv (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def execute(command: str, scenario: Scenario, opts: argparse.Namespace) -> dict[str, str]:
    """Run one command; returns ``{file name: CSV text}``."""
    s = _settings(scenario, opts)
    return {f"{command}.csv": HANDLERS[command](s, opts)}


def main(argv: Optional[Sequence[str]] = None) -> int:
    opts = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if opts.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        scenario = load_scenario(opts.scenario)
        files = execute(opts.command, scenario, opts)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if opts.out is None:
        for text in files.values():
            sys.stdout.write(text)
        return 0
    opts.out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (opts.out / name).write_text(text)
        log.info("wrote %s", opts.out / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
