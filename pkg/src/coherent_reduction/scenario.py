"""Scenario files.

A scenario is a TOML document with the sections ``[generators]``,
``[network]``, ``[weights]``, ``[simulation]`` and ``[reduction]``; only
``[generators]`` is required::

    [generators]
    m_hat = 0.0683          # optional aggregate overrides
    d_hat = 0.0107
    units = [
      { kind = "swing_turbine", r_inv = 0.0218, tau = 9.08 },
      { kind = "swing", m = 0.02, d = 0.001 },
      { kind = "droop_inverter", k_p = 50.0, tau_p = 0.5 },
    ]

    [network]               # either laplacian or edges (zero-based)
    edges = [[0, 1, 1.2], [1, 2, 0.7]]
    line_data = { ... }     # optional, kept as opaque metadata

    [weights]
    tb = { num = [1.0, 3e-2], den = [1.0, 1e-4] }

    [simulation]
    step = -0.1
    horizon = 200.0
    dt = 1e-3

    [reduction]
    methods = ["tb2", "cl3:tb"]
    sweep_m_hat = [0.03, 0.0683, 0.15]

Units that omit ``m`` or ``d`` take an equal share of ``m_hat`` / ``d_hat``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParseError, ScenarioError, ValidationError
from .lti import TransferFunction
from .metrics import DEFAULT_DT, DEFAULT_HORIZON, DEFAULT_STEP
from .network import CoherentGroup, DroopInverter, NetworkSpec, Swing, SwingTurbine
from .reduction import W_CL, W_TB, FrequencyWeight, ReductionMethod, parse_method

SECTIONS = {"generators", "network", "weights", "simulation", "reduction"}
UNIT_KEYS = {
    "swing": ({"m", "d"}, set()),
    "swing_turbine": ({"m", "d", "r_inv", "tau"}, set()),
    "droop_inverter": ({"k_p", "tau_p"}, {"k_p", "tau_p"}),
}
DEFAULT_METHODS = ("tb2", "tb3", "cl2", "cl3")
DEFAULT_SWEEP = (0.03, 0.0683, 0.15)


@dataclass(frozen=True)
class Scenario:
    group: CoherentGroup
    network: Optional[NetworkSpec] = None
    weights: dict = field(default_factory=dict)
    step: float = DEFAULT_STEP
    horizon: float = DEFAULT_HORIZON
    dt: float = DEFAULT_DT
    methods: tuple = ()
    sweep_m_hat: tuple = DEFAULT_SWEEP
    name: str = ""


def _reject_unknown(table: dict, allowed, where: str) -> None:
    extra = sorted(set(table) - set(allowed))
    if extra:
        raise ParseError(f"{where}: unknown key {extra[0]!r}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _numbers(value, where: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ParseError(f"{where}: expected a non-empty array of numbers")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _table(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ParseError(f"[{key}] must be a table")
    return value


def _validated(where: str, build):
    try:
        return build()
    except ScenarioError as exc:
        raise type(exc)(f"{where}: {exc}") from exc
    except ArithmeticError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _parse_generators(doc: dict) -> CoherentGroup:
    sec = _table(doc, "generators")
    _reject_unknown(sec, {"m_hat", "d_hat", "units"}, "[generators]")
    units = sec.get("units")
    if not isinstance(units, list) or not units:
        raise ParseError("[generators]: 'units' must be a non-empty array of tables")
    m_hat = _number(sec["m_hat"], "generators.m_hat") if "m_hat" in sec else None
    d_hat = _number(sec["d_hat"], "generators.d_hat") if "d_hat" in sec else None
    if m_hat is not None and not m_hat > 0:
        raise ValidationError("generators.m_hat: m_hat > 0")
    if d_hat is not None and not d_hat >= 0:
        raise ValidationError("generators.d_hat: d_hat >= 0")
    n = len(units)
    gens = []
    for i, unit in enumerate(units):
        where = f"generators.units[{i}]"
        if not isinstance(unit, dict):
            raise ParseError(f"{where}: expected a table")
        kind = unit.get("kind")
        if kind not in UNIT_KEYS:
            raise ParseError(f"{where}.kind: expected one of {sorted(UNIT_KEYS)}, got {kind!r}")
        allowed, required = UNIT_KEYS[kind]
        _reject_unknown(unit, allowed | {"kind"}, where)
        vals = {k: _number(v, f"{where}.{k}") for k, v in unit.items() if k != "kind"}
        if kind in ("swing", "swing_turbine"):
            for key, total in (("m", m_hat), ("d", d_hat)):
                if key not in vals:
                    if total is None:
                        raise ValidationError(f"{where}: '{key}' required without an aggregate {key}_hat")
                    vals[key] = total / n
            if kind == "swing_turbine":
                for key in ("r_inv", "tau"):
                    if key not in vals:
                        raise ValidationError(f"{where}: '{key}' required")
        missing = required - set(vals)
        if missing:
            raise ValidationError(f"{where}: '{sorted(missing)[0]}' required")
        cls = {"swing": Swing, "swing_turbine": SwingTurbine, "droop_inverter": DroopInverter}[kind]
        gens.append(_validated(where, lambda: cls(**vals)))
    return _validated("generators", lambda: CoherentGroup(tuple(gens), m_hat, d_hat))


def _parse_network(doc: dict, n: int) -> Optional[NetworkSpec]:
    if "network" not in doc:
        return None
    sec = _table(doc, "network")
    _reject_unknown(sec, {"laplacian", "edges", "line_data"}, "[network]")
    meta = {}
    if "line_data" in sec:
        meta["line_data"] = sec["line_data"]
    if ("laplacian" in sec) == ("edges" in sec):
        raise ParseError("[network]: give exactly one of 'laplacian' or 'edges'")
    if "laplacian" in sec:
        rows = sec["laplacian"]
        if not isinstance(rows, list):
            raise ParseError("network.laplacian: expected an array of arrays")
        L = [_numbers(r, f"network.laplacian[{i}]") for i, r in enumerate(rows)]
        if len(L) != n or any(len(r) != n for r in L):
            raise ValidationError(f"network.laplacian: must be {n}x{n} to match the generators")
        return _validated("network.laplacian", lambda: NetworkSpec(L, meta))
    edges = []
    for i, e in enumerate(sec["edges"]):
        vals = _numbers(e, f"network.edges[{i}]")
        if len(vals) != 3 or vals[0] != int(vals[0]) or vals[1] != int(vals[1]):
            raise ParseError(f"network.edges[{i}]: expected [i, j, weight] with integer endpoints")
        edges.append((int(vals[0]), int(vals[1]), vals[2]))
    return _validated("network.edges", lambda: NetworkSpec.from_edges(n, edges, meta))


def _parse_weights(doc: dict) -> dict:
    weights = {"tb": W_TB, "cl": W_CL}
    for name, spec in _table(doc, "weights").items():
        where = f"weights.{name}"
        if not isinstance(spec, dict):
            raise ParseError(f"{where}: expected {{ num = [...], den = [...] }}")
        _reject_unknown(spec, {"num", "den"}, where)
        if "num" not in spec or "den" not in spec:
            raise ParseError(f"{where}: needs both 'num' and 'den'")
        num, den = _numbers(spec["num"], f"{where}.num"), _numbers(spec["den"], f"{where}.den")
        weights[name] = _validated(where, lambda: FrequencyWeight(TransferFunction(num, den), name))
    return weights


def parse_scenario(text: Union[str, bytes], name: str = "") -> Scenario:
    """Parse and fully validate a scenario document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"scenario is not valid UTF-8: {exc}") from exc
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc)) from exc
    _reject_unknown(doc, SECTIONS, "scenario")
    if "generators" not in doc:
        raise ParseError("scenario: missing [generators] section")
    group = _parse_generators(doc)
    network = _parse_network(doc, group.n)
    weights = _parse_weights(doc)

    sim = _table(doc, "simulation")
    _reject_unknown(sim, {"step", "horizon", "dt"}, "[simulation]")
    step = _number(sim.get("step", DEFAULT_STEP), "simulation.step")
    horizon = _number(sim.get("horizon", DEFAULT_HORIZON), "simulation.horizon")
    dt = _number(sim.get("dt", DEFAULT_DT), "simulation.dt")
    if not dt > 0:
        raise ValidationError("simulation.dt: dt > 0")
    if not horizon >= dt:
        raise ValidationError("simulation.horizon: horizon >= dt")

    red = _table(doc, "reduction")
    _reject_unknown(red, {"methods", "sweep_m_hat"}, "[reduction]")
    labels = red.get("methods", list(DEFAULT_METHODS))
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ParseError("reduction.methods: expected an array of strings")
    methods = []
    for i, label in enumerate(labels):
        try:
            methods.append(parse_method(label, weights))
        except ValueError as exc:
            raise ValidationError(f"reduction.methods[{i}]: {exc}") from exc
        if methods[-1].order < 2:
            raise ValidationError(f"reduction.methods[{i}]: order >= 2")
    sweep = tuple(_numbers(red["sweep_m_hat"], "reduction.sweep_m_hat")) if "sweep_m_hat" in red else DEFAULT_SWEEP
    if any(v <= 0 for v in sweep):
        raise ValidationError("reduction.sweep_m_hat: m_hat > 0")
    return Scenario(group, network, weights, step, horizon, dt, tuple(methods), sweep, name)


def shipped_scenarios() -> list[str]:
    root = resources.files("coherent_reduction") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_scenario(ref: str) -> Scenario:
    """Load a scenario by file path or by the name of a shipped scenario."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(path.read_bytes(), path.stem)
    shipped = resources.files("coherent_reduction") / "scenarios" / f"{ref}.toml"
    if shipped.is_file():
        return parse_scenario(shipped.read_bytes(), ref)
    raise ParseError(f"no scenario file {ref!r}; shipped scenarios: {', '.join(shipped_scenarios())}")
