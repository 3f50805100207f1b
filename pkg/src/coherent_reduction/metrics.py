"""Approximation errors between the aggregate and its reduced models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .errors import DCMismatch
from .lti import Trajectory, TransferFunction, dc_gain, hinf_norm, step_response
from .network import CoherentGroup, coherent_aggregate
from .reduction import (
    EquivalentGenerator,
    ReductionMethod,
    interpret_reduced,
    match_dc,
    reduce,
)

DEFAULT_STEP = -0.1
DEFAULT_HORIZON = 200.0
DEFAULT_DT = 1e-3
RESCALE_MODES = ("before", "after", "off")


@dataclass(frozen=True)
class ErrorTriple:
    l2: float
    linf: float
    hinf: float

    def __iter__(self):
        return iter((self.l2, self.linf, self.hinf))


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    path: str
    order: int
    errors: ErrorTriple
    reduced: TransferFunction = field(compare=False)
    equivalent: Optional[EquivalentGenerator] = None


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple
    step: float
    horizon: float
    dt: float
    m_hat: float
    weights: dict = field(default_factory=dict, compare=False)
    rescale: str = "after"

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, label: str) -> ComparisonRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)


def _trajectory_errors(ref: Trajectory, other: Trajectory) -> tuple[float, float]:
    e = ref.values - other.values
    l2 = float(np.sqrt(trapezoid(e * e, dx=ref.dt)))
    return l2, float(np.max(np.abs(e)))


def _check_dc(orig, reduced) -> None:
    g0, g1 = dc_gain(orig), dc_gain(reduced)
    if abs(g0 - g1) > 1e-9 * abs(g0):
        raise DCMismatch(
            f"DC gains differ ({g0:.10g} vs {g1:.10g}); match them before comparing step responses"
        )


def step_error_norms(
    orig,
    reduced,
    amplitude: float = DEFAULT_STEP,
    horizon: float = DEFAULT_HORIZON,
    dt: float = DEFAULT_DT,
    check_dc: bool = True,
) -> tuple[float, float]:
    """L2 (trapezoid) and peak norms of the step-response error ``orig - reduced``."""
    if check_dc:
        _check_dc(orig, reduced)
    y0 = step_response(orig, amplitude, horizon, dt)
    y1 = step_response(reduced, amplitude, horizon, dt)
    return _trajectory_errors(y0, y1)


def hinf_diff(orig, reduced) -> float:
    """Peak gain of ``orig - reduced`` formed over a common denominator."""
    return hinf_norm(orig - reduced)


def compare_models(
    group: CoherentGroup,
    methods: Sequence[ReductionMethod],
    step: float = DEFAULT_STEP,
    horizon: float = DEFAULT_HORIZON,
    dt: float = DEFAULT_DT,
    rescale: str = "after",
) -> ComparisonReport:
    """Error table for each requested reduction of the group's aggregate.

    ``rescale`` picks when reduced models are DC-matched to the aggregate:
    ``before`` every metric uses the matched model, ``after`` only the step
    metrics do, ``off`` none do (step metrics then skip the DC check).
    """
    if rescale not in RESCALE_MODES:
        raise ValueError(f"rescale must be one of {RESCALE_MODES}")
    ghat = coherent_aggregate(group)
    target = dc_gain(ghat)
    rows = []
    ref = step_response(ghat, step, horizon, dt) if methods else None
    for method in methods:
        raw = reduce(group, method)
        matched = match_dc(raw, target)
        stepped = raw if rescale == "off" else matched
        l2, linf = _trajectory_errors(ref, step_response(stepped, step, horizon, dt))
        hinf = hinf_diff(ghat, matched if rescale == "before" else raw)
        equivalent = interpret_reduced(raw) if method.order in (2, 3) else None
        rows.append(
            ComparisonRow(method.label, method.path, method.order, ErrorTriple(l2, linf, hinf), raw, equivalent)
        )
    weights = {m.weight.name or m.label: m.weight.tf for m in methods}
    return ComparisonReport(tuple(rows), step, horizon, dt, group.inertia, weights, rescale)


def inertia_sweep(
    group: CoherentGroup,
    m_values: Sequence[float],
    methods: Sequence[ReductionMethod],
    step: float = DEFAULT_STEP,
    horizon: float = DEFAULT_HORIZON,
    dt: float = DEFAULT_DT,
    rescale: str = "after",
) -> list[ComparisonReport]:
    """One report per aggregate inertia, everything else held fixed."""
    if any(m <= 0 for m in m_values):
        raise ValueError("inertia values must be positive")
    return [
        compare_models(group.with_inertia(m), methods, step, horizon, dt, rescale)
        for m in m_values
    ]
