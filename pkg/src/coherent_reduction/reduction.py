"""Frequency-weighted balanced truncation and the two reduction pathways.

The weight acts on the plant output: the extended system feeds ``y = C x``
into the weight realization and observes ``D_W C x + C_W x_W``. Only the
plant corners of the extended gramians are used for balancing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    ComplexPoles,
    IntegratorPresent,
    NotStrictlyProper,
    OrderTooHigh,
    RepeatedPoles,
    UnstableInput,
    UnstableSystem,
    ValidationError,
    WrongOrder,
)
from .lti import (
    StateSpace,
    TransferFunction,
    dc_gain,
    minimal_state_space,
    partial_fractions,
    polynomial_divide,
    poles,
    solve_lyapunov,
    transfer_of,
)
from .network import CoherentGroup, aggregate_turbine, coherent_aggregate

HANKEL_FLOOR = 1e-10


@dataclass(frozen=True)
class FrequencyWeight:
    """Stable output weight ``W(s)`` with finite nonzero DC gain."""

    tf: TransferFunction
    name: str = ""

    def __post_init__(self):
        if not poles(self.tf).stable:
            raise ValidationError("frequency weight must be stable")
        try:
            w0 = dc_gain(self.tf)
        except IntegratorPresent as exc:
            raise ValidationError("frequency weight must have finite DC gain") from exc
        if w0 == 0.0:
            raise ValidationError("frequency weight must have nonzero DC gain")

    @classmethod
    def unit(cls) -> "FrequencyWeight":
        return cls(TransferFunction.constant(1.0), "unit")

    @classmethod
    def lead_lag(cls, zero: float, pole: float, name: str = "") -> "FrequencyWeight":
        """``(s + zero) / (s + pole)``."""
        return cls(TransferFunction([1.0, zero], [1.0, pole]), name)

    def realization(self) -> StateSpace:
        return minimal_state_space(self.tf)


W_TB = FrequencyWeight.lead_lag(3e-2, 1e-4, "tb")
W_CL = FrequencyWeight.lead_lag(8e-2, 1e-4, "cl")


class Balancing(NamedTuple):
    T: np.ndarray
    T_inv: np.ndarray
    hankel: np.ndarray
    Xc: np.ndarray
    Yo: np.ndarray


def weighted_gramians(sys: StateSpace, w: FrequencyWeight) -> tuple[np.ndarray, np.ndarray]:
    """Plant corners of the extended-system gramians."""
    ws = w.realization()
    n, nw = sys.n, ws.n
    A = np.zeros((n + nw, n + nw))
    A[:n, :n] = sys.A
    A[n:, :n] = ws.B @ sys.C
    A[n:, n:] = ws.A
    B = np.vstack([sys.B, np.zeros((nw, 1))])
    C = np.hstack([ws.D * sys.C, ws.C])
    Xbar = solve_lyapunov(A, B @ B.T)
    Ybar = solve_lyapunov(A.T, C.T @ C)
    return Xbar[:n, :n], Ybar[:n, :n]


def _psd_sqrt(X: np.ndarray) -> np.ndarray:
    lam, V = np.linalg.eigh(0.5 * (X + X.T))
    return (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.T


def balance(sys: StateSpace, w: FrequencyWeight) -> Balancing:
    """Coordinates in which both weighted gramians equal ``diag(hankel)``.

    With ``Xc^{1/2} Yo Xc^{1/2} = U S U^T`` the eigenvalues ``S`` are the
    squared weighted Hankel values, so ``T^{-1} = Xc^{1/2} U S^{-1/4}``.
    """
    _check_plant(sys)
    Xc, Yo = weighted_gramians(sys, w)
    Xh = _psd_sqrt(Xc)
    U, S, _ = np.linalg.svd(Xh @ Yo @ Xh)
    # deterministic sign: largest entry of each singular vector positive
    U = U * np.sign(U[np.argmax(np.abs(U), axis=0), np.arange(U.shape[1])])
    if np.any(S <= 0):
        raise OrderTooHigh("weighted gramian product is singular; realization not minimal")
    T_inv = Xh @ U * S ** -0.25
    T = np.linalg.inv(T_inv)
    return Balancing(T, T_inv, np.sqrt(S), Xc, Yo)


def weighted_hankel_values(sys: StateSpace, w: FrequencyWeight) -> np.ndarray:
    _check_plant(sys)
    Xc, Yo = weighted_gramians(sys, w)
    Xh = _psd_sqrt(Xc)
    S = np.linalg.svd(Xh @ Yo @ Xh, compute_uv=False)
    return np.sqrt(np.clip(S, 0.0, None))


def _check_plant(sys: StateSpace) -> None:
    if sys.D != 0.0:
        raise NotStrictlyProper("balanced truncation needs a strictly proper plant")
    if sys.n and not np.all(np.linalg.eigvals(sys.A).real < 0):
        raise UnstableInput("plant must be asymptotically stable")


def fw_balanced_truncation(sys: StateSpace, w: FrequencyWeight, k: int) -> StateSpace:
    """Order-``k`` truncation of the weighted balanced realization of ``sys``."""
    _check_plant(sys)
    if not 1 <= k <= sys.n:
        raise OrderTooHigh(f"order {k} outside 1..{sys.n}")
    hsv = weighted_hankel_values(sys, w)
    significant = int(np.sum(hsv > HANKEL_FLOOR * hsv[0]))
    if k > significant:
        raise OrderTooHigh(
            f"order {k} exceeds the {significant} weighted Hankel values above "
            f"{HANKEL_FLOOR:g} * sigma_max"
        )
    bal = balance(sys, w)
    A = bal.T @ sys.A @ bal.T_inv
    B = bal.T @ sys.B
    C = sys.C @ bal.T_inv
    return StateSpace(A[:k, :k], B[:k], C[:, :k], 0.0)


def reduce_turbine_path(group: CoherentGroup, k: int, w: FrequencyWeight = W_TB) -> TransferFunction:
    """Order-``k`` model ``1 / (m s + d + gt_{k-1}(s))`` with a reduced turbine aggregate."""
    if k < 2:
        raise WrongOrder("turbine-path reduction needs k >= 2")
    gt = aggregate_turbine(group)
    red = transfer_of(fw_balanced_truncation(minimal_state_space(gt), w, k - 1))
    swing = np.array([group.inertia, group.damping])
    return TransferFunction(red.den, np.polyadd(np.polymul(swing, red.den), red.num))


def reduce_closed_loop_path(group: CoherentGroup, k: int, w: FrequencyWeight = W_CL) -> TransferFunction:
    """Order-``k`` weighted balanced truncation of the aggregate itself."""
    if k < 2:
        raise WrongOrder("closed-loop reduction needs k >= 2")
    ghat = minimal_state_space(coherent_aggregate(group))
    return transfer_of(fw_balanced_truncation(ghat, w, k))


def match_dc(reduced: TransferFunction, target: float) -> TransferFunction:
    """Scale the numerator so the DC gain equals ``target``."""
    g0 = dc_gain(reduced)
    if not np.isfinite(target) or target == 0.0:
        raise ValueError("target DC gain must be finite and nonzero")
    if g0 == target:
        return reduced
    return reduced.scaled(target / g0)


@dataclass(frozen=True)
class EquivalentGenerator:
    """Swing machine plus parallel first-order turbines read off a reduced model.

    ``quotient`` and ``remainder`` keep the raw division so a rejected
    interpretation (``residual_flag``) can still be inspected.
    """

    m: float
    d: float
    turbines: tuple = ()
    residual_flag: bool = False
    quotient: tuple = field(default=(), compare=False)
    remainder: tuple = field(default=(), compare=False)
    numerator: tuple = field(default=(), compare=False)

    def transfer(self) -> TransferFunction:
        """``1 / (m s + d + sum r / (tau s + 1))``; uses the raw division when flagged."""
        if self.residual_flag:
            num = np.asarray(self.numerator)
            den = np.polyadd(np.polymul(self.quotient, num), self.remainder)
            return TransferFunction(num, den)
        lags = np.array([1.0])
        for _, tau in self.turbines:
            lags = np.polymul(lags, [tau, 1.0])
        den = np.polymul([self.m, self.d], lags)
        for i, (r, _) in enumerate(self.turbines):
            part = np.array([r])
            for j, (_, tau) in enumerate(self.turbines):
                if j != i:
                    part = np.polymul(part, [tau, 1.0])
            den = np.polyadd(den, part)
        return TransferFunction(lags, den)


def interpret_reduced(tf: TransferFunction) -> EquivalentGenerator:
    """Read ``(m, d, [(r_inv, tau), ...])`` off an order-2 or order-3 model.

    Divides ``D = Q N + R``: ``Q = m s + d`` and ``R / N`` is expanded into
    first-order turbine lags.
    """
    order = tf.order
    if order not in (2, 3) or tf.num.size != order:
        raise WrongOrder(f"need order 2 or 3 with numerator degree order-1, got {tf}")
    # turbine form wants N(0) = 1
    c = tf.num[-1] if tf.num[-1] != 0.0 else tf.num[0]
    N = tf.num / c
    D = tf.den / c
    Q, R = polynomial_divide(D, N)
    Q = np.pad(Q, (2 - Q.size, 0))
    m, d = float(Q[0]), float(Q[1])
    raw = dict(
        quotient=tuple(map(float, Q)),
        remainder=tuple(map(float, R)),
        numerator=tuple(map(float, N)),
    )
    turbines: list[tuple[float, float]] = []
    ok = tf.num[-1] != 0.0
    if ok:
        rem = TransferFunction(R, N)
        if rem.is_zero:
            turbines = []
        else:
            try:
                terms = partial_fractions(rem)
                turbines = [(float(r), float(t)) for r, t in terms]
                ok = terms.direct == 0.0
            except (ComplexPoles, RepeatedPoles, UnstableSystem):
                ok = False
                turbines = []
    positive = ok and m > 0 and d > 0 and all(r > 0 and tau > 0 for r, tau in turbines)
    if not positive:
        return EquivalentGenerator(m, d, tuple(turbines) if ok else (), True, **raw)
    return EquivalentGenerator(m, d, tuple(turbines), False, **raw)


class ReductionMethod(NamedTuple):
    path: str
    order: int
    weight: FrequencyWeight

    @property
    def label(self) -> str:
        return f"BT{self.order}-{self.path}"


def reduce(group: CoherentGroup, method: ReductionMethod) -> TransferFunction:
    if method.path == "tb":
        return reduce_turbine_path(group, method.order, method.weight)
    if method.path == "cl":
        return reduce_closed_loop_path(group, method.order, method.weight)
    raise ValueError(f"unknown reduction path {method.path!r}")


def parse_method(text: str, weights: Optional[dict] = None) -> ReductionMethod:
    """Parse ``tb3`` / ``cl2`` / ``cl2:name`` style method labels."""
    text = text.strip()
    head, _, wname = text.partition(":")
    path, digits = head[:2], head[2:]
    if path not in ("tb", "cl") or not digits.isdigit():
        raise ValueError(f"bad method {text!r}; expected e.g. tb2, cl3 or cl3:weight")
    return ReductionMethod(path, int(digits), lookup_weight(wname or path, weights))


def lookup_weight(name: str, weights: Optional[dict] = None) -> FrequencyWeight:
    """Resolve a weight name; ``unit`` is always available."""
    weights = weights if weights is not None else {"tb": W_TB, "cl": W_CL}
    if name == "unit":
        return FrequencyWeight.unit()
    if name not in weights:
        raise ValueError(f"unknown weight {name!r}")
    return weights[name]
