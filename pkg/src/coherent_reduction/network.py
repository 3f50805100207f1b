"""Generator models, Laplacian coupling and the coherent aggregate.

Every generator type maps onto the swing-with-turbine form
``1 / (m s + d + r_inv / (tau s + 1))``. First-order models are the
``r_inv = 0`` case, and a droop inverter ``k_P / (tau_P s + 1)`` is a swing
model with ``m = tau_P / k_P`` and ``d = 1 / k_P``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    GridMismatch,
    NotApplicable,
    SingularAtFrequency,
    UnstableSystem,
    ValidationError,
)
from .lti import (
    TransferFunction,
    Trajectory,
    minimal_state_space,
    simulate_constant_input,
    time_grid,
)


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class Swing:
    """First-order machine ``1 / (m s + d)``."""

    m: float
    d: float

    def __post_init__(self):
        _check(self.m > 0, "m > 0")
        _check(self.d >= 0, "d >= 0")

    def swing_form(self) -> tuple[float, float, float, float]:
        return self.m, self.d, 0.0, 1.0

    def inverse(self, s):
        return self.m * s + self.d


@dataclass(frozen=True)
class SwingTurbine:
    """Swing model closed with a first-order turbine droop loop."""

    m: float
    d: float
    r_inv: float
    tau: float

    def __post_init__(self):
        _check(self.m > 0, "m > 0")
        _check(self.d >= 0, "d >= 0")
        _check(self.r_inv >= 0, "r_inv >= 0")
        _check(self.tau > 0, "tau > 0")

    def swing_form(self) -> tuple[float, float, float, float]:
        return self.m, self.d, self.r_inv, self.tau

    def inverse(self, s):
        return self.m * s + self.d + self.r_inv / (self.tau * s + 1.0)


@dataclass(frozen=True)
class DroopInverter:
    """Grid-forming inverter with a power-measurement filter, ``k_p / (tau_p s + 1)``."""

    k_p: float
    tau_p: float

    def __post_init__(self):
        _check(self.k_p > 0, "k_P > 0")
        _check(self.tau_p > 0, "tau_P > 0")

    def swing_form(self) -> tuple[float, float, float, float]:
        return self.tau_p / self.k_p, 1.0 / self.k_p, 0.0, 1.0

    def inverse(self, s):
        return (self.tau_p * s + 1.0) / self.k_p


GeneratorModel = Union[Swing, SwingTurbine, DroopInverter]


def generator_transfer(g: GeneratorModel) -> TransferFunction:
    if isinstance(g, DroopInverter):
        return TransferFunction([g.k_p], [g.tau_p, 1.0])
    m, d, r_inv, tau = g.swing_form()
    if r_inv == 0.0:
        return TransferFunction([1.0], [m, d])
    # 1 / (m s + d + r/(tau s + 1)) = (tau s + 1) / ((m s + d)(tau s + 1) + r)
    den = np.polyadd(np.polymul([m, d], [tau, 1.0]), [r_inv])
    return TransferFunction([tau, 1.0], den)


# ---------------------------------------------------------------------------
# network


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Symmetric weighted-graph Laplacian.

    ``metadata`` may carry raw line data; it is never used to build the
    Laplacian.
    """

    laplacian: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        L = np.array(self.laplacian, dtype=float)
        _check(L.ndim == 2 and L.shape[0] == L.shape[1] and L.shape[0] >= 1, "L is square")
        scale = max(1.0, float(np.max(np.abs(L))))
        _check(np.allclose(L, L.T, rtol=0, atol=1e-10 * scale), "L symmetric")
        _check(np.all(np.abs(L.sum(axis=1)) <= 1e-10 * scale), "L row sums zero")
        off = L - np.diag(np.diag(L))
        _check(np.all(off <= 0), "L off-diagonals <= 0")
        L = 0.5 * (L + L.T)
        L.flags.writeable = False
        object.__setattr__(self, "laplacian", L)

    @classmethod
    def from_edges(cls, n: int, edges, metadata: Optional[dict] = None) -> "NetworkSpec":
        """Build from ``(i, j, weight)`` triples with zero-based indices."""
        L = np.zeros((n, n))
        for i, j, w in edges:
            i, j = int(i), int(j)
            _check(0 <= i < n and 0 <= j < n, "edge endpoints within 0..n-1")
            _check(i != j, "no self loops")
            _check(w > 0, "edge weight > 0")
            L[i, j] -= w
            L[j, i] -= w
            L[i, i] += w
            L[j, j] += w
        return cls(L, dict(metadata or {}))

    @property
    def n(self) -> int:
        return self.laplacian.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order, the first clipped to exactly zero."""
        lam = np.linalg.eigvalsh(self.laplacian)
        lam[0] = 0.0
        return lam

    @property
    def algebraic_connectivity(self) -> float:
        return float(self.eigenvalues()[1]) if self.n > 1 else 0.0

    def scaled(self, alpha: float) -> "NetworkSpec":
        return NetworkSpec(alpha * self.laplacian, self.metadata)


def random_network(n: int, p: float, seed: int, weight_range=(0.5, 1.5)) -> NetworkSpec:
    """Connected Erdos-Renyi graph with uniform edge weights.

    Draws are repeated from the same generator until the graph is connected.
    """
    rng = np.random.default_rng(seed)
    lo, hi = weight_range
    while True:
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.append((i, j, rng.uniform(lo, hi)))
        net = NetworkSpec.from_edges(n, edges, {"generator": "erdos_renyi", "p": p, "seed": seed})
        if n == 1 or net.algebraic_connectivity > 1e-9:
            return net


# ---------------------------------------------------------------------------
# coherent group


@dataclass(frozen=True)
class CoherentGroup:
    """Generators aggregated as one machine.

    ``m_hat`` / ``d_hat`` override the summed inertia and damping in the
    aggregate when only group totals are known. Network-level operations
    always use the per-generator models.
    """

    generators: tuple
    m_hat: Optional[float] = None
    d_hat: Optional[float] = None

    def __post_init__(self):
        gens = tuple(self.generators)
        _check(len(gens) >= 1, "group has at least one generator")
        if self.m_hat is not None:
            _check(self.m_hat > 0, "m_hat > 0")
        if self.d_hat is not None:
            _check(self.d_hat >= 0, "d_hat >= 0")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_aggregate(cls, turbines: Sequence[tuple[float, float]], m_hat: float, d_hat: float):
        """Group of swing-turbine units known only through ``(r_inv, tau)`` and
        the aggregate inertia/damping; each unit gets an equal share."""
        n = len(turbines)
        _check(n >= 1, "group has at least one generator")
        gens = tuple(SwingTurbine(m_hat / n, d_hat / n, r, tau) for r, tau in turbines)
        return cls(gens, m_hat, d_hat)

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def inertias(self) -> np.ndarray:
        return np.array([g.swing_form()[0] for g in self.generators])

    @property
    def inertia(self) -> float:
        return self.m_hat if self.m_hat is not None else float(self.inertias.sum())

    @property
    def damping(self) -> float:
        if self.d_hat is not None:
            return self.d_hat
        return float(sum(g.swing_form()[1] for g in self.generators))

    @property
    def total_droop(self) -> float:
        return float(sum(g.swing_form()[2] for g in self.generators))

    def turbine_terms(self) -> list[tuple[float, float]]:
        """``(r_inv, tau)`` pairs with equal time constants merged."""
        merged: list[list[float]] = []
        for g in self.generators:
            _, _, r, tau = g.swing_form()
            if r == 0.0:
                continue
            for entry in merged:
                if abs(entry[1] - tau) <= 1e-12 * tau:
                    entry[0] += r
                    break
            else:
                merged.append([r, tau])
        return [(r, tau) for r, tau in merged]

    def with_inertia(self, m_hat: float) -> "CoherentGroup":
        return replace(self, m_hat=m_hat)

    def inverse_response(self, s) -> np.ndarray:
        """``[g_i^{-1}(s)]`` for every generator."""
        return np.array([g.inverse(s) for g in self.generators])


def aggregate_turbine(group: CoherentGroup) -> TransferFunction:
    """Sum of the turbine loops ``sum r_i / (tau_i s + 1)``."""
    terms = group.turbine_terms()
    if not terms:
        return TransferFunction([0.0], [1.0])
    den = np.array([1.0])
    for _, tau in terms:
        den = np.polymul(den, [tau, 1.0])
    num = np.zeros(1)
    for i, (r, _) in enumerate(terms):
        part = np.array([r])
        for j, (_, tau) in enumerate(terms):
            if j != i:
                part = np.polymul(part, [tau, 1.0])
        num = np.polyadd(num, part)
    return TransferFunction(num, den)


def coherent_aggregate(group: CoherentGroup) -> TransferFunction:
    """``(sum g_i^{-1})^{-1}`` over a common denominator."""
    gt = aggregate_turbine(group)
    swing = np.array([group.inertia, group.damping])
    den = np.polyadd(np.polymul(swing, gt.den), gt.num)
    return TransferFunction(gt.den, den)


# ---------------------------------------------------------------------------
# frequency-domain coupling


def network_response(group: CoherentGroup, net: NetworkSpec, eta: float) -> np.ndarray:
    """Transfer matrix from disturbances to frequencies at ``s = j eta``."""
    if group.n != net.n:
        raise ValidationError("group and network sizes differ")
    if eta == 0:
        raise SingularAtFrequency("L/s is undefined at eta = 0")
    s = 1j * eta
    M = np.diag(group.inverse_response(s)) + net.laplacian / s
    if np.linalg.cond(M) > 1e14:
        raise SingularAtFrequency(f"system matrix singular at eta={eta:.6g}")
    return np.linalg.solve(M, np.eye(group.n, dtype=complex))


def band_grid(eta0: float, grid_size: int = 200) -> np.ndarray:
    """Symmetric log grid over ``+-[1e-3 eta0, eta0]``, zero excluded."""
    if eta0 <= 0:
        raise ValueError("eta0 must be positive")
    pos = np.logspace(np.log10(1e-3 * eta0), np.log10(eta0), grid_size)
    return np.concatenate([-pos[::-1], pos])


def coherence_gap(group: CoherentGroup, net: NetworkSpec, eta0: float, grid_size: int = 200) -> float:
    """``max_eta || T(j eta) - ghat(j eta) 1 1^T ||_2`` over the band."""
    if group.n == 1:
        return 0.0
    ones = np.ones((group.n, group.n))
    gap = 0.0
    for eta in band_grid(eta0, grid_size):
        T = network_response(group, net, eta)
        ghat = 1.0 / group.inverse_response(1j * eta).sum()
        gap = max(gap, float(np.linalg.norm(T - ghat * ones, 2)))
    return gap


def band_constants(group: CoherentGroup, eta0: float, grid_size: int = 200) -> tuple[float, float]:
    """Grid maxima of ``|n ghat|`` and ``max_i |g_i^{-1}|`` over the band."""
    m1 = m2 = 0.0
    for eta in band_grid(eta0, grid_size):
        inv = group.inverse_response(1j * eta)
        m1 = max(m1, float(abs(group.n / inv.sum())))
        m2 = max(m2, float(np.max(np.abs(inv))))
    return m1, m2


def lemma2_bound(m1: float, m2: float, lam2: float, eta0: float) -> float:
    """Upper bound on the coherence gap over ``[-eta0, eta0]``."""
    x = lam2 / eta0
    if not x > m2 + m1 * m2 ** 2:
        raise NotApplicable(
            f"lambda2/eta0 = {x:.6g} must exceed M2 + M1*M2^2 = {m2 + m1 * m2 ** 2:.6g}"
        )
    inv = 1.0 / (x - m2)
    head = m1 ** 2 * m2 ** 2 + 2.0 * m1 * m2 + m1 * m2 ** 2 * inv
    return head / (x - m2 - m1 * m2 ** 2) + inv


# ---------------------------------------------------------------------------
# time domain


def coi_trajectory(inertias: Sequence[float], trajs: Sequence[Trajectory]) -> Trajectory:
    """Inertia-weighted mean of bus frequency trajectories."""
    inertias = np.asarray(inertias, dtype=float)
    if len(trajs) == 0 or inertias.size != len(trajs):
        raise GridMismatch("need one inertia per trajectory")
    if np.any(inertias <= 0):
        raise ValidationError("inertias > 0")
    t0 = trajs[0].times
    for tr in trajs[1:]:
        if tr.times.shape != t0.shape or not np.array_equal(tr.times, t0):
            raise GridMismatch("trajectories are sampled on different grids")
    values = np.stack([tr.values for tr in trajs])
    return Trajectory(t0, inertias @ values / inertias.sum())


def coupled_state_space(group: CoherentGroup, net: NetworkSpec):
    """State matrices ``(A, B, C)`` of the Laplacian-coupled network.

    States are the generator states followed by the ``n - 1`` angle
    coordinates in the range space of ``L``. Inputs are the disturbances
    ``u`` and outputs the bus frequencies ``w``.
    """
    if group.n != net.n:
        raise ValidationError("group and network sizes differ")
    parts = [minimal_state_space(generator_transfer(g)) for g in group.generators]
    sizes = [p.n for p in parts]
    N, n = sum(sizes), group.n
    Ag = np.zeros((N, N))
    Bg = np.zeros((N, n))
    Cg = np.zeros((n, N))
    at = 0
    for i, p in enumerate(parts):
        sl = slice(at, at + p.n)
        Ag[sl, sl] = p.A
        Bg[sl, i] = p.B[:, 0]
        Cg[i, sl] = p.C[0]
        at += p.n
    lam, V = np.linalg.eigh(net.laplacian)
    Vp = V[:, 1:]
    Lp = Vp * lam[1:]
    A = np.block([[Ag, -Bg @ Lp], [Vp.T @ Cg, np.zeros((n - 1, n - 1))]])
    B = np.vstack([Bg, np.zeros((n - 1, n))])
    C = np.hstack([Cg, np.zeros((n, n - 1))])
    return A, B, C


def coupled_is_hurwitz(group: CoherentGroup, net: NetworkSpec) -> bool:
    A, _, _ = coupled_state_space(group, net)
    return bool(np.all(np.linalg.eigvals(A).real < 0))


def simulate_network(group: CoherentGroup, net: NetworkSpec, disturbance, horizon: float, dt: float):
    """Bus frequency responses to a constant disturbance vector applied at t = 0."""
    A, B, C = coupled_state_space(group, net)
    if not np.all(np.linalg.eigvals(A).real < 0):
        raise UnstableSystem("coupled network is not asymptotically stable")
    t = time_grid(horizon, dt)
    u = np.asarray(disturbance, dtype=float).reshape(group.n)
    y = simulate_constant_input(A, B, C, np.zeros((group.n, group.n)), u, t.size - 1, dt)
    return [Trajectory(t, y[:, i]) for i in range(group.n)]

