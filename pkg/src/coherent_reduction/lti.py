"""SISO linear time-invariant algebra.

Transfer functions are stored as real coefficient arrays in descending
powers of ``s``; state-space models as dense ``(A, B, C, D)`` arrays.
Everything here is a pure function of immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import linalg

from .errors import (
    ComplexPoles,
    ImproperTransfer,
    IntegratorPresent,
    NotHurwitz,
    PoleOnGrid,
    RepeatedPoles,
    UnstableSystem,
    ZeroDivisor,
)

# root-merging tolerance for pole/zero cancellation: |z - p| < tol * (1 + |p|)
CANCEL_TOL = 1e-8
# relative rank tolerance for the observability staircase
RANK_TOL = 1e-9

HINF_GRID = np.logspace(-4, 4, 2000)
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _as_poly(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float)).ravel()
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1)
    return c[nz[0]:].copy()


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """Proper SISO rational function ``num(s) / den(s)``."""

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = _as_poly(self.num)
        den = _as_poly(self.den)
        if not np.all(np.isfinite(num)) or not np.all(np.isfinite(den)):
            raise ValueError("transfer function coefficients must be finite")
        if den[0] == 0.0:
            raise ZeroDivisor("denominator is identically zero")
        if num[0] != 0.0 and num.size > den.size:
            raise ImproperTransfer(
                f"numerator degree {num.size - 1} exceeds denominator degree {den.size - 1}"
            )
        num.flags.writeable = False
        den.flags.writeable = False
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, gain: float) -> "TransferFunction":
        return cls([gain], [1.0])

    @property
    def order(self) -> int:
        return self.den.size - 1

    @property
    def is_zero(self) -> bool:
        return bool(self.num.size == 1 and self.num[0] == 0.0)

    @property
    def is_strictly_proper(self) -> bool:
        return self.is_zero or self.num.size < self.den.size

    def __call__(self, s):
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    def normalized(self) -> "TransferFunction":
        """Same function with a monic denominator."""
        lead = self.den[0]
        return TransferFunction(self.num / lead, self.den / lead)

    def scaled(self, k: float) -> "TransferFunction":
        return TransferFunction(k * self.num, self.den)

    def __neg__(self) -> "TransferFunction":
        return self.scaled(-1.0)

    def __add__(self, other) -> "TransferFunction":
        other = _coerce_tf(other)
        if np.array_equal(self.den, other.den):
            return TransferFunction(np.polyadd(self.num, other.num), self.den)
        num = np.polyadd(np.polymul(self.num, other.den), np.polymul(other.num, self.den))
        return TransferFunction(num, np.polymul(self.den, other.den))

    __radd__ = __add__

    def __sub__(self, other) -> "TransferFunction":
        return self + (-_coerce_tf(other))

    def __rsub__(self, other) -> "TransferFunction":
        return _coerce_tf(other) - self

    def __mul__(self, other) -> "TransferFunction":
        other = _coerce_tf(other)
        return TransferFunction(
            np.polymul(self.num, other.num), np.polymul(self.den, other.den)
        )

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"TransferFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def _coerce_tf(x) -> TransferFunction:
    if isinstance(x, TransferFunction):
        return x
    return TransferFunction.constant(float(x))


@dataclass(frozen=True, eq=False)
class StateSpace:
    """SISO realization ``x' = A x + B u, y = C x + D u``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        n = 0 if A.size == 0 else A.shape[0]
        A = A.reshape(n, n)
        B = np.asarray(self.B, dtype=float).reshape(n, 1)
        C = np.asarray(self.C, dtype=float).reshape(1, n)
        for arr in (A, B, C):
            arr.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", float(self.D))

    @property
    def n(self) -> int:
        return self.A.shape[0]


System = Union[TransferFunction, StateSpace]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled signal (times in s, values in rad/s)."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float).ravel()
        if t.shape != v.shape:
            raise ValueError("times and values must have equal length")
        if t.size > 1:
            steps = np.diff(t)
            if np.any(steps <= 0):
                raise ValueError("times must be strictly increasing")
            dt = (t[-1] - t[0]) / (t.size - 1)
            if np.max(np.abs(steps - dt)) > 1e-12 * max(1.0, abs(t[-1])) + 1e-12 * dt * t.size:
                raise ValueError("times must be uniformly spaced")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class PartialFractionTerms:
    """``direct + sum(gain_i / (time_constant_i s + 1))``."""

    gains: tuple
    time_constants: tuple
    direct: float = 0.0

    def recombine(self) -> TransferFunction:
        out = TransferFunction.constant(self.direct)
        for g, tau in zip(self.gains, self.time_constants):
            out = out + TransferFunction([g], [tau, 1.0])
        return out

    def __iter__(self):
        return iter(zip(self.gains, self.time_constants))

    def __len__(self) -> int:
        return len(self.gains)


class PoleSet(NamedTuple):
    values: np.ndarray
    stable: bool


# ---------------------------------------------------------------------------
# polynomial helpers


def polynomial_divide(D, N) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Q, R)`` with ``D = Q*N + R`` and ``deg R < deg N``."""
    N = _as_poly(N)
    D = _as_poly(D)
    if N[0] == 0.0:
        raise ZeroDivisor("division by the zero polynomial")
    if D.size < N.size:
        return np.zeros(1), D
    Q, R = np.polydiv(D, N)
    R = np.atleast_1d(R)
    if R.size >= N.size:
        R = R[R.size - (N.size - 1):] if N.size > 1 else np.zeros(1)
    return _as_poly(Q), _as_poly(R)


def coefficient_error(a: TransferFunction, b: TransferFunction) -> float:
    """Max coefficient difference of the monic-normalized forms, relative to
    the largest coefficient magnitude."""
    a, b = a.normalized(), b.normalized()
    if a.den.size != b.den.size:
        return np.inf
    size = max(a.num.size, b.num.size)
    na = np.pad(a.num, (size - a.num.size, 0))
    nb = np.pad(b.num, (size - b.num.size, 0))
    va = np.concatenate([na, a.den])
    vb = np.concatenate([nb, b.den])
    return float(np.max(np.abs(va - vb)) / max(np.max(np.abs(va)), np.max(np.abs(vb))))


def cancel_common_roots(tf: TransferFunction, tol: float = CANCEL_TOL) -> TransferFunction:
    """Remove numerator/denominator roots closer than ``tol * (1 + |p|)``."""
    if tf.is_zero:
        return TransferFunction([0.0], [1.0])
    if tf.num.size == 1 or tf.den.size == 1:
        return tf
    zeros = list(np.roots(tf.num))
    poles = list(np.roots(tf.den))
    kept_poles = []
    cancelled = False
    for p in poles:
        if zeros:
            dist = np.abs(np.asarray(zeros) - p)
            j = int(np.argmin(dist))
            if dist[j] < tol * (1.0 + abs(p)):
                zeros.pop(j)
                cancelled = True
                continue
        kept_poles.append(p)
    if not cancelled:
        return tf
    num = tf.num[0] * np.real(np.poly(zeros)) if zeros else np.array([tf.num[0]])
    den = tf.den[0] * np.real(np.poly(kept_poles)) if kept_poles else np.array([tf.den[0]])
    return TransferFunction(num, den)


# ---------------------------------------------------------------------------
# realizations


def _controllable_reduction(A, B, C, tol):
    """Orthogonal staircase: keep the controllable part of a single-input
    triple (A, B, C)."""
    n = A.shape[0]
    b = B[:, 0]
    beta = np.linalg.norm(b)
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(b), 1e-300)
    if beta <= tol * scale:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((C.shape[0], 0))
    # Householder reflector mapping b onto beta * e1
    v = b.copy()
    v[0] += np.copysign(beta, b[0]) if b[0] != 0 else beta
    P = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    A1 = P @ A @ P.T
    H, Q = linalg.hessenberg(A1, calc_q=True)
    T = P.T @ Q
    r = n
    for j in range(n - 1):
        if abs(H[j + 1, j]) <= tol * scale:
            r = j + 1
            break
    Bt = T.T @ B
    Ct = C @ T
    return H[:r, :r], Bt[:r], Ct[:, :r]


def minimal_state_space(tf: TransferFunction, tol: float = RANK_TOL) -> StateSpace:
    """Minimal realization of ``tf``.

    Builds the controllable canonical form after cancelling near-common
    roots, then strips any remaining unobservable directions with an
    orthogonal staircase whose rank decisions use ``tol``.
    """
    if tf.num.size > tf.den.size and not tf.is_zero:
        raise ImproperTransfer("numerator degree exceeds denominator degree")
    if tol <= 0:
        raise ValueError("tol must be positive")
    tf = cancel_common_roots(tf).normalized()
    n = tf.order
    if n == 0 or tf.is_zero:
        gain = 0.0 if tf.is_zero else tf.num[-1] / tf.den[-1]
        return StateSpace(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), gain)
    num = np.pad(tf.num, (tf.den.size - tf.num.size, 0))
    D = num[0]
    strict = num[1:] - D * tf.den[1:]
    A = np.zeros((n, n))
    A[0, :] = -tf.den[1:]
    A[1:, :-1] = np.eye(n - 1)
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    C = strict.reshape(1, n)
    # diagonal scaling keeps the rank decisions meaningful for spread-out poles
    _, (scale, _) = linalg.matrix_balance(A, permute=False, separate=True)
    A = A * scale[None, :] / scale[:, None]
    B = B / scale[:, None]
    C = C * scale[None, :]
    # observability staircase via the dual
    At, Ct, Bt = _controllable_reduction(A.T, C.T, B.T, tol)
    return StateSpace(At.T, Bt.T, Ct.T, D)


def _charpoly(A: np.ndarray) -> np.ndarray:
    if A.shape[0] == 0:
        return np.ones(1)
    return np.real(np.poly(np.linalg.eigvals(A)))


def transfer_of(ss: StateSpace, tol: float = CANCEL_TOL) -> TransferFunction:
    """Transfer function ``C (sI - A)^-1 B + D`` with near-common roots cancelled."""
    if ss.n == 0:
        return TransferFunction.constant(ss.D)
    den = _charpoly(ss.A)
    closed = _charpoly(ss.A - ss.B @ ss.C)
    num = closed - den + ss.D * den
    if ss.D == 0.0:
        num = num[1:]
        scale = max(np.max(np.abs(num)), 1e-300)
        lead = 0
        while lead < num.size - 1 and abs(num[lead]) <= 1e-12 * scale:
            lead += 1
        num = num[lead:]
    return cancel_common_roots(TransferFunction(num, den), tol)


def to_state_space(sys: System) -> StateSpace:
    return sys if isinstance(sys, StateSpace) else minimal_state_space(sys)


def poles(sys: System) -> PoleSet:
    if isinstance(sys, StateSpace):
        p = np.linalg.eigvals(sys.A) if sys.n else np.zeros(0, dtype=complex)
    else:
        p = np.roots(sys.den).astype(complex) if sys.order else np.zeros(0, dtype=complex)
    return PoleSet(p, bool(np.all(p.real < 0)))


def _require_stable(sys: System, what: str = "system") -> None:
    ps = poles(sys)
    if not ps.stable:
        worst = ps.values[np.argmax(ps.values.real)]
        raise UnstableSystem(f"{what} has a pole at {worst:.6g} with nonnegative real part")


# ---------------------------------------------------------------------------
# Lyapunov equations


def _lyap_kron(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    I = np.eye(n)
    K = np.kron(I, A) + np.kron(A, I)
    x = np.linalg.solve(K, -Q.reshape(-1, order="F"))
    return x.reshape(n, n, order="F")


def solve_lyapunov(A, Q) -> np.ndarray:
    """Solve ``A X + X A^T + Q = 0`` for Hurwitz ``A``."""
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    eig = np.linalg.eigvals(A)
    if np.any(eig.real >= -1e-12):
        raise NotHurwitz(f"A has an eigenvalue with real part {eig.real.max():.3g}")
    Q = 0.5 * (Q + Q.T)
    X = linalg.solve_continuous_lyapunov(A, -Q)
    X = 0.5 * (X + X.T)
    qn = np.linalg.norm(Q)
    if np.linalg.norm(A @ X + X @ A.T + Q) > 1e-8 * qn and n <= 20:
        Xk = _lyap_kron(A, Q)
        Xk = 0.5 * (Xk + Xk.T)
        if np.linalg.norm(A @ Xk + Xk @ A.T + Q) < np.linalg.norm(A @ X + X @ A.T + Q):
            X = Xk
    return X


# ---------------------------------------------------------------------------
# responses


def frequency_response(sys: System, grid) -> np.ndarray:
    """Evaluate ``sys(j*eta)`` for each ``eta`` in ``grid`` (rad/s)."""
    eta = np.atleast_1d(np.asarray(grid, dtype=float))
    s = 1j * eta
    if isinstance(sys, TransferFunction):
        den = np.polyval(sys.den, s)
        bad = np.abs(den) < 1e-14 * np.linalg.norm(sys.den)
        if np.any(bad):
            raise PoleOnGrid(f"pole on the imaginary axis at eta={eta[bad][0]:.6g}")
        return np.polyval(sys.num, s) / den
    if sys.n == 0:
        return np.full(eta.shape, sys.D, dtype=complex)
    lam = np.linalg.eigvals(sys.A)
    scale = max(1.0, np.linalg.norm(sys.A, 2))
    out = np.empty(eta.shape, dtype=complex)
    I = np.eye(sys.n)
    for i, si in enumerate(s):
        if np.min(np.abs(lam - si)) < 1e-14 * scale:
            raise PoleOnGrid(f"pole on the imaginary axis at eta={eta[i]:.6g}")
        x = np.linalg.solve(si * I - sys.A, sys.B[:, 0])
        out[i] = sys.C[0] @ x + sys.D
    return out


def dc_gain(sys: System) -> float:
    if isinstance(sys, TransferFunction):
        if abs(sys.den[-1]) <= 1e-14 * np.max(np.abs(sys.den)):
            raise IntegratorPresent("denominator has a root at s = 0")
        return float(sys.num[-1] / sys.den[-1]) if sys.num.size else 0.0
    if sys.n == 0:
        return sys.D
    try:
        lu = linalg.lu_factor(sys.A, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) <= 1e-14 * np.max(np.abs(sys.A)):
            raise IntegratorPresent("A is singular")
        x = linalg.lu_solve(lu, sys.B[:, 0])
    except linalg.LinAlgError as exc:
        raise IntegratorPresent("A is singular") from exc
    return float(-sys.C[0] @ x + sys.D)


def zoh_discretize(A, B, dt):
    """Exact zero-order-hold discretization via the augmented exponential."""
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    n, m = B.shape
    M = np.zeros((n + m, n + m))
    M[:n, :n] = A
    M[:n, n:] = B
    E = linalg.expm(M * dt)
    return E[:n, :n], E[:n, n:]


def simulate_constant_input(A, B, C, D, u, n_steps: int, dt: float, block: int = 1024):
    """Zero-state response to a constant input held from t = 0.

    Returns outputs at ``k*dt`` for ``k = 0..n_steps`` with shape
    ``(n_steps + 1, n_outputs)``. Uses exact ZOH stepping, evaluated in
    blocks of precomputed transition powers.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    D = np.atleast_2d(np.asarray(D, dtype=float))
    nx = A.shape[0] if A.size else 0
    direct = (D @ u) if D.size else np.zeros(C.shape[0])
    out = np.empty((n_steps + 1, C.shape[0]))
    if nx == 0:
        out[:] = direct
        return out
    Phi, Gam = zoh_discretize(A, np.asarray(B, dtype=float).reshape(nx, -1), dt)
    g = Gam @ u
    block = max(1, min(block, n_steps + 1))
    powers = np.empty((block, nx, nx))
    forced = np.empty((block, nx))
    powers[0] = np.eye(nx)
    forced[0] = 0.0
    for j in range(1, block):
        powers[j] = powers[j - 1] @ Phi
        forced[j] = forced[j - 1] @ Phi.T + g
    out_pow = np.einsum("ij,bjk->bik", C, powers)
    out_forced = forced @ C.T + direct
    jump = powers[-1] @ Phi
    jump_forced = forced[-1] @ Phi.T + g
    x = np.zeros(nx)
    for start in range(0, n_steps + 1, block):
        stop = min(start + block, n_steps + 1)
        count = stop - start
        out[start:stop] = out_pow[:count] @ x + out_forced[:count]
        x = jump @ x + jump_forced
    return out


def time_grid(horizon: float, dt: float) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if horizon < dt:
        raise ValueError("horizon must be at least dt")
    n_steps = int(np.floor(horizon / dt + 1e-9))
    return dt * np.arange(n_steps + 1)


def step_response(sys: System, amplitude: float = 1.0, horizon: float = 10.0, dt: float = 1e-3) -> Trajectory:
    """Zero-state response to ``amplitude`` times a unit step."""
    ss = to_state_space(sys)
    _require_stable(ss)
    t = time_grid(horizon, dt)
    y = simulate_constant_input(ss.A, ss.B, ss.C, [[ss.D]], [amplitude], t.size - 1, dt)
    return Trajectory(t, y[:, 0])


# ---------------------------------------------------------------------------
# norms


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]`` by golden-section search."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    while (b - a) > tol * max(abs(a) + abs(b), 1e-300) * 0.5:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx > best_f:
                best_x, best_f = x, fx
    return best_x, best_f


def hinf_norm(sys: System, tol: float = 1e-6) -> float:
    """Peak gain ``sup_eta |sys(j eta)|`` of a stable SISO system.

    Log grid over [1e-4, 1e4] rad/s plus ``eta = 0`` and the imaginary
    parts of the poles, followed by golden-section refinement around the
    three largest local maxima.
    """
    _require_stable(sys)
    if isinstance(sys, StateSpace):
        if sys.n == 0:
            return abs(sys.D)
        sys = transfer_of(sys)
    if sys.order == 0:
        return abs(float(sys.num[-1] / sys.den[-1]))
    resonances = np.abs(poles(sys).values.imag)
    grid = np.unique(np.concatenate([[0.0], HINF_GRID, resonances[resonances > 0]]))
    mag = np.abs(frequency_response(sys, grid))
    at_infinity = abs(sys.num[0] / sys.den[0]) if sys.num.size == sys.den.size else 0.0
    best = max(float(mag.max()), at_infinity)

    def f(eta):
        return float(np.abs(frequency_response(sys, [eta])[0]))

    interior = [
        i for i in range(grid.size)
        if (i == 0 or mag[i] >= mag[i - 1]) and (i == grid.size - 1 or mag[i] >= mag[i + 1])
    ]
    interior.sort(key=lambda i: (-mag[i], i))
    for i in interior[:3]:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, grid.size - 1)]
        if hi <= lo:
            continue
        _, fx = _golden_max(f, lo, hi, tol)
        best = max(best, fx)
    return best


# ---------------------------------------------------------------------------
# partial fractions


def partial_fractions(tf: TransferFunction) -> PartialFractionTerms:
    """Expand ``tf`` into first-order terms ``g / (tau s + 1)``.

    Terms are ordered by increasing time constant.
    """
    direct = 0.0
    num = tf.num
    if not tf.is_strictly_proper:
        q, num = polynomial_divide(tf.num, tf.den)
        direct = float(q[-1])
    if tf.order == 0:
        return PartialFractionTerms((), (), direct)
    roots = np.roots(tf.den)
    if np.any(np.abs(roots.imag) > 1e-10 * np.abs(roots)):
        raise ComplexPoles(f"denominator has complex roots {roots}")
    roots = np.sort(roots.real)
    if roots.size > 1:
        sep = np.min(np.diff(roots))
        if sep < 1e-10 * max(1.0, np.max(np.abs(roots))):
            raise RepeatedPoles(f"denominator roots closer than {sep:.3g}")
    if np.any(roots >= 0):
        raise UnstableSystem("a pole at s >= 0 has no first-order lag form")
    dden = np.polyder(tf.den)
    residues = np.polyval(num, roots) / np.polyval(dden, roots)
    taus = -1.0 / roots
    gains = residues * taus
    order = np.argsort(taus)
    return PartialFractionTerms(
        tuple(float(g) for g in gains[order]),
        tuple(float(t) for t in taus[order]),
        direct,
    )
