"""Random system generators and independent oracles shared by the tests."""

import numpy as np
from hypothesis import strategies as st
from scipy.integrate import quad_vec
from scipy.linalg import expm

from coherent_reduction.lti import TransferFunction
from coherent_reduction.network import CoherentGroup

TABLE1_DROOP = (0.0218, 0.0256, 0.0236, 0.0255, 0.0192)
TABLE1_TAU = (9.08, 5.26, 2.29, 7.97, 3.24)
TABLE1_M_HAT = 0.0683
TABLE1_D_HAT = 0.0107


def table1_group(m_hat=TABLE1_M_HAT):
    return CoherentGroup.from_aggregate(list(zip(TABLE1_DROOP, TABLE1_TAU)), m_hat, TABLE1_D_HAT)


def _separated(values, gap):
    values = sorted(values, key=lambda z: (z.real, z.imag))
    return all(abs(a - b) >= gap for i, a in enumerate(values) for b in values[i + 1:])


def random_poles(rng, order):
    while True:
        poles = []
        while len(poles) < order:
            if order - len(poles) >= 2 and rng.random() < 0.4:
                re = -rng.uniform(0.1, 5.0)
                im = rng.uniform(0.1, 5.0)
                poles += [complex(re, im), complex(re, -im)]
            else:
                poles.append(complex(-rng.uniform(0.1, 10.0), 0.0))
        if _separated(poles, 0.05):
            return poles


def random_stable_tf(rng, order, strictly_proper=True):
    """Stable rational function with well separated poles and zeros."""
    poles = random_poles(rng, order)
    n_zeros = int(rng.integers(0, order if strictly_proper else order + 1))
    while True:
        zeros = list(rng.uniform(-10.0, 10.0, n_zeros))
        if all(abs(z - p) > 0.05 for z in zeros for p in poles):
            break
    gain = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
    num = gain * np.real(np.poly(zeros)) if zeros else np.array([gain])
    return TransferFunction(num, np.real(np.poly(poles)))


@st.composite
def stable_tfs(draw, max_order=8, strictly_proper=False):
    seed = draw(st.integers(0, 2**32 - 1))
    order = draw(st.integers(1, max_order))
    return random_stable_tf(np.random.default_rng(seed), order, strictly_proper)


def gramian_by_quadrature(A, Q):
    """``int_0^inf e^{At} Q e^{A^T t} dt`` with ``t = u / (1 - u)`` on [0, 1)."""
    A = np.asarray(A, dtype=float)

    def integrand(u):
        if u >= 1.0:
            return np.zeros_like(Q)
        t = u / (1.0 - u)
        E = expm(A * t)
        return E @ Q @ E.T / (1.0 - u) ** 2

    val, _ = quad_vec(integrand, 0.0, 1.0, epsrel=1e-10, epsabs=1e-14, limit=2000)
    return val


def dense_peak(tf, lo=-5, hi=5, points=400_001):
    eta = np.concatenate([[0.0], np.logspace(lo, hi, points)])
    return float(np.max(np.abs(tf(1j * eta))))
