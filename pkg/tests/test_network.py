import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherent_reduction.errors import GridMismatch, NotApplicable, SingularAtFrequency, ValidationError
from coherent_reduction.lti import TransferFunction, Trajectory, coefficient_error, dc_gain, step_response
from coherent_reduction.network import (
    CoherentGroup,
    DroopInverter,
    NetworkSpec,
    Swing,
    SwingTurbine,
    aggregate_turbine,
    band_constants,
    coherence_gap,
    coherent_aggregate,
    coi_trajectory,
    coupled_is_hurwitz,
    coupled_state_space,
    generator_transfer,
    lemma2_bound,
    network_response,
    random_network,
    simulate_network,
)
from coherent_reduction.scenario import load_scenario, shipped_scenarios

from helpers import TABLE1_D_HAT, TABLE1_DROOP, TABLE1_M_HAT, TABLE1_TAU

RANDOM10_SEED = 20190704
SCALES = (1.0, 10.0, 100.0, 1000.0)


def _unit_pair():
    return CoherentGroup((Swing(1.0, 1.0), Swing(1.0, 1.0)))


def _path_laplacian(alpha=1.0):
    return NetworkSpec(alpha * np.array([[1.0, -1.0], [-1.0, 1.0]]))


class TestGeneratorModels:
    def test_swing(self):
        tf = generator_transfer(Swing(1.0, 1.0))
        assert coefficient_error(tf, TransferFunction([1.0], [1.0, 1.0])) == 0.0

    def test_zero_droop_degenerates(self):
        tf = generator_transfer(SwingTurbine(0.3, 0.2, 0.0, 4.0))
        assert coefficient_error(tf.normalized(), TransferFunction([1.0], [0.3, 0.2]).normalized()) < 1e-12

    def test_table1_generator_one(self):
        g = SwingTurbine(TABLE1_M_HAT / 5, TABLE1_D_HAT / 5, 0.0218, 9.08)
        tf = generator_transfer(g)
        assert tf.num == pytest.approx([9.08, 1.0])
        assert tf.den == pytest.approx([0.1240, 0.03309, 0.02394], rel=1e-3)

    def test_droop_inverter(self):
        tf = generator_transfer(DroopInverter(2.0, 0.5))
        assert tf(0.7j) == pytest.approx(2.0 / (0.5 * 0.7j + 1))

    @pytest.mark.parametrize("bad", [dict(m=0.0, d=1.0), dict(m=1.0, d=-1.0)])
    def test_swing_validation(self, bad):
        with pytest.raises(ValidationError):
            Swing(**bad)

    def test_turbine_validation_message(self):
        with pytest.raises(ValidationError, match="tau > 0"):
            SwingTurbine(1.0, 1.0, 0.1, -1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(1e-3, 10), st.floats(0, 10), st.floats(0, 10), st.floats(1e-2, 20), st.floats(-3, 3))
    def test_closed_form_matches_inverse(self, m, d, r, tau, logeta):
        g = SwingTurbine(m, d, r, tau)
        s = 1j * 10.0 ** logeta
        direct = 1.0 / (m * s + d + r / (tau * s + 1))
        assert generator_transfer(g)(s) == pytest.approx(direct, rel=1e-9)
        assert g.inverse(s) == pytest.approx(1.0 / direct, rel=1e-9)


class TestAggregation:
    def test_swing_sums(self):
        group = CoherentGroup((Swing(1.0, 0.5), Swing(2.0, 0.5)))
        assert coefficient_error(coherent_aggregate(group).normalized(),
                                 TransferFunction([1.0], [3.0, 1.0]).normalized()) < 1e-12

    def test_inverter_formulas(self):
        group = CoherentGroup((DroopInverter(1.0, 2.0), DroopInverter(1.0, 4.0)))
        ref = TransferFunction([0.5], [3.0, 1.0])
        assert coefficient_error(coherent_aggregate(group).normalized(), ref.normalized()) < 1e-12

    def test_table1(self, table1):
        ghat = coherent_aggregate(table1)
        assert ghat.order == 6
        assert dc_gain(ghat) == pytest.approx(1.0 / (TABLE1_D_HAT + sum(TABLE1_DROOP)), rel=1e-12)
        assert dc_gain(ghat) == pytest.approx(7.911, abs=5e-4)

    def test_turbine_aggregate(self, table1):
        single = CoherentGroup((SwingTurbine(1.0, 1.0, 0.1, 2.0),))
        assert coefficient_error(aggregate_turbine(single).normalized(),
                                 TransferFunction([0.1], [2.0, 1.0]).normalized()) < 1e-12
        gt = aggregate_turbine(table1)
        assert gt.order == 5
        assert dc_gain(gt) == pytest.approx(sum(TABLE1_DROOP), rel=1e-12)
        assert dc_gain(gt) == pytest.approx(0.1157, abs=1e-4)

    def test_zero_droop_aggregate(self):
        group = CoherentGroup((SwingTurbine(1.0, 1.0, 0.0, 2.0), SwingTurbine(1.0, 1.0, 0.0, 3.0)))
        assert aggregate_turbine(group).is_zero

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_swing_closed_form(self, seed, n):
        rng = np.random.default_rng(seed)
        m, d = rng.uniform(0.01, 5, n), rng.uniform(0.0, 5, n)
        ghat = coherent_aggregate(CoherentGroup(tuple(Swing(a, b) for a, b in zip(m, d))))
        ref = TransferFunction([1.0], [m.sum(), d.sum()])
        assert coefficient_error(ghat.normalized(), ref.normalized()) < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_inverter_closed_form(self, seed, n):
        rng = np.random.default_rng(seed)
        k, tau = rng.uniform(0.1, 50, n), rng.uniform(0.01, 5, n)
        ghat = coherent_aggregate(CoherentGroup(tuple(DroopInverter(a, b) for a, b in zip(k, tau))))
        k_hat = 1.0 / np.sum(1.0 / k)
        tau_hat = k_hat * np.sum(tau / k)
        ref = TransferFunction([k_hat], [tau_hat, 1.0])
        assert coefficient_error(ghat.normalized(), ref.normalized()) < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_homogeneous_collapse(self, seed, n):
        rng = np.random.default_rng(seed)
        tau = rng.uniform(0.5, 10)
        m, d, r = rng.uniform(0.01, 1, n), rng.uniform(0, 0.1, n), rng.uniform(0.001, 0.1, n)
        group = CoherentGroup(tuple(SwingTurbine(*p, tau) for p in zip(m, d, r)))
        ghat = coherent_aggregate(group)
        ref = generator_transfer(SwingTurbine(m.sum(), d.sum(), r.sum(), tau))
        assert ghat.order == 2
        assert coefficient_error(ghat.normalized(), ref.normalized()) < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_aggregate_identity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        group = CoherentGroup(tuple(
            SwingTurbine(rng.uniform(0.01, 1), rng.uniform(0, 0.1), rng.uniform(0, 0.1), rng.uniform(0.5, 10))
            for _ in range(n)
        ))
        ghat = coherent_aggregate(group)
        s = 1j * 10.0 ** rng.uniform(-3, 3)
        total = group.inverse_response(s).sum()
        assert 1.0 / ghat(s) == pytest.approx(total, rel=1e-9)


class TestNetworkSpec:
    def test_from_edges(self):
        net = NetworkSpec.from_edges(3, [(0, 1, 2.0), (1, 2, 1.0)])
        assert np.allclose(net.laplacian, [[2, -2, 0], [-2, 3, -1], [0, -1, 1]])
        assert net.algebraic_connectivity == pytest.approx(3 - np.sqrt(3))

    @pytest.mark.parametrize("L", [[[1, -1], [-0.5, 0.5]], [[1, -0.5], [-0.5, 1]], [[-1, 1], [1, -1]]])
    def test_invalid(self, L):
        with pytest.raises(ValidationError):
            NetworkSpec(L)

    def test_random_network_reproducible(self):
        a = random_network(10, 0.5, RANDOM10_SEED)
        b = random_network(10, 0.5, RANDOM10_SEED)
        assert np.array_equal(a.laplacian, b.laplacian)
        assert a.algebraic_connectivity > 0

    def test_shipped_random10_matches_seed(self):
        shipped = load_scenario("random10").network
        assert np.allclose(shipped.laplacian, random_network(10, 0.5, RANDOM10_SEED).laplacian, atol=1e-9)


class TestNetworkResponse:
    def test_single(self):
        g = Swing(2.0, 0.5)
        T = network_response(CoherentGroup((g,)), NetworkSpec([[0.0]]), 0.8)
        assert T[0, 0] == pytest.approx(generator_transfer(g)(0.8j))

    def test_hand_solved_pair(self):
        s = 1j
        a = s + 1 + 1 / s
        b = -1 / s
        ref = np.array([[a, -b], [-b, a]]) / (a * a - b * b)
        assert np.allclose(network_response(_unit_pair(), _path_laplacian(), 1.0), ref, rtol=1e-12)

    def test_off_diagonal_approaches_ghat(self):
        group = _unit_pair()
        ghat = coherent_aggregate(group)(0.5j)
        errs = [abs(network_response(group, _path_laplacian(a), 0.5)[0, 1] - ghat) for a in (1, 10, 100)]
        assert errs[0] > errs[1] > errs[2]

    def test_zero_frequency(self):
        with pytest.raises(SingularAtFrequency):
            network_response(_unit_pair(), _path_laplacian(), 0.0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-3, 2), st.sampled_from([1.0, 10.0, 100.0]))
    def test_column_sums(self, logeta, alpha):
        s = load_scenario("random10")
        net = s.network.scaled(alpha)
        eta = 10.0 ** logeta
        T = network_response(s.group, net, eta)
        lhs = s.group.inverse_response(1j * eta) @ T
        assert np.allclose(lhs, np.ones(10), atol=1e-9)
        w = np.random.default_rng(0).normal(size=10)
        assert abs(np.ones(10) @ (net.laplacian / (1j * eta)) @ w) < 1e-9 * np.linalg.norm(w) * alpha


class TestCoherence:
    def test_pair_decreasing(self):
        group = _unit_pair()
        gaps = [coherence_gap(group, _path_laplacian(a), 1.0) for a in (1, 10, 100)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_stiff_limit(self):
        assert coherence_gap(_unit_pair(), _path_laplacian(1e6), 1.0) < 1e-3

    def test_single(self):
        assert coherence_gap(CoherentGroup((Swing(1, 1),)), NetworkSpec([[0.0]]), 1.0) == 0.0

    def test_random10_stiffening_trend(self):
        s = load_scenario("random10")
        gaps = [coherence_gap(s.group, s.network.scaled(a), 5.0) for a in SCALES]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-2

    def test_bound_dominates_gap(self):
        s = load_scenario("random10")
        m1, m2 = band_constants(s.group, 5.0, 200)
        checked = 0
        for a in (10.0, 30.0, 100.0, 300.0, 1000.0, 1e4):
            net = s.network.scaled(a)
            try:
                bound = lemma2_bound(m1, m2, net.algebraic_connectivity, 5.0)
            except NotApplicable:
                continue
            checked += 1
            assert coherence_gap(s.group, net, 5.0, 200) <= bound
        assert checked >= 4


class TestBandConstants:
    def test_single_swing(self):
        m1, m2 = band_constants(CoherentGroup((Swing(1.0, 1.0),)), 1.0, 400)
        assert m1 == pytest.approx(1.0, rel=1e-5)
        assert m2 == pytest.approx(np.sqrt(2.0), rel=1e-12)

    def test_all_swing_low_band(self):
        group = CoherentGroup((Swing(0.1, 1.0), Swing(0.2, 2.0), Swing(0.3, 0.5)))
        m1, _ = band_constants(group, 1e-3)
        assert m1 == pytest.approx(3 / 3.5, rel=1e-6)

    def test_table1_regression(self, table1):
        m1, m2 = band_constants(table1, 10.0)
        # independent path: polynomial form of ghat on the same grid
        eta = np.logspace(np.log10(1e-2), 1, 200)
        ghat = coherent_aggregate(table1)
        assert m1 == pytest.approx(np.max(np.abs(5 * ghat(1j * eta))), rel=1e-9)
        assert (m1, m2) == pytest.approx((183.187065, 0.136376774), rel=1e-6)


class TestGapBound:
    def test_arithmetic(self):
        assert lemma2_bound(1.0, 1.0, 10.0, 1.0) == pytest.approx((1 + 2 + 1 / 9) / 8 + 1 / 9)
        assert lemma2_bound(1.0, 1.0, 10.0, 1.0) == pytest.approx(0.5, abs=5e-5)

    def test_limit(self):
        assert lemma2_bound(1.0, 1.0, 1e9, 1.0) < 1e-8

    def test_boundary(self):
        with pytest.raises(NotApplicable):
            lemma2_bound(1.0, 1.0, 2.0, 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6))
    def test_perturbed_inverse_norm(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        smin = np.linalg.svd(A, compute_uv=False)[-1]
        B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        B *= rng.uniform(0.0, 0.99) * smin / np.linalg.norm(B, 2)
        lhs = np.linalg.norm(np.linalg.inv(A + B), 2)
        assert lhs <= (1 + 1e-9) / (smin - np.linalg.norm(B, 2))


class TestCoI:
    def test_identical(self):
        tr = Trajectory(np.arange(5) * 0.1, np.arange(5.0))
        assert np.array_equal(coi_trajectory([1.0, 2.0], [tr, tr]).values, tr.values)

    def test_equal_inertias(self):
        t = np.arange(4) * 0.5
        a, b = Trajectory(t, np.array([0.0, 1, 2, 3])), Trajectory(t, np.array([2.0, 2, 2, 2]))
        assert np.allclose(coi_trajectory([1.0, 1.0], [a, b]).values, [1, 1.5, 2, 2.5])

    def test_weighted(self):
        t = np.array([0.0, 1.0])
        a, b = Trajectory(t, np.array([0.0, 0.0])), Trajectory(t, np.array([4.0, 4.0]))
        assert coi_trajectory([1.0, 3.0], [a, b]).values[0] == pytest.approx(3.0)

    def test_grid_mismatch(self):
        a = Trajectory(np.array([0.0, 1.0]), np.zeros(2))
        b = Trajectory(np.array([0.0, 0.5]), np.zeros(2))
        with pytest.raises(GridMismatch):
            coi_trajectory([1.0, 1.0], [a, b])

    def test_tracks_aggregate_on_synthetic_network(self):
        s = load_scenario("random10")
        u = np.full(10, -0.01)
        trajs = simulate_network(s.group, s.network, u, 60.0, 1e-2)
        coi = coi_trajectory(s.group.inertias, trajs)
        ref = step_response(coherent_aggregate(s.group), u.sum(), 60.0, 1e-2)
        assert np.max(np.abs(coi.values - ref.values)) < 1e-3 * np.max(np.abs(ref.values))


class TestCoupledSystem:
    @pytest.mark.parametrize("name", shipped_scenarios())
    def test_hurwitz(self, name):
        s = load_scenario(name)
        net = s.network
        if net is None:
            n = s.group.n
            net = NetworkSpec(n * np.eye(n) - np.ones((n, n)))
        assert coupled_is_hurwitz(s.group, net)

    def test_transfer_matches_frequency_domain(self):
        s = load_scenario("random10")
        A, B, C = coupled_state_space(s.group, s.network)
        eta = 0.7
        T_ss = C @ np.linalg.solve(1j * eta * np.eye(A.shape[0]) - A, B)
        assert np.allclose(T_ss, network_response(s.group, s.network, eta), rtol=1e-8, atol=1e-10)
