import math

import numpy as np
import pytest

from collisim.channel import (
    BathSpec,
    apply_collision,
    bath_state,
    check_stationarity,
    closed_form_d,
    closed_form_k,
    collision_map,
    decoherence_factor,
    iterate,
    stationarity_deviation,
)
from collisim.linalg import QubitState, partial_trace, tensor, trace_distance
from collisim.machines import MachineParams, build_machine, build_v, gauge_transform

from helpers import channel_conjugation


def _rand_state(rng):
    d = rng.uniform()
    kmax = math.sqrt(d * (1 - d))
    k = kmax * rng.uniform() * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return QubitState(d=d, k=k)


def _rand_machine(rng):
    return MachineParams(
        rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)
    )


class TestBathSpec:
    def test_zero_temperature(self):
        b = BathSpec.from_temperature(math.inf, 1.0)
        assert b.p == 1.0
        np.testing.assert_array_equal(bath_state(b), np.diag([1.0, 0.0]))

    def test_infinite_temperature(self):
        b = BathSpec.from_temperature(0.0, 1.0)
        assert b.p == 0.5
        np.testing.assert_array_equal(bath_state(b), np.eye(2) / 2)

    def test_closed_form_tanh_point(self):
        # tanh(ln(3)/2) = 1/2, so p = 3/4
        b = BathSpec.from_temperature(0.5 * math.log(3.0), 1.0)
        np.testing.assert_allclose(bath_state(b), np.diag([0.75, 0.25]), atol=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            BathSpec.from_population(1.2)
        with pytest.raises(ValueError):
            BathSpec.from_temperature(1.0, -2.0)
        assert BathSpec.from_population(0.3).q == pytest.approx(0.7)


class TestOneCollision:
    def test_full_swap_thermalizes_in_one_step(self):
        rng = np.random.default_rng(0)
        b = BathSpec.from_population(0.8)
        m = MachineParams(np.pi / 2, 1.3, 0.4)
        for _ in range(5):
            out = apply_collision(_rand_state(rng), m, b)
            assert abs(out.d - b.p) < 1e-14
            assert abs(out.k) < 1e-14

    def test_half_mixing_at_zero_temperature(self):
        out = apply_collision(
            QubitState(d=0.0), MachineParams(np.pi / 4, 0, 0), BathSpec.from_population(1.0)
        )
        assert out.d == pytest.approx(0.5, abs=1e-14)

    def test_matrix_path_equals_analytic_map(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            s = _rand_state(rng)
            m = _rand_machine(rng)
            b = BathSpec.from_population(rng.uniform())
            got = apply_collision(s, m, b)
            ana = collision_map(s, m, b)
            assert abs(got.d - ana.d) < 1e-13
            assert abs(got.k - ana.k) < 1e-13

    def test_gauge_invariance_of_the_channel(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            s = _rand_state(rng)
            m = _rand_machine(rng)
            b = BathSpec.from_population(rng.uniform())
            g = gauge_transform(build_machine(m), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
            out = channel_conjugation(g, s.to_matrix(), b.p)
            ref = apply_collision(s, m, b).to_matrix()
            assert np.abs(out - ref).max() < 1e-13

    def test_ancilla_stationarity_at_equilibrium(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = _rand_machine(rng)
            b = BathSpec.from_population(rng.uniform())
            xi = bath_state(b)
            u = build_machine(m)
            joint = u @ tensor(xi, xi) @ u.conj().T
            assert np.abs(partial_trace(joint, [1]) - xi).max() < 1e-13


class TestDecoherenceFactor:
    def test_zero_theta(self):
        lam = decoherence_factor(0.3, 0.0, 0.7)
        assert lam == pytest.approx(np.exp(0.7j))
        assert abs(lam) == pytest.approx(1.0)

    def test_symmetric_bath(self):
        assert decoherence_factor(0.5, 1.1, 0.0) == pytest.approx(math.cos(1.1))

    def test_theta_shift_by_pi_preserves_magnitude(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p, th, al = rng.uniform(), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)
            assert abs(decoherence_factor(p, th, al)) == pytest.approx(
                abs(decoherence_factor(p, th + np.pi, al)), abs=1e-14
            )
            assert abs(decoherence_factor(p, th, al)) <= 1.0 + 1e-14
            # alpha never changes the magnitude
            assert abs(decoherence_factor(p, th, 0.0)) == pytest.approx(
                abs(decoherence_factor(p, th, al)), abs=1e-14
            )


class TestClosedForms:
    def test_d_examples(self):
        assert closed_form_d(0.3, 0.9, 1.0, 0) == 0.3
        assert closed_form_d(0.3, 0.9, np.pi / 2, 5) == pytest.approx(0.9, abs=1e-30)
        assert closed_form_d(0.0, 1.0, np.pi / 4, 2) == pytest.approx(0.75)

    def test_k_examples(self):
        assert closed_form_k(0.2 + 0.1j, 0.9, 1.0, 0) == 0.2 + 0.1j
        assert closed_form_k(0.2, 0.9, np.pi / 2, 3) == pytest.approx(0.0, abs=1e-30)
        # repeated-multiplication oracle
        k0, lam, phi, n = 0.3, 0.8 * np.exp(1j), 0.2, 5
        expected = k0
        for _ in range(n):
            expected = expected * lam * math.cos(phi)
        assert closed_form_k(k0, lam, phi, n) == pytest.approx(expected, abs=1e-15)

    def test_iterate_matches_closed_forms(self):
        rng = np.random.default_rng(5)
        for method in ("analytic", "matrix"):
            s0 = _rand_state(rng)
            m = _rand_machine(rng)
            b = BathSpec.from_population(rng.uniform())
            lam = decoherence_factor(b.p, m.theta, m.alpha)
            n = 30 if method == "matrix" else 200
            traj = iterate(s0, m, b, n, method=method)
            assert len(traj) == n + 1
            for j in (0, 1, n // 2, n):
                assert abs(traj[j].d - closed_form_d(s0.d, b.p, m.phi, j)) < 1e-11
                assert abs(traj[j].k - closed_form_k(s0.k, lam, m.phi, j)) < 1e-11

    def test_iterate_rejects_bad_args(self):
        s = QubitState(0.5)
        m = MachineParams(0.3, 0.0)
        b = BathSpec.from_population(0.5)
        with pytest.raises(ValueError):
            iterate(s, m, b, -1)
        with pytest.raises(ValueError):
            iterate(s, m, b, 3, method="magic")


class TestConvergence:
    def test_trace_distance_envelope_and_monotonicity(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            s0 = _rand_state(rng)
            phi = rng.uniform(0.05, np.pi / 2)
            m = MachineParams(phi, rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
            b = BathSpec.from_population(rng.uniform())
            xi = bath_state(b)
            traj = iterate(s0, m, b, 80)
            dists = [trace_distance(s.to_matrix(), xi) for s in traj]
            c = math.cos(phi)
            for n, dist in enumerate(dists):
                assert dist <= dists[0] * c**n + 1e-12
            deltas = np.abs(np.array([s.d for s in traj]) - b.p)
            mags = np.array([abs(s.k) for s in traj])
            assert np.all(np.diff(deltas) <= 1e-15)
            assert np.all(np.diff(mags) <= 1e-15)
        # a run long enough to see the decay through
        traj = iterate(QubitState(0.0, 0.0), MachineParams(0.3, 0.5), BathSpec.from_population(0.9), 300)
        assert trace_distance(traj[-1].to_matrix(), bath_state(BathSpec.from_population(0.9))) < 1e-11


class TestStationarity:
    def test_identity_machine(self):
        rep = check_stationarity(MachineParams(0, 0, 0), np.linspace(0, 1, 5))
        assert rep.max_deviation == 0.0

    def test_family_machines_stationary_for_all_p(self):
        rep = check_stationarity(MachineParams(0.7, 1.3), [0.0, 0.25, 0.5, 0.75, 1.0])
        assert rep.max_deviation < 1e-12

    def test_non_family_unitary_fails(self):
        # rotation mixing |00> and |11> breaks stationarity away from p = 1/2
        t = 0.4
        u = np.eye(4, dtype=complex)
        u[0, 0] = u[3, 3] = math.cos(t)
        u[0, 3] = -math.sin(t)
        u[3, 0] = math.sin(t)
        assert stationarity_deviation(u, 0.8) > 1e-3
