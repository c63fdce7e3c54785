"""Schedule, RK4 evolution, and sampling.

The slow end-to-end battery (every benchmark instance, all register sizes)
lives in the acceptance module; here each contract is exercised once at
small scale, including agreement with an independently coded exact-propagator
reference.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quac.adiabatic import (
    DT_ACCURACY,
    NORM_DRIFT_LIMIT,
    QuantumState,
    Schedule,
    evolve,
    evolve_converged,
    gershgorin_max,
    grover_schedule,
    measure,
    outcome_distribution,
    suggest_steps,
    total_variation,
    uniform_state,
)
from quac.errors import InputError, IntegrationError, ParameterError
from quac.graphs import MarkSet, WeightedGraph, graph_laplacian, reduced_laplacian
from quac.spectral import grover_path

from reference import propagate_expm


def two_triangle_search():
    """Reduced search problem on disjoint triangles with one vertex marked."""
    edges = {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0,
             (3, 4): 1.0, (4, 5): 1.0, (3, 5): 1.0}
    L = graph_laplacian(WeightedGraph(6, edges))
    red = reduced_laplacian(L, MarkSet.of([0]))
    n = red.n
    phi = uniform_state(red.vertex_ids, red.vertex_ids)
    h_init = np.eye(n) - np.outer(phi.amplitudes.real, phi.amplitudes.real)
    return h_init, red.entries, phi


class TestSchedule:
    def test_frozen_duration_two_level(self):
        """n=2, eps=0.1: total time is exactly 5 pi."""
        sched = grover_schedule(2, 1, 0.1)
        assert sched.t_final == pytest.approx(5 * np.pi, rel=1e-14)

    def test_boundary_and_midpoint_values(self):
        sched = grover_schedule(8, 1, 0.1)
        assert sched.s(0.0) == pytest.approx(0.0, abs=1e-12)
        assert sched.s(sched.t_final) == pytest.approx(1.0, abs=1e-12)
        assert sched.s(sched.t_final / 2) == pytest.approx(0.5, abs=1e-12)

    def test_monotone_nondecreasing(self):
        sched = grover_schedule(16, 2, 0.05)
        t = np.linspace(0.0, sched.t_final, 500)
        assert np.all(np.diff(sched.s(t)) >= -1e-13)

    def test_odd_symmetry_about_midpoint(self):
        """s(mid + tau) + s(mid - tau) = 1: slowdown is centered on the gap."""
        sched = grover_schedule(32, 1, 0.2)
        mid = sched.t_final / 2
        for tau in np.linspace(0.0, mid, 50):
            assert sched.s(mid + tau) + sched.s(mid - tau) == pytest.approx(1.0, abs=1e-10)

    def test_slowdown_at_minimum_gap(self):
        """ds/dt is much smaller mid-evolution than at the edges."""
        sched = grover_schedule(64, 1, 0.1)
        h = sched.t_final * 1e-6
        rate_mid = (sched.s(sched.t_final / 2 + h) - sched.s(sched.t_final / 2 - h)) / (2 * h)
        rate_edge = (sched.s(2 * h) - sched.s(0.0)) / (2 * h)
        assert rate_mid < rate_edge / 10

    def test_time_range_enforced(self):
        sched = grover_schedule(4, 1, 0.1)
        with pytest.raises(ParameterError):
            sched.s(-0.5)
        with pytest.raises(ParameterError):
            sched.s(sched.t_final * 1.01)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            grover_schedule(1, 1, 0.1)
        with pytest.raises(ParameterError):
            grover_schedule(4, 0, 0.1)
        with pytest.raises(ParameterError):
            grover_schedule(4, 4, 0.1)
        with pytest.raises(ParameterError):
            grover_schedule(4, 1, 0.0)
        with pytest.raises(ParameterError):
            Schedule(4, 1, 1.5, 10.0)

    @given(st.integers(2, 64), st.floats(0.02, 0.5))
    @settings(max_examples=60, deadline=None)
    def test_duration_scales_inversely_with_eps(self, n, eps):
        sched = grover_schedule(n, 1, eps)
        assert sched.t_final == pytest.approx(
            sched.r * np.arctan(np.sqrt(sched.r - 1)) / (np.sqrt(sched.r - 1) * eps),
            rel=1e-12,
        )


class TestStateAndSampling:
    def test_uniform_state(self):
        psi = uniform_state([2, 4], (1, 2, 3, 4))
        assert np.allclose(psi.probabilities(), [0.0, 0.5, 0.0, 0.5])

    def test_uniform_state_unknown_id(self):
        with pytest.raises(InputError):
            uniform_state([9], (1, 2))

    def test_norm_enforced(self):
        with pytest.raises(InputError):
            QuantumState(np.array([1.0, 1.0]), (0, 1))

    def test_outcome_distribution_keys_and_total(self):
        psi = QuantumState(np.array([0.6, 0.8j]), (10, 20))
        dist = outcome_distribution(psi)
        assert set(dist) == {10, 20}
        assert dist[10] == pytest.approx(0.36)
        assert sum(dist.values()) == pytest.approx(1.0)

    def test_measure_returns_register_ids(self):
        psi = uniform_state([5, 7], (5, 6, 7))
        rng = np.random.default_rng(0)
        draws = {measure(psi, rng) for _ in range(50)}
        assert draws == {5, 7}

    def test_measure_frequencies_within_three_sigma(self):
        amp = np.sqrt(np.array([0.1, 0.2, 0.3, 0.4]))
        psi = QuantumState(amp, (0, 1, 2, 3))
        rng = np.random.default_rng(1234)
        n = 4000
        counts = np.zeros(4)
        for _ in range(n):
            counts[measure(psi, rng)] += 1
        for p, c in zip([0.1, 0.2, 0.3, 0.4], counts):
            sigma = np.sqrt(p * (1 - p) / n)
            assert abs(c / n - p) < 3 * sigma + 1e-9

    def test_total_variation(self):
        assert total_variation([0.5, 0.5], [0.5, 0.5]) == 0.0
        assert total_variation([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
        assert total_variation([0.7, 0.3], [0.3, 0.7]) == pytest.approx(0.4)


class TestStepRule:
    def test_multiple_of_64_with_floor(self):
        assert suggest_steps(0.1, 1.0) == 256
        steps = suggest_steps(100.0, 1.0)
        assert steps % 64 == 0
        assert steps >= 100.0 / DT_ACCURACY

    def test_stability_branch_engages_for_stiff_problems(self):
        mild = suggest_steps(10.0, 1.0)
        stiff = suggest_steps(10.0, 500.0)
        assert stiff > 8 * mild

    def test_monotone_in_duration(self):
        counts = [suggest_steps(t, 10.0) for t in np.linspace(1.0, 200.0, 40)]
        assert all(b >= a for a, b in zip(counts, counts[1:]))

    def test_gershgorin_upper_bounds_spectrum(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.normal(size=(8, 8))
            h = a + a.T
            assert gershgorin_max(h) >= np.linalg.eigvalsh(h)[-1] - 1e-10

    def test_bad_duration(self):
        with pytest.raises(ParameterError):
            suggest_steps(0.0, 1.0)


class TestEvolve:
    def test_search_fidelity_bound_small_cases(self):
        """Final overlap with the marked state clears 1 - eps^2."""
        for n, eps in [(4, 0.2), (8, 0.1)]:
            path = grover_path(n, [0])
            sched = grover_schedule(n, 1, eps)
            psi0 = uniform_state(range(n), range(n))
            steps = suggest_steps(sched.t_final, 2.0)
            out = evolve(path.h_init, path.h_final, sched, psi0, steps)
            fidelity = abs(out.amplitudes[0]) ** 2
            assert fidelity >= 1.0 - eps * eps, (n, eps, fidelity)

    def test_agrees_with_exact_propagator_product(self):
        """RK4 vs an independent matrix-exponential reference, n=4 search."""
        path = grover_path(4, [0])
        sched = grover_schedule(4, 1, 0.2)
        psi0 = uniform_state(range(4), range(4))
        steps = suggest_steps(sched.t_final, 2.0)
        out = evolve(path.h_init, path.h_final, sched, psi0, steps)
        ref = propagate_expm(path.h_init, path.h_final, sched, psi0.amplitudes, 10 * steps)
        deficit = 1.0 - abs(np.vdot(ref, out.amplitudes)) ** 2
        assert deficit < 1e-5, deficit

    def test_agrees_with_reference_on_graph_instance(self):
        """Same cross-check on a reduced two-triangle search Hamiltonian."""
        h_init, h_final, phi = two_triangle_search()
        sched = grover_schedule(phi.dim, 1, 0.1)
        steps = suggest_steps(sched.t_final, gershgorin_max(h_final))
        out = evolve(h_init, h_final, sched, phi, steps)
        ref = propagate_expm(h_init, h_final, sched, phi.amplitudes, 10 * steps)
        deficit = 1.0 - abs(np.vdot(ref, out.amplitudes)) ** 2
        assert deficit < 1e-5, deficit

    def test_norm_drift_stays_tiny_at_suggested_steps(self):
        h_init, h_final, phi = two_triangle_search()
        sched = grover_schedule(phi.dim, 1, 0.1)
        steps = suggest_steps(sched.t_final, gershgorin_max(h_final))
        norms = []
        evolve(h_init, h_final, sched, phi, steps,
               trace=lambda t, s, norm, amp: norms.append(norm))
        assert max(abs(x - 1.0) for x in norms) < 1e-6

    def test_step_doubling_moves_distribution_below_tolerance(self):
        h_init, h_final, phi = two_triangle_search()
        sched = grover_schedule(phi.dim, 1, 0.1)
        steps = suggest_steps(sched.t_final, gershgorin_max(h_final))
        coarse = evolve(h_init, h_final, sched, phi, steps)
        fine = evolve(h_init, h_final, sched, phi, 2 * steps)
        tv = total_variation(coarse.probabilities(), fine.probabilities())
        assert tv < 1e-4, tv

    def test_trace_callback_coverage(self):
        path = grover_path(4, [0])
        sched = grover_schedule(4, 1, 0.2)
        psi0 = uniform_state(range(4), range(4))
        records = []
        evolve(path.h_init, path.h_final, sched, psi0, 512,
               trace=lambda t, s, norm, amp: records.append((t, s, norm, amp.copy())))
        times = [r[0] for r in records]
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(sched.t_final)
        assert all(b > a for a, b in zip(times, times[1:]))
        assert 100 <= len(records) <= 140
        assert all(abs(r[2] - 1.0) < 1e-6 for r in records)
        assert records[0][1] == pytest.approx(0.0, abs=1e-12)

    def test_instability_raises(self):
        """Far too few steps on a stiff Hamiltonian must fail loudly."""
        h = np.diag(np.arange(1.0, 7.0) * 40.0)
        sched = grover_schedule(6, 1, 0.1)
        psi0 = uniform_state(range(6), range(6))
        with pytest.raises(IntegrationError):
            evolve(np.zeros((6, 6)), h, sched, psi0, 16)

    def test_dimension_mismatch(self):
        sched = grover_schedule(4, 1, 0.1)
        psi0 = uniform_state(range(3), range(3))
        with pytest.raises(InputError):
            evolve(np.eye(4), np.eye(4), sched, psi0, 64)

    def test_evolved_state_deterministic(self):
        path = grover_path(4, [1])
        sched = grover_schedule(4, 1, 0.2)
        psi0 = uniform_state(range(4), range(4))
        a = evolve(path.h_init, path.h_final, sched, psi0, 512)
        b = evolve(path.h_init, path.h_final, sched, psi0, 512)
        assert np.array_equal(a.amplitudes, b.amplitudes)


class TestEvolveConverged:
    def test_returns_converged_pair(self):
        path = grover_path(4, [0])
        sched = grover_schedule(4, 1, 0.2)
        psi0 = uniform_state(range(4), range(4))
        state, steps, tv = evolve_converged(path.h_init, path.h_final, sched, psi0)
        assert tv < 1e-4
        assert steps % 64 == 0
        assert abs(state.amplitudes[0]) ** 2 >= 1.0 - 0.2**2

    def test_budget_exhaustion_raises(self):
        path = grover_path(4, [0])
        sched = grover_schedule(4, 1, 0.2)
        psi0 = uniform_state(range(4), range(4))
        with pytest.raises(IntegrationError):
            evolve_converged(path.h_init, path.h_final, sched, psi0,
                             tv_tol=1e-16, initial_steps=256, max_doublings=1)
