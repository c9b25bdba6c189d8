import math

import numpy as np
import pytest

from qtmirror import PacketSpec1D, gaussian_1d, make_grid
from qtmirror.mirror import apply_kick
from qtmirror.oracle import gaussian_free_1d, l2_distance, overlap, plane_wave_free
from qtmirror.propagator import (
    BoundaryContaminationError,
    EvolutionPlan,
    PulseProfile,
    boundary_fraction,
    evolve,
    free_segment,
)
from qtmirror.wavefunction import density, kinetic_energy, norm


def test_pulse_profile_validation():
    with pytest.raises(ValueError):
        PulseProfile("square", 40.0, 1.0, 0.001)
    with pytest.raises(ValueError):
        PulseProfile("gaussian", -1.0, 1.0, 0.001)
    with pytest.raises(ValueError):
        PulseProfile("gaussian", 40.0, 1.0, None)
    with pytest.raises(ValueError):
        PulseProfile("gaussian", 40.0, 1.0, 0.05)  # wider than 0.01*t0
    PulseProfile("instantaneous", 40.0, 1.0)  # no width needed


def test_envelope_integral_is_normalized():
    pulse = PulseProfile("gaussian", 40.0, 1.0, 0.001)
    assert pulse.envelope_integral(-math.inf, math.inf) == pytest.approx(1.0, abs=1e-15)
    # symmetric halves around the center
    left = pulse.envelope_integral(-math.inf, 1.0)
    right = pulse.envelope_integral(1.0, math.inf)
    assert left == pytest.approx(0.5, abs=1e-15)
    assert right == pytest.approx(0.5, abs=1e-15)
    window = pulse.envelope_integral(*pulse.window)
    assert window == pytest.approx(1.0, abs=1e-6)
    assert window < 1.0


def test_envelope_integral_instantaneous():
    pulse = PulseProfile("instantaneous", 40.0, 1.0)
    assert pulse.envelope_integral(0.5, 1.5) == 1.0
    assert pulse.envelope_integral(1.1, 2.0) == 0.0
    assert pulse.envelope_integral(-math.inf, math.inf) == 1.0


def test_plan_validation():
    pulse = PulseProfile("gaussian", 40.0, 1.0, 0.001)
    with pytest.raises(ValueError):
        EvolutionPlan(t_end=4.0, dt=0.01, dt_pulse=1e-5).validate_for(pulse)
    with pytest.raises(ValueError):
        EvolutionPlan(t_end=4.0, dt=4e-3, dt_pulse=1e-4).validate_for(pulse)
    with pytest.raises(ValueError):
        EvolutionPlan(t_end=4.0, dt=4e-3, dt_pulse=None).validate_for(pulse)
    plan = EvolutionPlan.default_for(pulse, 4.0)
    plan.validate_for(pulse)
    assert plan.dt == pytest.approx(4e-3)
    assert plan.dt_pulse == pytest.approx(0.001 / 50)


def test_plane_wave_free_eigenstate(grid_1d_small):
    g = grid_1d_small
    q = 2 * np.pi * 9 / g.length
    wf0 = plane_wave_free(q, 0.0, g)
    pulse = PulseProfile("gaussian", 0.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.7, dt=1.7e-3, dt_pulse=2e-5)
    final = evolve(wf0, pulse, plan)
    exact = plane_wave_free(q, 1.7, g)
    assert abs(overlap(exact, final)) > 1 - 1e-10


def test_free_packet_matches_oracle(grid_1d):
    spec = PacketSpec1D(sigma=1.0, k=4.0)
    wf0 = gaussian_1d(spec, grid_1d)
    pulse = PulseProfile("gaussian", 0.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.0, dt=1e-3, dt_pulse=2e-5)
    final = evolve(wf0, pulse, plan)
    assert l2_distance(final, gaussian_free_1d(spec, 1.0, grid_1d)) < 1e-8


def test_free_segment_zero_duration_identity(packet_default):
    out = free_segment(packet_default, 0.0)
    assert np.array_equal(out.psi, packet_default.psi)
    assert out.psi is not packet_default.psi


def test_free_segment_semigroup(packet_default):
    once = free_segment(packet_default, 1.0)
    twice = free_segment(free_segment(packet_default, 0.5), 0.5)
    assert l2_distance(once, twice) < 1e-13


def test_free_segment_spreads_stationary_packet(grid_1d):
    wf = free_segment(gaussian_1d(PacketSpec1D(sigma=1.0, k=0.0), grid_1d), 1.0)
    rho = density(wf)
    var = np.sum(grid_1d.axis**2 * rho) * grid_1d.dx
    assert var == pytest.approx(1.0, abs=1e-6)  # width sigma_1 = sqrt(2)


def test_free_segment_rejects_negative_duration(packet_default):
    with pytest.raises(ValueError):
        free_segment(packet_default, -0.5)


def test_norm_conserved_through_kicked_run(grid_1d_small):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=3.0), grid_1d_small)
    pulse = PulseProfile("gaussian", 30.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.6, dt=1.6e-3, dt_pulse=2e-5)
    norms = []
    evolve(wf0, pulse, plan, sink=lambda t, wf: norms.append(norm(wf)))
    assert max(abs(n - 1.0) for n in norms) < 1e-9


def test_kinetic_energy_conserved_free(grid_1d):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)
    e0 = kinetic_energy(wf0)
    e1 = kinetic_energy(free_segment(wf0, 1.0))
    assert abs(e1 - e0) / e0 < 1e-10


def test_sink_sampling_contract(grid_1d_small):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=3.0), grid_1d_small)
    pulse = PulseProfile("gaussian", 10.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.4, dt=1.4e-3, dt_pulse=2e-5, sample_stride=3)
    times = []
    evolve(wf0, pulse, plan, sink=lambda t, wf: times.append(t))
    assert times[0] == 0.0
    assert times[-1] == 1.4
    assert all(b > a for a, b in zip(times, times[1:]))
    w_start, w_end = pulse.window
    assert any(abs(t - w_start) < 1e-12 for t in times)  # pre-pulse state sampled
    assert any(abs(t - w_end) < 1e-12 for t in times)  # post-pulse state sampled


def test_instantaneous_matches_manual_composition(grid_1d):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)
    pulse = PulseProfile("instantaneous", 25.0, 1.0)
    plan = EvolutionPlan(t_end=1.3, dt=1.3e-3)
    via_evolve = evolve(wf0, pulse, plan)
    manual = free_segment(apply_kick(free_segment(wf0, 1.0), 25.0), 0.3)
    assert l2_distance(via_evolve, manual) < 1e-12


def test_gaussian_pulse_zero_strength_equals_free(grid_1d):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)
    pulse = PulseProfile("gaussian", 0.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.2, dt=1.2e-3, dt_pulse=2e-5)
    assert l2_distance(evolve(wf0, pulse, plan), free_segment(wf0, 1.2)) < 1e-12


def test_pulse_converges_to_kick_monotonically(grid_1d):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)
    reference = free_segment(apply_kick(free_segment(wf0, 1.0), 40.0), 0.05)
    gaps = []
    for width in (1e-3, 5e-4, 2.5e-4):
        pulse = PulseProfile("gaussian", 40.0, 1.0, width)
        plan = EvolutionPlan(t_end=1.05, dt=1.05e-3, dt_pulse=width / 50)
        gaps.append(l2_distance(evolve(wf0, pulse, plan), reference))
    assert gaps[0] > gaps[1] > gaps[2]


def test_halving_pulse_step_is_converged(grid_1d):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)
    pulse = PulseProfile("gaussian", 40.0, 1.0, 0.001)
    coarse = evolve(wf0, pulse, EvolutionPlan(1.05, 1.05e-3, pulse.width / 50))
    fine = evolve(wf0, pulse, EvolutionPlan(1.05, 1.05e-3, pulse.width / 100))
    assert l2_distance(coarse, fine) < 1e-6


def test_strang_second_order(grid_1d):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=4.0), grid_1d)
    pulse = PulseProfile("gaussian", 40.0, 1.0, 0.001)
    finals = [
        evolve(wf0, pulse, EvolutionPlan(1.05, 1.05e-3, pulse.width / div)).psi
        for div in (50, 100, 200)
    ]
    e1 = np.linalg.norm(finals[0] - finals[1])
    e2 = np.linalg.norm(finals[1] - finals[2])
    assert math.log2(e1 / e2) >= 1.9


def test_boundary_guard_trips(grid_1d_small):
    # fast packet reaches the right edge well before t_end
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=8.0, x0=16.0), grid_1d_small)
    with pytest.raises(BoundaryContaminationError):
        free_segment(wf0, 2.0)
    pulse = PulseProfile("gaussian", 0.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=2.0, dt=2e-3, dt_pulse=2e-5)
    with pytest.raises(BoundaryContaminationError):
        evolve(wf0, pulse, plan)


def test_boundary_fraction_extended_state_passes(grid_1d_small):
    g = grid_1d_small
    q = 2 * np.pi * 4 / g.length
    wf0 = plane_wave_free(q, 0.0, g)
    assert boundary_fraction(density(wf0)) > 1e-3  # uniform density fills the band
    pulse = PulseProfile("instantaneous", 1.0, 1.0)
    plan = EvolutionPlan(t_end=1.5, dt=1.5e-3)
    evolve(wf0, pulse, plan)  # growth-based guard must not trip


def test_evolve_requires_normalized_state(grid_1d_small):
    from qtmirror.wavefunction import WaveFunction

    psi = np.ones(grid_1d_small.n, dtype=complex)
    wf = WaveFunction(grid_1d_small, psi)
    pulse = PulseProfile("gaussian", 0.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.2, dt=1.2e-3, dt_pulse=2e-5)
    with pytest.raises(ValueError):
        evolve(wf, pulse, plan)


def test_evolve_final_time(grid_1d_small):
    wf0 = gaussian_1d(PacketSpec1D(sigma=1.0, k=2.0), grid_1d_small)
    pulse = PulseProfile("gaussian", 5.0, 1.0, 0.001)
    plan = EvolutionPlan(t_end=1.9, dt=1.9e-3, dt_pulse=2e-5)
    final = evolve(wf0, pulse, plan)
    assert final.t == 1.9
    assert abs(norm(final) - 1.0) < 1e-9
