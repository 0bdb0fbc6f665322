"""Split-operator propagation against independent physics oracles.

Two oracles drive this file, both worked out before the implementation:

* free Gaussian spreading, sigma(t) = sigma sqrt(1 + (t / 2 sigma^2)^2),
  with the center drifting at the carrier velocity;
* a transfer-matrix transmission for the rectangular barrier, built from
  the wave-matching conditions with complex arithmetic, which is a
  different route than the closed sinh/sin form inside the library.

The frozen decimals below were produced by the transfer-matrix snippet,
never by the code under test.
"""

import math

import numpy as np
import pytest

from pairstats.errors import (
    BoundaryContaminationError,
    CalibrationError,
    ConfigurationError,
    StabilityError,
)
from pairstats.grid import (
    Grid1D,
    WavepacketSpec,
    make_gaussian,
    position_mean,
    position_std,
    probability_on_side,
)
from pairstats.propagator import (
    BARRIER_ACTIVATION_AMPLITUDE,
    BarrierPotential,
    PropagationParams,
    analytic_plane_transmission,
    barrier_region_amplitude,
    calibrate_barrier,
    evolve,
    expected_packet_transmission,
    measurement_ready,
    simulated_transmission,
    step,
)


def transfer_matrix_transmission(k, v0, w):
    """Independent oracle: match plane waves across the barrier."""
    q = np.sqrt(complex(k * k - 2.0 * v0))
    if q == 0:
        return 1.0 / (1.0 + v0 * w * w / 2.0)
    m = np.cos(q * w) - 1j * (k * k + q * q) / (2.0 * k * q) * np.sin(q * w)
    return float(1.0 / abs(m) ** 2)


def free_width(sigma, t):
    return sigma * math.sqrt(1.0 + (t / (2.0 * sigma**2)) ** 2)


@pytest.fixture()
def grid():
    return Grid1D(half_width=32.0, points=1024)


FREE = BarrierPotential(height=0.0, width=1.0)


class TestBarrierPotential:
    def test_support_and_sampling_half_open(self):
        g = Grid1D(half_width=8.0, points=128)  # dx = 0.125
        barrier = BarrierPotential(height=5.0, width=1.0, center=0.5)
        assert barrier.support == (0.0, 1.0)
        v = barrier.sample(g)
        i_lo = g.split_index(0.0)
        assert v[i_lo] == 5.0  # left edge sample belongs to the barrier
        assert v[i_lo - 1] == 0.0
        i_hi = g.split_index(1.0)
        assert v[i_hi] == 0.0  # right edge sample does not
        assert v[i_hi - 1] == 5.0

    def test_rejects_bad_shape(self):
        with pytest.raises(ConfigurationError):
            BarrierPotential(height=-1.0, width=1.0)
        with pytest.raises(ConfigurationError):
            BarrierPotential(height=1.0, width=0.0)

    def test_validate_on_grid(self, grid):
        with pytest.raises(ConfigurationError, match="box edges"):
            BarrierPotential(height=1.0, width=1.0, center=32.0).validate_on(grid)
        # dx = 0.0625 needs width >= 0.5 for eight samples across
        with pytest.raises(ConfigurationError, match="too coarse"):
            BarrierPotential(height=1.0, width=0.25).validate_on(grid)
        BarrierPotential(height=1.0, width=0.5).validate_on(grid)


class TestPropagationParams:
    def test_rejects_bad_values(self):
        with pytest.raises(ConfigurationError):
            PropagationParams(dt=0.0, steps=10)
        with pytest.raises(ConfigurationError):
            PropagationParams(dt=1e-3, steps=-1)

    def test_stability_bound(self, grid):
        # k_max^2 / 2 ~ 1263, so dt = 2.6e-3 puts the phase past pi
        with pytest.raises(StabilityError):
            PropagationParams(dt=2.6e-3, steps=1).validate_on(grid)
        PropagationParams(dt=2.4e-3, steps=1).validate_on(grid)


class TestFreeEvolution:
    def test_spreading_matches_analytic_law(self, grid):
        spec = WavepacketSpec(center=-12.0, wavenumber=2.0, sigma=1.0)
        psi = make_gaussian(grid, spec)
        result = evolve(psi, FREE, PropagationParams(dt=1e-3, steps=2000))
        out = result.psi
        assert out.t == pytest.approx(2.0)
        assert position_mean(out) == pytest.approx(-12.0 + 2.0 * 2.0, abs=1e-8)
        expected = free_width(1.0, 2.0)  # sqrt(2)
        assert position_std(out) == pytest.approx(expected, rel=1e-8)

    def test_wide_packet_spreads_slower(self, grid):
        spec = WavepacketSpec(center=-12.0, wavenumber=2.0, sigma=2.0)
        psi = make_gaussian(grid, spec)
        out = evolve(psi, FREE, PropagationParams(dt=1e-3, steps=2000)).psi
        assert position_std(out) == pytest.approx(free_width(2.0, 2.0), rel=1e-8)

    def test_norm_is_conserved(self, grid):
        spec = WavepacketSpec(center=-12.0, wavenumber=2.0, sigma=1.0)
        psi = make_gaussian(grid, spec)
        out = evolve(psi, FREE, PropagationParams(dt=1e-3, steps=2000)).psi
        assert abs(out.norm_sq() - psi.norm_sq()) < 1e-11

    def test_step_equals_single_step_evolve(self, grid):
        psi = make_gaussian(grid, WavepacketSpec(-12.0, 2.0, 1.0))
        a = step(psi, FREE, 1e-3)
        b = evolve(psi, FREE, PropagationParams(dt=1e-3, steps=1)).psi
        assert a.t == b.t == pytest.approx(1e-3)
        np.testing.assert_array_equal(a.values, b.values)

    def test_contained_run_reports_small_edge_amplitude(self, grid):
        psi = make_gaussian(grid, WavepacketSpec(-12.0, 2.0, 1.0))
        result = evolve(psi, FREE, PropagationParams(dt=1e-3, steps=500))
        assert result.max_edge_amplitude < 1e-12

    def test_boundary_contamination_detected(self):
        g = Grid1D(half_width=16.0, points=512)
        psi = make_gaussian(g, WavepacketSpec(-8.0, 8.0, 1.0))
        # carrier velocity 8 reaches the right edge near t = 3
        with pytest.raises(BoundaryContaminationError):
            evolve(psi, FREE, PropagationParams(dt=1e-3, steps=4000))


class TestPlaneTransmission:
    def test_no_barrier_is_transparent(self):
        assert analytic_plane_transmission(3.0, BarrierPotential(0.0, 1.0)) == 1.0

    def test_frozen_tunneling_value(self):
        # transfer-matrix snippet: k=2, V0=8, w=0.5
        barrier = BarrierPotential(8.0, 0.5)
        assert analytic_plane_transmission(2.0, barrier) == pytest.approx(
            0.0909668503958455, rel=1e-12
        )

    def test_frozen_crossover_value(self):
        # E = V0 = 8 with w = 0.5 gives exactly 1 / (1 + V0 w^2 / 2) = 1/2
        barrier = BarrierPotential(8.0, 0.5)
        assert analytic_plane_transmission(4.0, barrier) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_frozen_over_barrier_value(self):
        barrier = BarrierPotential(8.0, 0.5)
        assert analytic_plane_transmission(6.0, barrier) == pytest.approx(
            0.947849394078268, rel=1e-12
        )

    def test_branches_meet_continuously(self):
        barrier = BarrierPotential(8.0, 0.5)
        k_star = math.sqrt(2.0 * 8.0)
        below = analytic_plane_transmission(k_star * (1.0 - 1e-9), barrier)
        above = analytic_plane_transmission(k_star * (1.0 + 1e-9), barrier)
        assert abs(below - above) < 1e-7

    def test_over_barrier_resonance(self):
        # q w = pi at k = sqrt(pi^2 + 2 V0) for w = 1
        barrier = BarrierPotential(4.0, 1.0)
        k_res = math.sqrt(math.pi**2 + 8.0)
        assert analytic_plane_transmission(k_res, barrier) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_deep_tunneling_underflows_to_zero(self):
        assert analytic_plane_transmission(1.0, BarrierPotential(1e6, 1.0)) == 0.0

    def test_rejects_nonpositive_wavenumber(self):
        with pytest.raises(ValueError):
            analytic_plane_transmission(0.0, BarrierPotential(8.0, 0.5))

    @pytest.mark.parametrize("v0,w", [(8.0, 0.5), (4.0, 1.0), (26.787825, 0.5), (50.0, 2.0)])
    def test_matches_transfer_matrix_everywhere(self, v0, w):
        for k in np.linspace(0.2, 14.0, 139):
            expected = transfer_matrix_transmission(float(k), v0, w)
            got = analytic_plane_transmission(float(k), BarrierPotential(v0, w))
            assert got == pytest.approx(expected, rel=1e-10, abs=1e-300)


class TestPacketTransmission:
    def test_transparent_barrier(self):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        value = expected_packet_transmission(spec, BarrierPotential(0.0, 0.5))
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_matches_direct_quadrature(self):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        barrier = BarrierPotential(26.787825, 0.5)
        sigma_k = 0.5 / spec.sigma
        k = np.linspace(spec.wavenumber - 10 * sigma_k, spec.wavenumber + 10 * sigma_k, 40001)
        weight = spec.sigma * math.sqrt(2.0 / math.pi) * np.exp(
            -2.0 * spec.sigma**2 * (k - spec.wavenumber) ** 2
        )
        t_k = np.array([transfer_matrix_transmission(kk, 26.787825, 0.5) for kk in k])
        oracle = float(np.trapezoid(weight * t_k, k))
        value = expected_packet_transmission(spec, barrier)
        assert value == pytest.approx(oracle, rel=1e-7)

    def test_monotone_in_height(self):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        values = [
            expected_packet_transmission(spec, BarrierPotential(v0, 0.5))
            for v0 in (10.0, 20.0, 30.0, 40.0)
        ]
        assert values == sorted(values, reverse=True)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ConfigurationError):
            expected_packet_transmission(
                WavepacketSpec(0.0, 8.0, -1.0), BarrierPotential(8.0, 0.5)
            )


class TestMeasurementReadiness:
    def test_far_packet_is_ready(self, grid):
        psi = make_gaussian(grid, WavepacketSpec(-10.0, 8.0, 1.0))
        barrier = BarrierPotential(8.0, 0.5)
        assert barrier_region_amplitude(psi, barrier) < 1e-10
        assert measurement_ready(psi, barrier)

    def test_lobe_too_close_to_boundary(self, grid):
        # barrier far away so only the lobe condition is in play
        psi = make_gaussian(grid, WavepacketSpec(-3.0, 8.0, 1.0))
        barrier = BarrierPotential(8.0, 0.5, center=20.0)
        # 3 < 5 sigma: not separated yet even though the barrier is quiet
        assert barrier_region_amplitude(psi, barrier) < 1e-6
        assert not measurement_ready(psi, barrier)

    def test_amplitude_in_barrier_blocks_measurement(self, grid):
        psi = make_gaussian(grid, WavepacketSpec(-10.0, 8.0, 1.0))
        barrier = BarrierPotential(8.0, 22.0)  # support reaches the packet
        assert barrier_region_amplitude(psi, barrier) > 1e-3
        assert not measurement_ready(psi, barrier)

    def test_threshold_is_configurable(self, grid):
        psi = make_gaussian(grid, WavepacketSpec(-7.0, 8.0, 1.0))
        barrier = BarrierPotential(8.0, 4.0)
        amp = barrier_region_amplitude(psi, barrier)
        assert not measurement_ready(psi, barrier, barrier_amplitude_max=amp / 2.0)
        assert measurement_ready(psi, barrier, barrier_amplitude_max=amp * 2.0)

    def test_lobe_sigmas_is_configurable(self, grid):
        # sigma = 0.8 keeps the clipped far-side tail under the lobe-mass
        # floor, so only the near lobe decides readiness
        psi = make_gaussian(grid, WavepacketSpec(-3.5, 8.0, 0.8))
        barrier = BarrierPotential(8.0, 0.5, center=20.0)
        assert not measurement_ready(psi, barrier, lobe_sigmas=5.0)
        assert measurement_ready(psi, barrier, lobe_sigmas=3.0)


class TestSimulatedTransmission:
    def test_mostly_transmitting_barrier(self, grid):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        barrier = BarrierPotential(8.0, 0.5)
        t_sim, t_meas = simulated_transmission(
            grid, spec, barrier,
            dt=5e-4, max_steps=10_000, check_every=100,
            boundary=0.0, edge_amplitude_max=1e-6,
        )
        assert t_meas > 1.25  # flight time to the barrier alone
        expected = expected_packet_transmission(spec, barrier)
        assert t_sim == pytest.approx(expected, abs=0.01)

    def test_result_is_a_probability_split(self, grid):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        barrier = BarrierPotential(30.0, 0.5)
        t_sim, _ = simulated_transmission(
            grid, spec, barrier,
            dt=5e-4, max_steps=10_000, check_every=100,
            boundary=0.0, edge_amplitude_max=1e-6,
        )
        assert 0.0 < t_sim < 1.0

    def test_never_arriving_packet_times_out(self, grid):
        # moving away from the barrier: the visited gate must keep the
        # run from declaring an instant (and empty) measurement
        spec = WavepacketSpec(center=-10.0, wavenumber=-8.0, sigma=1.0)
        barrier = BarrierPotential(8.0, 0.5)
        assert BARRIER_ACTIVATION_AMPLITUDE > 0
        with pytest.raises(CalibrationError, match="not met"):
            simulated_transmission(
                grid, spec, barrier,
                dt=5e-4, max_steps=400, check_every=100,
                boundary=0.0, edge_amplitude_max=1e-6,
            )


class TestCalibration:
    def test_small_grid_calibration_hits_target(self, grid):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        result = calibrate_barrier(
            grid, spec, width=0.5, target=0.5, tol=0.01,
            dt=5e-4, max_steps=12_000, check_every=200,
        )
        assert abs(result.transmission - 0.5) <= 0.01
        assert result.barrier.width == 0.5
        assert result.iterations == len(result.history)
        assert result.measurement_time > 0.0
        heights = [h for h, _ in result.history]
        assert result.barrier.height in heights

    def test_rejects_bad_target_and_tol(self, grid):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        with pytest.raises(ConfigurationError):
            calibrate_barrier(grid, spec, width=0.5, target=0.0)
        with pytest.raises(ConfigurationError):
            calibrate_barrier(grid, spec, width=0.5, tol=0.0)

    def test_budget_exhaustion_reports_history(self, grid):
        spec = WavepacketSpec(center=-10.0, wavenumber=8.0, sigma=1.0)
        with pytest.raises(CalibrationError):
            calibrate_barrier(
                grid, spec, width=0.5, target=0.5, tol=1e-9,
                dt=5e-4, max_steps=12_000, check_every=200, max_iterations=3,
            )
