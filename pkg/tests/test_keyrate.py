import io
import math

import pytest

from qli import injection, keyrate, link
from qli.keyrate import Bb84Params, SargParams
from qli.link import Protocol


class TestBinaryEntropy:
    def test_maximum(self):
        assert keyrate.binary_entropy(0.5) == 1.0

    def test_limit_convention(self):
        assert keyrate.binary_entropy(0.0) == 0.0
        assert keyrate.binary_entropy(1.0) == 0.0

    def test_storage_argument(self):
        assert keyrate.binary_entropy(0.85355) == pytest.approx(0.6008, abs=1e-3)

    def test_symmetry_grid(self):
        for i in range(1001):
            x = i / 1000.0
            assert keyrate.binary_entropy(x) == pytest.approx(
                keyrate.binary_entropy(1.0 - x), abs=1e-12
            )

    @pytest.mark.parametrize("bad", [-0.1, 1.1])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            keyrate.binary_entropy(bad)


class TestSargStorageInfo:
    def test_value(self):
        assert keyrate.sarg_storage_info() == pytest.approx(0.3992, abs=1e-3)

    def test_complement(self):
        assert 1.0 - keyrate.sarg_storage_info() == pytest.approx(0.6008, abs=1e-3)

    def test_entropy_bound(self):
        assert 0.0 < keyrate.sarg_storage_info() < 1.0


class TestSargRate:
    def test_root_of_rate_polynomial(self):
        for t in (1.0, 0.3, 0.04):
            mu = math.sqrt(12.0 * t)
            assert abs(keyrate.sarg_rate(mu, t)) < 1e-16

    def test_reference_point(self):
        rate = keyrate.sarg_rate(2.0 * math.sqrt(0.1), 0.1)
        assert rate == pytest.approx(6.33e-4, rel=0.01)
        assert rate == pytest.approx(6.333789557881114e-4, rel=1e-12)

    def test_zero_mu(self):
        assert keyrate.sarg_rate(0.0, 0.5) == 0.0

    @pytest.mark.parametrize("t", [1.0, 0.2, 0.01])
    def test_sign_change_at_sqrt_12t(self, t):
        root = math.sqrt(12.0 * t)
        assert keyrate.sarg_rate(0.9 * root, t) > 0.0
        assert keyrate.sarg_rate(1.1 * root, t) < 0.0

    def test_negative_rates_not_clamped(self):
        assert keyrate.sarg_rate(5.0, 0.1) < 0.0


class TestBb84Qber:
    def test_no_dark_counts(self):
        params = Bb84Params(dark_count_prob=0.0)
        assert keyrate.bb84_qber(0.3, 0.3, params) == pytest.approx(0.005, rel=1e-12)

    def test_dark_counts_dominate(self):
        assert keyrate.bb84_qber(0.0, 0.5) == 0.5
        near_zero = keyrate.bb84_qber(1e-12, 1e-3)
        assert near_zero == pytest.approx(0.5, abs=1e-3)

    def test_plug_in_point(self):
        # 2 p_d / (mu t eta) = 0.1 at this point, so Q = 1/2 - 0.99/2.2.
        assert keyrate.bb84_qber(0.1, 0.1) == pytest.approx(0.05, abs=1e-12)

    def test_strictly_decreasing_in_signal(self):
        values = [keyrate.bb84_qber(mu, 0.1) for mu in (0.01, 0.05, 0.1, 0.5)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_range(self):
        params = Bb84Params()
        for mu in (1e-4, 0.01, 0.1):
            q = keyrate.bb84_qber(mu, 0.1, params)
            assert (1.0 - params.visibility) / 2.0 <= q < 0.5


def _entropy_oracle(x):
    if x in (0.0, 1.0):
        return 0.0
    return -(x * math.log(x) + (1.0 - x) * math.log(1.0 - x)) / math.log(2.0)


def _bb84_rate_oracle(mu, t, eta, p_d, visibility):
    """Two-step reference computation: QBER first, then the rate formula,
    with its own entropy implementation."""
    gain = mu * t * eta
    q = 0.5 - visibility / (2.0 * (1.0 + 2.0 * p_d / gain))
    d1 = (1.0 - visibility) / (2.0 - mu / t)
    i1 = 1.0 - _entropy_oracle(0.5 + math.sqrt(d1 * (1.0 - d1)))
    return 0.5 * (gain + 2.0 * p_d) * (1.0 - _entropy_oracle(q)) - 0.5 * gain * (
        (t - mu / 2.0) * i1 + mu / 2.0
    )


class TestBb84Rate:
    @pytest.mark.parametrize("mu,t", [(1.0, 1.0), (0.2, 0.5), (0.05, 0.1)])
    def test_perfect_visibility_collapse(self, mu, t):
        params = Bb84Params(dark_count_prob=0.0, visibility=1.0)
        expected = 0.5 * mu * t * params.detector_efficiency * (1.0 - mu / 2.0)
        assert keyrate.bb84_rate(mu, t, params) == pytest.approx(expected, rel=1e-12)

    def test_lossless_perfect_point(self):
        params = Bb84Params(dark_count_prob=0.0, visibility=1.0)
        assert keyrate.bb84_rate(1.0, 1.0, params) == pytest.approx(0.025, rel=1e-12)

    def test_default_point_against_oracle(self):
        rate = keyrate.bb84_rate(0.1, 0.1)
        assert rate == pytest.approx(
            _bb84_rate_oracle(0.1, 0.1, 0.1, 5e-5, 0.99), rel=1e-12
        )
        assert rate == pytest.approx(3.667627499739203e-4, rel=1e-12)

    @pytest.mark.parametrize("mu,t", [(0.2, 0.1), (1.0, 0.5)])
    def test_domain_error_beyond_two(self, mu, t):
        with pytest.raises(ValueError):
            keyrate.bb84_rate(mu, t)

    def test_domain_error_when_disturbance_saturates(self):
        # mu/t between 1 + V and 2: the entropy argument turns complex.
        with pytest.raises(ValueError, match="disturbance"):
            keyrate.bb84_rate(0.1995, 0.1)

    def test_alternate_single_photon_weight(self):
        default = keyrate.bb84_rate(0.1, 0.1)
        alternate = keyrate.bb84_rate(0.1, 0.1, single_photon_weight="unit")
        assert alternate != default
        with pytest.raises(ValueError):
            keyrate.bb84_rate(0.1, 0.1, single_photon_weight="bogus")


class TestBb84OptimalMu:
    @pytest.mark.parametrize("t", [1.0, 0.5, 0.1, 0.01])
    def test_beats_heuristic(self, t):
        mu_star = keyrate.bb84_optimal_mu_numeric(t)
        assert 0.0 < mu_star < 2.0 * t
        assert keyrate.bb84_rate(mu_star, t) >= keyrate.bb84_rate(t, t)

    def test_interior_optimum_has_zero_slope(self):
        mu_star = keyrate.bb84_optimal_mu_numeric(1.0)
        h = 1e-7
        slope = (
            keyrate.bb84_rate(mu_star + h, 1.0) - keyrate.bb84_rate(mu_star - h, 1.0)
        ) / (2.0 * h)
        assert abs(slope) < 1e-6

    @pytest.mark.parametrize("t", [1.0, 0.5, 0.1])
    def test_attack_always_reduces_rate(self, t):
        mu_star = keyrate.bb84_optimal_mu_numeric(t)
        estimated = keyrate.bb84_rate(mu_star, t)
        for extra in (1e-4, 1e-3, 1e-2):
            try:
                attacked = keyrate.bb84_rate(mu_star + extra, t)
            except ValueError:
                continue
            assert attacked <= estimated


class TestRateUnderAttack:
    def test_no_attack_is_bitwise_identical(self):
        for protocol in Protocol:
            point = keyrate.rate_under_attack(protocol, 50.0, 0.0)
            assert point.mu_ext == 0.0
            assert point.mu_prime == point.mu
            assert point.rate_actual == point.rate_estimated

    def test_sarg04_80_km_4_uj(self):
        point = keyrate.rate_under_attack(Protocol.SARG04, 80.0, 4e-6)
        assert point.t == pytest.approx(10**-1.6, rel=1e-12)
        assert point.mu == pytest.approx(2.0 * math.sqrt(point.t), rel=1e-12)
        assert point.mu_ext == pytest.approx(0.0686, rel=0.01)
        assert point.mu_ext == pytest.approx(0.0691191672478939, rel=1e-12)
        assert point.mu_prime == point.mu + point.mu_ext
        assert point.rate_actual < point.rate_estimated

    def test_attacked_curves_dip_before_clean_curve(self):
        distances = [float(d) for d in range(0, 121, 2)]
        clean = keyrate.sweep(Protocol.SARG04, distances, [0.0])
        assert all(p.rate_actual > 0.0 for p in clean)
        for energy in (4e-6, 6e-6, 8e-6, 10e-6):
            attacked = keyrate.sweep(Protocol.SARG04, distances, [energy])
            assert any(p.rate_actual <= 0.0 for p in attacked)

    def test_sarg04_rate_non_increasing_in_energy(self):
        # The believed-optimal photon number sits exactly at the peak of the
        # rate polynomial, so any injection pushes past it.
        for distance in (10.0, 50.0, 90.0):
            rates = [
                keyrate.rate_under_attack(Protocol.SARG04, distance, e).rate_actual
                for e in (0.0, 2e-6, 4e-6, 8e-6)
            ]
            assert all(a >= b for a, b in zip(rates, rates[1:]))

    def test_bb84_out_of_domain_reports_insecure(self):
        point = keyrate.rate_under_attack(Protocol.BB84, 120.0, 10e-6)
        assert point.rate_actual == -math.inf
        assert not point.secure

    def test_numeric_mu_orders_rates_everywhere(self):
        distances = [float(d) for d in range(0, 121, 5)]
        points = keyrate.sweep(
            Protocol.BB84, distances, [0.0, 4e-6, 10e-6], numeric_mu=True
        )
        assert all(p.rate_actual <= p.rate_estimated for p in points)


class TestCutoffDistance:
    def test_no_attack_has_no_cutoff(self):
        assert keyrate.cutoff_distance(Protocol.SARG04, 0.0, max_loss_db=24.0) is None

    @staticmethod
    def closed_form_cutoff_km(pulse_energy_j, atten_db_per_km=0.2):
        """Independent prediction: the attacked rate polynomial has its root
        where mu + mu_ext = sqrt(12 t); with mu = 2 sqrt(t) that solves to
        mu_ext(t) = (sqrt(12) - 2) sqrt(t), and mu_ext scales as t^-0.25."""
        mu_inj = injection.extrapolate_mu_inj(pulse_energy_j)
        coef = mu_inj * 10.0 ** (-link.probe_loss(Protocol.SARG04, 1.0) / 10.0)
        t_cut = (coef / (math.sqrt(12.0) - 2.0)) ** (4.0 / 3.0)
        return -10.0 * math.log10(t_cut) / atten_db_per_km

    @pytest.mark.parametrize("energy", [4e-6, 6e-6, 8e-6, 10e-6])
    def test_bisection_matches_closed_form(self, energy):
        found = keyrate.cutoff_distance(Protocol.SARG04, energy, max_loss_db=24.0)
        assert found == pytest.approx(self.closed_form_cutoff_km(energy), abs=0.05)

    def test_non_increasing_in_energy(self):
        cutoffs = [
            keyrate.cutoff_distance(Protocol.SARG04, e, max_loss_db=24.0)
            for e in (4e-6, 6e-6, 8e-6, 10e-6)
        ]
        assert all(c is not None for c in cutoffs)
        assert all(a >= b for a, b in zip(cutoffs, cutoffs[1:]))

    def test_default_range_honors_operating_limit(self):
        # At 4 uJ the cutoff lies beyond 20 dB of channel loss, so the
        # default search range reports no cutoff.
        assert keyrate.cutoff_distance(Protocol.SARG04, 4e-6) is None
        assert keyrate.cutoff_distance(Protocol.SARG04, 10e-6) is not None

    def test_insecure_from_the_start(self):
        assert keyrate.cutoff_distance(Protocol.SARG04, 3e-4) == 0.0

    def test_bb84_no_cutoff_without_attack(self):
        # At these parameters the believed BB84 rate stays positive through
        # the whole operating range; only the attack creates a cutoff.
        assert keyrate.cutoff_distance(Protocol.BB84, 0.0) is None

    def test_bb84_attack_creates_cutoff(self):
        four = keyrate.cutoff_distance(Protocol.BB84, 4e-6)
        ten = keyrate.cutoff_distance(Protocol.BB84, 10e-6)
        assert four is not None and ten is not None
        assert 0.0 < ten < four < 100.0


class TestSweep:
    def test_degenerate_grid(self):
        single = keyrate.sweep(Protocol.SARG04, [42.0], [4e-6])
        assert len(single) == 1
        assert single[0] == keyrate.rate_under_attack(Protocol.SARG04, 42.0, 4e-6)

    def test_row_ordering(self):
        points = keyrate.sweep(Protocol.SARG04, [0.0, 10.0], [0.0, 4e-6])
        key = [(p.distance_km, p.pulse_energy_j) for p in points]
        assert key == [(0.0, 0.0), (0.0, 4e-6), (10.0, 0.0), (10.0, 4e-6)]

    def test_rejects_decreasing_grid(self):
        with pytest.raises(ValueError):
            keyrate.sweep(Protocol.SARG04, [10.0, 5.0], [0.0])

    def test_csv_round_trip_is_identity(self):
        points = keyrate.sweep(
            Protocol.BB84, [0.0, 60.0, 120.0], [0.0, 4e-6], numeric_mu=False
        )
        text = keyrate.sweep_csv_text(points)
        assert text.splitlines()[0] == keyrate.SWEEP_CSV_HEADER
        parsed = keyrate.read_sweep_csv(io.StringIO(text))
        assert parsed == points
        assert keyrate.sweep_csv_text(parsed) == text

    def test_csv_serializes_insecure_points(self):
        point = keyrate.rate_under_attack(Protocol.BB84, 120.0, 10e-6)
        text = keyrate.sweep_csv_text([point])
        line = text.splitlines()[1]
        assert line.endswith(",0")
        (parsed,) = keyrate.read_sweep_csv(io.StringIO(text))
        assert parsed.rate_actual == -math.inf

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            keyrate.read_sweep_csv(io.StringIO("a,b,c\n"))
