import numpy as np
import pytest

from gmn import noise as gn
from gmn import protocol as gp
from gmn.errors import DomainError
from gmn.harness import play_variation, variation_streams
from gmn.noise import NoiseModel
from gmn.qsim import DensityOperator

GHZ_RHO = gp.ghz().to_density().matrix


class TestDephasing:
    def test_full_coherence(self):
        np.testing.assert_allclose(gn.apply_ghz_dephasing(1).matrix, GHZ_RHO, atol=1e-15)

    def test_no_coherence(self):
        expected = np.zeros((8, 8))
        expected[0, 0] = expected[7, 7] = 0.5
        np.testing.assert_allclose(gn.apply_ghz_dephasing(0).matrix, expected, atol=1e-15)

    def test_reported_visibility(self):
        rho = gn.apply_ghz_dephasing(0.86).matrix
        assert rho[0, 7] == pytest.approx(0.43)
        assert rho[7, 0] == pytest.approx(0.43)

    def test_equals_mixture_of_ghz_and_perp(self, rng):
        for v in rng.random(20):
            mix = (1 + v) / 2 * GHZ_RHO + (1 - v) / 2 * gp.ghz_perp().to_density().matrix
            np.testing.assert_allclose(gn.apply_ghz_dephasing(v).matrix, mix, atol=1e-15)

    @pytest.mark.parametrize("v", [-0.01, 1.01])
    def test_domain(self, v):
        with pytest.raises(DomainError):
            gn.apply_ghz_dephasing(v)


class TestWhiteNoise:
    def test_identity_channel(self):
        rho = gn.apply_ghz_dephasing(0.7)
        np.testing.assert_allclose(gn.apply_white_noise(rho, 0).matrix, rho.matrix, atol=1e-15)

    def test_full_replacement(self):
        out = gn.apply_white_noise(gn.apply_ghz_dephasing(1), 1).matrix
        np.testing.assert_allclose(out, np.eye(8) / 8, atol=1e-15)

    def test_half_on_pure_ghz(self):
        # 0.5 * GHZ + 0.5 * I/8, entry by entry
        out = gn.apply_white_noise(gn.apply_ghz_dephasing(1), 0.5).matrix
        diag = np.full(8, 0.0625)
        diag[[0, 7]] = 0.5 * 0.5 + 0.0625
        np.testing.assert_allclose(np.diag(out).real, diag, atol=1e-15)
        assert out[0, 7] == pytest.approx(0.25)

    def test_domain(self):
        with pytest.raises(DomainError):
            gn.apply_white_noise(gn.apply_ghz_dephasing(1), 1.5)

    def test_channel_validity(self, rng):
        for _ in range(1000):
            v, p = rng.random(2)
            rho = gn.apply_white_noise(gn.apply_ghz_dephasing(v), p)
            assert isinstance(rho, DensityOperator)  # construction checks every invariant
            m = rho.matrix
            assert np.max(np.abs(m - m.conj().T)) < 1e-12
            assert abs(np.trace(m).real - 1) < 1e-12
            assert np.linalg.eigvalsh(m).min() >= -1e-10


class TestNoiseModel:
    def test_defaults(self):
        m = NoiseModel()
        assert (m.visibility, m.white_noise, m.detector_efficiency) == (1.0, 0.0, (1.0, 1.0, 1.0))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"visibility": 1.2},
            {"white_noise": -0.1},
            {"detector_efficiency": (1, 1, 0)},
            {"detector_efficiency": (1, 1)},
            {"detector_efficiency": (1, 1, 1.5)},
        ],
    )
    def test_domain(self, kwargs):
        with pytest.raises(DomainError):
            NoiseModel(**kwargs)


class TestWinProbability:
    @pytest.mark.parametrize("v, p, expected", [(1, 0, 1.0), (0, 0, 0.5), (0.702, 0, 0.851)])
    def test_examples(self, v, p, expected):
        assert gn.win_probability_exact(NoiseModel(v, p)) == pytest.approx(expected, abs=1e-12)

    def test_closed_form_grid(self):
        grid = np.linspace(0, 1, 21)
        for v in grid:
            for p in grid:
                got = gn.win_probability_exact(NoiseModel(v, p))
                assert abs(got - ((1 + v) * (1 - p) / 2 + p / 2)) < 1e-12

    def test_uniform_across_variations(self, rng):
        for _ in range(50):
            v, p = rng.random(2)
            probs = gn.per_variation_win_probabilities(NoiseModel(v, p))
            assert probs.max() - probs.min() < 1e-12

    def test_efficiency_does_not_enter(self):
        a = gn.win_probability_exact(NoiseModel(0.6, 0.1))
        b = gn.win_probability_exact(NoiseModel(0.6, 0.1, (0.2, 0.5, 0.9)))
        assert a == b


class TestCalibration:
    @pytest.mark.parametrize("target, v", [(1.0, 1.0), (0.851, 0.702), (0.75, 0.5)])
    def test_examples(self, target, v):
        assert gn.calibrate_visibility(target) == pytest.approx(v, abs=1e-12)

    def test_round_trip(self):
        for target in np.linspace(0.5, 1, 11):
            v = gn.calibrate_visibility(target)
            assert gn.win_probability_exact(NoiseModel(v)) == pytest.approx(target, abs=1e-12)

    @pytest.mark.parametrize("target", [0.49, 1.01])
    def test_domain(self, target):
        with pytest.raises(DomainError):
            gn.calibrate_visibility(target)


class TestDetection:
    def test_perfect_detectors(self, rng):
        m = NoiseModel()
        assert all(gn.detection_events(m, rng) == (True, True, True) for _ in range(1000))

    def test_valid_fraction(self, rng):
        m = NoiseModel(detector_efficiency=(0.5, 0.5, 0.5))
        valid = gn.detection_block(m, rng, 10**5)
        assert abs(valid.mean() - 0.125) < 0.005

    def test_reproducible(self):
        m = NoiseModel(detector_efficiency=(0.3, 0.6, 0.9))
        a = [gn.detection_events(m, np.random.default_rng(11)) for _ in range(3)]
        assert a[0] == a[1] == a[2]
        r1, r2 = np.random.default_rng(4), np.random.default_rng(4)
        assert [gn.detection_events(m, r1) for _ in range(20)] == [gn.detection_events(m, r2) for _ in range(20)]

    def test_block_matches_single_draws(self):
        m = NoiseModel(detector_efficiency=(0.3, 0.6, 0.9))
        r1, r2 = np.random.default_rng(8), np.random.default_rng(8)
        singles = [all(gn.detection_events(m, r1)) for _ in range(200)]
        assert singles == gn.detection_block(m, r2, 200).tolist()

    @pytest.mark.parametrize("efficiency", [0.5, 0.1])
    def test_efficiency_invariance_in_distribution(self, efficiency):
        # detection and measurement streams are independent, so the valid-round
        # outcomes are identical whatever the detectors lose
        v = gp.enumerate_valid_variations()[7]
        base = play_variation(v, NoiseModel(0.702), 500, *variation_streams(3, 7))
        lossy = play_variation(
            v, NoiseModel(0.702, detector_efficiency=(efficiency,) * 3), 500, *variation_streams(3, 7)
        )
        assert lossy.counts == base.counts
        assert lossy.discarded > 0 == base.discarded
