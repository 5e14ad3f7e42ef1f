import numpy as np
import pytest
from scipy import stats

from weylest.channels import ChannelParams, identity_channel, make_exp_corr_channel, transition_probs
from weylest.simulate import (
    CountVector,
    RngStream,
    rng_stream,
    simulate_dpepc,
    simulate_dpepc_oracle,
    simulate_ope,
)
from weylest.weyl import WeylIndex

from conftest import config_for, random_channel


def two_sample_chisq_pvalue(c1, c2):
    """Homogeneity test of two count vectors over the same categories."""
    c1, c2 = np.asarray(c1, float), np.asarray(c2, float)
    keep = (c1 + c2) > 0
    table = np.stack([c1[keep], c2[keep]])
    return stats.chi2_contingency(table)[1]


class TestRngStream:
    def test_same_key_same_samples(self):
        a = rng_stream(99, 3, 1).multinomial(1000, [0.2, 0.8])
        b = rng_stream(99, 3, 1).multinomial(1000, [0.2, 0.8])
        assert np.array_equal(a, b)

    def test_different_streams_differ(self):
        a = rng_stream(99, 3, 1).multinomial(10**6, [0.5, 0.5])
        b = rng_stream(99, 3, 2).multinomial(10**6, [0.5, 0.5])
        assert not np.array_equal(a, b)

    def test_dataclass_equivalence(self):
        gen = RngStream(7, (0, 4)).generator()
        assert np.array_equal(gen.integers(0, 100, 5), rng_stream(7, 0, 4).integers(0, 100, 5))


class TestCountVector:
    def test_counts_must_sum_to_shots(self):
        with pytest.raises(ValueError):
            CountVector(None, np.array([3, 3]), 5)

    def test_frequencies(self):
        cv = CountVector(None, np.array([3, 1]), 4)
        assert np.allclose(cv.frequencies, [0.75, 0.25])


class TestSimulateDpepc:
    def test_identity_channel_concentrates(self, rng):
        cfg = config_for(3)
        for cv in simulate_dpepc(identity_channel(3), cfg, 3000, 0.0, rng):
            assert cv.counts[0] == cv.shots

    def test_uniform_channel_chisq(self, rng):
        d = 3
        cfg = config_for(d)
        uniform = ChannelParams(d=d, p=np.full(d * d, 1 / (d * d)))
        for cv in simulate_dpepc(uniform, cfg, 10**5 * cfg.K, 0.0, rng):
            p = stats.chisquare(cv.counts).pvalue
            assert p > 0.001

    def test_fully_depolarized_probe_uniform(self, rng):
        d = 2
        cfg = config_for(d)
        ch = ChannelParams(d=d, p=np.array([0.9, 0.1, 0.0, 0.0]))
        for cv in simulate_dpepc(ch, cfg, 10**5 * cfg.K, 1.0, rng):
            assert stats.chisquare(cv.counts).pvalue > 0.001

    def test_shot_budget_split(self, rng):
        cfg = config_for(2)
        counts = simulate_dpepc(identity_channel(2), cfg, 10, 0.0, rng)
        assert [cv.shots for cv in counts] == [3, 3, 3]  # remainder discarded

    def test_too_few_uses(self, rng):
        cfg = config_for(2)
        with pytest.raises(ValueError):
            simulate_dpepc(identity_channel(2), cfg, 2, 0.0, rng)

    def test_probe_alignment(self, rng):
        cfg = config_for(3)
        counts = simulate_dpepc(identity_channel(3), cfg, 300, 0.0, rng)
        assert [cv.probe for cv in counts] == list(cfg.probes)

    def test_empirical_convergence_bound(self, rng):
        # soft gate: max |freq - lambda| within 5 sqrt(log(dK) / (2 shots))
        d = 5
        cfg = config_for(d)
        ch = make_exp_corr_channel(d, 0.7)
        shots = 20000
        counts = simulate_dpepc(ch, cfg, shots * cfg.K, 0.0, rng)
        bound = 5 * np.sqrt(np.log(d * cfg.K) / (2 * shots))
        for cv in counts:
            lam = transition_probs(ch, cv.probe)
            assert np.max(np.abs(cv.frequencies - lam)) <= bound


class TestSimulateDpepcOracle:
    def test_identity_channel_concentrates(self, rng):
        cfg = config_for(3)
        for cv in simulate_dpepc_oracle(identity_channel(3), cfg, 3000, 0.0, rng):
            assert cv.counts[0] == cv.shots

    def test_frequencies_near_transition_probs(self, rng):
        d = 3
        cfg = config_for(d)
        ch = random_channel(d, rng)
        shots = 20000
        for cv in simulate_dpepc_oracle(ch, cfg, shots * cfg.K, 0.0, rng):
            lam = transition_probs(ch, cv.probe)
            sigma = np.sqrt(np.maximum(lam * (1 - lam), 1e-12) / shots)
            assert np.all(np.abs(cv.frequencies - lam) < 4 * sigma + 1e-9)

    @pytest.mark.parametrize("d", range(2, 9))
    def test_agrees_with_fast_path(self, d, rng):
        cfg = config_for(d)
        ch = random_channel(d, rng)
        shots = 20000
        kappa = 0.2
        fast = simulate_dpepc(ch, cfg, shots * cfg.K, kappa, rng_stream(11, d, 0))
        oracle = simulate_dpepc_oracle(ch, cfg, shots * cfg.K, kappa, rng_stream(11, d, 1))
        for f, o in zip(fast, oracle):
            assert two_sample_chisq_pvalue(f.counts, o.counts) > 0.001

    def test_dimension_cap(self, rng):
        cfg = config_for(17)
        with pytest.raises(ValueError):
            simulate_dpepc_oracle(identity_channel(17), cfg, 1000, 0.0, rng)


class TestSimulateOpe:
    def test_identity_channel_all_at_zero(self, rng):
        cv = simulate_ope(identity_channel(4), 5000, 0.0, rng)
        assert cv.probe is None
        assert cv.counts[0] == cv.shots == 5000

    def test_uniform_channel_flat(self, rng):
        d = 2
        ch = ChannelParams(d=d, p=np.full(4, 0.25))
        cv = simulate_ope(ch, 10**5, 0.0, rng)
        assert stats.chisquare(cv.counts).pvalue > 0.001

    def test_qubit_multinomial_check(self, rng):
        p = np.array([0.7, 0.1, 0.15, 0.05])
        ch = ChannelParams(d=2, p=p)
        n = 10**6
        cv = simulate_ope(ch, n, 0.0, rng)
        sigma = np.sqrt(p * (1 - p) / n)
        assert np.all(np.abs(cv.frequencies - p) < 4 * sigma)

    def test_needs_at_least_one_use(self, rng):
        with pytest.raises(ValueError):
            simulate_ope(identity_channel(2), 0, 0.0, rng)

    def test_kappa_validated(self, rng):
        with pytest.raises(ValueError):
            simulate_ope(identity_channel(2), 10, 1.2, rng)
