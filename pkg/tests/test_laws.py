import numpy as np
import pytest
import scipy.stats

from semidim import (
    BlockLaw,
    LawKind,
    derive_rng,
    sample_isotropic_stable_2d,
    sample_one_sided_stable,
    sample_semistable_increment,
    sample_stable_increment,
)
from semidim.errors import AlphaOutOfRange, TruncationTooCoarse


class TestStableSampler:
    def test_gaussian_variance(self):
        # moment oracle: scale-1 CMS at alpha=2 is N(0, 2)
        rng = derive_rng(1, "test/cms/gauss")
        x = sample_stable_increment(2.0, 1.0, rng, size=10**6)
        assert abs(x.var() - 2.0) < 0.02
        assert abs(x.mean()) < 0.01

    def test_cauchy_quartiles(self):
        # quantile oracle: standard Cauchy quartiles at +-1
        rng = derive_rng(1, "test/cms/cauchy")
        x = sample_stable_increment(1.0, 1.0, rng, size=10**6)
        q1, q3 = np.quantile(x, [0.25, 0.75])
        assert abs(q1 + 1.0) < 0.01
        assert abs(q3 - 1.0) < 0.01

    def test_heavy_tail_index(self):
        # tail-index regression oracle over x in [10, 1e4]
        rng = derive_rng(1, "test/cms/tail")
        x = sample_stable_increment(0.7, 1.0, rng, size=10**6)
        grid = np.array([10.0, 100.0, 1000.0, 10000.0])
        tails = np.array([(np.abs(x) > g).mean() for g in grid])
        slope = np.polyfit(np.log(grid), np.log(tails), 1)[0]
        assert abs(slope + 0.7) < 0.05

    def test_scale_parameter(self):
        rng = derive_rng(1, "test/cms/scale")
        x = sample_stable_increment(2.0, 3.0, rng, size=10**5)
        assert abs(x.var() - 18.0) < 0.5

    def test_alpha_range(self):
        rng = derive_rng(1, "x")
        with pytest.raises(AlphaOutOfRange):
            sample_stable_increment(2.5, 1.0, rng)
        with pytest.raises(AlphaOutOfRange):
            sample_stable_increment(0.0, 1.0, rng)


class TestOneSidedStable:
    def test_laplace_transform(self):
        # oracle: E exp(-lam A) = exp(-lam^gamma)
        rng = derive_rng(2, "test/onesided")
        for gamma in (0.4, 0.75):
            a = sample_one_sided_stable(gamma, rng, size=4 * 10**5)
            assert np.all(a > 0)
            for lam in (0.5, 1.0, 2.0):
                got = np.mean(np.exp(-lam * a))
                want = np.exp(-(lam**gamma))
                assert abs(got - want) < 0.004


class TestIsotropicSampler:
    def test_marginal_matches_cms(self):
        rng = derive_rng(3, "test/iso")
        v = sample_isotropic_stable_2d(1.5, 1.0, rng, size=2 * 10**5)
        w = sample_stable_increment(1.5, 1.0, rng, size=2 * 10**5)
        ks = scipy.stats.ks_2samp(v[:, 0], w).statistic
        assert ks < 1.36 * np.sqrt(2.0 / (2 * 10**5)) * 2.0

    def test_rotation_invariance(self):
        rng = derive_rng(3, "test/iso/rot")
        v = sample_isotropic_stable_2d(1.2, 1.0, rng, size=2 * 10**5)
        theta = 0.73
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        ks = scipy.stats.ks_2samp((v @ rot.T)[:, 0], v[:, 0]).statistic
        assert ks < 1.36 * np.sqrt(2.0 / (2 * 10**5)) * 2.0

    def test_alpha_two_is_gaussian(self):
        rng = derive_rng(3, "test/iso/g")
        v = sample_isotropic_stable_2d(2.0, 1.0, rng, size=10**5)
        assert abs(v[:, 0].var() - 2.0) < 0.05
        assert abs(v[:, 1].var() - 2.0) < 0.05


class TestSemistableSampler:
    def test_discrete_scaling_identity(self):
        # KS oracle on X(c*dt) =d c^(1/alpha) X(dt) at alpha=1, c=2
        rng = derive_rng(4, "test/semi/ks")
        a = sample_semistable_increment(1.0, 2.0, 1.0, rng, size=10**5)
        b = sample_semistable_increment(1.0, 2.0, 0.5, rng, size=10**5)
        ks = scipy.stats.ks_2samp(a, 2.0 * b).statistic
        assert ks < 0.02

    def test_truncation_depth_stability(self):
        # deepening k_min from -20 to -30 moves the 99% quantile by < 0.5%
        rng = derive_rng(4, "test/semi/kmin")
        u = sample_semistable_increment(1.0, 2.0, 1.0, rng, k_min=-20, size=10**5)
        v = sample_semistable_increment(1.0, 2.0, 1.0, rng, k_min=-30, size=10**5)
        q20 = np.quantile(np.abs(u), 0.99)
        q30 = np.quantile(np.abs(v), 0.99)
        assert abs(q20 - q30) / q30 < 0.005

    def test_rejects_zero_dt(self):
        rng = derive_rng(4, "x")
        with pytest.raises(ValueError):
            sample_semistable_increment(1.0, 2.0, 0.0, rng)

    def test_truncation_too_coarse(self):
        rng = derive_rng(4, "x")
        with pytest.raises(TruncationTooCoarse):
            sample_semistable_increment(1.0, 2.0, 2.0**-10, rng, k_min=-5, size=4)

    def test_alpha_strictly_below_two(self):
        rng = derive_rng(4, "x")
        with pytest.raises(AlphaOutOfRange):
            sample_semistable_increment(2.0, 2.0, 1.0, rng)


class TestBlockLaw:
    def test_dict_round_trip(self):
        law = BlockLaw(LawKind.SEMISTABLE_DISCRETE, alpha=1.0, c=2.0, k_min=-20)
        again = BlockLaw.from_dict(law.as_dict())
        assert again == law

    def test_validation(self):
        with pytest.raises(ValueError):
            BlockLaw(LawKind.SEMISTABLE_DISCRETE, alpha=1.0)  # missing c
        with pytest.raises(AlphaOutOfRange):
            BlockLaw(LawKind.SEMISTABLE_DISCRETE, alpha=2.0, c=2.0)
        with pytest.raises(ValueError):
            BlockLaw(LawKind.STABLE_SYMMETRIC, alpha=1.0, scale=0.0)

    def test_increment_shapes(self):
        rng = derive_rng(5, "test/shapes")
        assert BlockLaw(LawKind.STABLE_SYMMETRIC, alpha=1.5).sample_increments(0.1, 7, rng).shape == (7,)
        assert BlockLaw(LawKind.STABLE_ISOTROPIC_2D, alpha=1.5).sample_increments(0.1, 7, rng).shape == (7, 2)


class TestSeedDerivation:
    def test_deterministic_and_name_separated(self):
        a = derive_rng(1, "path/0").standard_normal(4)
        b = derive_rng(1, "path/0").standard_normal(4)
        c = derive_rng(1, "path/1").standard_normal(4)
        d = derive_rng(2, "path/0").standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)
