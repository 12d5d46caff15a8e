import math

import numpy as np
import pytest

from milkspec.errors import DegenerateDataError
from milkspec.stats.correlation import (
    band_significance,
    benjamini_hochberg_flags,
    correlation,
)


# --- brute-force oracles -----------------------------------------------------

def pearson_oracle(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def midrank_oracle(values):
    ranks = [0.0] * len(values)
    for i, v in enumerate(values):
        less = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        ranks[i] = less + (equal + 1) / 2.0
    return ranks


def kendall_oracle(x, y):
    """Tau-b by O(n^2) pair enumeration with explicit tie counting."""
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                ties_x += 1
                ties_y += 1
            elif dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif dx * dy > 0:
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) / 2
    denom = math.sqrt((n0 - ties_x) * (n0 - ties_y))
    return (concordant - discordant) / denom


class TestExamples:
    def test_exact_line_r_one_p_zero(self):
        result = correlation([1, 2, 3], [2, 4, 6])
        assert result.coefficient == 1.0
        assert result.p_value == 0.0

    def test_hand_covariance_point_eight(self):
        result = correlation([1, 2, 3, 4], [1, 3, 2, 4])
        assert result.coefficient == pytest.approx(0.8, abs=1e-15)

    def test_kendall_pair_enumeration_example(self):
        # C = 2 concordant pairs, D = 1 discordant of 3 -> tau 1/3
        result = correlation([1, 2, 3], [1, 3, 2], "kendall")
        assert result.coefficient == pytest.approx(1 / 3, abs=1e-15)
        assert result.coefficient == pytest.approx(kendall_oracle([1, 2, 3], [1, 3, 2]))

    def test_zero_variance_rejected(self):
        for method in ("pearson", "spearman", "kendall"):
            with pytest.raises(DegenerateDataError):
                correlation([1.0, 1.0, 1.0], [1.0, 2.0, 3.0], method)

    def test_too_short(self):
        with pytest.raises(DegenerateDataError):
            correlation([1.0, 2.0], [2.0, 1.0])


class TestOracleAgreement:
    def test_hundred_seeded_vectors_with_ties(self):
        rng = np.random.default_rng(1234)
        for trial in range(100):
            n = int(rng.integers(5, 30))
            # integer grids force ties
            x = rng.integers(0, 6, n).astype(float)
            y = (x + rng.integers(-2, 3, n)).astype(float)
            if np.unique(x).size < 2 or np.unique(y).size < 2:
                continue
            assert correlation(x, y).coefficient == pytest.approx(
                pearson_oracle(x.tolist(), y.tolist()), abs=1e-12
            )
            assert correlation(x, y, "spearman").coefficient == pytest.approx(
                pearson_oracle(midrank_oracle(x.tolist()), midrank_oracle(y.tolist())), abs=1e-12
            )
            assert correlation(x, y, "kendall").coefficient == pytest.approx(
                kendall_oracle(x.tolist(), y.tolist()), abs=1e-12
            )


class TestInvariances:
    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=20)
        y = rng.normal(size=20)
        for method in ("pearson", "spearman", "kendall"):
            a = correlation(x, y, method)
            b = correlation(y, x, method)
            assert a.coefficient == pytest.approx(b.coefficient, abs=1e-14)
            assert a.p_value == pytest.approx(b.p_value, abs=1e-14)

    def test_pearson_affine_invariance(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=25)
        y = rng.normal(size=25)
        base = correlation(x, y).coefficient
        assert correlation(3.0 * x + 7.0, y).coefficient == pytest.approx(base, abs=1e-12)
        assert correlation(x, 0.1 * y - 2.0).coefficient == pytest.approx(base, abs=1e-12)

    def test_rank_methods_monotone_invariance(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=25)
        y = rng.normal(size=25)
        for method in ("spearman", "kendall"):
            base = correlation(x, y, method).coefficient
            assert correlation(np.exp(x), y, method).coefficient == pytest.approx(base, abs=1e-12)
            assert correlation(x, y**3, method).coefficient == pytest.approx(base, abs=1e-12)


class TestBandSignificance:
    def test_target_copied_band_flagged_with_r_one(self):
        rng = np.random.default_rng(8)
        spectra = rng.normal(size=(20, 10))
        target = spectra[:, 3].copy()
        table = band_significance(spectra, target)
        assert table[3].coefficient == 1.0
        assert table[3].significant
        assert table[3].p_value == 0.0

    def test_constant_band_not_significant_with_note(self):
        rng = np.random.default_rng(9)
        spectra = rng.normal(size=(15, 5))
        spectra[:, 2] = 0.7
        table = band_significance(spectra, rng.normal(size=15))
        assert not table[2].significant
        assert table[2].note == "constant band"
        assert math.isnan(table[2].coefficient)

    def test_bh_never_flags_more_than_raw(self):
        rng = np.random.default_rng(10)
        for trial in range(10):
            spectra = rng.normal(size=(25, 40))
            target = rng.normal(size=25)
            raw = band_significance(spectra, target, alpha=0.05, correction="none")
            adjusted = band_significance(spectra, target, alpha=0.05, correction="benjamini_hochberg")
            assert sum(r.significant for r in adjusted) <= sum(r.significant for r in raw)

    def test_wavelengths_carried_through(self):
        rng = np.random.default_rng(11)
        spectra = rng.normal(size=(12, 3))
        table = band_significance(spectra, rng.normal(size=12), wavelengths=[900.0, 1300.0, 1700.0])
        assert [r.wavelength_nm for r in table] == [900.0, 1300.0, 1700.0]

    def test_input_validation(self):
        rng = np.random.default_rng(12)
        spectra = rng.normal(size=(10, 4))
        with pytest.raises(ValueError):
            band_significance(spectra, rng.normal(size=9))
        with pytest.raises(ValueError):
            band_significance(spectra, rng.normal(size=10), alpha=1.5)
        with pytest.raises(ValueError):
            band_significance(spectra, rng.normal(size=10), correction="bonferroni")


class TestBenjaminiHochberg:
    def test_step_up_by_hand(self):
        # m=4, alpha=0.05: thresholds 0.0125, 0.025, 0.0375, 0.05
        p = [0.01, 0.04, 0.03, 0.9]
        flags = benjamini_hochberg_flags(p, 0.05)
        # sorted p: 0.01 <= 0.0125, 0.03 <= 0.025? no, 0.04 <= 0.0375? no -> k=1
        assert flags.tolist() == [True, False, False, False]

    def test_all_tiny_all_flagged(self):
        flags = benjamini_hochberg_flags([1e-8, 1e-9, 1e-7], 0.05)
        assert flags.all()
