import math

import mpmath as mp
import numpy as np
import pytest

from zetapair.bounds import (
    REFERENCE_TABLE_FEJER,
    REFERENCE_TABLE_MT,
    REFERENCE_TABLE_MT_SIMPLE_CRITICAL,
    BoundRow,
    c_b,
    c_b_parts,
    failure_threshold,
    proportions,
    table,
)
from zetapair.kernels import KernelId, fejer, mt


def c_b_mpmath(kid, b):
    """Independent 30-digit evaluation of C_b."""
    j = (lambda a: max(1 - abs(a), 0)) if kid == "fejer" else None
    with mp.workdps(30):
        if j is None:
            r2 = mp.sqrt(2)
            norm = 1 / (1 - mp.cos(r2))

            def j(a):
                jf = 1 - a
                return norm * (mp.sin(r2 * jf) / (2 * r2) + jf * mp.cos(r2 * a) / 2)

        num = j(mp.mpf(0)) + 2 * mp.quad(lambda a: a * j(a) / mp.cosh(b * a), [0, 1])
        den = 2 * mp.quad(lambda a: j(a) / mp.cosh(b * a), [0, 1])
        return float(num / den)


class TestCb:
    def test_fejer_limit(self):
        assert abs(c_b(KernelId.FEJER, 0.0) - 4 / 3) < 1e-12

    def test_headline_constants(self):
        assert abs(2 - c_b("mt", 0.001) - 0.67250064) < 1e-7
        assert abs(2 - c_b("mt", 0.3185) - 0.66666908) < 1e-7

    def test_mt_reference_row(self):
        assert abs(2 - c_b("mt", 1.0) - 0.61748) < 2e-5

    @pytest.mark.parametrize("kid", ["fejer", "mt"])
    @pytest.mark.parametrize("b", [0.0, 0.7, 2.5, 4.1])
    def test_against_mpmath(self, kid, b):
        assert c_b(kid, b) == pytest.approx(c_b_mpmath(kid, b), abs=1e-13)

    def test_parts(self):
        num, den = c_b_parts("fejer", 0.0)
        assert num == pytest.approx(4 / 3, abs=1e-14) and den == pytest.approx(1.0, abs=1e-14)

    def test_invalid_b(self):
        with pytest.raises(ValueError):
            c_b("mt", -1.0)
        with pytest.raises(ValueError):
            c_b("mt", math.nan)

    @pytest.mark.parametrize("kid", ["fejer", "mt"])
    def test_at_least_one(self, kid):
        assert all(c_b(kid, b) >= 1 for b in np.linspace(0, 10, 21))


class TestProportions:
    def test_headline_values(self):
        assert abs(proportions("mt", 0.3185).simple_coeff - 0.66666908) < 1e-7
        assert abs(proportions("mt", 0.001).simple_critical_coeff - 0.34500129) < 1e-7

    def test_fejer_at_zero(self):
        row = proportions("fejer", 0.0)
        assert row.simple_coeff == pytest.approx(2 / 3, abs=1e-12)
        assert row.critical_coeff == pytest.approx(2 / 3, abs=1e-12)
        assert row.simple_critical_coeff == pytest.approx(1 / 3, abs=1e-12)

    def test_identities(self):
        for b in (0.0, 1.0, 3.3, 6.0):
            row = proportions("mt", b)
            assert row.simple_coeff == row.critical_coeff == 2 - row.c_b
            assert row.simple_critical_coeff == pytest.approx(3 - 2 * row.c_b, abs=1e-15)

    def test_negative_values_kept_unless_clamped(self):
        row = proportions("fejer", 4.5)
        assert row.simple_coeff < 0
        assert row.as_dict(clamp=True)["simple_coeff"] == 0.0
        assert row.as_dict()["simple_coeff"] < 0


class TestTable:
    def test_mt_reference_simple(self):
        rows = table("mt", list(REFERENCE_TABLE_MT))
        for row, printed in zip(rows, REFERENCE_TABLE_MT.values()):
            assert abs(row.simple_coeff - printed) < 2e-5, row.b

    def test_mt_reference_simple_critical(self):
        rows = table("mt", list(REFERENCE_TABLE_MT_SIMPLE_CRITICAL))
        for row, printed in zip(rows, REFERENCE_TABLE_MT_SIMPLE_CRITICAL.values()):
            assert abs(row.simple_critical_coeff - printed) < 2e-5, row.b

    def test_fejer_row(self):
        assert abs(table("fejer", [2.0])[0].simple_coeff - 0.45887) < 2e-5

    def test_fejer_column_to_four(self):
        grid = [b for b in REFERENCE_TABLE_FEJER if b <= 4.0]
        for row in table("fejer", grid):
            assert abs(max(row.simple_coeff, 0) - REFERENCE_TABLE_FEJER[row.b]) < 2e-5, row.b

    def test_empty(self):
        assert table("mt", []) == []

    def test_order_preserved(self):
        assert [r.b for r in table("mt", [3.0, 1.0, 2.0])] == [3.0, 1.0, 2.0]

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            table("mt", [1.0, -0.5])


class TestFailureThreshold:
    def test_mt_simple(self):
        assert 4.187 < failure_threshold("mt", "simple") < 4.20

    def test_mt_simple_critical(self):
        assert 1.8 < failure_threshold("mt", "simple_critical") < 2.0

    def test_fejer_simple(self):
        assert 4.0508 < failure_threshold("fejer", "simple") < 4.187

    def test_root_is_a_root(self):
        b = failure_threshold("fejer", "simple", tol=1e-10)
        assert abs(2 - c_b("fejer", b)) < 1e-9

    def test_bad_which(self):
        with pytest.raises(ValueError):
            failure_threshold("mt", "critical")

    def test_no_root_in_limit(self):
        with pytest.raises(ValueError):
            failure_threshold("mt", "simple", b_limit=2.0)


class TestShape:
    @pytest.mark.parametrize("kid", ["fejer", "mt"])
    def test_strictly_decreasing(self, kid):
        values = [2 - c_b(kid, b) for b in np.round(np.arange(0, 46) * 0.1, 10)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_mt_dominates_fejer(self):
        for b in list(np.linspace(0.001, 4.05, 60)):
            assert 2 - c_b("mt", b) > 2 - c_b("fejer", b)


def test_bound_row_dict_has_kernel_name():
    d = BoundRow.from_c_b(KernelId.FEJER, 1.0, 1.5).as_dict()
    assert d["kernel"] == "fejer" and d["simple_critical_coeff"] == 0.0


def test_kernels_are_the_documented_ones():
    assert fejer(0.0) == 1.0
    assert mt(0.0) == pytest.approx(1.0061271908658287, rel=1e-15)
