import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import zetapair.io_cli as cli
from zetapair.bounds import REFERENCE_TABLE_FEJER
from zetapair.io_cli import (
    ZeroFileError,
    cache_path,
    dumps_json,
    main,
    parse_grid,
    parse_zero_file,
    write_zero_file,
)
from zetapair.zeta_zeros import ZeroDataset


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def zero_file(tmp_path, zeros_2500_5000):
    path = tmp_path / "z.txt"
    write_zero_file(zeros_2500_5000, path)
    return path


class TestZeroFiles:
    def test_two_ordinates(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("14.134725\n21.022040\n")
        ds = parse_zero_file(p)
        assert len(ds) == 2 and ds.source == "file" and ds.on_line
        assert np.all(ds.betas == 0.5) and np.all(ds.multiplicities == 1)

    def test_decreasing_names_line(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("# header\n21.0\n14.1\n")
        with pytest.raises(ZeroFileError, match=r":3:"):
            parse_zero_file(p)

    def test_malformed_names_line(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("14.1\n\nabc\n")
        with pytest.raises(ZeroFileError, match=r":3:"):
            parse_zero_file(p)

    def test_comments_only(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("# nothing\n# here\n")
        with pytest.raises(ZeroFileError, match="no ordinates"):
            parse_zero_file(p)

    def test_missing(self, tmp_path):
        with pytest.raises(ZeroFileError):
            parse_zero_file(tmp_path / "absent.txt")

    def test_header_and_format(self, tmp_path, zeros_to_1000):
        p = tmp_path / "z.txt"
        write_zero_file(zeros_to_1000, p)
        text = p.read_bytes().decode("ascii")
        assert "\r" not in text
        lines = text.splitlines()
        assert lines[0] == "# source: computed"
        assert lines[1] == "# t-range: 10 1000"
        assert lines[2].startswith("# build: zetapair")
        assert lines[3] == format(zeros_to_1000.gammas[0], ".12g")
        assert abs(float(lines[3]) - 14.134725141734693) < 1e-9

    def test_round_trip(self, tmp_path, zeros_to_1000):
        p = tmp_path / "z.txt"
        write_zero_file(zeros_to_1000, p)
        back = parse_zero_file(p)
        expected = [float(format(g, ".12g")) for g in zeros_to_1000.gammas]
        assert list(back.gammas) == expected
        assert (back.t_min, back.t_max) == (10.0, 1000.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(10, 1e6), min_size=1, max_size=40, unique=True))
    def test_round_trip_property(self, tmp_path_factory, values):
        g = np.unique(np.array([float(format(v, ".12g")) for v in values]))
        ds = ZeroDataset.on_line_ordinates(g)
        p = tmp_path_factory.mktemp("rt") / "z.txt"
        write_zero_file(ds, p)
        assert np.array_equal(parse_zero_file(p).gammas, g)


class TestSerialization:
    def test_json_17_digits(self):
        text = dumps_json({"v": 0.1, "n": 3, "s": "a", "l": [1.5, None, True]})
        assert '"v": 0.10000000000000001' in text
        assert json.loads(text)["v"] == 0.1

    def test_non_finite_becomes_null(self):
        assert json.loads(dumps_json({"a": math.nan}))["a"] is None

    def test_grid(self):
        assert len(parse_grid("0:4:0.2")) == 21
        assert parse_grid("0.05:1:0.05")[-1] == 1.0
        assert parse_grid("1,2.5,3") == [1.0, 2.5, 3.0]

    @pytest.mark.parametrize("text", ["1:0:0.1", "0:1:0", "3,2", "1,nan", "0:1", ""])
    def test_bad_grid(self, text):
        with pytest.raises(cli.UsageError):
            parse_grid(text)


class TestBoundsCommand:
    def test_single_row(self):
        code, out = run("bounds", "--kernel", "mt", "--b", "1")
        assert code == 0
        row = list(csv.DictReader(io.StringIO(out)))[0]
        assert abs(float(row["simple_coeff"]) - 0.61748) < 2e-5
        assert "\r" not in out

    def test_fejer_grid(self):
        code, out = run("bounds", "--kernel", "fejer", "--grid", "0:4:0.2")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 21
        for row in rows[1:]:
            b = float(row["b"])
            assert abs(float(row["simple_coeff"]) - REFERENCE_TABLE_FEJER[b]) < 2e-5, b

    def test_negative_b(self, capsys):
        code, _ = run("bounds", "--kernel", "mt", "--b", "-1")
        assert code == 2
        assert "usage" in capsys.readouterr().err

    def test_clamped_json(self):
        code, out = run("bounds", "--kernel", "fejer", "--b", "4.5", "--format", "json")
        rec = json.loads(out)[0]
        assert code == 0 and rec["simple_coeff"] == 0 and rec["c_b"] > 2

    def test_unknown_kernel(self):
        assert run("bounds", "--kernel", "gauss", "--b", "1")[0] == 2

    def test_deterministic(self):
        assert run("bounds", "--kernel", "mt", "--grid", "0:1:0.5") == run("bounds", "--kernel", "mt", "--grid", "0:1:0.5")


class TestKernelEval:
    def test_values(self):
        code, out = run("kernel-eval", "--kernel", "fejer", "--b", "0", "--z", "0", "--alpha", "0.5")
        rec = json.loads(out)
        assert code == 0
        assert rec["K_re"] == pytest.approx(1 / (2 * math.pi), abs=1e-14)
        assert rec["j"] == 0.5

    def test_bad_z(self):
        assert run("kernel-eval", "--z", "three")[0] == 2


class TestZerosCommand:
    def test_writes_and_caches(self, tmp_path):
        out_file = tmp_path / "z.txt"
        code, out = run("zeros", "--t-max", "100", "--out", str(out_file))
        rep = json.loads(out)
        assert code == 0 and rep["n_zeros"] == 29 and rep["consistent"] and not rep["cached"]
        assert len(parse_zero_file(out_file)) == 29
        first = cache_path(10.0, 100.0).read_bytes()

        again = tmp_path / "z2.txt"
        code, out = run("zeros", "--t-max", "100", "--out", str(again))
        assert code == 0 and json.loads(out)["cached"]
        assert again.read_bytes() == out_file.read_bytes() == first

    def test_domain(self):
        assert run("zeros", "--t-max", "5")[0] == 2

    def test_corrupt_cache(self):
        path = cache_path(10.0, 60.0)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("garbage\n")
        assert run("zeros", "--t-max", "60")[0] == cli.EXIT_CACHE_CORRUPT

    def test_count_mismatch_exit_code(self, monkeypatch):
        def too_few(t_min, t_max, **kw):
            return ZeroDataset.on_line_ordinates([14.134725141734693], t_min, t_max, source="computed")

        monkeypatch.setattr(cli, "compute_zeros", too_few)
        code, out = run("zeros", "--t-max", "100", "--no-cache")
        assert code == cli.EXIT_COUNT_MISMATCH
        assert json.loads(out)["consistent"] is False


class TestPaircorrCommand:
    def test_curve_rows(self, zero_file):
        code, out = run("paircorr", "--zeros", str(zero_file), "--T", "2500", "--alpha-grid", "0.05:1:0.05")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 20
        assert list(rows[0]) == ["alpha", "empirical", "theory"]

    def test_single_x_json(self, zero_file):
        code, out = run("paircorr", "--zeros", str(zero_file), "--x", "10", "--window", "2500:5000")
        rec = json.loads(out)
        assert code == 0
        assert set(rec) == {"x", "T", "value_re", "value_im", "n_zeros", "n_pairs", "trunc_bound"}
        assert rec["trunc_bound"] == 0 and rec["n_zeros"] == 2535

    def test_truncated(self, zero_file):
        code, out = run("paircorr", "--zeros", str(zero_file), "--x", "10", "--window", "2500:5000",
                        "--truncation-gap", "20")
        assert code == 0 and json.loads(out)["trunc_bound"] > 0

    def test_x_zero(self, zero_file):
        assert run("paircorr", "--zeros", str(zero_file), "--x", "0", "--window", "2500:5000")[0] == 2

    def test_missing_file(self, tmp_path):
        assert run("paircorr", "--zeros", str(tmp_path / "nope"), "--x", "2", "--T", "100")[0] == 2

    def test_too_few_zeros_is_error(self, tmp_path):
        p = tmp_path / "small.txt"
        p.write_text("14.134725\n21.022040\n")
        assert run("paircorr", "--zeros", str(p), "--T", "10", "--alpha-grid", "0.5")[0] == 1


class TestVerifyCommand:
    def test_only_kernels(self):
        code, out = run("verify", "--only", "kernels")
        lines = out.strip().splitlines()
        assert code == 0
        assert all(line.split()[1].startswith("kernels.") for line in lines)
        assert all(line.startswith("PASS") for line in lines)

    def test_injected_fault(self):
        code, out = run("verify", "--only", "quadrature,bounds.headline_constants", "--tolerance", "1e-30")
        assert code == 1
        assert "FAIL" in out and "headline_constants" in out.splitlines()[-1]

    def test_unknown_group(self):
        assert run("verify", "--only", "nonsense")[0] == 2

    def test_default_run_all_pass(self):
        code, out = run("verify")
        names = [line.split()[1] for line in out.splitlines() if line[:4] in ("PASS", "FAIL")]
        assert len(names) >= 20
        assert code == 0, out
