"""Output files and command-line behaviour."""
import subprocess
import sys
import unittest
from collections import Counter

import numpy as np
import pytest

from orbita import cli
from orbita import io as oio
from orbita.quantize import elliott_d

ORBIT = ["--p", "60,20,0"]


def run(tmp_path, *args):
    return cli.main([args[0], *ORBIT, "--out", str(tmp_path), *args[1:]])


class TestFormatting(unittest.TestCase):
    def test_fmt_roundtrips_and_has_no_negative_zero(self):
        self.assertEqual(oio.fmt(-0.0), "0")
        x = 0.1 + 0.2
        self.assertEqual(float(oio.fmt(x)), x)
        self.assertEqual(oio.fmt(3), "3")

    def test_csv_sorted_with_lf(self):
        rows = [{"L": 2, "k": 1, "Q": 0.5}, {"L": 1, "k": 2, "Q": 0.25}, {"L": 1, "k": 1, "Q": 1.0}]
        text = oio.csv_text(rows, ["L", "k", "Q"])
        self.assertNotIn("\r", text)
        self.assertEqual(text.splitlines(), ["L,k,Q", "1,1,1", "1,2,0.25", "2,1,0.5"])


def test_bands_output_is_ordered_and_deterministic(tmp_path):
    assert run(tmp_path, "bands", "--format", "csv,json,svg") == 0
    first = (tmp_path / "bands_60_20_0.csv").read_bytes()
    svg = (tmp_path / "bands_60_20_0.svg").read_bytes()
    assert run(tmp_path, "bands", "--format", "csv,json,svg") == 0
    assert (tmp_path / "bands_60_20_0.csv").read_bytes() == first
    assert (tmp_path / "bands_60_20_0.svg").read_bytes() == svg
    assert b"\r" not in first
    rows = oio.read_csv(tmp_path / "bands_60_20_0.csv")
    assert set(r["band"] for r in rows) == {"S1", "S2", "S3", "P+", "P-"}
    for r in rows:
        assert r["P1"] >= r["P2"] - 1e-9 and r["P2"] >= r["P3"] - 1e-9
    meta = oio.read_json(tmp_path / "bands_60_20_0.json")["meta"]
    assert meta["intersections"]["P-&S3"][0] == 40


def test_spectrum_counts_match_multiplicity(tmp_path):
    assert run(tmp_path, "spectrum", "--s", "-1", "--format", "csv,json") == 0
    rows = oio.read_csv(tmp_path / "spectrum_60_20_0_s-1.csv")
    counts = Counter(r["L"] for r in rows)
    for L in range(61):
        assert counts.get(L, 0) == elliott_d(40, 20, L)
    for r in rows:
        assert r["d"] == elliott_d(40, 20, r["L"])
    assert sum(counts[L] * (2 * L + 1) for L in counts) == 41 * 21 * 62 // 2
    lines = oio.read_csv(tmp_path / "spectrum_60_20_0_s-1_polylines.csv")
    assert {r["polyline"] for r in lines} >= {"P-", "P+", "S1", "S3"}
    meta = oio.read_json(tmp_path / "spectrum_60_20_0_s-1.json")["meta"]
    assert meta["gaps"]["P-"] == [1]


def test_trajectory_conserves_H_and_casimirs(tmp_path):
    assert run(tmp_path, "trajectory", "--L", "30", "--Q", "10", "--samples", "51",
               "--oracle", "--format", "csv") == 0
    rows = oio.read_csv(tmp_path / "trajectory_60_20_0.csv")
    H = np.array([r["H"] for r in rows])
    assert np.ptp(H) == 0.0
    p = np.array([r["p"] for r in rows])
    assert abs(p[-1] - p[0]) < 1e-9
    assert np.abs(p - np.array([r["p_rk4"] for r in rows])).max() < 1e-6
    for name, value in (("C1", 80), ("C2", 4000), ("C3", 224000)):
        assert np.allclose([r[name] for r in rows], value, rtol=1e-12)


@pytest.mark.parametrize("argv,code", [
    (["bands", "--p", "1,1,0"], 2),
    (["spectrum", "--p", "60,20,0", "--s", "3"], 1),
    (["bands", "--p", "60,20,0", "--tol", "foo=1"], 1),
    (["bands", "--p", "60,20,0", "--tol", "jacobi=-1"], 1),
    (["trajectory", "--p", "60,20,0", "--L", "80"], 2),
    (["verify", "--suite", "brackets", "--quick", "--tol", "jacobi=1e-30"], 3),
    (["verify", "--suite", "brackets", "--quick"], 0),
    (["nonsense"], 1),
])
def test_exit_codes(tmp_path, argv, code):
    assert cli.main(argv + ["--out", str(tmp_path)] if argv[0] != "nonsense" else argv) == code


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "orbita.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "orbita" in out.stdout
