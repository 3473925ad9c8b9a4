# Copyright 2026 The TLE Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
import json
import math
from pathlib import Path

import numpy as np
import pytest

import tle

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def test_si_snr_hand_values():
    assert tle.si_snr([1.0, 0.0], [1.0, 1.0]) == pytest.approx(0.0, abs=1e-9)
    assert tle.si_snr([1.0, -1.0], [2.0, -2.0]) == pytest.approx(10 * math.log10(8e8), abs=1e-9)


def test_si_snr_is_scale_invariant():
    rng = np.random.default_rng(0)
    s = rng.standard_normal(4000)
    e = s + 0.3 * rng.standard_normal(4000)
    assert tle.si_snr(s, 5.0 * e) == pytest.approx(tle.si_snr(s, e), abs=1e-9)


def test_si_snr_rejects_length_mismatch():
    with pytest.raises(tle.TleError):
        tle.si_snr([1.0, 2.0], [1.0])


def test_loudness_normalize_hits_target():
    t = np.arange(48000) / 16000.0
    x = 0.1 * np.sin(2 * math.pi * 440.0 * t)
    y = tle.loudness_normalize(x, 16000, -30.0)
    assert tle.integrated_loudness(y, 16000) == pytest.approx(-30.0, abs=1e-6)


def test_resample_length_and_tone():
    t = np.arange(48000) / 48000.0
    x = np.sin(2 * math.pi * 300.0 * t)
    y = tle.resample(x, 48000, 16000)
    assert y.shape == (16000,)
    ref = np.sin(2 * math.pi * 300.0 * np.arange(16000) / 16000.0)
    assert np.max(np.abs(y[200:-200] - ref[200:-200])) < 1e-3


def test_stoi_identical_signals_is_one():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(16000 * 2)
    assert tle.stoi(x, x, 16000) == pytest.approx(1.0, abs=1e-9)


def test_wav_round_trip(tmp_path):
    x = np.linspace(-0.5, 0.5, 1001)
    tle.write_wav(tmp_path / "x.wav", x, 16000)
    y, rate = tle.read_wav(tmp_path / "x.wav")
    assert rate == 16000
    assert np.max(np.abs(x - y)) < 1.0 / 32767


def test_resolve_config_overrides():
    cfg = json.loads(tle.resolve_config(overrides=["train.lr0=0.001", "seed=11"]))
    assert cfg["train"]["lr0"] == pytest.approx(0.001)
    assert cfg["seed"] == 11
    with pytest.raises(tle.TleError):
        tle.resolve_config(overrides=["train.no_such_key=1"])


def test_render_table_from_fixture_reports():
    reports = sorted((FIXTURES / "reports").glob("*.json"))
    table = tle.render_table(reports)
    assert "mae-supervised" in table
    assert "11.18" in table and "9.96" in table


def test_build_dataset_stats(toy_dataset):
    out, stats = toy_dataset
    assert json.loads((out / "stats.json").read_text()) == stats
    assert {k: v["samples"] for k, v in stats["splits"].items()} == {"train": 2, "dev": 1, "test": 1}
    for split in ("train", "dev", "test"):
        assert (out / f"{split}.csv").is_file()


def test_extractor_preserves_length(cli, tmp_path, toy_dataset):
    from conftest import TINY_MODEL

    args = ["train", "--data", toy_dataset[0], "--stage", 1, "--out", tmp_path / "run"]
    for kv in TINY_MODEL:
        args += ["--set", kv]
    r = cli(*args)
    assert r.returncode == 0, r.stderr
    model = tle.Extractor(tmp_path / "run" / "best.ckpt")
    assert json.loads(model.config_json)["feat_dim"] == 16
    for n, rate in ((16000, 16000), (12345, 16000), (24000, 48000)):
        y = model.extract(np.zeros(n) + 1e-3 * np.random.default_rng(n).standard_normal(n), rate)
        assert y.shape == (n,)
        assert np.all(np.isfinite(y))
