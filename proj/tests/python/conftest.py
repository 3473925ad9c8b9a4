# Copyright 2026 The TLE Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
import json
import os
import shutil
import subprocess
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]

TINY_MODEL = [
    "model.feat_dim=16",
    "model.n_heads=2",
    "model.ff_dim=32",
    "model.n_intra_layers=1",
    "model.n_inter_layers=1",
    "model.n_dual_blocks=1",
    "train.max_epochs=1",
    "train.segment_s=0.5",
    "train.max_train_examples=2",
    "train.max_dev_examples=1",
]


def _find_cli():
    env = os.environ.get("TLE_CLI")
    if env:
        return env
    candidate = ROOT / "build" / "tools" / "tle"
    if candidate.exists():
        return str(candidate)
    return shutil.which("tle")


@pytest.fixture(scope="session")
def cli():
    path = _find_cli()
    if not path:
        pytest.skip("tle executable not found")

    def run(*args):
        return subprocess.run([path, *map(str, args)], capture_output=True, text=True)

    return run


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    import tle

    out = tmp_path_factory.mktemp("corpus")
    tle.make_toy_corpus(out, utterances_per_language=16, speakers_per_language=8, seed=3)
    return out / "corpus.tsv"


@pytest.fixture(scope="session")
def toy_dataset(tmp_path_factory, toy_corpus):
    import tle

    out = tmp_path_factory.mktemp("data")
    stats = tle.build_dataset(
        toy_corpus, out, overrides=["data.counts.train=2", "data.counts.dev=1", "data.counts.test=1"]
    )
    return out, json.loads(stats)
