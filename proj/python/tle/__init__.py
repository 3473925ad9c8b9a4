# Copyright 2026 The TLE Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Python bindings for the target language extraction toolkit."""

import os
import sys
from pathlib import Path

import torch  # noqa: F401

_DATA = Path(__file__).resolve().parent / "data"
if (_DATA / "registry.json").exists():
    os.environ.setdefault("TLE_MODEL_REGISTRY", str(_DATA / "registry.json"))
if (_DATA / "pesq_provider.py").exists():
    os.environ.setdefault("TLE_PESQ_COMMAND", f'"{sys.executable}" "{_DATA / "pesq_provider.py"}"')

from ._core import (  # noqa: E402
    Extractor,
    TleError,
    build_dataset,
    integrated_loudness,
    loudness_normalize,
    make_toy_corpus,
    read_wav,
    render_table,
    resample,
    resolve_config,
    si_snr,
    stoi,
    write_wav,
)

__all__ = [
    "Extractor",
    "TleError",
    "build_dataset",
    "integrated_loudness",
    "loudness_normalize",
    "make_toy_corpus",
    "read_wav",
    "render_table",
    "resample",
    "resolve_config",
    "si_snr",
    "stoi",
    "write_wav",
]
__version__ = "0.1.0"
