# Copyright 2026 The TLE Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Export a pretrained speech model as a TorchScript file for the C++ loader.

The exported module maps a [batch, samples] float32 waveform at 16 kHz to the
tuple of all hidden states (embedding output first, then one per transformer
layer). The C++ side picks the layer named in models/registry.json.

    python tools/export_embedder.py mhubert-147
    python tools/export_embedder.py hubert-base --out /path/to/cache
    python tools/export_embedder.py random-tiny --out tests/fixtures

Files land in $TLE_MODEL_CACHE (default ~/.cache/tle/models) as <id>.pt.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import torch

SOURCES = {
    "mhubert-147": ("hubert", "utter-project/mHuBERT-147"),
    "hubert-base": ("hubert", "facebook/hubert-base-ls960"),
    "wavlm-base": ("wavlm", "microsoft/wavlm-base"),
}


class AllHiddenStates(torch.nn.Module):
    def __init__(self, model):
        super().__init__()
        self.model = model

    def forward(self, wav):
        out = self.model(wav, output_hidden_states=True, return_dict=True)
        return tuple(out.hidden_states)


def default_cache() -> Path:
    env = os.environ.get("TLE_MODEL_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "tle" / "models"


def tiny_hubert(seed: int = 0):
    from transformers import HubertConfig, HubertModel

    torch.manual_seed(seed)
    cfg = HubertConfig(
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        conv_dim=(16, 16, 16, 16, 16, 16, 16),
        conv_stride=(5, 2, 2, 2, 2, 2, 2),
        conv_kernel=(10, 3, 3, 3, 3, 2, 2),
        num_conv_pos_embeddings=16,
        num_conv_pos_embedding_groups=4,
        hidden_dropout=0.0,
        attention_dropout=0.0,
        activation_dropout=0.0,
        feat_proj_dropout=0.0,
        layerdrop=0.0,
        attn_implementation="eager",
    )
    model = HubertModel(cfg)
    with torch.no_grad():
        for p in model.parameters():
            p.normal_(0.0, 0.2)
    return model.eval()


def load_pretrained(kind: str, source: str):
    if kind == "hubert":
        from transformers import HubertModel as cls
    else:
        from transformers import WavLMModel as cls
    return cls.from_pretrained(source, attn_implementation="eager").eval()


def normalize_flag(source: str):
    try:
        from transformers import AutoFeatureExtractor

        return bool(AutoFeatureExtractor.from_pretrained(source).do_normalize)
    except Exception:  # preprocessing config is optional on the hub
        return None


def export(model, path: Path, check_lengths=(16000, 12345)) -> int:
    wrapped = AllHiddenStates(model).eval()
    example = torch.zeros(1, check_lengths[0]).uniform_(-0.5, 0.5)
    with torch.no_grad():
        traced = torch.jit.trace(wrapped, example, strict=False, check_trace=False)
        for n in check_lengths:
            wav = torch.randn(1, n) * 0.1
            ref, got = wrapped(wav), traced(wav)
            worst = max(float((a - b).abs().max()) for a, b in zip(ref, got))
            if worst > 1e-4:
                raise RuntimeError(f"traced module disagrees with eager at length {n}: {worst}")
    path.parent.mkdir(parents=True, exist_ok=True)
    traced.save(str(path))
    return len(ref) - 1


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("model_id", choices=sorted(SOURCES) + ["random-tiny"])
    ap.add_argument("--out", type=Path, default=None, help="output directory (default: model cache)")
    ap.add_argument("--seed", type=int, default=0, help="seed for random-tiny")
    args = ap.parse_args()

    out_dir = args.out or default_cache()
    path = out_dir / f"{args.model_id}.pt"
    if args.model_id == "random-tiny":
        model, source, normalize = tiny_hubert(args.seed), "random", False
    else:
        kind, source = SOURCES[args.model_id]
        model, normalize = load_pretrained(kind, source), normalize_flag(source)
    layers = export(model, path)
    info = {
        "model_id": args.model_id,
        "source": source,
        "file": path.name,
        "num_layers": layers,
        "feature_dim": model.config.hidden_size,
        "normalize_waveform": normalize,
    }
    print(json.dumps(info, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
