"""Step-wise divergence analysis of reasoning traces."""

import json

from ._core import (
    Error,
    __version__,
    accuracy,
    balanced_accuracy,
    cosine,
    entropy,
    f1,
    features,
    gen_chain,
    gen_dataset,
    hellinger,
    infer_thresholds,
    js,
    kl,
    load_chain,
    quantify,
    quantify_chain,
    roc_auc,
    smooth,
    softmax,
    step_distribution,
    stratified_split,
)
from ._core import _train_evaluate


def train_evaluate(jsonl, family="lr", params=None, seed=0, test_fraction=0.2):
    """Fit `family` on a stratified train split of a quantified dataset and
    evaluate it on the held-out rows. Returns {"report": ..., "model": ...}."""
    out = _train_evaluate(jsonl, family, json.dumps(params or {}), seed, test_fraction)
    return json.loads(out)


__all__ = [
    "Error",
    "__version__",
    "accuracy",
    "balanced_accuracy",
    "cosine",
    "entropy",
    "f1",
    "features",
    "gen_chain",
    "gen_dataset",
    "hellinger",
    "infer_thresholds",
    "js",
    "kl",
    "load_chain",
    "quantify",
    "quantify_chain",
    "roc_auc",
    "smooth",
    "softmax",
    "step_distribution",
    "stratified_split",
    "train_evaluate",
]
