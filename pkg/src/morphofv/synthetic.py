"""Synthetic dataset generator for demos and end-to-end tests.

Four classes in two visual superclasses: visual features only separate the
superclass, while each class has its own word vocabulary.  A model that uses
both modalities can tell the classes apart; a visual-only one cannot.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .fvc1 import write_fvc1
from .manifest import write_manifest

CLASS_WORDS = {
    "bakery": ["bakery", "bread", "cake", "flour", "pastry", "muffin", "dough", "loaf"],
    "pizzeria": ["pizzeria", "pizza", "slice", "mozzarella", "pepperoni", "basil", "calzone"],
    "vodka": ["vodka", "whiskey", "brandy", "gin", "rum", "spirit", "liqueur"],
    "soda": ["soda", "cola", "ginger", "tonic", "fizz", "bubble", "syrup"],
}
SUPERCLASS = {"bakery": 0, "pizzeria": 0, "vodka": 1, "soda": 1}
VISUAL_DIM = 8


def generate_dataset(out_dir, *, n_train=40, n_test=10, seed=0, textless_test=0,
                     visual_kind="pooled", map_shape=(4, 3, 3)):
    """Write ``manifest.json`` + ``visual.fvc1`` under ``out_dir``.

    ``textless_test`` test samples per class carry no word proposals.
    Returns the manifest path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    classes = sorted(CLASS_WORDS)

    samples = []
    rows = []
    for label in classes:
        for split, count in (("train", n_train), ("test", n_test)):
            for i in range(count):
                sid = f"{label}-{split}-{i:03d}"
                if visual_kind == "pooled":
                    center = 1.5 if SUPERCLASS[label] == 0 else -1.5
                    vec = rng.normal(center, 1.0, size=VISUAL_DIM)
                else:
                    c, h, w = map_shape
                    center = 1.5 if SUPERCLASS[label] == 0 else -1.5
                    vec = rng.normal(center, 1.0, size=c * h * w)
                rows.append(vec)
                textless = split == "test" and i < textless_test
                proposals = []
                if not textless:
                    vocab = CLASS_WORDS[label]
                    picks = rng.choice(len(vocab), size=rng.integers(2, 5), replace=True)
                    proposals = [
                        {"text": vocab[int(p)], "confidence": round(float(rng.uniform(0.6, 1.0)), 6)}
                        for p in picks
                    ]
                samples.append({
                    "id": sid,
                    "split": split,
                    "label": label,
                    "visual_feature_ref": {"file": "visual.fvc1", "offset": len(rows) - 1},
                    "proposals": proposals,
                })

    write_fvc1(out_dir / "visual.fvc1", np.stack(rows))
    visual = ({"kind": "pooled", "dim": VISUAL_DIM} if visual_kind == "pooled"
              else {"kind": "map", "shape": list(map_shape)})
    manifest_path = out_dir / "manifest.json"
    write_manifest(manifest_path, classes=classes, visual=visual, samples=samples)
    return manifest_path
