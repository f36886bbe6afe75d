"""Dataset manifest: JSON schema, eager validation and feature loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fisher import WordProposal
from .fusion import VisualInput
from .fvc1 import read_fvc1

FORMAT = "morphofv-manifest"
VERSION = 1
SPLITS = ("train", "test")


class ManifestError(Exception):
    """Raised with one message line per validation problem."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


@dataclass(frozen=True)
class SampleSpec:
    id: str
    split: str
    label: str
    visual_ref: dict  # {"file": str, "offset": int}
    proposals: list = field(default_factory=list)  # [{"text", "confidence"}]
    phoc_ref: dict | None = None  # {"file", "offset", "count", "confidences"}


@dataclass(frozen=True)
class DatasetManifest:
    version: int
    classes: list[str]
    visual: dict  # {"kind": "pooled", "dim": n} or {"kind": "map", "shape": [C, H, W]}
    samples: list[SampleSpec]
    base_dir: Path

    def split(self, name: str) -> list[SampleSpec]:
        return [s for s in self.samples if s.split == name]


def _check_ref(problems, where, ref, base_dir):
    if not isinstance(ref, dict) or not isinstance(ref.get("file"), str) \
            or not isinstance(ref.get("offset"), int) or ref["offset"] < 0:
        problems.append(f"{where}: malformed file reference {ref!r}")
        return
    if not (base_dir / ref["file"]).is_file():
        problems.append(f"{where}: referenced file {ref['file']!r} does not exist")


def validate_manifest(doc, base_dir: Path) -> list[str]:
    """All schema and invariant violations, empty when the manifest is valid."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        return ["manifest root must be a JSON object"]
    if doc.get("format") != FORMAT:
        problems.append(f"format must be {FORMAT!r}")
    if doc.get("version") != VERSION:
        problems.append(f"schema version must be {VERSION}")
    classes = doc.get("classes")
    if not isinstance(classes, list) or not classes or \
            not all(isinstance(c, str) for c in classes):
        problems.append("classes must be a non-empty list of strings")
        classes = []
    elif len(set(classes)) != len(classes):
        problems.append("classes contains duplicates")

    visual = doc.get("visual")
    if not isinstance(visual, dict) or visual.get("kind") not in ("pooled", "map"):
        problems.append("visual.kind must be 'pooled' or 'map'")
    elif visual["kind"] == "pooled":
        if not isinstance(visual.get("dim"), int) or visual["dim"] < 1:
            problems.append("visual.dim must be a positive integer")
    else:
        shape = visual.get("shape")
        if not (isinstance(shape, list) and len(shape) == 3
                and all(isinstance(v, int) and v > 0 for v in shape)):
            problems.append("visual.shape must be [C, H, W] positive integers")

    samples = doc.get("samples")
    if not isinstance(samples, list):
        problems.append("samples must be a list")
        samples = []
    seen_ids = set()
    known = set(classes)
    for i, s in enumerate(samples):
        where = f"samples[{i}]"
        if not isinstance(s, dict):
            problems.append(f"{where}: must be an object")
            continue
        sid = s.get("id")
        if not isinstance(sid, str) or not sid:
            problems.append(f"{where}: missing or invalid id")
        elif sid in seen_ids:
            problems.append(f"{where}: duplicate id {sid!r}")
        else:
            seen_ids.add(sid)
        if s.get("split") not in SPLITS:
            problems.append(f"{where} ({sid!r}): split must be one of {SPLITS}")
        if s.get("label") not in known:
            problems.append(f"{where} ({sid!r}): label {s.get('label')!r} not in class list")
        _check_ref(problems, f"{where} ({sid!r}) visual_feature_ref",
                   s.get("visual_feature_ref"), base_dir)
        proposals = s.get("proposals", [])
        if not isinstance(proposals, list):
            problems.append(f"{where} ({sid!r}): proposals must be a list")
            proposals = []
        for j, p in enumerate(proposals):
            if not isinstance(p, dict) or not isinstance(p.get("text"), str) \
                    or not isinstance(p.get("confidence"), (int, float)) \
                    or not 0.0 <= p["confidence"] <= 1.0:
                problems.append(f"{where} ({sid!r}) proposals[{j}]: need text and confidence in [0,1]")
        phoc_ref = s.get("phoc_ref")
        if phoc_ref is not None:
            _check_ref(problems, f"{where} ({sid!r}) phoc_ref", phoc_ref, base_dir)
            if isinstance(phoc_ref, dict):
                count = phoc_ref.get("count")
                confs = phoc_ref.get("confidences")
                if not isinstance(count, int) or count < 0:
                    problems.append(f"{where} ({sid!r}) phoc_ref: invalid count")
                elif not isinstance(confs, list) or len(confs) != count:
                    problems.append(f"{where} ({sid!r}) phoc_ref: confidences must list {count} values")
    return problems


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError([f"{path}: cannot parse manifest ({exc})"]) from exc
    problems = validate_manifest(doc, path.parent)
    if problems:
        raise ManifestError(problems)
    samples = [
        SampleSpec(
            id=s["id"], split=s["split"], label=s["label"],
            visual_ref=s["visual_feature_ref"],
            proposals=s.get("proposals", []),
            phoc_ref=s.get("phoc_ref"),
        )
        for s in doc["samples"]
    ]
    return DatasetManifest(version=doc["version"], classes=list(doc["classes"]),
                           visual=doc["visual"], samples=samples, base_dir=path.parent)


def write_manifest(path, *, classes, visual, samples) -> None:
    doc = {"format": FORMAT, "version": VERSION, "classes": list(classes),
           "visual": visual, "samples": list(samples)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


class FeatureStore:
    """Caching loader for the FVC1 files a manifest references."""

    def __init__(self, base_dir: Path):
        self.base_dir = Path(base_dir)
        self._cache: dict[str, np.ndarray] = {}

    def rows(self, relpath: str) -> np.ndarray:
        if relpath not in self._cache:
            self._cache[relpath] = read_fvc1(self.base_dir / relpath)
        return self._cache[relpath]

    def row(self, ref: dict) -> np.ndarray:
        rows = self.rows(ref["file"])
        offset = ref["offset"]
        if offset >= rows.shape[0]:
            raise ManifestError([f"{ref['file']}: row {offset} out of range ({rows.shape[0]} rows)"])
        return rows[offset].astype(np.float64)


def visual_input(manifest: DatasetManifest, sample: SampleSpec, store: FeatureStore) -> VisualInput:
    row = store.row(sample.visual_ref)
    if manifest.visual["kind"] == "pooled":
        if row.shape[0] != manifest.visual["dim"]:
            raise ManifestError([f"{sample.id}: visual row has dim {row.shape[0]}, "
                                 f"manifest says {manifest.visual['dim']}"])
        return VisualInput(pooled=row)
    c, h, w = manifest.visual["shape"]
    if row.shape[0] != c * h * w:
        raise ManifestError([f"{sample.id}: visual row has {row.shape[0]} values, "
                             f"expected {c}x{h}x{w}"])
    return VisualInput(spatial=row.reshape(c, h, w))


def word_proposals(sample: SampleSpec, store: FeatureStore) -> list[WordProposal]:
    out = [WordProposal(text=p["text"], confidence=float(p["confidence"]))
           for p in sample.proposals]
    if sample.phoc_ref is not None:
        ref = sample.phoc_ref
        rows = store.rows(ref["file"])
        for i in range(ref["count"]):
            out.append(WordProposal(phoc=rows[ref["offset"] + i].astype(np.float64),
                                    confidence=float(ref["confidences"][i])))
    return out
