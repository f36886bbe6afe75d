"""Versioned JSON persistence for PCA, mixture and fusion models.

Files carry a format tag, a schema version and a SHA-256 over the canonical
payload encoding.  Floats are written in decimal via ``repr``, which
round-trips float64 exactly, so load(save(model)) is bit-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict

import numpy as np

from .fusion import FusionConfig, FusionParams
from .gmm import GmmModel
from .pca import PcaModel
from .phoc import Alphabet

FORMAT = "morphofv-model"
VERSION = 1


class ModelIOError(Exception):
    pass


class ModelVersionError(ModelIOError):
    pass


class ModelIntegrityError(ModelIOError):
    pass


class ModelConsistencyError(ModelIOError):
    pass


def _canonical(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def _arr(a) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def _pca_payload(m: PcaModel) -> dict:
    return {"mean": _arr(m.mean), "components": _arr(m.components),
            "explained_variance": _arr(m.explained_variance)}


def _pca_restore(p) -> PcaModel:
    return PcaModel(mean=np.array(p["mean"]), components=np.array(p["components"]),
                    explained_variance=np.array(p["explained_variance"]))


def _gmm_payload(m: GmmModel) -> dict:
    return {"weights": _arr(m.weights), "means": _arr(m.means), "variances": _arr(m.variances)}


def _gmm_restore(p) -> GmmModel:
    return GmmModel(weights=np.array(p["weights"]), means=np.array(p["means"]),
                    variances=np.array(p["variances"]))


def _fusion_payload(params: FusionParams, config: FusionConfig, classes) -> dict:
    return {"config": asdict(config), "classes": list(classes),
            "tensors": {name: _arr(t) for name, t in params.tensors().items()}}


def _fusion_restore(p):
    config = FusionConfig(**p["config"])
    tensors = {name: np.array(vals, dtype=np.float64) for name, vals in p["tensors"].items()}
    return FusionParams(**tensors), config, list(p["classes"])


def alphabet_payload(alphabet: Alphabet) -> dict:
    digest = hashlib.sha256("\n".join(alphabet.bigrams).encode()).hexdigest()
    return {"unigrams": alphabet.unigrams, "bigrams": list(alphabet.bigrams),
            "bigrams_sha256": digest}


def _alphabet_restore(p) -> Alphabet:
    alphabet = Alphabet(unigrams=p["unigrams"], bigrams=tuple(p["bigrams"]))
    digest = hashlib.sha256("\n".join(alphabet.bigrams).encode()).hexdigest()
    if digest != p["bigrams_sha256"]:
        raise ModelIntegrityError("bigram list does not match its recorded hash")
    return alphabet


def save_model(path, *, kind: str, pca: PcaModel | None = None, gmm: GmmModel | None = None,
               fusion: tuple | None = None, alphabet: Alphabet | None = None,
               config_echo: dict | None = None) -> None:
    """Persist a model file of ``kind`` in {"pca", "gmm", "bundle"}.

    A bundle requires all members and is checked for dimensional coherence
    before anything is written.
    """
    if kind == "pca":
        payload = {"kind": kind, "pca": _pca_payload(pca)}
    elif kind == "gmm":
        payload = {"kind": kind, "gmm": _gmm_payload(gmm)}
    elif kind == "bundle":
        params, fusion_config, classes = fusion
        if pca.d != gmm.d:
            raise ModelConsistencyError(f"pca d={pca.d} does not match mixture d={gmm.d}")
        if fusion_config.use_text and fusion_config.txt_in != 2 * gmm.d * gmm.k:
            raise ModelConsistencyError(
                f"fusion txt_in={fusion_config.txt_in} != 2*d*K={2 * gmm.d * gmm.k}")
        if len(classes) != fusion_config.n_classes:
            raise ModelConsistencyError("class list does not match classifier width")
        payload = {
            "kind": kind,
            "pca": _pca_payload(pca),
            "gmm": _gmm_payload(gmm),
            "fusion": _fusion_payload(params, fusion_config, classes),
            "alphabet": alphabet_payload(alphabet),
            "config_echo": config_echo or {},
        }
    else:
        raise ValueError(f"unknown model kind {kind!r}")

    doc = {"format": FORMAT, "version": VERSION, "payload": payload,
           "sha256": hashlib.sha256(_canonical(payload)).hexdigest()}
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_model(path, expect_kind: str | None = None) -> dict:
    """Load and verify a model file; returns restored members keyed by name."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelIntegrityError(f"{path}: not a valid model file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelIOError(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise ModelVersionError(f"{path}: version {doc.get('version')}, expected {VERSION}")
    payload = doc.get("payload")
    if hashlib.sha256(_canonical(payload)).hexdigest() != doc.get("sha256"):
        raise ModelIntegrityError(f"{path}: payload checksum mismatch")
    kind = payload.get("kind")
    if expect_kind is not None and kind != expect_kind:
        raise ModelIOError(f"{path}: expected a {expect_kind} model, found {kind}")

    out = {"kind": kind}
    if "pca" in payload:
        out["pca"] = _pca_restore(payload["pca"])
    if "gmm" in payload:
        out["gmm"] = _gmm_restore(payload["gmm"])
    if "fusion" in payload:
        params, config, classes = _fusion_restore(payload["fusion"])
        out["fusion_params"] = params
        out["fusion_config"] = config
        out["classes"] = classes
    if "alphabet" in payload:
        out["alphabet"] = _alphabet_restore(payload["alphabet"])
    if "config_echo" in payload:
        out["config_echo"] = payload["config_echo"]
    return out
