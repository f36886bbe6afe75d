"""Command-line pipeline: fit models, encode features, train and evaluate."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import fusion as fusion_mod
from . import metrics as metrics_mod
from .fisher import ProposalSelector, image_textual_feature
from .fvc1 import read_fvc1, write_fvc1
from .gmm import EmConfig, fit_gmm
from .manifest import FeatureStore, load_manifest, validate_manifest, visual_input, word_proposals
from .modelio import load_model, save_model
from .pca import fit_pca, project
from .phoc import OccupancyRule, build_phoc, default_alphabet, derive_bigrams, load_dictionary, normalize_word

logger = logging.getLogger(__name__)


def _resolve_seed(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("MORPHOFV_SEED")
    return int(env) if env else 0


def _read_words(path) -> list[str]:
    return [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]


def _dictionary(args) -> list[str]:
    return _read_words(args.dictionary) if args.dictionary else load_dictionary()


def _dictionary_phocs(words, alphabet) -> np.ndarray:
    phocs = []
    for w in words:
        norm = normalize_word(w)
        if not norm:
            logger.warning("skipping word %r: normalizes to empty", w)
            continue
        phocs.append(build_phoc(norm, alphabet))
    if not phocs:
        raise SystemExit("no encodable words in dictionary")
    return np.stack(phocs).astype(np.float64)


def cmd_validate_manifest(args) -> int:
    doc = json.loads(Path(args.manifest).read_text())
    problems = validate_manifest(doc, Path(args.manifest).parent)
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return 1
    print(f"{args.manifest}: OK ({len(doc['samples'])} samples, {len(doc['classes'])} classes)")
    return 0


def cmd_phoc_encode(args) -> int:
    alphabet = default_alphabet()
    rows = _dictionary_phocs(_read_words(args.words), alphabet)
    write_fvc1(args.output, rows)
    print(f"wrote {rows.shape[0]} x {rows.shape[1]} PHOC rows to {args.output}")
    return 0


def cmd_derive_bigrams(args) -> int:
    bigrams = derive_bigrams(_dictionary(args), args.count)
    Path(args.output).write_text("\n".join(bigrams) + "\n")
    print(f"wrote {len(bigrams)} bigrams to {args.output}")
    return 0


def cmd_pca_fit(args) -> int:
    alphabet = default_alphabet()
    data = _dictionary_phocs(_dictionary(args), alphabet)
    model = fit_pca(data, args.pca_dim)
    save_model(args.output, kind="pca", pca=model)
    print(f"fit PCA {model.input_dim} -> {model.d} on {data.shape[0]} words; saved {args.output}")
    return 0


def cmd_gmm_fit(args) -> int:
    alphabet = default_alphabet()
    pca = load_model(args.pca, expect_kind="pca")["pca"]
    data = project(pca, _dictionary_phocs(_dictionary(args), alphabet))
    seed = _resolve_seed(args.seed)
    model = fit_gmm(data, args.k, EmConfig(seed=seed, max_iters=args.max_iters))
    save_model(args.output, kind="gmm", gmm=model)
    print(f"fit {model.k}-component mixture on {data.shape[0]} points "
          f"({len(model.training_log_likelihoods)} EM iterations); saved {args.output}")
    return 0


def _selector(args) -> ProposalSelector:
    return ProposalSelector(m=args.max_proposals, min_confidence=args.min_confidence)


def _encode_manifest_fvs(manifest, store, pca, gmm, selector, normalize) -> np.ndarray:
    alphabet = default_alphabet()
    rule = OccupancyRule()
    rows = []
    for sample in manifest.samples:
        fv = image_textual_feature(word_proposals(sample, store), selector, alphabet, rule,
                                   pca, gmm, normalize=normalize)
        rows.append(fv.values)
    return np.stack(rows)


def cmd_encode_fv(args) -> int:
    manifest = load_manifest(args.manifest)
    store = FeatureStore(manifest.base_dir)
    pca = load_model(args.pca, expect_kind="pca")["pca"]
    gmm = load_model(args.gmm, expect_kind="gmm")["gmm"]
    rows = _encode_manifest_fvs(manifest, store, pca, gmm, _selector(args), args.fv_normalize)
    write_fvc1(args.output, rows)
    print(f"encoded {rows.shape[0]} Fisher vectors of dim {rows.shape[1]} to {args.output}")
    return 0


def _fv_rows(args, manifest, store, pca, gmm) -> np.ndarray:
    if args.fv:
        rows = read_fvc1(args.fv)
        if rows.shape[0] != len(manifest.samples):
            raise SystemExit(f"{args.fv} has {rows.shape[0]} rows for "
                             f"{len(manifest.samples)} manifest samples")
        return rows
    return _encode_manifest_fvs(manifest, store, pca, gmm, _selector(args), args.fv_normalize)


def cmd_train(args) -> int:
    manifest = load_manifest(args.manifest)
    store = FeatureStore(manifest.base_dir)
    pca = load_model(args.pca, expect_kind="pca")["pca"]
    gmm = load_model(args.gmm, expect_kind="gmm")["gmm"]
    fv_rows = _fv_rows(args, manifest, store, pca, gmm)

    index = {s.id: i for i, s in enumerate(manifest.samples)}
    train_samples = manifest.split("train")
    if not train_samples:
        raise SystemExit("manifest has no train split")
    dataset = fusion_mod.LabeledDataset(
        samples=[(s.id, visual_input(manifest, s, store),
                  np.asarray(fv_rows[index[s.id]], dtype=np.float64), s.label)
                 for s in train_samples],
        classes=manifest.classes,
    )

    visual_dim = (manifest.visual["dim"] if manifest.visual["kind"] == "pooled"
                  else manifest.visual["shape"][0])
    fusion_config = fusion_mod.FusionConfig(
        visual_dim=visual_dim, txt_in=int(fv_rows.shape[1]), n_classes=len(manifest.classes),
        vis_out=args.vis_out, txt_out=args.txt_out, use_text=not args.visual_only)
    seed = _resolve_seed(args.seed)
    train_config = fusion_mod.TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr,
        momentum=args.momentum, seed=seed)

    params, history = fusion_mod.train(dataset, fusion_config, train_config)
    save_model(args.output, kind="bundle", pca=pca, gmm=gmm,
               fusion=(params, fusion_config, manifest.classes), alphabet=default_alphabet(),
               config_echo={"seed": seed, "epochs": args.epochs, "lr": args.lr,
                            "batch_size": args.batch_size, "momentum": args.momentum,
                            "max_proposals": args.max_proposals,
                            "min_confidence": args.min_confidence,
                            "fv_normalize": args.fv_normalize,
                            "visual_only": args.visual_only})
    if args.metrics:
        with open(args.metrics, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "loss", "accuracy"])
            for row in history:
                writer.writerow([row["epoch"], repr(row["loss"]), repr(row["accuracy"])])
    final = history[-1]
    print(f"trained {len(history)} epochs; final loss {final['loss']:.6f}, "
          f"accuracy {final['accuracy']:.4f}; saved {args.output}")
    return 0


def cmd_eval(args) -> int:
    manifest = load_manifest(args.manifest)
    store = FeatureStore(manifest.base_dir)
    bundle = load_model(args.model, expect_kind="bundle")
    pca, gmm = bundle["pca"], bundle["gmm"]
    params, fusion_config = bundle["fusion_params"], bundle["fusion_config"]
    classes = bundle["classes"]
    fv_rows = _fv_rows(args, manifest, store, pca, gmm)

    index = {s.id: i for i, s in enumerate(manifest.samples)}
    test_samples = manifest.split(args.split)
    if not test_samples:
        raise SystemExit(f"manifest has no {args.split} split")

    ids, labels, probs, penultimate = [], [], [], []
    for s in test_samples:
        trace = fusion_mod.forward_trace(visual_input(manifest, s, store),
                                         fv_rows[index[s.id]], params, fusion_config)
        ids.append(s.id)
        labels.append(s.label)
        probs.append(trace["probs"])
        penultimate.append(trace["fused"])
    probs = np.stack(probs)
    penultimate = np.stack(penultimate)

    report = {"n_samples": len(ids), "split": args.split}
    if args.classification or not args.retrieval:
        report["classification"] = metrics_mod.map_classification(probs, labels, classes, ids)
    if args.retrieval:
        features = probs if args.retrieval_feature == "probs" else penultimate
        report["retrieval"] = metrics_mod.map_retrieval(features, labels, ids)
        if args.ranked_lists:
            with open(args.ranked_lists, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["query_id", "rank", "item_id", "score"])
                for qi, qid in enumerate(ids):
                    ranking = metrics_mod.ranked_list(qid, features, ids, qi)["ranking"]
                    for rank, (item, score) in enumerate(ranking, start=1):
                        writer.writerow([qid, rank, item, repr(score)])
    with open(args.output, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    shown = {k: v["map"] for k, v in report.items() if isinstance(v, dict) and "map" in v}
    print(f"evaluated {len(ids)} samples: " + ", ".join(f"{k} mAP={v:.4f}" for k, v in shown.items()))
    return 0


def _add_proposal_flags(p):
    p.add_argument("--max-proposals", type=int, default=15)
    p.add_argument("--min-confidence", type=float, default=None)
    p.add_argument("--fv-normalize", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morphofv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-manifest", help="check a dataset manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_validate_manifest)

    p = sub.add_parser("phoc-encode", help="encode a word list into PHOC rows")
    p.add_argument("--words", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_phoc_encode)

    p = sub.add_parser("derive-bigrams", help="derive the most frequent bigrams")
    p.add_argument("--dictionary", default=None, help="defaults to the shipped word list")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_derive_bigrams)

    p = sub.add_parser("pca-fit", help="fit the PHOC subspace projection")
    p.add_argument("--dictionary", default=None)
    p.add_argument("--pca-dim", type=int, default=300)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_pca_fit)

    p = sub.add_parser("gmm-fit", help="fit the mixture on projected PHOCs")
    p.add_argument("--dictionary", default=None)
    p.add_argument("--pca", required=True)
    p.add_argument("--k", type=int, default=64)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gmm_fit)

    p = sub.add_parser("encode-fv", help="encode one Fisher vector per manifest sample")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pca", required=True)
    p.add_argument("--gmm", required=True)
    p.add_argument("--output", required=True)
    _add_proposal_flags(p)
    p.set_defaults(func=cmd_encode_fv)

    p = sub.add_parser("train", help="train the fusion classifier head")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pca", required=True)
    p.add_argument("--gmm", required=True)
    p.add_argument("--fv", default=None, help="precomputed Fisher vectors (else computed)")
    p.add_argument("--output", required=True)
    p.add_argument("--metrics", default=None, help="per-epoch CSV log")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--vis-out", type=int, default=1024)
    p.add_argument("--txt-out", type=int, default=512)
    p.add_argument("--visual-only", action="store_true")
    _add_proposal_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="classification / retrieval evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--fv", default=None)
    p.add_argument("--split", default="test", choices=["train", "test"])
    p.add_argument("--classification", action="store_true")
    p.add_argument("--retrieval", action="store_true")
    p.add_argument("--retrieval-feature", choices=["probs", "penultimate"], default="probs")
    p.add_argument("--ranked-lists", default=None)
    p.add_argument("--output", required=True)
    _add_proposal_flags(p)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a clean diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
