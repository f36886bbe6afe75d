"""Cosine retrieval and (mean) average precision scoring.

AP is the uninterpolated variant: mean of precision-at-k over the ranks k
holding a relevant item, divided by the total number of relevant items.
All rankings break score ties by item id ascending so every number reported
here is deterministic.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def cosine(a, b) -> float:
    """Cosine similarity; defined as 0 when either vector is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def average_precision(relevance, total_relevant: int) -> float:
    """AP of an already-ranked binary relevance list.

    Accumulated in exact rational arithmetic and rounded once on return, so
    hand-checkable values like 5/6 come out as the nearest float exactly.
    """
    if total_relevant < 1:
        raise ValueError("total_relevant must be >= 1")
    hits = 0
    ap = Fraction(0)
    for k, rel in enumerate(relevance, start=1):
        if rel:
            hits += 1
            ap += Fraction(hits, k)
    return float(ap / total_relevant)


def _ranked_relevance(scores, ids, relevant_mask):
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [bool(relevant_mask[i]) for i in order]


def map_classification(probabilities, labels, classes, ids=None):
    """Per-class AP of ranking all images by that class's probability.

    Classes without positives are excluded from the mean and reported.
    Returns a dict with ``map``, ``per_class_ap`` and ``skipped_classes``.
    """
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if probabilities.shape != (len(labels), len(classes)):
        raise ValueError("probabilities must be n_images x n_classes")
    if ids is None:
        ids = list(range(len(labels)))

    per_class = {}
    skipped = []
    for ci, cls in enumerate(classes):
        mask = [lbl == cls for lbl in labels]
        positives = sum(mask)
        if positives == 0:
            skipped.append(cls)
            continue
        rel = _ranked_relevance(probabilities[:, ci], ids, mask)
        per_class[cls] = average_precision(rel, positives)
    if not per_class:
        raise ValueError("no class has a positive example")
    return {
        "map": sum(per_class.values()) / len(per_class),
        "per_class_ap": per_class,
        "skipped_classes": skipped,
    }


def map_retrieval(features, labels, ids=None):
    """Query-by-example mAP under cosine similarity.

    Every item queries all the others; relevance is class equality.  Queries
    whose class has no other member are skipped and reported.
    """
    features = np.asarray(features, dtype=np.float64)
    n = features.shape[0]
    if n < 2:
        raise ValueError("need at least two items")
    if ids is None:
        ids = list(range(n))

    per_query = {}
    skipped = []
    for qi in range(n):
        rest = [i for i in range(n) if i != qi]
        positives = sum(1 for i in rest if labels[i] == labels[qi])
        if positives == 0:
            skipped.append(ids[qi])
            continue
        scores = [cosine(features[qi], features[i]) for i in rest]
        rel = _ranked_relevance(scores, [ids[i] for i in rest],
                                [labels[i] == labels[qi] for i in rest])
        per_query[ids[qi]] = average_precision(rel, positives)
    if not per_query:
        raise ValueError("every query was skipped; no class has two members")
    return {
        "map": sum(per_query.values()) / len(per_query),
        "per_query_ap": per_query,
        "skipped_queries": skipped,
    }


def ranked_list(query_id, features, ids, query_index):
    """Descending cosine ranking of all non-query items for one query."""
    rest = [i for i in range(len(ids)) if i != query_index]
    scored = [(ids[i], cosine(features[query_index], features[i])) for i in rest]
    scored.sort(key=lambda t: (-t[1], t[0]))
    return {"query": query_id, "ranking": scored}
