"""Pyramidal histogram-of-characters descriptors for word strings.

A word is embedded as a binary vector that records which symbols occupy
which horizontal regions of the word at pyramid levels 2 to 5, followed by
a two-region histogram over the 50 most common character bigrams.  With the
36-symbol alphabet (a-z, 0-9) this gives (2+3+4+5)*36 + 2*50 = 604 bits.
"""

from __future__ import annotations

import importlib.resources
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

UNIGRAMS = "abcdefghijklmnopqrstuvwxyz0123456789"
UNIGRAM_LEVELS = (2, 3, 4, 5)
BIGRAM_LEVEL = 2
BIGRAM_COUNT = 50

#: Total descriptor length for the default layout.
PHOC_DIM = sum(UNIGRAM_LEVELS) * len(UNIGRAMS) + BIGRAM_LEVEL * BIGRAM_COUNT


@dataclass(frozen=True)
class Alphabet:
    """Symbol inventory: 36 unigrams (a-z then 0-9) plus exactly 50 bigrams."""

    unigrams: str = UNIGRAMS
    bigrams: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.unigrams)) != len(self.unigrams):
            raise ValueError("duplicate unigram symbols")
        if len(self.bigrams) != BIGRAM_COUNT:
            raise ValueError(f"expected {BIGRAM_COUNT} bigrams, got {len(self.bigrams)}")
        if len(set(self.bigrams)) != len(self.bigrams):
            raise ValueError("duplicate bigram entries")
        uniset = set(self.unigrams)
        for bg in self.bigrams:
            if len(bg) != 2 or not set(bg) <= uniset:
                raise ValueError(f"invalid bigram {bg!r}")
        object.__setattr__(self, "_uni_index", {c: i for i, c in enumerate(self.unigrams)})
        object.__setattr__(self, "_bi_index", {b: i for i, b in enumerate(self.bigrams)})

    def unigram_index(self, char: str) -> int:
        return self._uni_index[char]

    def bigram_index(self, pair: str):
        return self._bi_index.get(pair)


@dataclass(frozen=True)
class OccupancyRule:
    """A character span counts as occupying a region when the overlap,
    measured as a fraction of the span, reaches ``threshold``."""

    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")


def normalize_word(raw: str) -> str:
    """Lowercase and keep only symbols of the unigram alphabet."""
    lowered = raw.lower()
    return "".join(c for c in lowered if c in UNIGRAMS)


def region_occupancy(char_index, span_len, word_len, level, rule=OccupancyRule()):
    """Regions at ``level`` occupied by the character span starting at ``char_index``.

    The span covers [char_index/word_len, (char_index+span_len)/word_len] and
    region r covers [r/level, (r+1)/level].  All overlap arithmetic is exact
    (integer scaled), so boundary ties resolve identically on every platform.

    When the span is shorter than a region times the threshold (words shorter
    than the level), no region can reach the ratio; the regions of maximal
    overlap are returned instead so the result is never empty.
    """
    if word_len < 1 or level < 1 or char_index < 0 or span_len < 1:
        raise ValueError("invalid occupancy query")
    if char_index + span_len > word_len:
        raise ValueError("character span exceeds word length")
    # Scale [0,1] positions by word_len*level so all endpoints are integers.
    span_lo = char_index * level
    span_hi = (char_index + span_len) * level
    threshold = Fraction(rule.threshold)
    regions = set()
    overlaps = []
    for r in range(level):
        overlap = min(span_hi, (r + 1) * word_len) - max(span_lo, r * word_len)
        overlaps.append(overlap)
        if overlap > 0 and Fraction(overlap, span_len * level) >= threshold:
            regions.add(r)
    if not regions:
        best = max(overlaps)
        regions = {r for r, ov in enumerate(overlaps) if ov == best}
    return regions


def build_phoc(word: str, alphabet: Alphabet, rule: OccupancyRule = OccupancyRule()) -> np.ndarray:
    """Encode a normalized, non-empty word as a PHOC bit vector.

    Layout: unigram levels ascending, regions ascending within a level,
    symbols in alphabet order; the bigram level-2 block comes last.
    """
    if not word:
        raise ValueError("cannot encode an empty word")
    n = len(word)
    n_uni = len(alphabet.unigrams)
    bits = np.zeros(sum(UNIGRAM_LEVELS) * n_uni + BIGRAM_LEVEL * len(alphabet.bigrams), dtype=np.uint8)

    offset = 0
    for level in UNIGRAM_LEVELS:
        for i, char in enumerate(word):
            sym = alphabet.unigram_index(char)
            for r in region_occupancy(i, 1, n, level, rule):
                bits[offset + r * n_uni + sym] = 1
        offset += level * n_uni

    for i in range(n - 1):
        bi = alphabet.bigram_index(word[i : i + 2])
        if bi is None:
            continue
        for r in region_occupancy(i, 2, n, BIGRAM_LEVEL, rule):
            bits[offset + r * len(alphabet.bigrams) + bi] = 1
    return bits


def derive_bigrams(dictionary, count: int = BIGRAM_COUNT) -> list[str]:
    """The ``count`` most frequent adjacent character pairs over the
    normalized dictionary words, ordered by descending frequency with ties
    broken lexicographically."""
    if not dictionary:
        raise ValueError("dictionary is empty")
    counts = Counter()
    for raw in dictionary:
        word = normalize_word(raw)
        for i in range(len(word) - 1):
            counts[word[i : i + 2]] += 1
    if len(counts) < count:
        raise ValueError(f"only {len(counts)} distinct bigrams available, need {count}")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [bg for bg, _ in ranked[:count]]


def _read_asset(name: str) -> list[str]:
    text = importlib.resources.files("morphofv").joinpath("data", name).read_text()
    return [line.strip() for line in text.splitlines() if line.strip()]


def load_dictionary() -> list[str]:
    """Word list shipped with the package (one word per line)."""
    return _read_asset("dictionary_en.txt")


def default_alphabet() -> Alphabet:
    """Alphabet with the committed 50-bigram asset."""
    return Alphabet(bigrams=tuple(_read_asset("bigrams_en_50.txt")))
