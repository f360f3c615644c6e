"""ROUGE-S / ROUGE-SU with a configurable skip distance.

Inputs are token sequences. A flat list of strings is one sentence; a list
of token lists is a multi-sentence text, and skip-bigrams never span two
of its sentences.
"""

from collections import Counter
from dataclasses import dataclass

from .errors import EmptyReferenceSet

MODES = ("S", "SU")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def from_pr(cls, p, r):
        f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
        return cls(p, r, f)


@dataclass
class SkipBigramBag:
    pairs: Counter
    unigrams: Counter

    def units(self, mode):
        if mode == "S":
            return self.pairs
        return self.pairs + self.unigrams


def as_sentences(tokens):
    """Normalize either token-list shape to a list of sentences."""
    if not tokens:
        return []
    if isinstance(tokens[0], str):
        return [list(tokens)]
    return [list(s) for s in tokens]


def skip_bigrams(tokens, d_skip):
    """Ordered pairs with at most ``d_skip`` tokens between them."""
    if d_skip < 0:
        raise ValueError("d_skip must be >= 0")
    pairs = Counter()
    unigrams = Counter()
    for sent in as_sentences(tokens):
        n = len(sent)
        unigrams.update(sent)
        for i in range(n):
            for j in range(i + 1, min(n, i + d_skip + 2)):
                pairs[(sent[i], sent[j])] += 1
    return SkipBigramBag(pairs, unigrams)


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def score_bags(cand, ref, mode="SU"):
    cu = cand.units(mode)
    ru = ref.units(mode)
    c_total = sum(cu.values())
    r_total = sum(ru.values())
    if c_total == 0 or r_total == 0:
        return RougeScore.zero()
    hits = sum((cu & ru).values())
    return RougeScore.from_pr(hits / c_total, hits / r_total)


def rouge_su(candidate_tokens, reference_tokens, d_skip=4, mode="SU"):
    _check_mode(mode)
    return score_bags(
        skip_bigrams(candidate_tokens, d_skip),
        skip_bigrams(reference_tokens, d_skip),
        mode,
    )


def rouge_su_multi(candidate_tokens, references, d_skip=4, mode="SU"):
    """Best-match score over several references (max F1, first wins ties)."""
    _check_mode(mode)
    if not references:
        raise EmptyReferenceSet("no reference summaries given")
    cand = skip_bigrams(candidate_tokens, d_skip)
    best = None
    for ref in references:
        s = score_bags(cand, skip_bigrams(ref, d_skip), mode)
        if best is None or s.f1 > best.f1:
            best = s
    return best
