"""Per-sentence training targets derived from reference summaries."""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAbstract, EmptyReferenceSet
from .rouge import score_bags, skip_bigrams
from .vectorspace import fit_vocabulary

log = logging.getLogger(__name__)


# --- strategies ---------------------------------------------------------

@dataclass(frozen=True)
class TopK:
    k: int = 3

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"TopK needs k >= 1, got {self.k}")

    @property
    def id(self):
        return f"topk-{self.k}"


@dataclass(frozen=True)
class Threshold:
    t: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"Threshold needs 0 <= t <= 1, got {self.t}")

    @property
    def id(self):
        return f"threshold-{self.t:g}"


@dataclass(frozen=True)
class Marcu:
    fallback: Threshold = Threshold(0.1)

    @property
    def id(self):
        return "marcu"


@dataclass(frozen=True)
class DualThreshold:
    hi: float = 0.7
    lo: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError(f"DualThreshold needs 0 <= lo < hi <= 1, got lo={self.lo} hi={self.hi}")

    @property
    def id(self):
        return f"dual-{self.hi:g}-{self.lo:g}"


def strategy_from_id(sid):
    """Inverse of ``strategy.id``."""
    parts = sid.split("-")
    if parts[0] == "topk":
        return TopK(int(parts[1]))
    if parts[0] == "threshold":
        return Threshold(float(parts[1]))
    if parts[0] == "marcu":
        return Marcu()
    if parts[0] == "dual":
        return DualThreshold(float(parts[1]), float(parts[2]))
    raise ValueError(f"unknown strategy id {sid!r}")


# --- scoring ------------------------------------------------------------

def score_sentences(question, d_skip=4, mode="SU"):
    """F1 ROUGE-SU4 of every candidate sentence against the ideal answers."""
    refs = question.reference_units
    if not refs:
        raise EmptyReferenceSet(f"question {question.id} has no ideal answer")
    ref_bags = [skip_bigrams(r, d_skip) for r in refs]
    out = []
    for s in question.sentences:
        cand = skip_bigrams([list(s.full_stems)], d_skip)
        best = 0.0
        for rb in ref_bags:
            f = score_bags(cand, rb, mode).f1
            if f > best:
                best = f
        out.append(best)
    return out


# --- label rules --------------------------------------------------------

def annotate_topk(scores, k=3):
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    # stable sort on -score keeps lower indices first among ties
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    chosen = set(order[:k])
    return [1 if i in chosen else 0 for i in range(len(scores))]


def annotate_threshold(scores, t=0.1):
    return [1 if s > t else 0 for s in scores]


def annotate_dual_threshold(scores, hi=0.7, lo=0.3):
    """1 above ``hi``, 0 below ``lo``, None (not used for training) between."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo} hi={hi}")
    out = []
    for s in scores:
        if s > hi:
            out.append(1)
        elif s < lo:
            out.append(0)
        else:
            out.append(None)
    return out


# --- Marcu core extract -------------------------------------------------

def _sim(counts, abstract_w, idf):
    x = counts * idf
    nx = np.sqrt(np.dot(x, x))
    if nx == 0.0:
        return 0.0
    return float(np.dot(x, abstract_w) / nx)


def marcu_trace(abstract_stems, sentences):
    """Greedy core extract; returns (kept indices, similarity per iteration).

    Starts from the whole text and repeatedly drops the sentence whose
    removal gives the most similar remaining extract, for as long as that
    similarity is strictly higher than the current one. Similarity is the
    cosine of tf-idf vectors fitted on the abstract plus the sentences.
    """
    if not sentences:
        raise ValueError("marcu_extract needs at least one sentence")
    if not abstract_stems:
        raise DegenerateAbstract("abstract has no content stems")
    vocab = fit_vocabulary([list(abstract_stems)] + [list(s) for s in sentences])
    V = len(vocab)
    C = np.zeros((len(sentences), V))
    for i, s in enumerate(sentences):
        for stem in s:
            C[i, vocab.term_to_id[stem]] += 1.0
    a = np.zeros(V)
    for stem in abstract_stems:
        a[vocab.term_to_id[stem]] += 1.0
    a *= vocab.idf
    na = np.sqrt(np.dot(a, a))
    if na == 0.0:
        raise DegenerateAbstract("abstract vectorizes to an empty vector")
    a /= na
    idf = vocab.idf

    kept = list(range(len(sentences)))
    total = C.sum(axis=0)
    current = _sim(total, a, idf)
    trace = [current]
    while len(kept) > 1:
        cands = [_sim(total - C[i], a, idf) for i in kept]
        j = int(np.argmax(cands))  # first maximum -> lowest index
        if not current < cands[j]:
            break
        total = total - C[kept[j]]
        current = cands[j]
        trace.append(current)
        del kept[j]
    return kept, trace


def marcu_extract(abstract_stems, sentences):
    """Indices of the sentences retained by the greedy core extract."""
    return marcu_trace(abstract_stems, sentences)[0]


def annotate_marcu(abstract_stems, sentences):
    kept = set(marcu_extract(abstract_stems, sentences))
    return [1 if i in kept else 0 for i in range(len(sentences))]


# --- per-question entry point -------------------------------------------

def annotate_question(question, strategy, scores=None):
    """Labels (0, 1 or None) for every candidate sentence of ``question``."""
    if scores is None:
        scores = score_sentences(question)
    if isinstance(strategy, TopK):
        return annotate_topk(scores, strategy.k)
    if isinstance(strategy, Threshold):
        return annotate_threshold(scores, strategy.t)
    if isinstance(strategy, DualThreshold):
        return annotate_dual_threshold(scores, strategy.hi, strategy.lo)
    if isinstance(strategy, Marcu):
        try:
            return annotate_marcu(question.abstract_stems, [s.stems for s in question.sentences])
        except DegenerateAbstract:
            log.warning("question %s: degenerate abstract, falling back to %s",
                        question.id, strategy.fallback.id)
            return annotate_threshold(scores, strategy.fallback.t)
    raise TypeError(f"unknown strategy {strategy!r}")
