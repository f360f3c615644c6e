"""Vocabulary fitting, tf-idf weighting and cosine similarity."""

import hashlib
import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import EmptyCorpus

VOCAB_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SparseVector:
    """Sorted term ids with non-negative weights."""

    ids: np.ndarray
    weights: np.ndarray

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64))

    @classmethod
    def from_dict(cls, mapping):
        ids = np.array(sorted(mapping), dtype=np.int64)
        weights = np.array([mapping[i] for i in ids], dtype=np.float64)
        return cls(ids, weights)

    def __len__(self):
        return len(self.ids)

    def norm(self):
        return float(np.sqrt(np.dot(self.weights, self.weights)))

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            return SparseVector.empty()
        return SparseVector(self.ids, self.weights / n)

    def scaled(self, k):
        return SparseVector(self.ids, self.weights * k)

    def to_dense(self, dim):
        out = np.zeros(dim)
        out[self.ids] = self.weights
        return out


class Vocabulary:
    """Term -> id map with document frequencies; immutable once fitted."""

    def __init__(self, terms, df, n_docs):
        self.terms = tuple(terms)
        self.term_to_id = {t: i for i, t in enumerate(self.terms)}
        self.df = np.asarray(df, dtype=np.int64)
        self.n_docs = int(n_docs)
        self.idf = np.log((1.0 + self.n_docs) / (1.0 + self.df)) + 1.0

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.term_to_id

    def to_dict(self):
        return {
            "format_version": VOCAB_FORMAT_VERSION,
            "n_docs": self.n_docs,
            "terms": [
                {"term": t, "id": i, "df": int(d)}
                for i, (t, d) in enumerate(zip(self.terms, self.df))
            ],
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("format_version") != VOCAB_FORMAT_VERSION:
            raise ValueError(f"unsupported vocabulary format {data.get('format_version')!r}")
        entries = sorted(data["terms"], key=lambda e: e["id"])
        return cls([e["term"] for e in entries], [e["df"] for e in entries], data["n_docs"])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def fit_vocabulary(documents, min_df=1):
    """Fit a vocabulary over stem lists; ids follow sorted term order."""
    if not documents or not any(len(d) for d in documents):
        raise EmptyCorpus("cannot fit a vocabulary on empty documents")
    df = Counter()
    for doc in documents:
        df.update(set(doc))
    terms = sorted(t for t, c in df.items() if c >= min_df)
    return Vocabulary(terms, [df[t] for t in terms], len(documents))


def tfidf(stems, vocab, normalize=True):
    """Raw-count tf times smoothed idf; OOV stems are dropped."""
    counts = Counter(vocab.term_to_id[s] for s in stems if s in vocab.term_to_id)
    if not counts:
        return SparseVector.empty()
    ids = np.array(sorted(counts), dtype=np.int64)
    tf = np.array([counts[i] for i in ids], dtype=np.float64)
    vec = SparseVector(ids, tf * vocab.idf[ids])
    return vec.normalized() if normalize else vec


def cosine(a, b):
    if len(a) == 0 or len(b) == 0:
        return 0.0
    _, ia, ib = np.intersect1d(a.ids, b.ids, assume_unique=True, return_indices=True)
    if len(ia) == 0:
        return 0.0
    dot = float(np.dot(a.weights[ia], b.weights[ib]))
    denom = a.norm() * b.norm()
    if denom == 0.0:
        return 0.0
    return min(1.0, dot / denom)
