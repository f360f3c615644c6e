"""Linear SVR / SVM trained by stochastic subgradient descent.

Both learners share one primal solver with Pegasos step sizes
``eta_t = 1 / (lambda * (t + t0))``. With ``t0 = 0`` this is plain Pegasos;
the default ``t0 = 1/lambda`` caps the first step near 1, which matters for
the unregularized bias when lambda is small. The weight vector is kept as ``scale * v`` so
the per-step L2 shrink is O(1) on sparse rows. The bias is unregularized.
At the end of every epoch the average of all iterates since the start of
the second epoch is scored on the full objective; the best such candidate
is returned.
"""

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, InvalidHyperparameter, SingleClassTraining
from .vectorspace import cosine, tfidf

MODEL_FORMAT_VERSION = 1


@dataclass
class Hyperparams:
    lam: float = 1e-4
    epsilon: float = 0.1
    epochs: int = 20
    seed: int = 42
    class_weight: str = "balanced"  # or "none"
    average: bool = True
    t0: float = None  # step offset, eta = 1/(lambda*(t+t0)); None -> 1/lambda

    @property
    def step_offset(self):
        return 1.0 / self.lam if self.t0 is None else float(self.t0)

    def validate(self, kind):
        if not self.lam > 0:
            raise InvalidHyperparameter(f"lambda must be > 0, got {self.lam}")
        if kind == "SVR" and self.epsilon < 0:
            raise InvalidHyperparameter(f"epsilon must be >= 0, got {self.epsilon}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise InvalidHyperparameter(f"epochs must be an integer >= 1, got {self.epochs}")
        if self.t0 is not None and self.t0 < 0:
            raise InvalidHyperparameter(f"t0 must be >= 0, got {self.t0}")
        if self.class_weight not in ("balanced", "none"):
            raise InvalidHyperparameter(f"unknown class_weight {self.class_weight!r}")


@dataclass
class LinearModel:
    kind: str
    weights: np.ndarray
    bias: float
    hyperparams: Hyperparams
    n_examples: int = 0
    objective: float = 0.0
    initial_objective: float = 0.0
    epoch_objectives: list = field(default_factory=list)
    class_weights: dict = field(default_factory=dict)
    vocab_hash: str = ""

    @property
    def dim(self):
        return len(self.weights)

    @property
    def retained_objectives(self):
        """Objective of the model held after each epoch (best so far)."""
        return list(np.minimum.accumulate(self.epoch_objectives))

    def to_dict(self):
        hp = self.hyperparams
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "hyperparams": {
                "lambda": hp.lam,
                "epsilon": hp.epsilon,
                "epochs": hp.epochs,
                "seed": hp.seed,
                "class_weight": hp.class_weight,
                "average": hp.average,
                "t0": hp.t0,
            },
            "weights": [float(x) for x in self.weights],
            "bias": float(self.bias),
            "n_examples": self.n_examples,
            "objective": self.objective,
            "initial_objective": self.initial_objective,
            "epoch_objectives": list(self.epoch_objectives),
            "class_weights": {str(k): v for k, v in self.class_weights.items()},
            "vocab_hash": self.vocab_hash,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format {d.get('format_version')!r}")
        h = d["hyperparams"]
        hp = Hyperparams(
            lam=h["lambda"], epsilon=h["epsilon"], epochs=h["epochs"], seed=h["seed"],
            class_weight=h["class_weight"], average=h["average"], t0=h.get("t0"),
        )
        return cls(
            kind=d["kind"],
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=d["bias"],
            hyperparams=hp,
            n_examples=d["n_examples"],
            objective=d["objective"],
            initial_objective=d["initial_objective"],
            epoch_objectives=list(d["epoch_objectives"]),
            class_weights={int(k): v for k, v in d["class_weights"].items()},
            vocab_hash=d.get("vocab_hash", ""),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# --- features -----------------------------------------------------------

def feature_dim(vocab):
    return len(vocab) + 1


def sentence_features(stems, query_vec, vocab):
    """One feature row: tf-idf block over ``vocab`` plus cosine to the query."""
    vec = tfidf(stems, vocab)
    sim = cosine(vec, query_vec)
    cols = np.append(vec.ids, len(vocab))
    vals = np.append(vec.weights, sim)
    return sp.csr_matrix((vals, (np.zeros(len(cols), dtype=np.int64), cols)),
                         shape=(1, feature_dim(vocab)))


def assemble_features(question, vocab):
    """Feature matrix, one row per candidate sentence of ``question``."""
    query_vec = tfidf(question.query_stems, vocab)
    rows = [sentence_features(s.stems, query_vec, vocab) for s in question.sentences]
    if not rows:
        return sp.csr_matrix((0, feature_dim(vocab)))
    return sp.vstack(rows, format="csr")


# --- losses -------------------------------------------------------------

def hinge_loss(score, s):
    return max(0.0, 1.0 - s * score)


def hinge_subgradient(score, s):
    """d/dscore of max(0, 1 - s*score)."""
    return -s if s * score < 1.0 else 0.0


def eps_insensitive_loss(score, y, eps):
    return max(0.0, abs(score - y) - eps)


def eps_insensitive_subgradient(score, y, eps):
    """d/dscore of max(0, |score - y| - eps)."""
    r = score - y
    if r > eps:
        return 1.0
    if r < -eps:
        return -1.0
    return 0.0


def objective(kind, w, b, X, targets, lam, eps=0.0, sample_weights=None):
    """Regularized empirical risk on the full data set."""
    scores = np.asarray(X @ w).ravel() + b
    if kind == "SVR":
        losses = np.maximum(0.0, np.abs(scores - targets) - eps)
    else:
        losses = np.maximum(0.0, 1.0 - targets * scores)
    if sample_weights is not None:
        losses = losses * sample_weights
    return 0.5 * lam * float(np.dot(w, w)) + float(np.mean(losses))


# --- solver -------------------------------------------------------------

def _as_csr(X):
    if sp.issparse(X):
        return sp.csr_matrix(X, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return sp.csr_matrix(X)


def _sgd(kind, X, targets, hp, sample_weights):
    n, d = X.shape
    lam = hp.lam
    rng = np.random.default_rng(hp.seed)
    indptr, indices, data = X.indptr, X.indices, X.data

    # w = scale * v; the averaged iterate is (acc + beta * v) / n_avg
    v = np.zeros(d)
    scale = 1.0
    b = 0.0
    acc = np.zeros(d)
    beta = 0.0
    b_sum = 0.0
    n_avg = 0
    avg_from = n if hp.epochs > 1 else 0
    t0 = hp.step_offset

    raw_objs = []
    best = None
    t = 0
    for _ in range(hp.epochs):
        for i in rng.permutation(n):
            t += 1
            lo, hi = indptr[i], indptr[i + 1]
            cols = indices[lo:hi]
            vals = data[lo:hi]
            score = scale * float(np.dot(v[cols], vals)) + b
            if kind == "SVR":
                g = eps_insensitive_subgradient(score, targets[i], hp.epsilon)
            else:
                g = hinge_subgradient(score, targets[i])
            g *= sample_weights[i]
            eta = 1.0 / (lam * (t + t0))

            if t + t0 <= 1.0:
                # shrink factor 1 - eta*lam is exactly zero
                v[:] = 0.0
                scale = 1.0
            else:
                scale *= 1.0 - 1.0 / (t + t0)
            if g != 0.0:
                delta = (-eta * g / scale) * vals
                acc[cols] -= beta * delta
                v[cols] += delta
                b -= eta * g
            if scale < 1e-9:
                acc += beta * v
                beta = 0.0
                v *= scale
                scale = 1.0
            if t > avg_from:
                beta += scale
                b_sum += b
                n_avg += 1
        w_now, b_now = _current(v, scale, b, acc, beta, b_sum, n_avg, hp.average)
        obj = objective(kind, w_now, b_now, X, targets, lam, hp.epsilon, sample_weights)
        raw_objs.append(obj)
        if best is None or obj <= best[0]:
            best = (obj, w_now.copy(), b_now)
    return best[1], best[2], raw_objs


def _current(v, scale, b, acc, beta, b_sum, n_avg, average):
    if average and n_avg:
        return (acc + beta * v) / n_avg, b_sum / n_avg
    return scale * v, b


def train_svr(X, targets, hyperparams=None, vocab_hash=""):
    """Fit an epsilon-insensitive linear regressor to continuous targets."""
    hp = hyperparams or Hyperparams()
    hp.validate("SVR")
    X = _as_csr(X)
    y = np.asarray(targets, dtype=np.float64)
    if X.shape[0] == 0:
        raise InvalidHyperparameter("no training instances")
    if X.shape[0] != len(y):
        raise DimensionMismatch(f"{X.shape[0]} rows but {len(y)} targets")
    ones = np.ones(len(y))
    w, b, objs = _sgd("SVR", X, y, hp, ones)
    return LinearModel(
        kind="SVR",
        weights=w,
        bias=b,
        hyperparams=hp,
        n_examples=len(y),
        objective=min(objs),
        initial_objective=objective("SVR", np.zeros(X.shape[1]), 0.0, X, y, hp.lam, hp.epsilon),
        epoch_objectives=objs,
        vocab_hash=vocab_hash,
    )


def class_weights_for(labels, mode="balanced"):
    labels = np.asarray(labels)
    if mode == "none":
        return {0: 1.0, 1: 1.0}
    n = len(labels)
    return {c: n / (2.0 * int(np.sum(labels == c))) for c in (0, 1)}


def train_svm(X, labels, hyperparams=None, vocab_hash=""):
    """Fit a class-weighted hinge-loss linear classifier to 0/1 labels."""
    hp = hyperparams or Hyperparams()
    hp.validate("SVM")
    X = _as_csr(X)
    labels = np.asarray(labels, dtype=np.int64)
    if X.shape[0] != len(labels):
        raise DimensionMismatch(f"{X.shape[0]} rows but {len(labels)} labels")
    present = set(np.unique(labels).tolist())
    if not present <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got {sorted(present)}")
    if present != {0, 1}:
        raise SingleClassTraining(f"only label(s) {sorted(present)} present")
    cw = class_weights_for(labels, hp.class_weight)
    s = 2.0 * labels - 1.0
    weights = np.where(labels == 1, cw[1], cw[0])
    w, b, objs = _sgd("SVM", X, s, hp, weights)
    return LinearModel(
        kind="SVM",
        weights=w,
        bias=b,
        hyperparams=hp,
        n_examples=len(labels),
        objective=min(objs),
        initial_objective=objective("SVM", np.zeros(X.shape[1]), 0.0, X, s, hp.lam, 0.0, weights),
        epoch_objectives=objs,
        class_weights=cw,
        vocab_hash=vocab_hash,
    )


def decision_score(model, x):
    """``w . x + b`` for one feature row (float) or a matrix (array)."""
    if sp.issparse(x):
        if x.shape[-1] != model.dim:
            raise DimensionMismatch(f"features have dim {x.shape[-1]}, model has {model.dim}")
        out = np.asarray(x @ model.weights).ravel() + model.bias
        return float(out[0]) if x.shape[0] == 1 and out.size == 1 else out
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.dim:
        raise DimensionMismatch(f"features have dim {x.shape[-1]}, model has {model.dim}")
    out = x @ model.weights + model.bias
    return float(out) if x.ndim == 1 else out
