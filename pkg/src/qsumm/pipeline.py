"""Summarisation stages and the k-fold cross-validation harness."""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .annotate import DualThreshold, Marcu, Threshold, TopK, annotate_question, score_sentences
from .errors import FoldMismatch, TooFewQuestions
from .models import Hyperparams, assemble_features, decision_score, train_svm, train_svr
from .rouge import rouge_su_multi
from .vectorspace import fit_vocabulary

log = logging.getLogger(__name__)

APPROACHES = ("regression", "classification", "random")
REPORT_FORMAT_VERSION = 1


@dataclass
class ExperimentConfig:
    approach: str = "classification"
    strategy: object = field(default_factory=lambda: Threshold(0.1))
    n_summary_sentences: int = 3
    k_folds: int = 10
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    seed: int = 42
    min_df: int = 1

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise ValueError(f"approach must be one of {APPROACHES}, got {self.approach!r}")
        if self.n_summary_sentences < 1:
            raise ValueError("n_summary_sentences must be >= 1")
        if self.k_folds < 2:
            raise ValueError("k_folds must be >= 2")

    @property
    def name(self):
        if self.approach == "classification":
            return f"classification:{self.strategy.id}"
        return self.approach

    def snapshot(self):
        hp = asdict(self.hyperparams)
        return {
            "approach": self.approach,
            "strategy": self.strategy.id if self.approach == "classification" else None,
            "n_summary_sentences": self.n_summary_sentences,
            "k_folds": self.k_folds,
            "hyperparams": hp,
            "seed": self.seed,
            "min_df": self.min_df,
        }


@dataclass
class Summary:
    question_id: str
    indices: list
    text: str


@dataclass
class FoldReport:
    fold: int
    question_ids: list
    scores: list

    @property
    def mean(self):
        return float(np.mean(self.scores)) if self.scores else 0.0

    @property
    def std(self):
        return float(np.std(self.scores)) if self.scores else 0.0

    def to_json(self):
        return {
            "fold": self.fold,
            "n_questions": len(self.scores),
            "mean": self.mean,
            "std": self.std,
            "questions": [
                {"id": q, "f1_su4": s} for q, s in zip(self.question_ids, self.scores)
            ],
        }


@dataclass
class ExperimentReport:
    config: dict
    name: str
    folds: list
    partition_digest: str
    summaries: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def all_scores(self):
        return [s for f in self.folds for s in f.scores]

    @property
    def micro_mean(self):
        return float(np.mean(self.all_scores()))

    @property
    def micro_std(self):
        return float(np.std(self.all_scores()))

    @property
    def macro_mean(self):
        return float(np.mean([f.mean for f in self.folds]))

    @property
    def macro_std(self):
        return float(np.std([f.mean for f in self.folds]))

    def to_json(self):
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "name": self.name,
            "config": self.config,
            "partition_digest": self.partition_digest,
            "aggregate": {
                "micro_mean": self.micro_mean,
                "micro_std": self.micro_std,
                "macro_mean": self.macro_mean,
                "macro_std": self.macro_std,
                "n_questions": len(self.all_scores()),
            },
            "folds": [f.to_json() for f in self.folds],
            "summaries": {
                qid: {"indices": s.indices, "text": s.text}
                for qid, s in sorted(self.summaries.items())
            },
            "skipped": list(self.skipped),
        }

    @classmethod
    def from_json(cls, d):
        folds = [
            FoldReport(
                fold=f["fold"],
                question_ids=[q["id"] for q in f["questions"]],
                scores=[q["f1_su4"] for q in f["questions"]],
            )
            for f in d["folds"]
        ]
        summaries = {
            qid: Summary(qid, s["indices"], s["text"]) for qid, s in d.get("summaries", {}).items()
        }
        return cls(d["config"], d["name"], folds, d["partition_digest"], summaries,
                   d.get("skipped", []))

    def dumps(self):
        return json.dumps(self.to_json(), indent=1, sort_keys=True, ensure_ascii=False)


# --- stage 3: selection -------------------------------------------------

def top_n(scores, n):
    """Indices of the ``n`` highest scores (ties -> lower index), in index order."""
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    return sorted(order[:n])


def summarize(question, model, vocab, n=3):
    X = assemble_features(question, vocab)
    if X.shape[0] == 0:
        return Summary(question.id, [], "")
    scores = np.atleast_1d(decision_score(model, X))
    idx = top_n(list(scores), n)
    return Summary(question.id, idx, " ".join(question.sentences[i].raw for i in idx))


def random_summary(question, n, rng):
    pool = len(question.sentences)
    idx = sorted(int(i) for i in rng.choice(pool, size=min(n, pool), replace=False))
    return Summary(question.id, idx, " ".join(question.sentences[i].raw for i in idx))


def summary_score(question, summary, d_skip=4):
    cand = [list(question.sentences[i].full_stems) for i in summary.indices]
    return rouge_su_multi(cand, question.reference_units, d_skip, "SU").f1


# --- folds --------------------------------------------------------------

def make_folds(question_ids, k, seed):
    """Seeded question-level partition into ``k`` folds of near-equal size."""
    ids = list(question_ids)
    if k > len(ids):
        raise TooFewQuestions(f"{len(ids)} questions cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ids))
    return [[ids[i] for i in sorted(chunk)] for chunk in np.array_split(perm, k)]


def partition_digest(folds):
    blob = json.dumps(folds, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def usable_questions(questions):
    ok, skipped = [], []
    for q in questions:
        if not q.usable or not q.ideal_answers or not q.sentences:
            skipped.append(q.id)
            log.info("skipping unusable question %s", q.id)
        else:
            ok.append(q)
    return ok, skipped


# --- stage 1+2 per fold -------------------------------------------------

def fit_fold_vocabulary(train_questions, min_df=1):
    """Each candidate sentence and each query text is one document."""
    docs = []
    for q in train_questions:
        docs.extend(list(s.stems) for s in q.sentences)
        docs.append(list(q.query_stems))
    return fit_vocabulary(docs, min_df=min_df)


def training_set(train_questions, vocab, config, score_cache=None):
    mats, targets = [], []
    for q in train_questions:
        scores = score_cache.get(q.id) if score_cache is not None else None
        if scores is None:
            scores = score_sentences(q)
            if score_cache is not None:
                score_cache[q.id] = scores
        X = assemble_features(q, vocab)
        if config.approach == "regression":
            mats.append(X)
            targets.extend(scores)
        else:
            labels = annotate_question(q, config.strategy, scores)
            keep = [i for i, lab in enumerate(labels) if lab is not None]
            if keep:
                mats.append(X[keep])
                targets.extend(labels[i] for i in keep)
    X = sp.vstack(mats, format="csr") if mats else sp.csr_matrix((0, len(vocab) + 1))
    return X, np.asarray(targets)


def train_fold(train_questions, config, score_cache=None):
    vocab = fit_fold_vocabulary(train_questions, config.min_df)
    X, y = training_set(train_questions, vocab, config, score_cache)
    if config.approach == "regression":
        model = train_svr(X, y, config.hyperparams, vocab.digest())
    else:
        model = train_svm(X, y.astype(np.int64), config.hyperparams, vocab.digest())
    return vocab, model


def run_experiment(questions, config, score_cache=None, keep_models=False):
    """k-fold cross-validated F1 ROUGE-SU4 of top-n summaries."""
    usable, skipped = usable_questions(questions)
    if not usable:
        raise TooFewQuestions("no usable questions in corpus")
    by_id = {q.id: q for q in usable}
    folds = make_folds([q.id for q in usable], config.k_folds, config.seed)
    reports, summaries, models = [], {}, []
    rng = np.random.default_rng(config.seed)
    for fi, test_ids in enumerate(folds):
        test_set = set(test_ids)
        train = [q for q in usable if q.id not in test_set]
        if config.approach != "random":
            vocab, model = train_fold(train, config, score_cache)
            if keep_models:
                models.append((vocab, model))
        scores = []
        for qid in test_ids:
            q = by_id[qid]
            if config.approach == "random":
                summ = random_summary(q, config.n_summary_sentences, rng)
            else:
                summ = summarize(q, model, vocab, config.n_summary_sentences)
            summaries[qid] = summ
            scores.append(summary_score(q, summ))
        reports.append(FoldReport(fi, list(test_ids), scores))
        log.info("%s fold %d: mean F1 SU4 %.4f over %d questions",
                 config.name, fi, reports[-1].mean, len(scores))
    report = ExperimentReport(
        config=config.snapshot(),
        name=config.name,
        folds=reports,
        partition_digest=partition_digest(folds),
        summaries=summaries,
        skipped=skipped,
    )
    if keep_models:
        report.models = models
    return report


# --- comparison ---------------------------------------------------------

@dataclass
class Comparison:
    names: list
    fold_means: list  # [fold][run]
    means: list
    stds: list
    wins: list

    def to_csv(self):
        lines = ["fold," + ",".join(self.names) + ",winner"]
        for fi, row in enumerate(self.fold_means):
            top = [j for j, v in enumerate(row) if v == max(row)]
            winner = self.names[top[0]] if len(top) == 1 else "tie"
            lines.append(f"{fi}," + ",".join(f"{v:.6f}" for v in row) + f",{winner}")
        lines.append("mean," + ",".join(f"{v:.6f}" for v in self.means) + ",")
        lines.append("std," + ",".join(f"{v:.6f}" for v in self.stds) + ",")
        lines.append("wins," + ",".join(str(w) for w in self.wins) + ",")
        return "\n".join(lines) + "\n"


def compare_runs(reports, names=None):
    """Side-by-side fold means; ``wins`` counts folds where a run is strictly best."""
    if not reports:
        raise ValueError("nothing to compare")
    digests = {r.partition_digest for r in reports}
    if len(digests) != 1:
        raise FoldMismatch("runs were made on different fold partitions")
    names = list(names) if names is not None else [r.name for r in reports]
    n_folds = len(reports[0].folds)
    fold_means = [[r.folds[fi].mean for r in reports] for fi in range(n_folds)]
    wins = [0] * len(reports)
    for row in fold_means:
        best = max(row)
        winners = [j for j, v in enumerate(row) if v == best]
        if len(winners) == 1:
            wins[winners[0]] += 1
    return Comparison(
        names=names,
        fold_means=fold_means,
        means=[r.macro_mean for r in reports],
        stds=[r.macro_std for r in reports],
        wins=wins,
    )


__all__ = [
    "ExperimentConfig", "ExperimentReport", "FoldReport", "Summary", "Comparison",
    "summarize", "make_folds", "run_experiment", "compare_runs", "top_n",
    "TopK", "Threshold", "Marcu", "DualThreshold",
]
