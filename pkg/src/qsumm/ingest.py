"""BioASQ parsing, abstract store joins, corpus files and synthetic corpora."""

import json
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import __version__
from .errors import FileUnreadable, InvalidParameters, NotBioasqShape
from .rouge import rouge_su_multi
from .textproc import default_stopwords, make_sentence, process_text, split_sentences

log = logging.getLogger(__name__)

CORPUS_FORMAT_VERSION = 1

_PMID_RE = re.compile(r"(\d+)/*\s*$")


def normalize_doc_id(doc):
    """``http://www.ncbi.nlm.nih.gov/pubmed/23456`` -> ``23456``."""
    doc = str(doc).strip()
    m = _PMID_RE.search(doc)
    if m:
        return m.group(1)
    return doc.rstrip("/").rsplit("/", 1)[-1]


@dataclass
class QuestionRecord:
    id: str
    body: str
    type: str = ""
    ideal_answers: list = field(default_factory=list)
    documents: list = field(default_factory=list)
    sentences: list = field(default_factory=list)
    sentence_docs: list = field(default_factory=list)
    usable: bool = True

    @cached_property
    def query(self):
        return process_text(self.body)

    @property
    def query_stems(self):
        return self.query.stems()

    @cached_property
    def ideal_texts(self):
        return [process_text(a) for a in self.ideal_answers]

    @property
    def reference_units(self):
        """ROUGE references: one list of stemmed sentences per ideal answer."""
        return [t.rouge_units() for t in self.ideal_texts]

    @property
    def abstract_stems(self):
        """All ideal answers pooled into one stem list (the Marcu abstract)."""
        return [s for t in self.ideal_texts for s in t.stems()]

    def to_json(self):
        return {
            "id": self.id,
            "body": self.body,
            "type": self.type,
            "ideal_answers": list(self.ideal_answers),
            "documents": list(self.documents),
            "usable": self.usable,
            "sentences": [
                {"doc": d, "text": s.raw} for s, d in zip(self.sentences, self.sentence_docs)
            ],
        }

    @classmethod
    def from_json(cls, d):
        sents = d.get("sentences", [])
        return cls(
            id=d["id"],
            body=d["body"],
            type=d.get("type", ""),
            ideal_answers=list(d.get("ideal_answers", [])),
            documents=list(d.get("documents", [])),
            sentences=[make_sentence(i, s["text"]) for i, s in enumerate(sents)],
            sentence_docs=[s.get("doc") for s in sents],
            usable=d.get("usable", True),
        )


@dataclass
class IngestReport:
    warnings: list = field(default_factory=list)

    def warn(self, msg):
        log.warning(msg)
        self.warnings.append(msg)


def parse_bioasq(path, report=None):
    """Read a BioASQ Task B training file into question records."""
    report = report if report is not None else IngestReport()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("questions"), list):
        raise NotBioasqShape(f"{path}: no top-level 'questions' array")

    records = []
    seen = set()
    for n, q in enumerate(data["questions"]):
        if not isinstance(q, dict) or not isinstance(q.get("body"), str):
            report.warn(f"question #{n}: missing 'body', skipped")
            continue
        qid = str(q.get("id") or f"q{n:05d}")
        if qid in seen:
            report.warn(f"question #{n}: duplicate id {qid}, skipped")
            continue
        seen.add(qid)
        ideal = q.get("ideal_answer", [])
        if isinstance(ideal, str):
            ideal = [ideal]
        elif not isinstance(ideal, list):
            report.warn(f"question {qid}: unreadable 'ideal_answer'")
            ideal = []
        ideal = [a for a in ideal if isinstance(a, str) and a.strip()]
        docs = q.get("documents", [])
        if not isinstance(docs, list):
            report.warn(f"question {qid}: unreadable 'documents'")
            docs = []
        rec = QuestionRecord(
            id=qid,
            body=q["body"],
            type=str(q.get("type", "")),
            ideal_answers=ideal,
            documents=[normalize_doc_id(d) for d in docs],
        )
        if not ideal:
            rec.usable = False
            report.warn(f"question {qid}: no ideal answer")
        records.append(rec)
    return records


class AbstractStore(dict):
    """document id -> {"title", "abstract"}."""

    @classmethod
    def load(cls, path):
        store = cls()
        try:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    store[normalize_doc_id(rec["id"])] = {
                        "title": rec.get("title") or "",
                        "abstract": rec.get("abstract") or "",
                    }
        except (OSError, UnicodeDecodeError, json.JSONDecodeError, KeyError) as exc:
            raise FileUnreadable(f"{path}: {exc}") from exc
        return store

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for doc_id in sorted(self):
                rec = {"id": doc_id, **self[doc_id]}
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def build_pools(questions, store, include_titles=True, report=None):
    """Attach candidate sentences (document order, then sentence order)."""
    report = report if report is not None else IngestReport()
    for q in questions:
        sentences, docs = [], []
        for doc_id in q.documents:
            entry = store.get(doc_id)
            if entry is None:
                report.warn(f"question {q.id}: document {doc_id} not in store")
                continue
            parts = [entry["title"], entry["abstract"]] if include_titles else [entry["abstract"]]
            for part in parts:
                for s in split_sentences(part or ""):
                    sentences.append(make_sentence(len(sentences), s.raw))
                    docs.append(doc_id)
        q.sentences = sentences
        q.sentence_docs = docs
        if not sentences:
            q.usable = False
            report.warn(f"question {q.id}: empty sentence pool")
    return questions


# --- corpus file --------------------------------------------------------

def write_corpus(path, questions, seed=None, extra=None):
    header = {"format_version": CORPUS_FORMAT_VERSION, "created_by": f"qsumm {__version__}"}
    if seed is not None:
        header["seed"] = seed
    if extra:
        header.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"header": header}, sort_keys=True) + "\n")
        for q in questions:
            fh.write(json.dumps(q.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def read_corpus(path):
    """Returns (header, questions)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh if ln.strip()]
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc
    if not lines:
        raise FileUnreadable(f"{path}: empty corpus file")
    try:
        first = json.loads(lines[0])
        header = first["header"]
        if header.get("format_version") != CORPUS_FORMAT_VERSION:
            raise FileUnreadable(f"{path}: unsupported corpus format {header.get('format_version')!r}")
        questions = [QuestionRecord.from_json(json.loads(ln)) for ln in lines[1:]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FileUnreadable(f"{path}: not a corpus file ({exc})") from exc
    return header, questions


# --- synthetic corpora --------------------------------------------------

_ONSETS = "b c d f g h j k l m n p r t v z".split() + ["br", "dr", "gl", "kr", "pl", "tr"]
_NUCLEI = ["a", "e", "i", "o", "u"]


def _pseudo_words(rng, n, taken):
    """``n`` fresh lowercase pseudo-words whose Porter stems are unused."""
    from .porter import stem

    out = []
    while len(out) < n:
        k = int(rng.integers(2, 4))
        w = "".join(
            _ONSETS[rng.integers(len(_ONSETS))] + _NUCLEI[rng.integers(len(_NUCLEI))]
            for _ in range(k)
        ) + _ONSETS[rng.integers(len(_ONSETS))]
        st = stem(w)
        if st in taken or w in taken:
            continue
        taken.add(st)
        taken.add(w)
        out.append(w)
    return out


def _sentence(rng, words, length):
    picked = [words[i] for i in rng.integers(len(words), size=length)]
    picked[0] = picked[0].capitalize()
    return " ".join(picked) + "."


def generate_synthetic(n_questions, pool_size, n_planted, seed, topic_size=12,
                       distractor_vocab=300, sentence_len=(8, 14), max_retries=20):
    """Planted-summary corpus.

    Each question gets a private topic vocabulary. ``n_planted`` pool
    sentences are drawn from it (each containing at least one query word)
    and their verbatim concatenation is the ideal answer. The other pool
    sentences come from a shared distractor vocabulary disjoint from every
    topic vocabulary. Questions are regenerated if any distractor scores
    SU4 >= 0.05 against the ideal answer or a planted sentence does not
    strictly beat every distractor.
    """
    if n_questions < 1 or pool_size < 1 or n_planted < 1 or n_planted > pool_size:
        raise InvalidParameters(
            f"need 1 <= n_planted <= pool_size and n_questions >= 1, got "
            f"n_questions={n_questions} pool_size={pool_size} n_planted={n_planted}"
        )
    rng = np.random.default_rng(seed)
    taken = set(default_stopwords())
    distractors = _pseudo_words(rng, distractor_vocab, taken)
    lo, hi = sentence_len

    questions = []
    for qn in range(n_questions):
        doc_id = str(9000000 + qn)
        topic = _pseudo_words(rng, topic_size, taken)
        for _attempt in range(max_retries):
            query_words = list(rng.choice(topic, size=3, replace=False))
            body = f"What is the role of {query_words[0]} in {query_words[1]} {query_words[2]}?"
            planted = []
            for _ in range(n_planted):
                sent = _sentence(rng, topic, int(rng.integers(lo, hi + 1)))
                head, rest = sent.split(" ", 1)
                anchor = query_words[int(rng.integers(3))]
                planted.append(f"{anchor.capitalize()} {head.lower()} {rest}")
            others = [
                _sentence(rng, distractors, int(rng.integers(lo, hi + 1)))
                for _ in range(pool_size - n_planted)
            ]
            slots = rng.permutation(pool_size)
            pool = [None] * pool_size
            for j, s in enumerate(planted):
                pool[slots[j]] = s
            for j, s in enumerate(others):
                pool[slots[n_planted + j]] = s
            planted_at = sorted(int(i) for i in slots[:n_planted])
            ideal = " ".join(pool[i] for i in planted_at)
            rec = QuestionRecord(
                id=f"syn{qn:05d}",
                body=body,
                type="summary",
                ideal_answers=[ideal],
                documents=[doc_id],
                sentences=[make_sentence(i, s) for i, s in enumerate(pool)],
                sentence_docs=[doc_id] * pool_size,
            )
            if _planted_dominates(rec, planted_at):
                questions.append(rec)
                break
        else:
            raise InvalidParameters(f"could not generate a valid question {qn} in {max_retries} tries")
    return questions


def _planted_dominates(rec, planted_at):
    refs = rec.reference_units
    scores = [rouge_su_multi([list(s.full_stems)], refs, 4, "SU").f1 for s in rec.sentences]
    planted = [scores[i] for i in planted_at]
    rest = [scores[i] for i in range(len(scores)) if i not in set(planted_at)]
    if any(r >= 0.05 for r in rest):
        return False
    return not rest or min(planted) > max(rest)


def to_bioasq(questions):
    """Inverse of parse_bioasq + build_pools: (BioASQ dict, AbstractStore)."""
    store = AbstractStore()
    out = []
    for q in questions:
        by_doc = {}
        for s, d in zip(q.sentences, q.sentence_docs):
            by_doc.setdefault(d, []).append(s.raw)
        for d, sents in by_doc.items():
            store[d] = {"title": "", "abstract": " ".join(sents)}
        out.append({
            "id": q.id,
            "body": q.body,
            "type": q.type,
            "ideal_answer": list(q.ideal_answers),
            "documents": [f"http://www.ncbi.nlm.nih.gov/pubmed/{d}" for d in q.documents],
        })
    return {"questions": out}, store
