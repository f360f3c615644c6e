"""Sentence splitting, tokenization, stopword removal and stemming."""

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .porter import stem

__all__ = [
    "Sentence",
    "TokenizedText",
    "split_sentences",
    "tokenize",
    "remove_stopwords",
    "stem",
    "process_text",
    "make_sentence",
    "load_wordlist",
    "default_stopwords",
    "default_abbreviations",
    "use_wordlists",
]

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
# terminal punctuation, optional closing quotes/brackets, then whitespace
_BOUNDARY_RE = re.compile(r"[.!?]+[\"')\]]*(?=\s)")


def load_wordlist(path):
    """Read a one-entry-per-line UTF-8 file; blank lines and '#' comments skipped."""
    text = Path(path).read_text(encoding="utf-8")
    return _parse_wordlist(text)


def _parse_wordlist(text):
    out = []
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            out.append(line)
    return frozenset(out)


_overrides = {}


def use_wordlists(stopwords=None, abbreviations=None):
    """Replace the bundled lists process-wide (paths to one-per-line files).

    Passing None restores the bundled list for that slot.
    """
    for key, path in (("stopwords", stopwords), ("abbreviations", abbreviations)):
        if path is None:
            _overrides.pop(key, None)
        else:
            _overrides[key] = load_wordlist(path)


@lru_cache(maxsize=None)
def _bundled(name):
    return _parse_wordlist(resources.files("qsumm.data").joinpath(name).read_text("utf-8"))


def default_stopwords():
    return _overrides.get("stopwords") or _bundled("stopwords.txt")


def default_abbreviations():
    return _overrides.get("abbreviations") or _bundled("abbreviations.txt")


@dataclass(frozen=True)
class Sentence:
    """One sentence of a source text.

    ``stems`` is the stopword-filtered, stemmed form used for tf-idf and
    Marcu similarity; ``full_stems`` keeps stopwords and is what ROUGE sees.
    """

    index: int
    raw: str
    tokens: tuple
    stems: tuple
    full_stems: tuple = ()
    start: int = 0
    end: int = 0


@dataclass(frozen=True)
class TokenizedText:
    raw: str
    sentences: tuple = field(default_factory=tuple)

    def stems(self):
        return [s for sent in self.sentences for s in sent.stems]

    def rouge_units(self):
        """Per-sentence stemmed token lists, stopwords retained."""
        return [list(sent.full_stems) for sent in self.sentences]


def tokenize(sentence_text):
    """Lowercase alphanumeric runs; every other character is a boundary."""
    return [t.lower() for t in _TOKEN_RE.findall(sentence_text)]


def remove_stopwords(tokens, stopwords=None):
    if stopwords is None:
        stopwords = default_stopwords()
    return [t for t in tokens if t not in stopwords]


def _is_abbreviation(text, end, abbreviations):
    # ``end`` is one past the terminal punctuation run
    head = text[:end].lower()
    for abbr in abbreviations:
        if head.endswith(abbr):
            k = end - len(abbr)
            if k == 0 or not text[k - 1].isalnum():
                return True
    return False


def _span_ends(text, abbreviations):
    ends = []
    for m in _BOUNDARY_RE.finditer(text):
        nxt = m.end()
        while nxt < len(text) and text[nxt].isspace():
            nxt += 1
        while nxt < len(text) and text[nxt] in "\"'([\u201c\u2018":
            nxt += 1
        if nxt >= len(text):
            continue
        ch = text[nxt]
        if not (ch.isupper() or ch.isdigit()):
            continue
        # strip closing quotes/brackets to find where the word itself ends
        punct_end = m.end()
        while text[punct_end - 1] in "\"')]":
            punct_end -= 1
        if _is_abbreviation(text, punct_end, abbreviations):
            continue
        ends.append(m.end())
    return ends


def _raw_spans(text, abbreviations):
    spans = []
    start = 0
    for end in _span_ends(text, abbreviations) + [len(text)]:
        s, e = start, end
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if e > s:
            spans.append((s, e))
        start = end
    return spans


def split_sentences(text, stopwords=None, abbreviations=None):
    """Split ``text`` into processed sentences.

    A boundary is ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter or digit (opening quotes/brackets skipped), unless the period closes a guarded
    abbreviation. Fragments without any token are dropped.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    sentences = []
    for s, e in _raw_spans(text, abbreviations):
        raw = text[s:e]
        tokens = tokenize(raw)
        if not tokens:
            continue
        sentences.append(
            Sentence(
                index=len(sentences),
                raw=raw,
                tokens=tuple(tokens),
                stems=tuple(stem(t) for t in remove_stopwords(tokens, stopwords)),
                full_stems=tuple(stem(t) for t in tokens),
                start=s,
                end=e,
            )
        )
    return sentences


def make_sentence(index, raw, stopwords=None):
    """Build a Sentence from text already known to be one sentence."""
    tokens = tokenize(raw)
    return Sentence(
        index=index,
        raw=raw,
        tokens=tuple(tokens),
        stems=tuple(stem(t) for t in remove_stopwords(tokens, stopwords)),
        full_stems=tuple(stem(t) for t in tokens),
        start=0,
        end=len(raw),
    )


def process_text(text, stopwords=None, abbreviations=None):
    return TokenizedText(
        raw=text, sentences=tuple(split_sentences(text, stopwords, abbreviations))
    )
