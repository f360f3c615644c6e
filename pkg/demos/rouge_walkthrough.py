"""
Scoring summaries with ROUGE-SU4
================================

Skip-bigrams, unigrams, and why word order matters.
"""

from qsumm.rouge import rouge_su, rouge_su_multi, skip_bigrams
from qsumm.textproc import process_text

# Text goes through the same tokenizer and stemmer the pipeline uses.
# ROUGE keeps stopwords; only the tf-idf features drop them.
cand = process_text("Police killed the gunman.").rouge_units()
ref = process_text("The gunman police killed.").rouge_units()
print("candidate units:", cand)
print("reference units:", ref)

# ordered pairs up to 4 intervening words, never across sentences
bag = skip_bigrams(cand, 4)
print("skip-bigrams:", sorted(bag.pairs))

for mode in ("S", "SU"):
    s = rouge_su(cand, ref, 4, mode)
    print(f"ROUGE-{mode}4  P={s.precision:.3f} R={s.recall:.3f} F1={s.f1:.3f}")

# Several ideal answers: the best-matching one counts.
refs = [process_text(t).rouge_units() for t in ("A storm hit the coast.",
                                                  "The gunman police killed.")]
print("multi-reference F1:", round(rouge_su_multi(cand, refs).f1, 3))
