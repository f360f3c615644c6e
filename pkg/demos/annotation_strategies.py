"""
From reference similarity to training labels
============================================

One planted question, four ways to label its candidate sentences.
"""

from qsumm.annotate import DualThreshold, Marcu, Threshold, TopK, annotate_question, score_sentences
from qsumm.ingest import generate_synthetic

q = generate_synthetic(1, 10, 3, seed=1)[0]
print("question:", q.body)
print("ideal answer:", q.ideal_answers[0][:80], "...")

scores = score_sentences(q)
for i, s in enumerate(scores):
    print(f"  sentence {i}: SU4 F1 = {s:.3f}")

for strategy in (Threshold(0.1), TopK(3), DualThreshold(0.7, 0.3), Marcu()):
    labels = annotate_question(q, strategy, scores)
    shown = "".join("." if lab is None else str(lab) for lab in labels)
    print(f"{strategy.id:>14}: {shown}")

# '.' marks sentences the dual rule leaves out of training entirely
