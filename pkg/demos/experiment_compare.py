"""
Cross-validated comparison on a planted corpus
==============================================

Regression vs classification vs random, on identical folds.
"""

from qsumm.annotate import Threshold, TopK
from qsumm.charts import bar_chart
from qsumm.ingest import generate_synthetic
from qsumm.pipeline import ExperimentConfig, compare_runs, run_experiment

# 100 questions, 10 candidate sentences each, 3 of them copied into the answer
corpus = generate_synthetic(100, 10, 3, seed=7)

cache = {}  # SU4 scores per question, shared between runs
configs = [
    ExperimentConfig("regression"),
    ExperimentConfig("classification", Threshold(0.1)),
    ExperimentConfig("classification", TopK(3)),
    ExperimentConfig("random"),
]
reports = [run_experiment(corpus, c, cache) for c in configs]

comp = compare_runs(reports)
print(comp.to_csv())

with open("comparison.svg", "w") as fh:
    fh.write(bar_chart(comp.names, comp.means, comp.stds))
print("bar chart written to comparison.svg")
