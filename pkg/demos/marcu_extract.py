"""
Greedy core extract
===================

Drop sentences while the remaining text keeps getting closer to the abstract.
"""

from qsumm.annotate import marcu_trace
from qsumm.textproc import process_text

abstract = process_text(
    "Bazex syndrome is a paraneoplastic dermatosis with nail dystrophy."
).stems()
document = [
    "Bazex syndrome, also called acrokeratosis paraneoplastica, is rare.",
    "Nail dystrophy is an early sign of the syndrome.",
    "The hospital cafeteria reopened after renovation.",
    "Most patients have an underlying squamous cell carcinoma.",
    "Parking was free for visitors during the study.",
]
sents = [process_text(s).stems() for s in document]

kept, trace = marcu_trace(abstract, sents)
print("similarity after each removal:", [round(x, 3) for x in trace])
for i, s in enumerate(document):
    print("KEEP" if i in kept else "drop", s)
