"""Query-focused extractive summarisation with supervised sentence rankers."""

__version__ = "0.1.0"
