"""Screening engine for crowdsourced product ideas.

Pipeline: parse idea records, extract request/known terms, turn each
idea into six measurements and a feature vector, then rank ideas by
probability of adoption with an online-updating logistic ensemble that
learns from every human decision.
"""

__version__ = "0.1.0"

from . import corpus, extraction, lingua, olr, scoring

__all__ = ["corpus", "extraction", "lingua", "olr", "scoring", "__version__"]
