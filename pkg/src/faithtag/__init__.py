"""Token-level faithfulness tagging for dialogue summaries.

Core pieces: the tag taxonomy and corpus data model (`tags`, `corpus`),
span- and ROUGE-based evaluation (`metrics`, `rouge`), a dual-head joint
summarizer-tagger and an encoder-only proxy tagger (`joint`, `proxy`),
a few-shot prompt harness (`prompting`), and an annotation service
(`service`). Model modules import torch and are loaded lazily.
"""

__version__ = "0.1.0"

from . import corpus, metrics, rouge, tags  # noqa: F401
