"""Inventory volumes to a queryable archaeological database.

Pipeline stages: corpus loading, notice segmentation, linguistic
preprocessing, mention extraction, concept linking, and an embedded
snapshot store with a query API.
"""

from .corpus import Document, DocumentMeta, load_corpus_dir, load_document
from .extraction import (
    Gazetteer,
    Mention,
    PeriodTable,
    TimeRange,
    extract_dates,
    extract_places,
    extract_terms,
)
from .lingproc import PosLexicon, Token, fold_text, pos_tag, tokenize
from .structure import Notice, NoticeGrammar, Zone, detect_zones, segment_notices
from .terminology import (
    Concept,
    LinkOptions,
    NormalizationRules,
    cluster_variants,
    curate,
    link_mention,
    normalize_form,
)

__version__ = "0.1.0"

__all__ = [
    "Concept",
    "Document",
    "DocumentMeta",
    "Gazetteer",
    "LinkOptions",
    "Mention",
    "NormalizationRules",
    "Notice",
    "NoticeGrammar",
    "PeriodTable",
    "PosLexicon",
    "TimeRange",
    "Token",
    "Zone",
    "cluster_variants",
    "curate",
    "detect_zones",
    "extract_dates",
    "extract_places",
    "extract_terms",
    "fold_text",
    "link_mention",
    "load_corpus_dir",
    "load_document",
    "normalize_form",
    "pos_tag",
    "segment_notices",
    "tokenize",
    "__version__",
]
