"""tagpag: self-hosted page-level annotation of scraped web pages.

Content extraction (raw and boilerplate-free text), URL decomposition with
keyword highlighting, deterministic per-annotator task ordering, durable
annotation storage with CSV export, Wayback snapshot lookups, and the HTTP
service that ties them together.
"""

from .archive import ArchiveLookup, WaybackClient, wayback_lookup
from .extraction import (
    Block,
    ClassifierConfig,
    ExtractionResult,
    classify_block,
    extract_clean_text,
    extract_raw_text,
    segment_blocks,
)
from .htmldoc import HtmlDocument, parse_document
from .ordering import (
    SessionOrder,
    advance,
    build_order,
    derive_seed,
    next_unannotated,
    position_of,
    shuffle_order,
)
from .store import (
    Annotation,
    AnnotationStore,
    LabelConfig,
    LabelDef,
    Task,
    load_labels,
    load_tasks,
    replay_log,
)
from .url_analysis import (
    HighlightSpan,
    MalformedUrl,
    UrlParts,
    UrlToken,
    highlight_url,
    parse_url,
    tokenize_url,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AnnotationStore",
    "ArchiveLookup",
    "Block",
    "ClassifierConfig",
    "ExtractionResult",
    "HighlightSpan",
    "HtmlDocument",
    "LabelConfig",
    "LabelDef",
    "MalformedUrl",
    "SessionOrder",
    "Task",
    "UrlParts",
    "UrlToken",
    "WaybackClient",
    "advance",
    "build_order",
    "classify_block",
    "derive_seed",
    "extract_clean_text",
    "extract_raw_text",
    "highlight_url",
    "load_labels",
    "load_tasks",
    "next_unannotated",
    "parse_document",
    "parse_url",
    "position_of",
    "replay_log",
    "segment_blocks",
    "shuffle_order",
    "tokenize_url",
    "wayback_lookup",
]
