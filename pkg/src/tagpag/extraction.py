"""Two text views of a page: raw text and boilerplate-free clean text.

Raw text keeps every human-visible string with markup removed. Clean text
drops blocks that look like navigation, ads, or other chrome, judged by a
transparent heuristic: tag/class blacklist, minimum length, and link
density. Every keep/drop decision is returned as a ``Block`` so callers can
inspect the evidence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .htmldoc import Element, HtmlDocument

# Subtrees whose text is never user-visible content.
SKIPPED_TAGS = frozenset({"script", "style", "noscript", "template", "iframe", "svg"})

# Tags that break the text flow (emit a line break in raw text).
BLOCK_TAGS = frozenset({
    "p", "div", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6",
    "td", "tr", "table", "blockquote", "pre", "br", "article", "section",
    "header", "footer", "nav", "aside", "figure", "figcaption", "dd", "dt", "dl",
})

HEADING_TAGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})
ITEM_TAGS = frozenset({"li", "td", "dd", "dt"})

# Candidate blocks collected in document order, outermost wins.
CANDIDATE_TAGS = HEADING_TAGS | ITEM_TAGS | frozenset({"p", "blockquote", "pre", "figcaption"})
CONTAINER_TAGS = frozenset({"div", "section", "article"})

PENALTY_TAGS = frozenset({"nav", "header", "footer", "aside", "form"})
PENALTY_TOKENS = frozenset({
    "nav", "menu", "footer", "header", "sidebar", "banner", "ad", "ads",
    "advert", "promo", "cookie", "consent", "share", "social", "comment",
    "related", "breadcrumb", "widget",
})

_ANY_WS = re.compile(r"\s+")
_SPACE_TAB = re.compile(r"[^\S\n]+")  # whitespace except newline
_BLANK_RUN = re.compile(r"\n{3,}")
_ATTR_TOKEN_SPLIT = re.compile(r"[-_\s]+")

_BOUNDARY = object()


@dataclass
class Block:
    """One keep/drop decision unit with the evidence behind it."""

    tag: str
    text: str
    char_count: int
    link_char_count: int
    link_density: float
    penalty: bool
    doc_order: int
    kept: bool = False
    reason: str = ""


@dataclass(frozen=True)
class ClassifierConfig:
    """Keep/drop thresholds. Defaults drop menus while keeping short headings."""

    min_chars: int = 25
    max_link_density: float = 0.33
    heading_min_chars: int = 3
    heading_max_link_density: float = 0.2
    item_min_chars: int = 60
    item_max_link_density: float = 0.2


DEFAULT_CLASSIFIER = ClassifierConfig()


@dataclass
class ExtractionResult:
    raw_text: str
    clean_text: str
    blocks: list[Block] = field(default_factory=list)


def normalize_whitespace(text: str) -> str:
    """Collapse space runs, trim line edges, cap blank runs at one blank line.

    Idempotent: applying it to its own output changes nothing.
    """
    lines = [_SPACE_TAB.sub(" ", line).strip() for line in text.split("\n")]
    collapsed = _BLANK_RUN.sub("\n\n", "\n".join(lines))
    return collapsed.strip()


def _collect_fragments(el: Element, parts: list, in_pre: bool) -> None:
    for child in el.children:
        if isinstance(child, str):
            if in_pre:
                parts.append(_SPACE_TAB.sub(" ", child))
            else:
                parts.append(_ANY_WS.sub(" ", child))
            continue
        tag = child.tag
        if tag in SKIPPED_TAGS:
            continue
        if tag == "br":
            parts.append(_BOUNDARY)
            continue
        is_block = tag in BLOCK_TAGS
        if is_block:
            parts.append(_BOUNDARY)
        _collect_fragments(child, parts, in_pre or tag == "pre")
        if is_block:
            parts.append(_BOUNDARY)


def _render_fragments(parts: list) -> str:
    buf: list[str] = []
    for part in parts:
        if part is _BOUNDARY:
            if buf and not buf[-1].endswith("\n"):
                buf.append("\n")
        elif part:
            # Whitespace between two block boundaries must not open a line.
            if buf and buf[-1].endswith("\n") and "\n" not in part and not part.strip():
                continue
            buf.append(part)
    return normalize_whitespace("".join(buf))


def _subtree_text(el: Element) -> str:
    parts: list = []
    _collect_fragments(el, parts, in_pre=el.tag == "pre")
    return _render_fragments(parts)


def extract_raw_text(doc: HtmlDocument) -> str:
    """All visible text, markup removed, block boundaries as line breaks."""
    return _subtree_text(doc.root)


def _char_counts(el: Element, in_link: bool = False) -> tuple[int, int]:
    total = 0
    link = 0
    for child in el.children:
        if isinstance(child, str):
            n = sum(1 for c in child if not c.isspace())
            total += n
            if in_link:
                link += n
        elif child.tag not in SKIPPED_TAGS:
            t, l = _char_counts(child, in_link or child.tag == "a")
            total += t
            link += l
    return total, link


def _attrs_blacklisted(attrs: dict) -> bool:
    for name in ("class", "id"):
        value = attrs.get(name)
        if not value:
            continue
        for token in _ATTR_TOKEN_SPLIT.split(value.lower()):
            if token in PENALTY_TOKENS:
                return True
    return False


def _has_direct_text(el: Element) -> bool:
    return any(isinstance(c, str) and c.strip() for c in el.children)


def _make_block(el: Element, penalty: bool, doc_order: int) -> Block:
    total, link = _char_counts(el)
    return Block(
        tag=el.tag,
        text=_subtree_text(el),
        char_count=total,
        link_char_count=link,
        link_density=link / max(total, 1),
        penalty=penalty,
        doc_order=doc_order,
    )


def segment_blocks(doc: HtmlDocument) -> list[Block]:
    """Candidate content blocks in document order.

    Candidates are paragraph-like tags, plus div/section/article elements
    holding direct text. An element nested inside a collected candidate is
    not collected again. Penalty marks blacklisted tags or class/id tokens
    on the element or any ancestor.
    """
    blocks: list[Block] = []

    def walk(el: Element, penalized: bool) -> None:
        for child in el.children:
            if isinstance(child, str):
                continue
            tag = child.tag
            if tag in SKIPPED_TAGS:
                continue
            pen = penalized or tag in PENALTY_TAGS or _attrs_blacklisted(child.attrs)
            if tag in CANDIDATE_TAGS or (tag in CONTAINER_TAGS and _has_direct_text(child)):
                blocks.append(_make_block(child, pen, len(blocks)))
            else:
                walk(child, pen)

    walk(doc.root, False)
    return blocks


def classify_block(block: Block, thresholds: ClassifierConfig = DEFAULT_CLASSIFIER) -> tuple[bool, str]:
    """Pure keep/drop decision for one block. Reason codes:
    kept, penalized, too_short, too_linky."""
    if block.penalty:
        return False, "penalized"
    if block.tag in HEADING_TAGS:
        min_chars = thresholds.heading_min_chars
        max_density = thresholds.heading_max_link_density
    elif block.tag in ITEM_TAGS:
        min_chars = thresholds.item_min_chars
        max_density = thresholds.item_max_link_density
    else:
        min_chars = thresholds.min_chars
        max_density = thresholds.max_link_density
    if block.char_count < min_chars:
        return False, "too_short"
    if block.link_density > max_density:
        return False, "too_linky"
    return True, "kept"


def extract_clean_text(
    doc: HtmlDocument,
    thresholds: ClassifierConfig = DEFAULT_CLASSIFIER,
) -> ExtractionResult:
    """Segment, classify, and join the kept blocks with one blank line each.

    A page where every block is dropped yields an empty clean text; callers
    fall back to the raw view.
    """
    blocks = segment_blocks(doc)
    for block in blocks:
        block.kept, block.reason = classify_block(block, thresholds)
    clean_text = "\n\n".join(b.text for b in blocks if b.kept)
    return ExtractionResult(
        raw_text=extract_raw_text(doc),
        clean_text=clean_text,
        blocks=blocks,
    )
