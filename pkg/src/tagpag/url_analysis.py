"""URL decomposition and keyword highlighting.

Spans are byte offsets into the original URL string (UTF-8), so they render
exactly on the displayed text. Keyword matching is raw-substring and
ASCII case-insensitive; the scheme is excluded so "http" can never hit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional
from urllib.parse import parse_qsl, unquote, urlsplit

_ALNUM_RUN = re.compile(rb"[0-9A-Za-z]+")


class MalformedUrl(ValueError):
    """The string has no scheme or no host; treat it as opaque."""


@dataclass(frozen=True)
class UrlParts:
    scheme: str
    host: str
    port: Optional[int]
    path_segments: list[str]
    query_pairs: list[tuple[str, str]]
    fragment: Optional[str]
    original: str


@dataclass(frozen=True)
class UrlToken:
    token: str
    component: str  # host | path | query | fragment
    start: int
    end: int


@dataclass(frozen=True)
class HighlightSpan:
    start: int
    end: int
    keyword: str
    label_key: str


def parse_url(url: str) -> UrlParts:
    """Generic-URI decomposition; host lowercased, original kept verbatim."""
    try:
        split = urlsplit(url)
        host = split.hostname
        port = split.port
    except ValueError as exc:
        raise MalformedUrl(url) from exc
    if not split.scheme or not host:
        raise MalformedUrl(url)
    return UrlParts(
        scheme=split.scheme,
        host=host,
        port=port,
        path_segments=[unquote(seg) for seg in split.path.split("/") if seg],
        query_pairs=parse_qsl(split.query, keep_blank_values=True),
        fragment=split.fragment or None,
        original=url,
    )


def _after_scheme(data: bytes) -> int:
    idx = data.find(b"://")
    return idx + 3 if idx >= 0 else 0


def tokenize_url(parts: UrlParts) -> list[UrlToken]:
    """Maximal alphanumeric runs in host/path/query/fragment, lowercased.

    Offsets index the UTF-8 bytes of ``parts.original``; the scheme and
    ``://`` are excluded.
    """
    data = parts.original.encode("utf-8")
    start = _after_scheme(data)

    frag_at = data.find(b"#", start)
    frag_start = frag_at if frag_at >= 0 else len(data)
    query_at = data.find(b"?", start, frag_start)
    query_start = query_at if query_at >= 0 else frag_start
    slash_at = data.find(b"/", start, query_start)
    host_end = slash_at if slash_at >= 0 else query_start

    regions = (
        ("host", start, host_end),
        ("path", host_end, query_start),
        ("query", query_start, frag_start),
        ("fragment", frag_start, len(data)),
    )
    tokens = []
    for component, lo, hi in regions:
        for match in _ALNUM_RUN.finditer(data, lo, hi):
            tokens.append(UrlToken(
                token=match.group().lower().decode("ascii"),
                component=component,
                start=match.start(),
                end=match.end(),
            ))
    return tokens


def highlight_string(original: str, labels, start_at: int = 0) -> list[HighlightSpan]:
    """Every case-insensitive keyword occurrence, overlaps resolved.

    Longer keyword wins; ties go to the smaller start, then to label order.
    Surviving spans come back sorted by start and pairwise disjoint.
    """
    haystack = original.encode("utf-8").lower()  # bytes.lower() is ASCII-only
    candidates = []
    for label_order, label in enumerate(labels):
        for keyword in label.keywords:
            needle = keyword.encode("utf-8")
            if not needle:
                continue
            pos = haystack.find(needle, start_at)
            while pos >= 0:
                candidates.append((len(needle), pos, label_order, keyword, label.key))
                pos = haystack.find(needle, pos + 1)

    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    taken: list[tuple[int, int]] = []
    spans = []
    for length, start, _, keyword, label_key in candidates:
        end = start + length
        if all(end <= lo or start >= hi for lo, hi in taken):
            taken.append((start, end))
            spans.append(HighlightSpan(start=start, end=end, keyword=keyword, label_key=label_key))
    spans.sort(key=lambda s: s.start)
    return spans


def highlight_url(parts: UrlParts, labels) -> list[HighlightSpan]:
    """Keyword highlights over a parsed URL, scheme excluded from matching."""
    start = _after_scheme(parts.original.encode("utf-8"))
    return highlight_string(parts.original, labels, start_at=start)
