"""Lenient HTML parsing into a lightweight element tree.

Parsing is total: any byte sequence yields a document. Malformed markup is
recovered with HTML5-style implied end tags (``<p>`` closes an open ``<p>``,
``<li>`` closes an open ``<li>``, and so on) and stray end tags are ignored.
Undecodable bytes become U+FFFD instead of being dropped.
"""

from __future__ import annotations

import codecs
import re
from html.parser import HTMLParser
from typing import Optional, Union

# Elements that never take content and are never pushed on the open stack.
VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

_HEADINGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})

# Start tags that implicitly close an open <p>.
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "dialog",
    "dd", "dl", "dt", "div", "fieldset", "figcaption", "figure", "footer",
    "form", "header", "hr", "li", "main", "nav", "ol", "p", "pre",
    "section", "table", "ul",
}) | _HEADINGS

_META_CHARSET_RE = re.compile(
    r"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9][a-zA-Z0-9._:-]*)""",
    re.IGNORECASE,
)


class Element:
    """One element node: tag name, attributes, ordered children.

    Children are either ``Element`` instances or plain strings (text nodes).
    """

    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag: str, attrs: Optional[dict] = None):
        self.tag = tag
        self.attrs = attrs or {}
        self.children: list[Union["Element", str]] = []

    def append_text(self, text: str) -> None:
        # Merge adjacent text nodes so downstream walks see one node per run.
        if self.children and isinstance(self.children[-1], str):
            self.children[-1] += text
        else:
            self.children.append(text)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<Element {self.tag} ({len(self.children)} children)>"


class HtmlDocument:
    """Parsed page: element tree plus the charset used for decoding."""

    __slots__ = ("root", "source_charset")

    def __init__(self, root: Element, source_charset: str):
        self.root = root
        self.source_charset = source_charset


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Element("#document")
        self._stack = [self.root]

    # -- implied end tags -------------------------------------------------

    def _closes(self, tag: str, open_tag: str) -> bool:
        if open_tag == "p" and tag in _P_CLOSERS:
            return True
        if tag == "li" and open_tag == "li":
            return True
        if tag in ("dd", "dt") and open_tag in ("dd", "dt"):
            return True
        if tag in ("td", "th") and open_tag in ("td", "th"):
            return True
        if tag == "tr" and open_tag in ("tr", "td", "th"):
            return True
        if tag in _HEADINGS and open_tag in _HEADINGS:
            return True
        return False

    # -- parser callbacks --------------------------------------------------

    def handle_starttag(self, tag, attrs):
        while len(self._stack) > 1 and self._closes(tag, self._stack[-1].tag):
            self._stack.pop()
        attr_map: dict = {}
        for name, value in attrs:
            attr_map.setdefault(name, value if value is not None else "")
        node = Element(tag, attr_map)
        self._stack[-1].children.append(node)
        if tag not in VOID_ELEMENTS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        # The self-closing slash carries no meaning for HTML elements.
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            if tag == "br":  # legacy </br> behaves like <br>
                self._stack[-1].children.append(Element("br"))
            return
        for depth in range(len(self._stack) - 1, 0, -1):
            if self._stack[depth].tag == tag:
                del self._stack[depth:]
                return
        # Stray end tag: no matching open element, ignore.

    def handle_data(self, data):
        if data:
            self._stack[-1].append_text(data)

    # Comments, doctype, processing instructions carry no content.
    def handle_comment(self, data):
        pass

    def handle_decl(self, decl):
        pass

    def handle_pi(self, data):
        pass


def _codec_for(label: Optional[str]) -> Optional[str]:
    if not label:
        return None
    try:
        return codecs.lookup(label).name
    except LookupError:
        return None


def sniff_charset(data: bytes) -> Optional[str]:
    """Charset declared by a meta tag within the first 1024 bytes, if any."""
    head = data[:1024].decode("latin-1", errors="replace")
    match = _META_CHARSET_RE.search(head)
    if match:
        return _codec_for(match.group(1))
    return None


def parse_document(data: bytes, charset_hint: Optional[str] = None) -> HtmlDocument:
    """Parse raw page bytes into a document tree. Never raises on bad input.

    Decoding picks, in order: the caller's charset hint, a meta-declared
    charset found in the first 1024 bytes, then UTF-8. Decoding always uses
    replacement so undecodable sequences surface as U+FFFD.
    """
    charset = _codec_for(charset_hint) or sniff_charset(data) or "utf-8"
    text = data.decode(charset, errors="replace")
    if text.startswith("﻿"):
        text = text[1:]
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    return HtmlDocument(builder.root, charset)
