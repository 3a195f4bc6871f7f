/**
 * Turn byte-offset highlight spans into renderable string segments.
 *
 * The server computes span offsets into the UTF-8 encoding of the original
 * URL, so slicing must happen on bytes and only the slices get decoded back
 * to text. Spans arrive sorted and non-overlapping; both are preserved here.
 */

import type { HighlightSpan } from './types.js';

export interface UrlSegment {
  text: string;
  /** Key of the label whose keyword matched, or null for plain text. */
  labelKey: string | null;
  keyword: string | null;
}

export function segmentByByteSpans(original: string, spans: HighlightSpan[]): UrlSegment[] {
  const bytes = new TextEncoder().encode(original);
  const decoder = new TextDecoder();
  const segments: UrlSegment[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      segments.push({
        text: decoder.decode(bytes.subarray(cursor, span.start)),
        labelKey: null,
        keyword: null,
      });
    }
    segments.push({
      text: decoder.decode(bytes.subarray(span.start, span.end)),
      labelKey: span.label_key,
      keyword: span.keyword,
    });
    cursor = span.end;
  }
  if (cursor < bytes.length) {
    segments.push({ text: decoder.decode(bytes.subarray(cursor)), labelKey: null, keyword: null });
  }
  return segments;
}

/** Stable per-label color class, assigned by the label's position in config order. */
export function labelColorClass(labelKey: string, labelOrder: string[]): string {
  const index = labelOrder.indexOf(labelKey);
  return `hl-${index >= 0 ? index % 8 : 'x'}`;
}
