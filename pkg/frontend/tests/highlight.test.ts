import { describe, expect, it } from 'vitest';

import { labelColorClass, segmentByByteSpans } from '../src/highlight.js';
import type { HighlightSpan } from '../src/types.js';

function span(start: number, end: number, keyword: string, labelKey = 'pol'): HighlightSpan {
  return { start, end, keyword, label_key: labelKey };
}

describe('segmentByByteSpans', () => {
  it('returns one plain segment when nothing is highlighted', () => {
    expect(segmentByByteSpans('https://example.com', [])).toEqual([
      { text: 'https://example.com', labelKey: null, keyword: null },
    ]);
  });

  it('splits around a single span', () => {
    const url = 'https://example.com/politics/x';
    expect(segmentByByteSpans(url, [span(20, 28, 'politics')])).toEqual([
      { text: 'https://example.com/', labelKey: null, keyword: null },
      { text: 'politics', labelKey: 'pol', keyword: 'politics' },
      { text: '/x', labelKey: null, keyword: null },
    ]);
  });

  it('keeps adjacent spans adjacent with no plain segment between', () => {
    const segments = segmentByByteSpans('abcdefgh', [
      span(0, 4, 'abcd', 'a'),
      span(4, 8, 'efgh', 'b'),
    ]);
    expect(segments.map((s) => s.text)).toEqual(['abcd', 'efgh']);
    expect(segments.map((s) => s.labelKey)).toEqual(['a', 'b']);
  });

  it('slices multi-byte characters on byte offsets without corruption', () => {
    // 'café' is five bytes; the span covers bytes 0..5 exactly
    const segments = segmentByByteSpans('café latte', [span(0, 5, 'café')]);
    expect(segments[0]).toEqual({ text: 'café', labelKey: 'pol', keyword: 'café' });
    expect(segments[1].text).toBe(' latte');
  });

  it('covers a span that ends at the final byte', () => {
    const segments = segmentByByteSpans('go/news', [span(3, 7, 'news')]);
    expect(segments).toHaveLength(2);
    expect(segments[1]).toEqual({ text: 'news', labelKey: 'pol', keyword: 'news' });
  });
});

describe('labelColorClass', () => {
  it('assigns classes by position in config order', () => {
    const order = ['pol', 'sci', 'other'];
    expect(labelColorClass('pol', order)).toBe('hl-0');
    expect(labelColorClass('sci', order)).toBe('hl-1');
    expect(labelColorClass('other', order)).toBe('hl-2');
  });

  it('wraps around a fixed palette and tolerates unknown keys', () => {
    const order = Array.from({ length: 10 }, (_, i) => `l${i}`);
    expect(labelColorClass('l8', order)).toBe('hl-0');
    expect(labelColorClass('l9', order)).toBe('hl-1');
    expect(labelColorClass('missing', order)).toBe('hl-x');
  });
});
