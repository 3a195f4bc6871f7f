/**
 * Wire types for the /api/* JSON contract, mirrored field for field.
 */

export type LabelMode = 'single' | 'multi';

export interface LabelDef {
  key: string;
  name: string;
  shortcut: string;
  keywords: string[];
}

export interface LabelsConfig {
  mode: LabelMode;
  labels: LabelDef[];
  reserved_shortcuts: string[];
}

export interface SessionCounts {
  annotated: number;
  total: number;
}

export interface SessionInfo {
  annotator_id: string;
  task_ids: string[];
  counts: SessionCounts;
  first_unannotated: number | null;
  randomized: boolean;
}

export interface BlockInfo {
  tag: string;
  text: string;
  char_count: number;
  link_char_count: number;
  link_density: number;
  penalty: boolean;
  doc_order: number;
  kept: boolean;
  reason: string;
}

export interface ExtractionInfo {
  raw_text: string;
  clean_text: string;
  blocks: BlockInfo[];
}

export interface UrlParts {
  scheme: string;
  host: string;
  port: number | null;
  path_segments: string[];
  query_pairs: [string, string][];
  fragment: string | null;
}

export interface UrlToken {
  token: string;
  component: string;
  start: number;
  end: number;
}

export interface HighlightSpan {
  start: number;
  end: number;
  keyword: string;
  label_key: string;
}

export interface UrlAnalysis {
  malformed: boolean;
  original: string;
  parts: UrlParts | null;
  tokens: UrlToken[];
  highlights: HighlightSpan[];
}

export interface Annotation {
  task_id: string;
  annotator_id: string;
  labels: string[];
  comment: string;
  edited_text: string | null;
  updated_at: string;
}

export interface TaskPayload {
  task: { task_id: string; url: string; html_ref: string };
  extraction: ExtractionInfo;
  html_missing: boolean;
  url_analysis: UrlAnalysis;
  own_annotation: Annotation | null;
  position: number | null;
  total: number;
}

export interface AnnotationBody {
  labels: string[];
  comment?: string;
  edited_text?: string | null;
}

export interface CommitResult {
  annotation: Annotation;
  next_position: number | null;
  counts: SessionCounts;
}

export type WaybackStatus = 'archived' | 'not_archived' | 'lookup_failed';

export interface WaybackResult {
  status: WaybackStatus;
  snapshot_url: string | null;
  snapshot_timestamp: string | null;
}
