/**
 * Test doubles: an in-memory ApiClient with call tracking, plus small
 * factories for wire payloads.
 */

import { ApiError } from '../src/api.js';
import type { ApiClient } from '../src/api.js';
import type {
  AnnotationBody,
  CommitResult,
  ExtractionInfo,
  HighlightSpan,
  LabelDef,
  LabelMode,
  LabelsConfig,
  SessionInfo,
  TaskPayload,
  WaybackResult,
} from '../src/types.js';

export function makeLabel(key: string, shortcut: string, keywords: string[] = []): LabelDef {
  return { key, name: key[0].toUpperCase() + key.slice(1), shortcut, keywords };
}

export function makeConfig(mode: LabelMode, labels: LabelDef[]): LabelsConfig {
  return { mode, labels, reserved_shortcuts: ['n', 'p', 'u', 'e', 'c', '?'] };
}

export function makeExtraction(clean: string, raw?: string): ExtractionInfo {
  return { clean_text: clean, raw_text: raw ?? clean, blocks: [] };
}

export function makeTask(
  taskId: string,
  url: string,
  overrides: Partial<TaskPayload> = {},
  highlights: HighlightSpan[] = [],
): TaskPayload {
  return {
    task: { task_id: taskId, url, html_ref: `${taskId}.html` },
    extraction: makeExtraction(`Body of ${taskId}.`),
    html_missing: false,
    url_analysis: {
      malformed: false,
      original: url,
      parts: {
        scheme: 'https',
        host: 'example.com',
        port: null,
        path_segments: [],
        query_pairs: [],
        fragment: null,
      },
      tokens: [],
      highlights,
    },
    own_annotation: null,
    position: null,
    total: 0,
    ...overrides,
  };
}

export function makeSession(taskIds: string[], annotator = 'alice'): SessionInfo {
  return {
    annotator_id: annotator,
    task_ids: taskIds,
    counts: { annotated: 0, total: taskIds.length },
    first_unannotated: taskIds.length ? 0 : null,
    randomized: false,
  };
}

export interface PutCall {
  taskId: string;
  annotator: string;
  body: AnnotationBody;
}

export class MockApi implements ApiClient {
  config: LabelsConfig;
  session: SessionInfo;
  tasks = new Map<string, TaskPayload>();

  putCalls: PutCall[] = [];
  taskRequests: string[] = [];
  sessionRequests = 0;
  waybackResult: WaybackResult = {
    status: 'not_archived',
    snapshot_url: null,
    snapshot_timestamp: null,
  };
  /** next_position values handed out by successive PUTs (then null). */
  nextPositions: (number | null)[] = [];
  failNextPut: Error | null = null;
  /** When set, PUTs wait on this gate before responding. */
  putGate: Promise<void> | null = null;
  inFlightPuts = 0;
  maxInFlightPuts = 0;

  constructor(config: LabelsConfig, session: SessionInfo, tasks: TaskPayload[]) {
    this.config = config;
    this.session = session;
    for (const task of tasks) {
      this.tasks.set(task.task.task_id, task);
    }
  }

  async getConfig(): Promise<LabelsConfig> {
    return structuredClone(this.config);
  }

  async getSession(): Promise<SessionInfo> {
    this.sessionRequests += 1;
    return structuredClone(this.session);
  }

  async getTask(taskId: string): Promise<TaskPayload> {
    this.taskRequests.push(taskId);
    const task = this.tasks.get(taskId);
    if (!task) throw new ApiError(404, 'unknown_task', `no task ${taskId}`);
    return structuredClone(task);
  }

  async putAnnotation(
    taskId: string,
    annotator: string,
    body: AnnotationBody,
  ): Promise<CommitResult> {
    this.inFlightPuts += 1;
    this.maxInFlightPuts = Math.max(this.maxInFlightPuts, this.inFlightPuts);
    try {
      this.putCalls.push({ taskId, annotator, body: structuredClone(body) });
      if (this.putGate) await this.putGate;
      if (this.failNextPut) {
        const error = this.failNextPut;
        this.failNextPut = null;
        throw error;
      }
      const annotatedTasks = new Set(this.putCalls.map((c) => c.taskId));
      return {
        annotation: {
          task_id: taskId,
          annotator_id: annotator,
          labels: body.labels,
          comment: body.comment ?? '',
          edited_text: body.edited_text ?? null,
          updated_at: '2026-01-01T00:00:00Z',
        },
        next_position: this.nextPositions.length ? this.nextPositions.shift()! : null,
        counts: { annotated: annotatedTasks.size, total: this.session.task_ids.length },
      };
    } finally {
      this.inFlightPuts -= 1;
    }
  }

  async getWayback(): Promise<WaybackResult> {
    return structuredClone(this.waybackResult);
  }
}

export function keydown(target: EventTarget, key: string): void {
  target.dispatchEvent(new KeyboardEvent('keydown', { key, bubbles: true, cancelable: true }));
}
