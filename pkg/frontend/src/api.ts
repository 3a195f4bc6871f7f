/**
 * Thin typed client for the annotation server's JSON endpoints.
 */

import type {
  AnnotationBody,
  CommitResult,
  LabelsConfig,
  SessionInfo,
  TaskPayload,
  WaybackResult,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
  const response = await fetch(input, init);
  if (!response.ok) {
    let code = 'http_error';
    let message = `${response.status} for ${input}`;
    try {
      const body = (await response.json()) as { error?: string; message?: string };
      if (body.error) code = body.error;
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export interface ApiClient {
  getConfig(): Promise<LabelsConfig>;
  getSession(annotator: string): Promise<SessionInfo>;
  getTask(taskId: string, annotator: string): Promise<TaskPayload>;
  putAnnotation(taskId: string, annotator: string, body: AnnotationBody): Promise<CommitResult>;
  getWayback(taskId: string): Promise<WaybackResult>;
}

export function createApiClient(base = ''): ApiClient {
  const q = (value: string) => encodeURIComponent(value);
  return {
    getConfig: () => request<LabelsConfig>(`${base}/api/config`),
    getSession: (annotator) =>
      request<SessionInfo>(`${base}/api/session?annotator=${q(annotator)}`),
    getTask: (taskId, annotator) =>
      request<TaskPayload>(`${base}/api/tasks/${q(taskId)}?annotator=${q(annotator)}`),
    putAnnotation: (taskId, annotator, body) =>
      request<CommitResult>(`${base}/api/tasks/${q(taskId)}/annotation?annotator=${q(annotator)}`, {
        method: 'PUT',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
      }),
    getWayback: (taskId) => request<WaybackResult>(`${base}/api/wayback?task_id=${q(taskId)}`),
  };
}

export function scrapedHtmlUrl(taskId: string, base = ''): string {
  return `${base}/api/tasks/${encodeURIComponent(taskId)}/html`;
}

export function exportUrl(scope: string, base = ''): string {
  return `${base}/api/export.csv?scope=${encodeURIComponent(scope)}`;
}
