/**
 * Thin client over the annotation service's HTTP+JSON endpoints — the only
 * network surface the UI touches. Submissions are validated before leaving
 * and retried once on network failure (the server's last-write-wins
 * semantics make a duplicate harmless).
 */

import {
  AnnotationRecord,
  AnnotationTask,
  ValidationError,
  validateAnnotation,
} from "./schema.js";

export interface AgreementSnapshot {
  polarity: number | null;
  subjectivity: number | null;
  gestures: number | null;
  computable: boolean;
  progress: Record<string, { done: number; total: number }>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public kind: string,
    detail: string,
  ) {
    super(`${kind}: ${detail}`);
  }
}

type Fetch = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: Fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch {
      // one optimistic retry; the server resolves duplicates by LWW
      response = await this.fetchImpl(this.baseUrl + path, init);
    }
    if (!response.ok) {
      let kind = "HttpError";
      let detail = String(response.status);
      try {
        const body = await response.json();
        kind = body.error ?? kind;
        detail = body.detail ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, kind, detail);
    }
    return response;
  }

  async nextTask(annotator: string): Promise<AnnotationTask | null> {
    const response = await this.request(
      `/api/tasks/next?annotator=${encodeURIComponent(annotator)}`,
    );
    const body = await response.json();
    return body.task;
  }

  async submit(record: AnnotationRecord): Promise<void> {
    const valid = validateAnnotation(record);
    await this.request("/api/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(valid),
    });
  }

  async agreement(): Promise<AgreementSnapshot> {
    const response = await this.request("/api/agreement");
    return response.json();
  }

  async exportManifest(): Promise<string> {
    const response = await this.request("/api/export");
    return response.text();
  }
}

export { ValidationError };
