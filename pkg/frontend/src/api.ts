/** Fetch client for the annotation service endpoints. */

import type { InvalidPositions, StatsPayload, TagCode, TaskPayload } from "./types.js";

export class StaleRevisionError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "StaleRevisionError";
  }
}

export class InvalidTagsError extends Error {
  positions: InvalidPositions;

  constructor(detail: string, positions: InvalidPositions) {
    super(detail);
    this.name = "InvalidTagsError";
    this.positions = positions;
  }
}

export class ServiceClient {
  constructor(private baseUrl: string, private fetchFn: typeof fetch = fetch) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async nextTask(annotator: string): Promise<TaskPayload | null> {
    const response = await this.fetchFn(
      this.url(`/api/tasks/next?annotator=${encodeURIComponent(annotator)}`),
    );
    if (response.status === 404) return null; // queue exhausted
    if (!response.ok) throw new Error(`next task failed: ${response.status}`);
    return (await response.json()) as TaskPayload;
  }

  async getTask(taskId: string): Promise<TaskPayload> {
    const response = await this.fetchFn(this.url(`/api/tasks/${taskId}`));
    if (!response.ok) throw new Error(`task ${taskId} fetch failed: ${response.status}`);
    return (await response.json()) as TaskPayload;
  }

  /** Submit tags; 409 and 422 surface as typed errors for the UI flows. */
  async submitTags(
    taskId: string,
    tags: TagCode[],
    revision: number,
  ): Promise<TaskPayload> {
    const response = await this.fetchFn(this.url(`/api/tasks/${taskId}/tags`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ tags, revision }),
    });
    if (response.status === 409) {
      const body = await response.json();
      throw new StaleRevisionError(String(body.detail ?? "stale revision"));
    }
    if (response.status === 422) {
      const body = await response.json();
      const detail = body.detail ?? {};
      throw new InvalidTagsError(
        String(detail.message ?? "invalid tags"),
        (detail.positions ?? {}) as InvalidPositions,
      );
    }
    if (!response.ok) throw new Error(`submit failed: ${response.status}`);
    return (await response.json()) as TaskPayload;
  }

  async guidelines(): Promise<string> {
    const response = await this.fetchFn(this.url("/api/guidelines"));
    if (!response.ok) throw new Error(`guidelines fetch failed: ${response.status}`);
    return await response.text();
  }

  async stats(): Promise<StatsPayload> {
    const response = await this.fetchFn(this.url("/api/stats"));
    if (!response.ok) throw new Error(`stats fetch failed: ${response.status}`);
    return (await response.json()) as StatsPayload;
  }

  async exportJsonl(): Promise<string> {
    const response = await this.fetchFn(this.url("/api/export"));
    if (!response.ok) throw new Error(`export fetch failed: ${response.status}`);
    return await response.text();
  }
}
