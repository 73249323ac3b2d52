// Typed fetch client for the skelespector service. The base URL is empty
// (same origin) unless overridden, e.g. for a dev server on another port.

import type {
  ManifestEntry,
  MonitorPayload,
  OverlapPayload,
  SessionDoc,
  TrajectoryPoint,
  Variant,
} from "./types.js";

export class ApiClient {
  constructor(private base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) {
      throw new Error(`GET ${path} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listClips(): Promise<ManifestEntry[]> {
    return this.getJson("/api/clips");
  }

  getSession(clipId: string): Promise<SessionDoc> {
    return this.getJson(`/api/clips/${clipId}`);
  }

  getMonitor(clipId: string): Promise<MonitorPayload> {
    return this.getJson(`/api/clips/${clipId}/monitor`);
  }

  getOverlap(clipId: string, t: number): Promise<OverlapPayload> {
    return this.getJson(`/api/clips/${clipId}/overlap/${t}`);
  }

  getTrajectory(
    clipId: string,
    joint: number,
    from: number,
    to: number,
    variant: Variant,
  ): Promise<TrajectoryPoint[]> {
    const v = variant === "adversarial" ? "adv" : "benign";
    return this.getJson(`/api/clips/${clipId}/trajectory/${joint}?from=${from}&to=${to}&variant=${v}`);
  }

  frameUrl(clipId: string, t: number, variant: Variant): string {
    const v = variant === "adversarial" ? "adv" : "benign";
    return `${this.base}/api/clips/${clipId}/frames/${t}?variant=${v}`;
  }

  thumbUrl(clipId: string, segment: number): string {
    return `${this.base}/api/clips/${clipId}/thumbs/${segment}`;
  }

  async startAttack(clipId: string, epsilon: number): Promise<{ job_id: string }> {
    const response = await fetch(`${this.base}/api/clips/${clipId}/attacks`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ epsilon }),
    });
    if (!response.ok) {
      throw new Error(`attack start -> ${response.status}`);
    }
    return (await response.json()) as { job_id: string };
  }

  getJob(jobId: string): Promise<{ status: string; error: string | null }> {
    return this.getJson(`/api/jobs/${jobId}`);
  }
}
