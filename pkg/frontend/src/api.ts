// Thin client for the scenl service. All state lives server-side; the
// editor only ever talks HTTP.

import type { RegistryJson } from "./palette.js";

export interface DiagnosticJson {
  severity: "error" | "warning";
  code: string;
  message: string;
  span: [number, number];
}

export interface CheckResult {
  diagnostics: DiagnosticJson[];
  canonical: string | null;
}

export interface ScenarioMeta {
  id: string;
  name: string;
  status: string;
  macro: boolean;
  created: string;
  updated: string;
}

export interface ScenarioDoc extends ScenarioMeta {
  source: string;
  diagnostics: DiagnosticJson[];
}

export interface SnapshotJson {
  scenario_id: string | null;
  mode: string | null;
  status: string;
  clock: number | null;
  records_total: number;
  trace_tail: Record<string, unknown>[];
  branches?: { id: number; wait: string }[];
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  const raw = await resp.text();
  const body = raw ? JSON.parse(raw) : null;
  if (!resp.ok) {
    throw new ServiceError(
      resp.status,
      body?.error ?? "http-error",
      body?.message ?? `HTTP ${resp.status}`,
    );
  }
  return body as T;
}

export class ServiceClient {
  constructor(public base: string = "") {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => unwrap<T>(r));
  }

  registry(): Promise<RegistryJson> {
    return fetch(this.url("/registry")).then((r) => unwrap<RegistryJson>(r));
  }

  check(source: string): Promise<CheckResult> {
    return this.post("/check", { source });
  }

  scenarios(): Promise<{ scenarios: ScenarioMeta[] }> {
    return fetch(this.url("/scenarios")).then((r) => unwrap(r));
  }

  scenario(id: string): Promise<ScenarioDoc> {
    return fetch(this.url(`/scenarios/${id}`)).then((r) => unwrap<ScenarioDoc>(r));
  }

  createScenario(name: string, source: string, macro = false): Promise<ScenarioDoc> {
    return this.post("/scenarios", { name, source, macro });
  }

  updateScenario(id: string, fields: { name?: string; source?: string }): Promise<ScenarioDoc> {
    return fetch(this.url(`/scenarios/${id}`), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(fields),
    }).then((r) => unwrap<ScenarioDoc>(r));
  }

  deleteScenario(id: string): Promise<void> {
    return fetch(this.url(`/scenarios/${id}`), { method: "DELETE" }).then((r) => {
      if (!r.ok && r.status !== 204) {
        throw new ServiceError(r.status, "http-error", `HTTP ${r.status}`);
      }
    });
  }

  start(id: string, mode: "manual" | "live" = "manual"): Promise<SnapshotJson> {
    return this.post("/run/start", { id, mode });
  }

  stop(): Promise<unknown> {
    return this.post("/run/stop", {});
  }

  tick(count = 1): Promise<SnapshotJson> {
    return this.post("/run/tick", { count });
  }

  inject(
    sensor: string,
    event: string,
    value: unknown,
    likelihood: number,
  ): Promise<SnapshotJson> {
    return this.post("/run/inject", { sensor, event, value, likelihood });
  }

  snapshot(): Promise<SnapshotJson> {
    return fetch(this.url("/run/snapshot")).then((r) => unwrap<SnapshotJson>(r));
  }
}

// --- broadcast stream --------------------------------------------------------

/**
 * Incremental NDJSON line splitter. Feed it decoded chunks; it returns
 * complete lines and keeps the unfinished remainder for the next chunk.
 */
export class LineBuffer {
  private rest = "";

  push(chunk: string): string[] {
    this.rest += chunk;
    const lines = this.rest.split("\n");
    this.rest = lines.pop() ?? "";
    return lines.filter((l) => l.trim().length > 0);
  }
}

export interface StreamCallbacks {
  onRecord: (record: Record<string, unknown>) => void;
  /** Fires on every (re)connect; reconcile against /run/snapshot here. */
  onOpen?: () => void;
  onDown?: () => void;
}

/**
 * Subscribe to /run/stream. The connection auto-reconnects with capped
 * backoff; a subscriber only sees records broadcast after it attached,
 * so onOpen is the moment to pull a snapshot and fill any gap. Returns
 * an unsubscribe function.
 */
export function openStream(base: string, callbacks: StreamCallbacks): () => void {
  let closed = false;
  let retryMs = 1000;

  const connect = async () => {
    if (closed) {
      return;
    }
    try {
      const resp = await fetch(base.replace(/\/$/, "") + "/run/stream");
      if (!resp.ok || !resp.body) {
        throw new Error(`stream HTTP ${resp.status}`);
      }
      retryMs = 1000;
      callbacks.onOpen?.();
      const reader = resp.body.getReader();
      const decoder = new TextDecoder();
      const buffer = new LineBuffer();
      for (;;) {
        const { done, value } = await reader.read();
        if (done || closed) {
          break;
        }
        for (const line of buffer.push(decoder.decode(value, { stream: true }))) {
          try {
            callbacks.onRecord(JSON.parse(line));
          } catch {
            // tolerate a torn frame; the next snapshot reconcile heals it
          }
        }
      }
    } catch {
      // fall through to the retry below
    }
    if (!closed) {
      callbacks.onDown?.();
      setTimeout(connect, retryMs);
      retryMs = Math.min(retryMs * 2, 8000);
    }
  };

  void connect();
  return () => {
    closed = true;
  };
}
