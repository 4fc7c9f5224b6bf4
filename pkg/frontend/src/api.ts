import type { OutEvent, PointerMessage, StateSnapshot } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: unknown,
  ) {
    super(`server returned ${status}`);
  }
}

export class ApiClient {
  constructor(readonly base: string) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method: body === undefined ? "GET" : "POST",
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      throw new ApiError(resp.status, payload);
    }
    return payload as T;
  }

  getState(): Promise<StateSnapshot> {
    return this.request<StateSnapshot>("/state");
  }

  async postMode(mode: string): Promise<void> {
    await this.request("/mode", { mode });
  }

  async postPointer(msg: PointerMessage): Promise<void> {
    await this.request("/pointer", msg);
  }

  /**
   * Consume the line-delimited event stream.  Resolves when the server
   * closes the connection; the caller decides whether to reconnect and
   * re-bootstrap.  Returns an abort function.
   */
  streamEvents(onEvent: (e: OutEvent) => void, onEnd: (err: unknown) => void): () => void {
    const controller = new AbortController();
    (async () => {
      try {
        const resp = await fetch(this.base + "/events", { signal: controller.signal });
        if (!resp.ok || resp.body === null) {
          throw new ApiError(resp.status, null);
        }
        const reader = resp.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let nl;
          while ((nl = buffer.indexOf("\n")) >= 0) {
            const line = buffer.slice(0, nl).trim();
            buffer = buffer.slice(nl + 1);
            if (line) {
              onEvent(JSON.parse(line) as OutEvent);
            }
          }
        }
        onEnd(null);
      } catch (err) {
        onEnd(err);
      }
    })();
    return () => controller.abort();
  }
}
