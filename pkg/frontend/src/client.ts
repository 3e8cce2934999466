/** HTTP session client with monotone sequence numbers.
 *
 * Every keystroke is sent immediately (no debounce). Responses may
 * arrive out of order; an update is delivered only if no response for
 * a later event has been delivered yet, so the newest answer wins.
 */

import type { KeystrokeEvent, SessionOptions, TopKResult } from "./protocol.js";

export interface Update {
  seq: number;
  result: TopKResult;
  latencyMs: number;
}

export class SessionClient {
  readonly baseUrl: string;
  sessionId: string | null = null;
  /** every event accepted by the server, in send order */
  readonly eventLog: KeystrokeEvent[] = [];
  private fetchFn: typeof fetch;
  private nextSeq = 0;
  private deliveredSeq = 0;

  constructor(baseUrl: string, fetchFn: typeof fetch = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  async createSession(seeker: string, options: SessionOptions = {}): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ seeker, ...options }),
    });
    if (!res.ok) {
      throw new Error(`session create failed: ${res.status}`);
    }
    const body = (await res.json()) as { session_id: string };
    this.sessionId = body.session_id;
    return this.sessionId;
  }

  /**
   * Send one keystroke event. Resolves with the update to render, or
   * null when a newer response was already delivered (stale). Rejects
   * on network or server failure; the event is then not logged.
   */
  async send(event: KeystrokeEvent): Promise<Update | null> {
    if (!this.sessionId) {
      throw new Error("no session");
    }
    const seq = ++this.nextSeq;
    const at = this.eventLog.length;
    this.eventLog.push(event);
    const started = performance.now();
    let res: Response;
    try {
      res = await this.fetchFn(
        `${this.baseUrl}/sessions/${this.sessionId}/keystroke`,
        {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify(event),
        },
      );
    } catch (err) {
      this.eventLog.splice(at, 1);
      throw err;
    }
    if (!res.ok) {
      this.eventLog.splice(at, 1);
      throw new Error(`keystroke failed: ${res.status}`);
    }
    const result = (await res.json()) as TopKResult;
    if (seq <= this.deliveredSeq) {
      return null;
    }
    this.deliveredSeq = seq;
    return { seq, result, latencyMs: performance.now() - started };
  }

  /** Fetch the cached last result without sending a keystroke. */
  async lastResult(): Promise<TopKResult> {
    if (!this.sessionId) {
      throw new Error("no session");
    }
    const res = await this.fetchFn(
      `${this.baseUrl}/sessions/${this.sessionId}/result`,
    );
    if (!res.ok) {
      throw new Error(`result fetch failed: ${res.status}`);
    }
    return (await res.json()) as TopKResult;
  }
}
