/** HTTP client for the operator service plus the console controller that
 * ties commands, the delta stream, and the store together. */

import { ConsoleStore } from "./store.js";
import {
  CommandName,
  CommandResult,
  Delta,
  ExplanationDoc,
  NetworkDoc,
  Snapshot,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown>; text(): Promise<string> }>;

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class OperatorClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (response.status >= 400) {
      throw new ServiceError(response.status, await response.text());
    }
    return (await response.json()) as T;
  }

  private async post(path: string, body?: unknown): Promise<CommandResult> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status >= 400) {
      throw new ServiceError(response.status, await response.text());
    }
    return (await response.json()) as CommandResult;
  }

  network(): Promise<NetworkDoc> {
    return this.get("/network");
  }

  state(): Promise<Snapshot> {
    return this.get("/state");
  }

  close(vp: number): Promise<CommandResult> {
    return this.post("/commands/close", { vp });
  }

  reopen(vp: number): Promise<CommandResult> {
    return this.post("/commands/reopen", { vp });
  }

  requestLanding(
    agent: number,
    corridor: [number, number],
    waypoint: number,
  ): Promise<CommandResult> {
    return this.post("/commands/landing-request", { agent, corridor, waypoint });
  }

  advance(): Promise<CommandResult> {
    return this.post("/commands/advance");
  }

  reset(): Promise<CommandResult> {
    return this.post("/commands/reset");
  }

  /** Fetch an explanation; a 404 (atom not in the model) is returned as
   * a value so the panel can render it inline rather than as a failure. */
  async explanation(
    atom: string,
  ): Promise<{ ok: true; doc: ExplanationDoc } | { ok: false; status: number; detail: string }> {
    const response = await this.fetchImpl(
      this.baseUrl + "/explanation?atom=" + encodeURIComponent(atom),
    );
    if (response.status === 200) {
      return { ok: true, doc: (await response.json()) as ExplanationDoc };
    }
    const body = (await response.json()) as { detail?: string };
    return {
      ok: false,
      status: response.status,
      detail: body.detail ?? `status ${response.status}`,
    };
  }
}

/** Parse server-sent event text into deltas. */
export function parseEventStream(text: string): Delta[] {
  return text
    .split("\n\n")
    .filter((block) => block.startsWith("data: "))
    .map((block) => JSON.parse(block.slice("data: ".length)) as Delta);
}

/** The console controller: issues commands, feeds stream deltas into the
 * store, and resyncs from a snapshot on any sequence gap. */
export class Console {
  readonly store = new ConsoleStore();

  constructor(private client: OperatorClient) {}

  async start(): Promise<void> {
    this.store.applySnapshot(await this.client.state());
  }

  private async command(
    name: CommandName,
    send: () => Promise<CommandResult>,
  ): Promise<CommandResult> {
    this.store.pendingCommand = name;
    let result: CommandResult;
    try {
      result = await send();
    } catch (error) {
      this.store.pendingCommand = null;
      throw error;
    }
    if (!result.accepted) {
      this.store.recordRejection(name, result);
    }
    return result;
  }

  close(vp: number): Promise<CommandResult> {
    return this.command("close", () => this.client.close(vp));
  }

  reopen(vp: number): Promise<CommandResult> {
    return this.command("reopen", () => this.client.reopen(vp));
  }

  requestLanding(
    agent: number,
    corridor: [number, number],
    waypoint: number,
  ): Promise<CommandResult> {
    return this.command("landing-request", () =>
      this.client.requestLanding(agent, corridor, waypoint),
    );
  }

  advance(): Promise<CommandResult> {
    return this.command("advance", () => this.client.advance());
  }

  reset(): Promise<CommandResult> {
    return this.command("reset", () => this.client.reset());
  }

  /** Apply one delta from the event stream, resyncing when out of order. */
  async onDelta(delta: Delta): Promise<void> {
    if (!this.store.applyDelta(delta)) {
      this.store.resync(await this.client.state(), delta.seq);
    }
  }

  /** Consume an async iterable of stream chunks (one SSE connection). */
  async consume(chunks: AsyncIterable<string> | Iterable<string>): Promise<void> {
    let buffer = "";
    for await (const chunk of chunks) {
      buffer += chunk;
      let boundary = buffer.indexOf("\n\n");
      while (boundary >= 0) {
        const block = buffer.slice(0, boundary);
        buffer = buffer.slice(boundary + 2);
        if (block.startsWith("data: ")) {
          await this.onDelta(
            JSON.parse(block.slice("data: ".length)) as Delta,
          );
        }
        boundary = buffer.indexOf("\n\n");
      }
    }
  }
}
