/** Client-side store. All state comes from service snapshots and deltas;
 * the console never derives targets, plans, or closures on its own. */

import {
  AdvanceOutcome,
  CloseOutcome,
  CommandName,
  CommandResult,
  Delta,
  LandingOutcome,
  ReopenOutcome,
  SCHEMA_VERSION,
  Snapshot,
  StageRecord,
} from "./types.js";

export type FeedKind =
  | "target-change"
  | "landing-request"
  | "delivery"
  | "closure"
  | "reopen"
  | "advance"
  | "reset"
  | "error";

export interface FeedEntry {
  seq: number;
  command: CommandName;
  kind: FeedKind;
  text: string;
  /** Atom the entry links to in the explanation panel, when there is one. */
  atom?: string;
  agent?: number;
  newTarget?: number;
  step?: number;
}

export interface ConsoleState {
  snapshot: Snapshot | null;
  lastSeq: number;
  feed: FeedEntry[];
  stages: StageRecord[];
  schemaMismatch: boolean;
  pendingCommand: CommandName | null;
}

export function feedEntries(
  seq: number,
  command: CommandName,
  result: CommandResult,
): FeedEntry[] {
  if (!result.accepted) {
    return result.diagnostics.map((text) => ({
      seq,
      command,
      kind: "error",
      text,
    }));
  }
  const entries: FeedEntry[] = [];
  switch (command) {
    case "close": {
      const outcome = result.outcome as CloseOutcome;
      entries.push({
        seq,
        command,
        kind: "closure",
        text: outcome.already_closed
          ? `vertiport ${outcome.vp} already closed`
          : `vertiport ${outcome.vp} closed (${outcome.verdict})`,
      });
      for (const notice of outcome.notices) {
        entries.push({
          seq,
          command,
          kind: "target-change",
          text: `agent ${notice.agent} retargeted to vertiport ` +
            `${notice.new_target} at step ${notice.step}`,
          atom: `target_change(${notice.agent},${notice.step})`,
          agent: notice.agent,
          newTarget: notice.new_target,
          step: notice.step,
        });
      }
      break;
    }
    case "reopen": {
      const outcome = result.outcome as ReopenOutcome;
      entries.push({
        seq,
        command,
        kind: "reopen",
        text: `vertiport ${outcome.vp} reopened`,
      });
      break;
    }
    case "advance": {
      const outcome = result.outcome as AdvanceOutcome;
      entries.push({
        seq,
        command,
        kind: "advance",
        text: `advanced to step ${outcome.step}`,
        step: outcome.step,
      });
      for (const message of outcome.delivered) {
        entries.push({
          seq,
          command,
          kind: "delivery",
          text: `${message.kind}(${message.payload.join(",")}) delivered ` +
            `to uatm ${message.to_uatm}`,
        });
      }
      break;
    }
    case "landing-request": {
      const outcome = result.outcome as LandingOutcome;
      for (const [agent, step, vp] of outcome.requests) {
        entries.push({
          seq,
          command,
          kind: "landing-request",
          text: `agent ${agent} requested landing at vertiport ${vp} ` +
            `(step ${step})`,
          atom: `landing_request(${agent},${step},${vp})`,
          agent,
          step,
        });
      }
      for (const notice of outcome.notices) {
        entries.push({
          seq,
          command,
          kind: "target-change",
          text: `agent ${notice.agent} retargeted to vertiport ` +
            `${notice.new_target} at step ${notice.step}`,
          atom: `target_change(${notice.agent},${notice.step})`,
          agent: notice.agent,
          newTarget: notice.new_target,
          step: notice.step,
        });
      }
      break;
    }
    case "reset":
      entries.push({ seq, command, kind: "reset", text: "session reset" });
      break;
  }
  return entries;
}

export class ConsoleStore {
  snapshot: Snapshot | null = null;
  lastSeq = 0;
  feed: FeedEntry[] = [];
  stages: StageRecord[] = [];
  schemaMismatch = false;
  pendingCommand: CommandName | null = null;

  get state(): ConsoleState {
    return {
      snapshot: this.snapshot,
      lastSeq: this.lastSeq,
      feed: this.feed,
      stages: this.stages,
      schemaMismatch: this.schemaMismatch,
      pendingCommand: this.pendingCommand,
    };
  }

  applySnapshot(snapshot: Snapshot): void {
    if (snapshot.schema !== SCHEMA_VERSION) {
      this.schemaMismatch = true;
      return;
    }
    this.snapshot = snapshot;
  }

  /** Apply one delta. Returns false when a sequence gap was detected and
   * the caller must resync from a fresh snapshot before continuing. */
  applyDelta(delta: Delta): boolean {
    if (delta.schema !== SCHEMA_VERSION) {
      this.schemaMismatch = true;
      return true;
    }
    if (delta.seq <= this.lastSeq) {
      return true; // already seen (stream replay)
    }
    if (delta.seq !== this.lastSeq + 1) {
      return false;
    }
    this.lastSeq = delta.seq;
    this.snapshot = delta.snapshot;
    this.stages.push(...delta.stages);
    this.feed.push(...feedEntries(delta.seq, delta.command, delta.result));
    if (delta.command === "reset") {
      this.feed = this.feed.filter((entry) => entry.seq === delta.seq);
      this.stages = [];
    }
    if (this.pendingCommand === delta.command) {
      this.pendingCommand = null;
    }
    return true;
  }

  /** Record a rejected command: no delta will arrive, so the diagnostics
   * are surfaced directly as error feed entries. */
  recordRejection(command: CommandName, result: CommandResult): void {
    this.feed.push(...feedEntries(this.lastSeq, command, result));
    if (this.pendingCommand === command) {
      this.pendingCommand = null;
    }
  }

  /** Resync after a stream gap: adopt the snapshot and trust the given
   * sequence number as current. */
  resync(snapshot: Snapshot, seq: number): void {
    this.applySnapshot(snapshot);
    this.lastSeq = seq;
  }
}
