/** Wire types for the vertiops service, mirroring docs/schema.md. */

export const SCHEMA_VERSION = 1;

export type Bound = "all" | { max: number } | { min: number };

export interface Corridor {
  from: number;
  to: number;
  length: number;
}

export interface CoverageSegment {
  from: number;
  to: number;
  uatm: number;
  bound: Bound;
}

export interface ActiveAgentConfig {
  id: number;
  step: number;
  corridor: [number, number];
  waypoint: number;
  plan: [number, number][];
}

export interface NetworkDoc {
  schema: number;
  vertiports: number[];
  uatms: number[];
  step_horizon: number;
  corridors: Corridor[];
  coverage: CoverageSegment[];
  vertiport_cover: Record<string, number[]>;
  candidates: Record<string, number>;
  agents: { declared: number | number[]; active: ActiveAgentConfig[] };
}

export interface SnapshotAgent {
  id: number;
  corridor: [number, number];
  waypoint: number;
  target: number;
  plan: [number, number][];
}

export interface PendingRelay {
  from_uatm: number;
  to_uatm: number;
  kind: string;
  payload: number[];
  enqueued_at_step: number;
}

export interface Snapshot {
  schema: number;
  step: number;
  vertiports: { id: number; closed: boolean }[];
  agents: SnapshotAgent[];
  pending_relays: PendingRelay[];
  last_verdict: string | null;
}

export interface Notice {
  agent: number;
  step: number;
  new_target: number;
  appended_leg: [number, number];
}

export interface CloseOutcome {
  vp: number;
  already_closed: boolean;
  found_own: number[];
  found_other: number[];
  notices: Notice[];
  verdict: string;
}

export interface ReopenOutcome {
  vp: number;
}

export interface AdvanceOutcome {
  step: number;
  delivered: { to_uatm: number; kind: string; payload: number[] }[];
}

export interface LandingOutcome {
  agent: number;
  requests: [number, number, number][];
  notices: Notice[];
  verdict: string;
}

export type Outcome =
  | CloseOutcome
  | ReopenOutcome
  | AdvanceOutcome
  | LandingOutcome
  | Record<string, unknown>
  | null;

export interface CommandResult {
  schema: number;
  accepted: boolean;
  outcome: Outcome;
  diagnostics: string[];
}

export interface StageRecord {
  stage: string;
  step: number;
  verdict: string;
  shown: string[];
  violated: string[];
}

export type CommandName =
  | "close"
  | "reopen"
  | "landing-request"
  | "advance"
  | "reset";

export interface Delta {
  schema: number;
  seq: number;
  command: CommandName;
  result: CommandResult;
  stages: StageRecord[];
  snapshot: Snapshot;
}

export interface AggregateLeaf {
  guard: number;
  relation: string;
  count: number;
  witnesses: number[][];
}

export interface ExplanationNode {
  atom: string;
  rule: string;
  children: ExplanationNode[];
  absent: string[];
  aggregates: AggregateLeaf[];
}

export interface ExplanationDoc {
  schema: number;
  tree: ExplanationNode;
}
