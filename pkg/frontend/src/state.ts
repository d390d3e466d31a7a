/** Client view state. Every number displayed comes from a stored service
 * response; this module only holds and rearranges them. */

import type {
  LimitView,
  Neighborhood,
  ProtectionView,
  Received,
  ScenarioDraft,
  TransactionDraft,
  VerdictView,
} from "./types.js";

export type ComposerMode = "check" | "collude" | "cautious";

export interface VerdictRecord {
  mode: ComposerMode;
  tx: TransactionDraft;
  received: Received<VerdictView>;
  at: number;
}

export interface ViewState {
  graphId: string | null;
  sessionId: string | null;
  scenario: ScenarioDraft;
  staged: TransactionDraft[];
  focusedEntity: string | null;
  radius: number;
  neighborhood: Neighborhood | null;
  composerMode: ComposerMode;
  cautiousOwner: string;
  lastVerdict: VerdictRecord | null;
  verdictHistory: VerdictRecord[];
  limit: Received<LimitView> | null;
  limitTarget: { buyer: string; target: string } | null;
  protection: Received<ProtectionView> | null;
  withIntermediaries: boolean;
  error: { code: string; message: string } | null;
}

export const MAX_RADIUS = 3;

export function emptyScenario(): ScenarioDraft {
  return { strategic: [], foreign: [], public: [], staged: [] };
}

export function initialState(): ViewState {
  return {
    graphId: null,
    sessionId: null,
    scenario: emptyScenario(),
    staged: [],
    focusedEntity: null,
    radius: 1,
    neighborhood: null,
    composerMode: "check",
    cautiousOwner: "",
    lastVerdict: null,
    verdictHistory: [],
    limit: null,
    limitTarget: null,
    protection: null,
    withIntermediaries: false,
    error: null,
  };
}

export function clampRadius(radius: number): number {
  return Math.max(0, Math.min(MAX_RADIUS, Math.round(radius)));
}

/** Flip an entity between none -> strategic -> foreign -> public -> none. */
export function cycleScenarioTag(scenario: ScenarioDraft, entityId: string): ScenarioDraft {
  const inS = scenario.strategic.includes(entityId);
  const inF = scenario.foreign.includes(entityId);
  const inP = scenario.public.includes(entityId);
  const strip = (xs: string[]) => xs.filter((x) => x !== entityId);
  const next: ScenarioDraft = {
    strategic: strip(scenario.strategic),
    foreign: strip(scenario.foreign),
    public: strip(scenario.public),
    staged: scenario.staged,
  };
  if (!inS && !inF && !inP) next.strategic = [...next.strategic, entityId].sort();
  else if (inS) next.foreign = [...next.foreign, entityId].sort();
  else if (inF) next.public = [...next.public, entityId].sort();
  return next;
}

/** Switching sessions discards per-session panels, including the history. */
export function enterSession(state: ViewState, sessionId: string, staged: TransactionDraft[]): ViewState {
  return {
    ...state,
    sessionId,
    staged,
    lastVerdict: null,
    verdictHistory: [],
    limit: null,
    limitTarget: null,
    protection: null,
    error: null,
  };
}

export function recordVerdict(state: ViewState, record: VerdictRecord): ViewState {
  return {
    ...state,
    lastVerdict: record,
    verdictHistory: [...state.verdictHistory, record],
    error: null,
  };
}
