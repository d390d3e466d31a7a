/** Orchestration between the API client and the view state. Pure async
 * functions over injected dependencies; the DOM shell in app.ts is the only
 * browser-specific layer. */

import { ApiClient, ApiServiceError } from "./api.js";
import {
  clampRadius,
  enterSession,
  recordVerdict,
  type ComposerMode,
  type ViewState,
} from "./state.js";
import type { ScenarioDraft, TransactionDraft } from "./types.js";

export type Update = (next: ViewState) => void;

function fail(state: ViewState, err: unknown): ViewState {
  if (err instanceof ApiServiceError) {
    return { ...state, error: { code: err.code, message: err.message } };
  }
  if (err instanceof DOMException && err.name === "AbortError") {
    return state; // superseded by a newer request on the same panel
  }
  return { ...state, error: { code: "client_error", message: String(err) } };
}

export async function uploadGraph(
  api: ApiClient,
  state: ViewState,
  nodesCsv: string,
  edgesCsv: string,
): Promise<ViewState> {
  try {
    const graphId = await api.uploadGraph(nodesCsv, edgesCsv);
    return { ...state, graphId, error: null };
  } catch (err) {
    return fail(state, err);
  }
}

export async function createSession(
  api: ApiClient,
  state: ViewState,
  scenario: ScenarioDraft,
): Promise<ViewState> {
  if (!state.graphId) return state;
  try {
    const info = await api.createSession(state.graphId, scenario);
    return enterSession({ ...state, scenario }, info.session_id, info.staged);
  } catch (err) {
    return fail(state, err);
  }
}

export async function stageTransaction(
  api: ApiClient,
  state: ViewState,
  tx: TransactionDraft,
): Promise<ViewState> {
  if (!state.sessionId) return state;
  try {
    const staged = await api.stage(state.sessionId, tx);
    return { ...state, staged, error: null };
  } catch (err) {
    return fail(state, err);
  }
}

export async function unstageTransaction(
  api: ApiClient,
  state: ViewState,
  index: number,
): Promise<ViewState> {
  if (!state.sessionId) return state;
  try {
    const staged = await api.unstage(state.sessionId, index);
    return { ...state, staged, error: null };
  } catch (err) {
    return fail(state, err);
  }
}

/** Evaluate the composed transaction in the selected mode. The verdict panel
 * shows exactly what the service returned. */
export async function evaluate(
  api: ApiClient,
  state: ViewState,
  tx: TransactionDraft,
): Promise<ViewState> {
  if (!state.sessionId || !state.scenario.strategic.length) return state;
  const mode: ComposerMode = state.composerMode;
  try {
    const received =
      mode === "collude"
        ? await api.collude(state.sessionId, tx)
        : mode === "cautious"
          ? await api.cautious(state.sessionId, tx, state.cautiousOwner)
          : await api.check(state.sessionId, tx);
    return recordVerdict(state, { mode, tx, received, at: Date.now() });
  } catch (err) {
    return fail(state, err);
  }
}

export async function runLimit(
  api: ApiClient,
  state: ViewState,
  buyer: string,
  target: string,
): Promise<ViewState> {
  if (!state.sessionId) return state;
  try {
    const limit = await api.limit(state.sessionId, buyer, target);
    return { ...state, limit, limitTarget: { buyer, target }, error: null };
  } catch (err) {
    return fail(state, err);
  }
}

export async function runProtect(api: ApiClient, state: ViewState): Promise<ViewState> {
  if (!state.sessionId) return state;
  try {
    const protection = await api.protect(state.sessionId, state.withIntermediaries);
    return { ...state, protection, error: null };
  } catch (err) {
    return fail(state, err);
  }
}

export async function focusEntity(
  api: ApiClient,
  state: ViewState,
  entityId: string,
  radius?: number,
): Promise<ViewState> {
  if (!state.graphId) return state;
  const r = clampRadius(radius ?? state.radius);
  try {
    const got = await api.neighborhood(state.graphId, entityId, r);
    return {
      ...state,
      focusedEntity: entityId,
      radius: r,
      neighborhood: got.payload,
      error: null,
    };
  } catch (err) {
    return fail(state, err);
  }
}
