/** Browser shell: renders state into #app and maps DOM events onto the
 * controller. All reasoning output comes from the service responses held in
 * state; this file never computes a number. */

import { ApiClient } from "./api.js";
import * as ctl from "./controller.js";
import { renderApp } from "./render.js";
import { cycleScenarioTag, initialState, type ViewState } from "./state.js";
import type { TransactionDraft } from "./types.js";

const api = new ApiClient("");
let state: ViewState = initialState();
const root = document.getElementById("app") as HTMLElement;

function set(next: ViewState): void {
  state = next;
  root.innerHTML = renderApp(state);
}

function input(name: string): string {
  const el = root.querySelector<HTMLInputElement | HTMLTextAreaElement>(`[name="${name}"]`);
  return el ? el.value.trim() : "";
}

function readTx(): TransactionDraft | null {
  const buyer = input("tx-buyer");
  const target = input("tx-target");
  const share = Number(input("tx-share"));
  if (!buyer || !target || !(share > 0)) return null;
  return { buyer, target, share };
}

function splitIds(raw: string): string[] {
  return raw.split(",").map((s) => s.trim()).filter(Boolean);
}

async function dispatch(action: string, el: HTMLElement): Promise<void> {
  switch (action) {
    case "upload":
      set(await ctl.uploadGraph(api, state, input("nodes-csv"), input("edges-csv")));
      break;
    case "create-session":
      set(
        await ctl.createSession(api, state, {
          strategic: splitIds(input("scenario-strategic")),
          foreign: splitIds(input("scenario-foreign")),
          public: splitIds(input("scenario-public")),
          staged: [],
        }),
      );
      break;
    case "stage-tx": {
      const tx = readTx();
      if (tx) set(await ctl.stageTransaction(api, state, tx));
      break;
    }
    case "unstage":
      set(await ctl.unstageTransaction(api, state, Number(el.dataset.index)));
      break;
    case "evaluate": {
      const tx = readTx();
      if (tx) set(await ctl.evaluate(api, state, tx));
      break;
    }
    case "run-limit":
      set(await ctl.runLimit(api, state, input("limit-buyer"), input("limit-target")));
      break;
    case "run-protect":
      set(await ctl.runProtect(api, state));
      break;
    case "focus":
      if (input("focus-id")) set(await ctl.focusEntity(api, state, input("focus-id")));
      break;
    case "focus-or-tag": {
      const entity = el.dataset.entity ?? "";
      if (state.sessionId) {
        set(await ctl.focusEntity(api, state, entity));
      } else {
        // before a session exists, clicking nodes edits the scenario draft
        set({ ...state, scenario: cycleScenarioTag(state.scenario, entity) });
      }
      break;
    }
    default:
      break;
  }
}

root.addEventListener("click", (ev) => {
  const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!el) return;
  ev.preventDefault();
  void dispatch(el.dataset.action ?? "", el);
});

root.addEventListener("change", (ev) => {
  const el = ev.target as HTMLInputElement;
  if (el.name === "composer-mode") {
    set({ ...state, composerMode: el.value as ViewState["composerMode"] });
  } else if (el.name === "cautious-owner") {
    set({ ...state, cautiousOwner: el.value.trim() });
  } else if (el.name === "with-intermediaries") {
    set({ ...state, withIntermediaries: el.checked });
  } else if (el.name === "radius" && state.focusedEntity) {
    void ctl.focusEntity(api, state, state.focusedEntity, Number(el.value)).then(set);
  }
});

set(state);
