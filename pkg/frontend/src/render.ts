/** Pure view functions: state in, HTML string out. No DOM access, so the
 * whole surface is testable without a browser. */

import type { ViewState, VerdictRecord } from "./state.js";
import { MAX_RADIUS } from "./state.js";
import type {
  EdgeView,
  EntityView,
  Neighborhood,
  TransactionDraft,
  WitnessView,
} from "./types.js";

export function esc(text: unknown): string {
  return String(text)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(share: number): string {
  return `${(share * 100).toFixed(2).replace(/\.?0+$/, "")}%`;
}

/** Display path for a witness: foreign party, then the composed transaction's
 * target when the foreign party is its buyer, then the strategic company.
 * Pure presentation over service-reported facts. */
export function witnessPath(w: WitnessView, tx: TransactionDraft | null): string[] {
  const foreigners = Array.isArray(w.foreign) ? w.foreign : [w.foreign];
  const head = foreigners.join("+");
  const path = [head];
  if (tx && foreigners.includes(tx.buyer) && tx.target !== w.strategic) {
    path.push(tx.target);
  }
  path.push(w.strategic);
  return path;
}

export function renderWitness(w: WitnessView, tx: TransactionDraft | null): string {
  const path = witnessPath(w, tx).map(esc).join(" &rarr; ");
  return (
    `<li class="witness" data-strategic="${esc(w.strategic)}">` +
    `<span class="witness-path">${path}</span>` +
    `<span class="witness-share">${esc(pct(w.control_share))}</span></li>`
  );
}

export function renderVerdict(record: VerdictRecord | null, strategicConfigured: boolean): string {
  if (!strategicConfigured) {
    return `<div class="verdict"><p class="hint">no strategic companies configured</p></div>`;
  }
  if (!record) {
    return `<div class="verdict"><p class="hint">compose a transaction to evaluate it</p></div>`;
  }
  const v = record.received.payload;
  const badge = v.takeover
    ? `<span class="badge takeover">takeover</span>`
    : `<span class="badge clear">no takeover</span>`;
  const witnesses = v.witnesses.length
    ? `<ul class="witnesses">${v.witnesses.map((w) => renderWitness(w, record.tx)).join("")}</ul>`
    : "";
  return (
    `<div class="verdict" data-mode="${esc(record.mode)}">${badge}${witnesses}` +
    `<details class="raw"><summary>service response</summary>` +
    `<pre class="raw-verdict">${esc(record.received.rawText)}</pre></details></div>`
  );
}

export function renderStagedList(staged: TransactionDraft[]): string {
  if (!staged.length) return `<p class="hint">no staged transactions</p>`;
  const rows = staged
    .map(
      (t, k) =>
        `<li class="staged-tx">${esc(t.buyer)} buys ${esc(pct(t.share))} of ${esc(t.target)}` +
        (t.seller ? ` from ${esc(t.seller)}` : "") +
        ` <button data-action="unstage" data-index="${k}">remove</button></li>`,
    )
    .join("");
  return `<ol class="staged">${rows}</ol>`;
}

export function renderScenarioEditor(state: ViewState): string {
  const s = state.scenario;
  const row = (label: string, key: string, values: string[]) =>
    `<label>${label} <input name="scenario-${key}" value="${esc(values.join(","))}" ` +
    `placeholder="comma-separated ids"></label>`;
  return (
    `<form data-form="scenario" class="scenario-editor">` +
    row("strategic (S)", "strategic", s.strategic) +
    row("foreign (F)", "foreign", s.foreign) +
    row("public (P)", "public", s.public) +
    `<button data-action="create-session">start session</button></form>` +
    `<p class="hint">click a node in the neighborhood view to cycle its tag</p>`
  );
}

function nodeClass(e: EntityView, scenario: ViewState["scenario"]): string {
  const cls = ["node", `kind-${e.kind}`];
  if (e.strategic || scenario.strategic.includes(e.id)) cls.push("strategic");
  if (e.foreign || scenario.foreign.includes(e.id)) cls.push("foreign");
  if (e.public || scenario.public.includes(e.id)) cls.push("public");
  return cls.join(" ");
}

interface Point {
  x: number;
  y: number;
}

/** Deterministic radial layout: the center entity in the middle, everyone
 * else on a ring, sorted by id. */
export function layoutNeighborhood(n: Neighborhood, size = 560): Map<string, Point> {
  const pos = new Map<string, Point>();
  const c = size / 2;
  pos.set(n.center, { x: c, y: c });
  const others = n.entities.map((e) => e.id).filter((id) => id !== n.center).sort();
  const r = c - 70;
  others.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / Math.max(others.length, 1) - Math.PI / 2;
    pos.set(id, { x: c + r * Math.cos(angle), y: c + r * Math.sin(angle) });
  });
  return pos;
}

function edgeLine(a: Point, b: Point, cls: string, label: string): string {
  const mx = (a.x + b.x) / 2;
  const my = (a.y + b.y) / 2;
  return (
    `<line class="${cls}" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"` +
    ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" marker-end="url(#arrow)"></line>` +
    `<text class="edge-label" x="${mx.toFixed(1)}" y="${(my - 4).toFixed(1)}">${esc(label)}</text>`
  );
}

export function renderNeighborhood(state: ViewState): string {
  const n = state.neighborhood;
  if (!n) return `<p class="hint">focus an entity to explore its surroundings</p>`;
  const size = 560;
  const pos = layoutNeighborhood(n, size);
  const solid = n.edges
    .map((e: EdgeView) => {
      const a = pos.get(e.owner);
      const b = pos.get(e.owned);
      return a && b ? edgeLine(a, b, "edge", pct(e.share)) : "";
    })
    .join("");
  const dashed = state.staged
    .map((t) => {
      const a = pos.get(t.buyer);
      const b = pos.get(t.target);
      return a && b ? edgeLine(a, b, "edge staged-edge", pct(t.share)) : "";
    })
    .join("");
  const nodes = n.entities
    .map((e) => {
      const p = pos.get(e.id);
      if (!p) return "";
      return (
        `<g class="${nodeClass(e, state.scenario)}" data-action="focus-or-tag"` +
        ` data-entity="${esc(e.id)}" transform="translate(${p.x.toFixed(1)},${p.y.toFixed(1)})">` +
        `<circle r="16"></circle><text dy="4">${esc(e.id)}</text></g>`
      );
    })
    .join("");
  const truncated = n.truncated ? `<p class="hint">view truncated at 300 nodes</p>` : "";
  return (
    `<svg viewBox="0 0 ${size} ${size}" class="graph">` +
    `<defs><marker id="arrow" viewBox="0 0 8 8" refX="20" refY="4" markerWidth="7"` +
    ` markerHeight="7" orient="auto"><path d="M0,0 L8,4 L0,8 z"></path></marker></defs>` +
    `${solid}${dashed}${nodes}</svg>${truncated}` +
    `<form data-form="radius"><label>radius <input type="number" name="radius" min="0"` +
    ` max="${MAX_RADIUS}" value="${state.radius}"></label></form>`
  );
}

export function renderComposer(state: ViewState): string {
  const strategicConfigured = state.scenario.strategic.length > 0;
  const disabled = state.sessionId && strategicConfigured ? "" : " disabled";
  const mode = (m: string, label: string) =>
    `<label><input type="radio" name="composer-mode" value="${m}"` +
    `${state.composerMode === m ? " checked" : ""}> ${label}</label>`;
  const cautious =
    state.composerMode === "cautious"
      ? `<label>assume residuals owned by <input name="cautious-owner"` +
        ` value="${esc(state.cautiousOwner)}"></label>`
      : "";
  return (
    `<form data-form="composer" class="composer">` +
    `<label>buyer <input name="tx-buyer"></label>` +
    `<label>target <input name="tx-target"></label>` +
    `<label>share <input name="tx-share" type="number" step="0.01" min="0" max="1"></label>` +
    `<div class="modes">${mode("check", "check")}${mode("collude", "collusion")}` +
    `${mode("cautious", "cautious")}</div>${cautious}` +
    `<button data-action="evaluate"${disabled}>evaluate</button>` +
    `<button data-action="stage-tx"${disabled}>stage without evaluating</button></form>` +
    renderVerdict(state.lastVerdict, strategicConfigured)
  );
}

export function renderLimitPanel(state: ViewState): string {
  const form =
    `<form data-form="limit"><label>buyer <input name="limit-buyer"` +
    ` value="${esc(state.limitTarget?.buyer ?? "")}"></label>` +
    `<label>target <input name="limit-target" value="${esc(state.limitTarget?.target ?? "")}"></label>` +
    `<button data-action="run-limit"${state.sessionId ? "" : " disabled"}>compute limit</button></form>`;
  if (!state.limit) return `<div class="panel-limit">${form}</div>`;
  const v = state.limit.payload;
  const binding = v.binding_strategic
    ? `<span class="binding">binding strategic: <b>${esc(v.binding_strategic)}</b></span>`
    : `<span class="binding">no strategic company binds</span>`;
  return (
    `<div class="panel-limit">${form}` +
    `<input type="range" class="limit-slider" min="0" max="1" step="0.0001"` +
    ` value="${v.max_share}" disabled>` +
    `<p class="limit-reading">max acquirable: <b>${esc(pct(v.max_share))}</b> ${binding}</p>` +
    `<details class="raw"><summary>service response</summary>` +
    `<pre class="raw-limit">${esc(state.limit.rawText)}</pre></details></div>`
  );
}

export function renderProtectPanel(state: ViewState): string {
  const toggle =
    `<label><input type="checkbox" name="with-intermediaries"` +
    `${state.withIntermediaries ? " checked" : ""}> allow one intermediary</label>` +
    `<button data-action="run-protect"${state.sessionId ? "" : " disabled"}>plan protection</button>`;
  if (!state.protection) return `<form data-form="protect" class="panel-protect">${toggle}</form>`;
  const v = state.protection.payload;
  const rows = v.acquisitions
    .map((a) => `<li>${esc(a.holder)} acquires ${esc(pct(a.delta))} of ${esc(a.target)}</li>`)
    .join("");
  const options = Object.entries(v.options)
    .map(([s, cands]) => {
      const routes = cands
        .map((c) => {
          const label = c.intermediary ? `via ${esc(c.intermediary)}` : "direct";
          const steps = c.acquisitions
            .map((a) => `${esc(pct(a.delta))} of ${esc(a.target)}`)
            .join(" + ");
          return `<li class="route">${label}: ${steps} (total ${esc(pct(c.total))})</li>`;
        })
        .join("");
      return `<li class="options-for">${esc(s)}<ul>${routes}</ul></li>`;
    })
    .join("");
  const risk = v.residual_risk
    ? `<p class="badge takeover">residual risk: full protection not reachable</p>`
    : "";
  return (
    `<form data-form="protect" class="panel-protect">${toggle}</form>${risk}` +
    `<ul class="acquisitions">${rows || "<li>nothing to acquire</li>"}</ul>` +
    (options ? `<h4>routes considered</h4><ul class="options">${options}</ul>` : "") +
    `<details class="raw"><summary>service response</summary>` +
    `<pre class="raw-protect">${esc(state.protection.rawText)}</pre></details>`
  );
}

export function renderHistory(state: ViewState): string {
  if (!state.verdictHistory.length) return "";
  const rows = state.verdictHistory
    .map((r) => {
      const v = r.received.payload;
      const cls = v.takeover ? "takeover" : "clear";
      return (
        `<li><span class="badge ${cls}">${v.takeover ? "takeover" : "ok"}</span> ` +
        `${esc(r.mode)}: ${esc(r.tx.buyer)} &rarr; ${esc(pct(r.tx.share))} of ${esc(r.tx.target)}</li>`
      );
    })
    .join("");
  return `<h4>verdict history</h4><ol class="history">${rows}</ol>`;
}

export function renderError(state: ViewState): string {
  if (!state.error) return "";
  return (
    `<div class="error" role="alert">` +
    `<code>${esc(state.error.code)}</code> ${esc(state.error.message)}</div>`
  );
}

export function renderUpload(): string {
  return (
    `<form data-form="upload" class="upload">` +
    `<h3>load a graph</h3>` +
    `<label>nodes CSV <textarea name="nodes-csv" rows="4"></textarea></label>` +
    `<label>edges CSV <textarea name="edges-csv" rows="4"></textarea></label>` +
    `<button data-action="upload">upload</button></form>`
  );
}

export function renderApp(state: ViewState): string {
  if (!state.graphId) {
    return `<main class="console">${renderError(state)}${renderUpload()}</main>`;
  }
  const session = state.sessionId
    ? `<p class="session-line">session <code>${esc(state.sessionId)}</code></p>`
    : renderScenarioEditor(state);
  const focus =
    `<form data-form="focus"><label>focus entity ` +
    `<input name="focus-id" value="${esc(state.focusedEntity ?? "")}"></label>` +
    `<button data-action="focus">show neighborhood</button></form>`;
  return (
    `<main class="console">${renderError(state)}` +
    `<section class="left">${session}` +
    `<h3>staged transactions</h3>${renderStagedList(state.staged)}` +
    `<h3>compose</h3>${renderComposer(state)}${renderHistory(state)}</section>` +
    `<section class="center"><h3>neighborhood</h3>${focus}${renderNeighborhood(state)}</section>` +
    `<section class="right"><h3>limit</h3>${renderLimitPanel(state)}` +
    `<h3>protection</h3>${renderProtectPanel(state)}</section></main>`
  );
}
