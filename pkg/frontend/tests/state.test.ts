import { describe, expect, it } from "vitest";

import {
  clampRadius,
  cycleScenarioTag,
  emptyScenario,
  enterSession,
  initialState,
  recordVerdict,
} from "../src/state.js";

describe("session switching", () => {
  it("clears the verdict history and per-session panels", () => {
    let state = { ...initialState(), graphId: "g1", sessionId: "s1" };
    state = recordVerdict(state, {
      mode: "check",
      tx: { buyer: "1", target: "C", share: 0.9 },
      received: { payload: { takeover: true, witnesses: [] }, rawText: "{}" },
      at: 1,
    });
    expect(state.verdictHistory).toHaveLength(1);

    const next = enterSession(state, "s2", []);
    expect(next.sessionId).toBe("s2");
    expect(next.verdictHistory).toHaveLength(0);
    expect(next.lastVerdict).toBeNull();
    expect(next.limit).toBeNull();
    expect(next.protection).toBeNull();
  });
});

describe("scenario tagging", () => {
  it("cycles none -> strategic -> foreign -> public -> none", () => {
    let sc = emptyScenario();
    sc = cycleScenarioTag(sc, "B");
    expect(sc.strategic).toEqual(["B"]);
    sc = cycleScenarioTag(sc, "B");
    expect(sc.strategic).toEqual([]);
    expect(sc.foreign).toEqual(["B"]);
    sc = cycleScenarioTag(sc, "B");
    expect(sc.public).toEqual(["B"]);
    sc = cycleScenarioTag(sc, "B");
    expect(sc.strategic).toEqual([]);
    expect(sc.foreign).toEqual([]);
    expect(sc.public).toEqual([]);
  });
});

describe("radius", () => {
  it("clamps to the 0..3 display bound", () => {
    expect(clampRadius(-2)).toBe(0);
    expect(clampRadius(2)).toBe(2);
    expect(clampRadius(9)).toBe(3);
  });
});
