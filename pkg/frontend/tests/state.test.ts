import { describe, expect, it } from "vitest";

import type { HierarchyInfo, LevelView, PostView } from "../src/api.js";
import {
  clampLevel,
  closeCluster,
  closestLevelForK,
  highlightSet,
  initialState,
  pageCount,
  selectCluster,
  setLevel,
} from "../src/state.js";

const HIER: HierarchyInfo = {
  run_id: "r1",
  seeds: { train: 0 },
  algorithm: "louvain",
  params: {},
  n_posts: 8,
  levels: [
    { level: 0, communities: 4, modularity: 0.6 },
    { level: 1, communities: 2, modularity: 0.7 },
  ],
};

const LEVEL1: LevelView = {
  level: 1,
  communities: [
    { community: 0, size: 4, top_terms: ["a"], representative: "x", label: null },
    { community: 1, size: 4, top_terms: ["b"], representative: "y", label: null },
  ],
};

describe("initialState", () => {
  it("starts at the coarsest level with nothing selected", () => {
    const s = initialState(HIER);
    expect(s.level).toBe(1);
    expect(s.selected).toBeNull();
    expect(s.expanded.size).toBe(0);
    expect(s.searchQuery).toBe("");
    expect(s.labelDraft).toBe("");
  });
});

describe("setLevel", () => {
  it("clamps out-of-range targets", () => {
    expect(clampLevel(HIER, -3)).toBe(0);
    expect(clampLevel(HIER, 99)).toBe(1);
    expect(clampLevel(HIER, 0.9)).toBe(0);
  });

  it("drops selection and expansion when the level changes", () => {
    let s = initialState(HIER);
    s = selectCluster(s, LEVEL1, 1);
    expect(s.selected).toBe(1);
    const moved = setLevel(s, HIER, 0);
    expect(moved.level).toBe(0);
    expect(moved.selected).toBeNull();
    expect(moved.expanded.size).toBe(0);
  });

  it("is identity for the current level", () => {
    const s = initialState(HIER);
    expect(setLevel(s, HIER, 1)).toBe(s);
  });
});

describe("selectCluster", () => {
  it("ignores communities that do not exist at the level", () => {
    const s = initialState(HIER);
    expect(selectCluster(s, LEVEL1, 7)).toBe(s);
  });

  it("selects and expands an existing community", () => {
    const s = selectCluster(initialState(HIER), LEVEL1, 0);
    expect(s.selected).toBe(0);
    expect(s.expanded.has(0)).toBe(true);
  });

  it("close removes the selection from the expanded set", () => {
    let s = selectCluster(initialState(HIER), LEVEL1, 0);
    s = closeCluster(s);
    expect(s.selected).toBeNull();
    expect(s.expanded.has(0)).toBe(false);
  });
});

describe("pageCount", () => {
  it("rounds up and never reports zero pages", () => {
    expect(pageCount(0, 50)).toBe(1);
    expect(pageCount(1, 50)).toBe(1);
    expect(pageCount(50, 50)).toBe(1);
    expect(pageCount(51, 50)).toBe(2);
    expect(pageCount(230, 50)).toBe(5);
  });
});

describe("highlightSet", () => {
  const post = (c0: number, c1: number): PostView => ({
    id: "p",
    text: "t",
    author: null,
    created_at: null,
    communities: { "0": c0, "1": c1 },
  });

  it("collects the match communities at the requested level", () => {
    const matches = [post(0, 0), post(2, 1), post(3, 1)];
    expect(highlightSet(matches, 0)).toEqual(new Set([0, 2, 3]));
    expect(highlightSet(matches, 1)).toEqual(new Set([0, 1]));
  });

  it("is empty for no matches", () => {
    expect(highlightSet([], 0).size).toBe(0);
  });
});

describe("closestLevelForK", () => {
  const hac: HierarchyInfo = {
    ...HIER,
    algorithm: "hac",
    levels: [
      { level: 0, communities: 10, modularity: null },
      { level: 1, communities: 6, modularity: null },
      { level: 2, communities: 2, modularity: null },
      { level: 3, communities: 1, modularity: null },
    ],
  };

  it("prefers an exact count", () => {
    expect(closestLevelForK(hac, 6)).toBe(1);
    expect(closestLevelForK(hac, 1)).toBe(3);
  });

  it("takes the nearest otherwise", () => {
    expect(closestLevelForK(hac, 9)).toBe(0);
    expect(closestLevelForK(hac, 3)).toBe(2);
  });

  it("breaks distance ties toward the finer level", () => {
    // 8 is equidistant from 10 (finer) and 6; 4 from 6 (finer) and 2.
    expect(closestLevelForK(hac, 8)).toBe(0);
    expect(closestLevelForK(hac, 4)).toBe(1);
  });

  it("clamps wild inputs to the ends", () => {
    expect(closestLevelForK(hac, 10_000)).toBe(0);
    expect(closestLevelForK(hac, -5)).toBe(3);
  });
});
