/** Pure view-state helpers.
 *
 * Everything here derives from API payloads, never mutates them, and
 * holds no connection state, so a page reload can always rebuild the
 * exact view from fresh responses.
 */

import type { HierarchyInfo, LevelView, PostView } from "./api.js";

export interface TreeViewState {
  /** Current level index; 0 is the finest partition, last the coarsest. */
  level: number;
  /** Communities whose drill-down is open at the current level. */
  expanded: ReadonlySet<number>;
  /** Selected community at the current level, if any. */
  selected: number | null;
  searchQuery: string;
  labelDraft: string;
}

export function initialState(h: HierarchyInfo): TreeViewState {
  return {
    level: h.levels.length - 1,
    expanded: new Set(),
    selected: null,
    searchQuery: "",
    labelDraft: "",
  };
}

export function clampLevel(h: HierarchyInfo, t: number): number {
  return Math.max(0, Math.min(h.levels.length - 1, Math.trunc(t)));
}

/** Changing level drops selection and expansion: community ids are only
 * meaningful within one level, and the selected cluster must exist at
 * the current level. */
export function setLevel(
  s: TreeViewState,
  h: HierarchyInfo,
  t: number,
): TreeViewState {
  const level = clampLevel(h, t);
  if (level === s.level) return s;
  return { ...s, level, expanded: new Set(), selected: null };
}

export function selectCluster(
  s: TreeViewState,
  view: LevelView,
  community: number,
): TreeViewState {
  if (!view.communities.some((c) => c.community === community)) {
    return s;
  }
  const expanded = new Set(s.expanded);
  expanded.add(community);
  return { ...s, selected: community, expanded };
}

export function closeCluster(s: TreeViewState): TreeViewState {
  if (s.selected === null) return s;
  const expanded = new Set(s.expanded);
  expanded.delete(s.selected);
  return { ...s, selected: null, expanded };
}

export function pageCount(size: number, pageSize: number): number {
  return Math.max(1, Math.ceil(size / pageSize));
}

/** Communities at `level` that contain at least one search match. */
export function highlightSet(
  matches: readonly PostView[],
  level: number,
): Set<number> {
  const out = new Set<number>();
  for (const m of matches) {
    const c = m.communities[String(level)];
    if (c !== undefined) out.add(c);
  }
  return out;
}

/** Level whose cluster count is closest to k (for the HAC k-input).
 * Exact match wins; ties prefer the finer level so detail is kept. */
export function closestLevelForK(h: HierarchyInfo, k: number): number {
  let best = 0;
  let bestDist = Infinity;
  for (let t = 0; t < h.levels.length; t++) {
    const dist = Math.abs(h.levels[t].communities - k);
    if (dist < bestDist) {
      best = t;
      bestDist = dist;
    }
  }
  return best;
}
