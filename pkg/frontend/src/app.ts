/** Controller: owns the view model, talks to the API, notifies a render
 * sink after every change.
 *
 * Labels are written through a client-side queue so two quick submits
 * can't interleave; the badge shown afterwards always comes from a
 * refetched server response, never from the local draft.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ClusterView, HierarchyInfo, LevelView } from "./api.js";
import {
  closeCluster,
  closestLevelForK,
  highlightSet,
  initialState,
  selectCluster,
  setLevel,
  type TreeViewState,
} from "./state.js";

export type Phase = "loading" | "ready" | "error";

export interface ViewModel {
  phase: Phase;
  /** Banner text when the service is unreachable or a fetch failed. */
  error: string | null;
  /** Transient failure from a label submit; the draft is kept. */
  toast: string | null;
  hierarchy: HierarchyInfo | null;
  state: TreeViewState;
  levelView: LevelView | null;
  cluster: ClusterView | null;
  highlights: ReadonlySet<number>;
}

export type Listener = (vm: ViewModel) => void;

const EMPTY_STATE: TreeViewState = {
  level: 0,
  expanded: new Set(),
  selected: null,
  searchQuery: "",
  labelDraft: "",
};

export class Explorer {
  readonly vm: ViewModel = {
    phase: "loading",
    error: null,
    toast: null,
    hierarchy: null,
    state: EMPTY_STATE,
    levelView: null,
    cluster: null,
    highlights: new Set(),
  };

  private labelQueue: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly api: ApiClient,
    private readonly listener: Listener = () => {},
  ) {}

  private emit() {
    this.listener(this.vm);
  }

  private fail(err: unknown) {
    this.vm.phase = "error";
    this.vm.error = err instanceof Error ? err.message : String(err);
    this.emit();
  }

  /** Fetch everything the current view needs; the only entry point that
   * clears the error banner, so it doubles as the retry action. */
  async boot(): Promise<void> {
    this.vm.phase = "loading";
    this.vm.error = null;
    this.emit();
    try {
      const h = await this.api.hierarchy();
      this.vm.hierarchy = h;
      this.vm.state = initialState(h);
      this.vm.levelView = await this.api.level(this.vm.state.level);
      this.vm.cluster = null;
      this.vm.highlights = new Set();
      this.vm.phase = "ready";
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  retry(): Promise<void> {
    return this.boot();
  }

  async setLevel(t: number): Promise<void> {
    const h = this.vm.hierarchy;
    if (!h) return;
    const next = setLevel(this.vm.state, h, t);
    if (next === this.vm.state) return;
    this.vm.state = next;
    this.vm.cluster = null;
    try {
      this.vm.levelView = await this.api.level(next.level);
      await this.refreshHighlights();
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  /** HAC runs let the analyst ask for "about k clusters"; the slider
   * jumps to the stored level with the closest count. */
  async setK(k: number): Promise<void> {
    const h = this.vm.hierarchy;
    if (!h || !Number.isFinite(k)) return;
    await this.setLevel(closestLevelForK(h, Math.trunc(k)));
  }

  async selectCluster(community: number): Promise<void> {
    const view = this.vm.levelView;
    if (!view) return;
    const next = selectCluster(this.vm.state, view, community);
    if (next === this.vm.state) return;
    this.vm.state = next;
    try {
      this.vm.cluster = await this.api.cluster(next.level, community, 0);
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  closeCluster(): void {
    this.vm.state = closeCluster(this.vm.state);
    this.vm.cluster = null;
    this.emit();
  }

  async setPage(page: number): Promise<void> {
    const cur = this.vm.cluster;
    if (!cur || page < 0) return;
    try {
      this.vm.cluster = await this.api.cluster(cur.level, cur.community, page);
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  async search(q: string): Promise<void> {
    this.vm.state = { ...this.vm.state, searchQuery: q };
    if (!q.trim()) {
      this.vm.highlights = new Set();
      this.emit();
      return;
    }
    try {
      await this.refreshHighlights();
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  private async refreshHighlights(): Promise<void> {
    const q = this.vm.state.searchQuery;
    if (!q.trim()) {
      this.vm.highlights = new Set();
      return;
    }
    const res = await this.api.search(q);
    this.vm.highlights = highlightSet(res.matches, this.vm.state.level);
  }

  setDraft(text: string): void {
    this.vm.state = { ...this.vm.state, labelDraft: text };
  }

  /** POST the draft to the selected cluster, then refetch the level (and
   * open cluster) so the badge reflects what the server stored.  On
   * rejection the draft survives and a toast explains why. */
  submitLabel(analyst = ""): Promise<void> {
    const run = async () => {
      const { selected, labelDraft, level } = this.vm.state;
      if (selected === null || !labelDraft.trim()) return;
      this.vm.toast = null;
      try {
        await this.api.label(level, selected, labelDraft, analyst);
        this.vm.state = { ...this.vm.state, labelDraft: "" };
        this.vm.levelView = await this.api.level(level);
        if (this.vm.cluster && this.vm.cluster.community === selected) {
          this.vm.cluster = await this.api.cluster(
            level,
            selected,
            this.vm.cluster.page,
          );
        }
        this.emit();
      } catch (err) {
        if (err instanceof ApiError) {
          this.vm.toast = err.message;
          this.emit();
        } else {
          this.fail(err);
        }
      }
    };
    this.labelQueue = this.labelQueue.then(run, run);
    return this.labelQueue as Promise<void>;
  }
}
