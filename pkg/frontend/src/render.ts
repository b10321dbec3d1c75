/** Pure rendering: view model in, HTML string out.
 *
 * Interactive elements carry data-action attributes; main.ts owns the
 * actual event wiring.  All post-derived text is escaped.
 */

import type { ClusterView, HierarchyInfo, LevelView, PostView } from "./api.js";
import type { ViewModel } from "./app.js";
import { pageCount } from "./state.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function timestamp(value: number | null): string {
  if (value === null) return "";
  if (!Number.isFinite(value)) return String(value);
  // Interpret large values as epoch seconds, small ones as plain order.
  if (value > 1e9) return new Date(value * 1000).toISOString();
  return `t=${value}`;
}

export function renderBanner(error: string | null): string {
  if (!error) return "";
  return (
    `<div class="banner" role="alert">service unreachable: ` +
    `${escapeHtml(error)} ` +
    `<button data-action="retry">retry</button></div>`
  );
}

export function renderToast(toast: string | null): string {
  if (!toast) return "";
  return `<div class="toast" role="status">label rejected: ${escapeHtml(toast)}</div>`;
}

export function renderControls(
  h: HierarchyInfo,
  level: number,
  searchQuery: string,
): string {
  const max = h.levels.length - 1;
  const count = h.levels[level].communities;
  const mod = h.levels[level].modularity;
  const kInput =
    h.algorithm !== "hac"
      ? ""
      : `<label class="k-input">about k clusters:
           <input type="number" data-action="k" min="1" value="${count}">
           <button data-action="go-k">cut</button>
         </label>`;
  return `<section class="controls">
    <div class="run-meta">run <code>${escapeHtml(h.run_id)}</code>
      &middot; ${escapeHtml(h.algorithm)} &middot; ${h.n_posts} posts</div>
    <label>finest
      <input type="range" data-action="level" min="0" max="${max}"
             value="${level}" ${max === 0 ? "disabled" : ""}>
    coarsest</label>
    <span class="level-readout" data-communities="${count}">
      level ${level}: ${count} clusters${
        mod === null ? "" : `, modularity ${mod.toFixed(4)}`
      }</span>
    ${kInput}
    <form class="search" data-action="search-form">
      <input type="search" data-action="search" placeholder="highlight clusters containing all words"
             value="${escapeHtml(searchQuery)}">
      <button type="submit">search</button>
      <button type="button" data-action="clear-search">clear</button>
    </form>
  </section>`;
}

export function renderCards(
  view: LevelView,
  highlights: ReadonlySet<number>,
  selected: number | null,
  searchActive: boolean,
): string {
  const cards = view.communities
    .map((c) => {
      const classes = ["card"];
      if (searchActive && highlights.has(c.community)) classes.push("hit");
      if (searchActive && !highlights.has(c.community)) classes.push("dim");
      if (selected === c.community) classes.push("selected");
      const badge = c.label
        ? `<span class="badge" title="analyst label">${escapeHtml(c.label)}</span>`
        : "";
      return `<article class="${classes.join(" ")}" data-community="${c.community}">
        <header>
          <button data-action="open" data-community="${c.community}">
            cluster ${c.community}</button>
          <span class="size">${c.size} posts</span>${badge}
        </header>
        <p class="terms">${c.top_terms.map(escapeHtml).join(" ")}</p>
        <blockquote>${escapeHtml(c.representative)}</blockquote>
      </article>`;
    })
    .join("\n");
  return `<section class="cards">${cards}</section>`;
}

function renderMember(p: PostView): string {
  const meta = [p.author ? `@${p.author}` : "", timestamp(p.created_at)]
    .filter(Boolean)
    .join(" ");
  return `<li data-post="${escapeHtml(p.id)}">
    <span class="post-text">${escapeHtml(p.text)}</span>
    <span class="post-meta">${escapeHtml(p.id)}${meta ? " " + escapeHtml(meta) : ""}</span>
  </li>`;
}

export function renderCluster(c: ClusterView, draft: string): string {
  const pages = pageCount(c.size, c.page_size);
  const badge = c.label
    ? `<span class="badge">${escapeHtml(c.label)}</span>`
    : `<span class="badge none">unlabeled</span>`;
  return `<section class="drawer" data-community="${c.community}">
    <header>
      <h2>cluster ${c.community} &middot; ${c.size} posts</h2>
      ${badge}
      <button data-action="close">close</button>
    </header>
    <p class="terms">${c.top_terms.map(escapeHtml).join(" ")}</p>
    <form class="label-form" data-action="label-form">
      <input type="text" data-action="draft" placeholder="name this story"
             value="${escapeHtml(draft)}">
      <button type="submit">label</button>
    </form>
    <ol class="members" start="${c.page * c.page_size + 1}">
      ${c.members.map(renderMember).join("\n")}
    </ol>
    <nav class="pager">
      <button data-action="prev" ${c.page === 0 ? "disabled" : ""}>prev</button>
      <span>page ${c.page + 1} of ${pages}</span>
      <button data-action="next" ${c.page + 1 >= pages ? "disabled" : ""}>next</button>
    </nav>
  </section>`;
}

export function renderApp(vm: ViewModel): string {
  if (vm.phase === "loading") {
    return `<main><p class="loading">loading run&hellip;</p></main>`;
  }
  if (vm.phase === "error" || !vm.hierarchy || !vm.levelView) {
    return `<main>${renderBanner(vm.error ?? "unknown failure")}</main>`;
  }
  const searchActive = vm.state.searchQuery.trim().length > 0;
  return `<main>
    ${renderToast(vm.toast)}
    ${renderControls(vm.hierarchy, vm.state.level, vm.state.searchQuery)}
    ${renderCards(vm.levelView, vm.highlights, vm.state.selected, searchActive)}
    ${vm.cluster ? renderCluster(vm.cluster, vm.state.labelDraft) : ""}
  </main>`;
}
