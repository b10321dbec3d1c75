/** Browser bootstrap: render into #app and translate DOM events into
 * controller calls through one delegated listener per event type. */

import { ApiClient } from "./api.js";
import { Explorer } from "./app.js";
import { renderApp } from "./render.js";

function start() {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  const explorer = new Explorer(new ApiClient(""), (vm) => {
    root.innerHTML = renderApp(vm);
  });

  root.addEventListener("click", (ev) => {
    const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!el) return;
    switch (el.dataset.action) {
      case "retry":
        void explorer.retry();
        break;
      case "open":
        void explorer.selectCluster(Number(el.dataset.community));
        break;
      case "close":
        explorer.closeCluster();
        break;
      case "prev":
        void explorer.setPage((explorer.vm.cluster?.page ?? 1) - 1);
        break;
      case "next":
        void explorer.setPage((explorer.vm.cluster?.page ?? -1) + 1);
        break;
      case "clear-search":
        void explorer.search("");
        break;
      case "go-k": {
        const box = root.querySelector<HTMLInputElement>('[data-action="k"]');
        if (box) void explorer.setK(Number(box.value));
        break;
      }
    }
  });

  // Slider moves refetch the level; draft keystrokes only update state
  // (no rerender, so the input keeps focus).
  root.addEventListener("input", (ev) => {
    const el = ev.target as HTMLInputElement;
    if (el.dataset.action === "level") void explorer.setLevel(Number(el.value));
    if (el.dataset.action === "draft") explorer.setDraft(el.value);
  });

  root.addEventListener("submit", (ev) => {
    const form = ev.target as HTMLElement;
    ev.preventDefault();
    if (form.dataset.action === "search-form") {
      const box = root.querySelector<HTMLInputElement>('[data-action="search"]');
      void explorer.search(box ? box.value : "");
    }
    if (form.dataset.action === "label-form") {
      void explorer.submitLabel();
    }
  });

  void explorer.boot();
}

start();
