// Browser bootstrap: create or join a session, then delegate every
// interaction to the controller and re-render on change.

import { SessionApi, SessionSpec } from "./protocol.js";
import { SessionController } from "./controller.js";
import { render } from "./render.js";

const DEFAULT_SPEC: SessionSpec = {
  parameters: [
    { name: "milk %", lower: 0, upper: 100 },
    { name: "strength %", lower: 0, upper: 100 },
  ],
  solver: "order_rcd",
  query_budget: 60,
  seed: 1,
  max_iterations: 12,
  ls_tol: 0.08,
};

function mount(root: HTMLElement, controller: SessionController): void {
  const redraw = () => {
    root.innerHTML = render(controller.view);
  };
  controller.onChange(redraw);
  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.tagName !== "BUTTON" || target.hasAttribute("disabled")) return;
    switch (target.id) {
      case "choose-a": void controller.choose("A"); break;
      case "choose-b": void controller.choose("B"); break;
      case "choose-tie": void controller.choose("TIE"); break;
      case "undo": void controller.undo(); break;
    }
  });
  redraw();
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const api = new SessionApi("", (url, init) => fetch(url, init));
  const params = new URLSearchParams(window.location.search);
  const existing = params.get("session");
  const controller = existing
    ? await SessionController.join(api, existing)
    : await SessionController.create(api, DEFAULT_SPEC);
  if (!existing) {
    const url = new URL(window.location.href);
    url.searchParams.set("session", controller.view.sessionId);
    window.history.replaceState(null, "", url.toString());
  }
  mount(root, controller);
}

void boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to start session: ${err}`;
});
