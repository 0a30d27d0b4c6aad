// Pure HTML rendering of a SessionView; main.ts owns event wiring.
// Values show 3 significant digits with full precision on hover; the
// chart is drawn from the server's trace payload verbatim.

import { Candidate } from "./protocol.js";
import { SessionView } from "./controller.js";

export function fmt3(v: number): string {
  return Number(v.toPrecision(3)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function candidateCard(label: string, c: Candidate): string {
  const rows = Object.entries(c.values)
    .map(([name, v]) =>
      `<tr><td class="param">${esc(name)}</td>` +
      `<td class="value" title="${String(v)}">${fmt3(v)}</td></tr>`)
    .join("");
  return `<div class="card" data-candidate="${label}">
    <h3>Candidate ${label}</h3>
    <table>${rows}</table>
  </div>`;
}

export function chartSvg(candidates: number[][], width = 420, height = 160): string {
  if (candidates.length < 2) {
    return `<svg class="chart" width="${width}" height="${height}"></svg>`;
  }
  const dims = candidates[0]!.length;
  const flat = candidates.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  const span = hi - lo || 1;
  const sx = (i: number) => (i / (candidates.length - 1)) * (width - 20) + 10;
  const sy = (v: number) => height - 10 - ((v - lo) / span) * (height - 20);
  const lines: string[] = [];
  for (let d = 0; d < dims; d++) {
    const pts = candidates.map((c, i) => `${sx(i).toFixed(1)},${sy(c[d]!).toFixed(1)}`);
    lines.push(`<polyline fill="none" stroke-width="1.5" class="series s${d}" points="${pts.join(" ")}"/>`);
  }
  return `<svg class="chart" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">${lines.join("")}</svg>`;
}

export function render(view: SessionView): string {
  const head = `<header>
    <span class="counter">question ${view.queriesUsed + (view.status === "awaiting" ? 1 : 0)}
      / budget ${view.queryBudget}</span>
    <span class="counter">iteration ${view.iteration}</span>
  </header>`;
  const notice = view.notice ? `<p class="notice">${esc(view.notice)}</p>` : "";
  const chart = view.trace ? chartSvg(view.trace.candidates) : "";

  if (view.status === "terminal" || view.pending === null) {
    const best = view.best
      ? candidateCard("★", view.best)
      : "<p>No accepted candidate yet.</p>";
    return `${head}${notice}
    <section class="results">
      <h2>Session complete</h2>
      <p>Best setting found after ${view.queriesUsed} answers:</p>
      ${best}
      ${chart}
    </section>`;
  }

  const q = view.pending;
  const disabled = view.busy ? "disabled" : "";
  return `${head}${notice}
  <section class="query" data-query-id="${esc(q.query_id)}">
    <h2>Which do you prefer?</h2>
    <div class="pair">
      ${candidateCard("A", q.candidate_a)}
      ${candidateCard("B", q.candidate_b)}
    </div>
    <div class="answers">
      <button id="choose-a" ${disabled}>A is better</button>
      <button id="choose-tie" class="tie" ${disabled}>Can't tell</button>
      <button id="choose-b" ${disabled}>B is better</button>
    </div>
    <div class="meta">
      <button id="undo" ${view.history.length === 0 || view.busy ? "disabled" : ""}>
        Undo last answer</button>
      <span class="history">${view.history.length} answered</span>
    </div>
    ${chart}
  </section>`;
}
