/** Pure snapshot-to-HTML renderers. Keeping these as string-producing pure
 * functions makes every visual state unit-testable without a browser. */

import type { Snapshot } from "./api.js";
import { diagnosisKey, type UiState } from "./controller.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function conjunction(literals: readonly string[]): string {
  return literals.join(" AND ");
}

function pct(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

export function renderQueryCard(snapshot: Snapshot, inFlight: boolean): string {
  if (snapshot.status === "finished" || snapshot.query === null) {
    return "";
  }
  const question = `Is [${conjunction(snapshot.query.literals)}] entailed by your intended KB?`;
  const disabled = inFlight ? " disabled" : "";
  return `
    <section class="query-card" aria-labelledby="query-question">
      <h2 id="query-question">${escapeHtml(question)}</h2>
      <p class="round-label">Question ${snapshot.round + 1}</p>
      <div class="answer-buttons" role="group" aria-label="Answer">
        <button type="button" data-answer="yes" accesskey="y"${disabled}>Yes</button>
        <button type="button" data-answer="no" accesskey="n"${disabled}>No</button>
      </div>
    </section>`;
}

export function renderDiagnosisBars(
  snapshot: Snapshot,
  previous: ReadonlyMap<string, number>,
): string {
  const rows = snapshot.diagnoses
    .map((d) => {
      const key = diagnosisKey(d.ids);
      const label = d.ids.join(", ");
      const before = previous.get(key);
      const beforeCell =
        before === undefined || Math.abs(before - d.posterior) < 5e-4
          ? ""
          : `<span class="was">${pct(before)} &rarr;</span> `;
      return `
      <li class="diagnosis-row">
        <span class="diagnosis-label">{${escapeHtml(label)}}</span>
        <span class="bar-track"><span class="bar-fill" style="width:${pct(d.posterior)}"></span></span>
        <span class="diagnosis-value">${beforeCell}${pct(d.posterior)}</span>
      </li>`;
    })
    .join("");
  return `
    <section class="diagnoses" aria-label="Diagnosis probabilities">
      <h3>Candidate diagnoses</h3>
      <ol class="diagnosis-list">${rows}</ol>
    </section>`;
}

export function renderGauge(snapshot: Snapshot): string {
  const { c, c_min, c_max } = snapshot.cautiousness;
  const span = c_max - c_min;
  const position = span > 0 ? (c - c_min) / span : 0;
  return `
    <section class="gauge" aria-label="Cautiousness">
      <h3>Cautiousness</h3>
      <div class="gauge-band" role="img"
           aria-label="cautiousness ${c.toFixed(3)} within ${c_min.toFixed(2)} to ${c_max.toFixed(2)}">
        <span class="gauge-min">${c_min.toFixed(2)}</span>
        <span class="gauge-track"><span class="gauge-marker" style="left:${pct(position)}"></span></span>
        <span class="gauge-max">${c_max.toFixed(2)}</span>
      </div>
      <p class="gauge-value">c = ${c.toFixed(3)}</p>
    </section>`;
}

export function renderHistory(snapshot: Snapshot): string {
  if (snapshot.history.length === 0) {
    return "";
  }
  const items = snapshot.history
    .map(
      (h, i) =>
        `<li>Q${i + 1}: [${escapeHtml(conjunction(h.literals))}] &mdash; ${h.answer}</li>`,
    )
    .join("");
  return `
    <section class="history" aria-label="Answered questions">
      <h3>History</h3>
      <ol>${items}</ol>
    </section>`;
}

export function renderResultPanel(snapshot: Snapshot): string {
  if (snapshot.status !== "finished" || snapshot.result === null) {
    return "";
  }
  const axioms = snapshot.result.map((id) => `<code>${escapeHtml(id)}</code>`).join(", ");
  return `
    <section class="result-panel" aria-labelledby="result-heading">
      <h2 id="result-heading">Faulty axioms found</h2>
      <p class="result-axioms">${axioms}</p>
      <p class="result-advice">Suggested repair: remove these axioms from the knowledge base.</p>
    </section>`;
}

export function renderSession(state: UiState): string {
  const snapshot = state.snapshot;
  if (snapshot === null) {
    return "";
  }
  const error = state.error
    ? `<p class="error" role="alert">${escapeHtml(state.error)}</p>`
    : "";
  return (
    error +
    renderResultPanel(snapshot) +
    renderQueryCard(snapshot, state.inFlight) +
    renderDiagnosisBars(snapshot, state.previousPosteriors) +
    renderGauge(snapshot) +
    renderHistory(snapshot)
  );
}
