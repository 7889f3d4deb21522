/** Pure HTML renderers: every function maps state to markup with no I/O,
 * so each view is snapshot-testable. */

import type { ClassStat, ModelInfo, Prediction, Sample } from "./api.js";

export interface Placements {
  wk: string;
  wr: string;
  bk: string;
}

export const FILES = ["a", "b", "c", "d", "e", "f", "g", "h"];
export const RANKS = [8, 7, 6, 5, 4, 3, 2, 1];

const PIECE_GLYPHS: Record<string, string> = {
  wk: "♔", // white king
  wr: "♖", // white rook
  bk: "♚", // black king
};

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** An 8x8 board with the three pieces placed; a pure function of the
 * placements, so switching samples redraws without any page reload. */
export function renderBoard(placements: Placements): string {
  const bySquare = new Map<string, string>();
  for (const piece of ["wk", "wr", "bk"] as const) {
    bySquare.set(placements[piece], PIECE_GLYPHS[piece]);
  }
  const rows: string[] = [];
  for (const rank of RANKS) {
    const cells: string[] = [];
    for (let f = 0; f < 8; f++) {
      const square = `${FILES[f]}${rank}`;
      const shade = (f + rank) % 2 === 0 ? "dark" : "light";
      const glyph = bySquare.get(square) ?? "";
      cells.push(
        `<td class="sq ${shade}" data-square="${square}">${glyph}</td>`,
      );
    }
    rows.push(`<tr><th class="rank">${rank}</th>${cells.join("")}</tr>`);
  }
  const fileHeader = FILES.map((f) => `<th class="file">${f}</th>`).join("");
  return (
    `<table class="board"><tbody>${rows.join("")}` +
    `<tr><th></th>${fileHeader}</tr></tbody></table>`
  );
}

/** Rows for the sample table; short pages (the dataset tail) simply
 * produce fewer rows, never blanks. */
export function renderSampleRows(samples: Sample[]): string {
  return samples
    .map(
      (s) =>
        `<tr data-index="${s.index}"><td>${s.index}</td><td>${s.wk}</td>` +
        `<td>${s.wr}</td><td>${s.bk}</td><td>${escapeHtml(s.label)}</td></tr>`,
    )
    .join("");
}

export function renderSampleCaption(sample: Sample): string {
  return (
    `<div class="caption">sample <strong>#${sample.index}</strong>` +
    ` &mdash; WK ${sample.wk}, WR ${sample.wr}, BK ${sample.bk}` +
    ` &mdash; result <strong class="label">${escapeHtml(sample.label)}</strong></div>`
  );
}

/** Statistics table: one row per class plus a totals row.  The percentage
 * column comes from the service; the client only re-sums it as a
 * consistency check (shown in the footer). */
export function renderStats(total: number, classes: ClassStat[]): string {
  const maxCount = Math.max(...classes.map((c) => c.count), 1);
  const rows = classes
    .map((c) => {
      const width = ((100 * c.count) / maxCount).toFixed(1);
      return (
        `<tr><td>${escapeHtml(c.label)}</td>` +
        `<td class="num">${c.count}</td>` +
        `<td class="num">${c.percent.toFixed(2)}%</td>` +
        `<td class="bar-cell"><div class="bar" style="width:${width}%"></div></td></tr>`
      );
    })
    .join("");
  const percentSum = classes.reduce((s, c) => s + c.percent, 0);
  return (
    `<table class="stats"><thead><tr>` +
    `<th>result</th><th>count</th><th>percentage</th><th></th></tr></thead>` +
    `<tbody>${rows}</tbody>` +
    `<tfoot><tr><td>total</td><td class="num">${total}</td>` +
    `<td class="num">${percentSum.toFixed(2)}%</td><td></td></tr></tfoot></table>`
  );
}

export function renderModelOptions(models: ModelInfo[], selected: string): string {
  return models
    .map((m) => {
      const accuracy =
        m.overall_accuracy === undefined ? "" : ` (${m.overall_accuracy.toFixed(2)})`;
      const flag = m.id === selected ? " selected" : "";
      return `<option value="${m.id}"${flag}>${escapeHtml(m.kind)}${accuracy}</option>`;
    })
    .join("");
}

/** Prediction result: model class, oracle class, agreement badge and the
 * 18 per-class scores as bars. */
export function renderPrediction(p: Prediction): string {
  const badge = p.agree
    ? `<span class="badge agree">model agrees with the tablebase</span>`
    : `<span class="badge disagree">model disagrees (truth: ${escapeHtml(p.oracle_class)})</span>`;
  const maxScore = Math.max(...Object.values(p.scores), 1e-9);
  const bars = Object.entries(p.scores)
    .map(([label, score]) => {
      const width = ((100 * score) / maxScore).toFixed(1);
      const hot = label === p.predicted_class ? " hot" : "";
      return (
        `<tr><td>${escapeHtml(label)}</td>` +
        `<td class="bar-cell"><div class="bar score${hot}" style="width:${width}%"></div></td>` +
        `<td class="num">${score.toFixed(4)}</td></tr>`
      );
    })
    .join("");
  return (
    `<div class="verdict">predicted <strong class="label">${escapeHtml(p.predicted_class)}</strong>` +
    ` &middot; tablebase says <strong class="label">${escapeHtml(p.oracle_class)}</strong> ${badge}</div>` +
    `<table class="scores"><tbody>${bars}</tbody></table>`
  );
}

/** Inline rejection shown when the service refuses a placement
 * (e.g. "kings adjacent"); the message text is the service's own. */
export function renderPlacementError(message: string): string {
  return `<div class="placement-error">illegal placement: ${escapeHtml(message)}</div>`;
}

export function renderServiceError(message: string): string {
  return `<div class="service-error">service unreachable: ${escapeHtml(message)}</div>`;
}
