/** DOM wiring: holds the view state, talks to the service through
 * ApiClient, and re-renders via the pure functions in render.ts.
 * At most one prediction request is in flight; newer edits abort it. */

import { ApiClient, ApiError, Sample } from "./api.js";
import {
  FILES,
  Placements,
  renderBoard,
  renderModelOptions,
  renderPlacementError,
  renderPrediction,
  renderSampleCaption,
  renderSampleRows,
  renderServiceError,
  renderStats,
} from "./render.js";

const PAGE_SIZE = 12;

export interface BoardViewState {
  placements: Placements;
  sampleIndex: number | null; // null = free-edit mode
  modelId: string;
  pageOffset: number;
  total: number;
}

export class App {
  state: BoardViewState = {
    placements: { wk: "a1", wr: "b3", bk: "c2" },
    sampleIndex: 0,
    modelId: "",
    pageOffset: 0,
    total: 0,
  };
  private pending: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: Document,
  ) {}

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  async start(): Promise<void> {
    this.buildSquarePickers();
    try {
      const [stats, models] = await Promise.all([this.api.stats(), this.api.models()]);
      this.el("stats").innerHTML = renderStats(stats.total, stats.classes);
      this.state.modelId = models[0]?.id ?? "";
      this.el<HTMLSelectElement>("model-select").innerHTML = renderModelOptions(
        models,
        this.state.modelId,
      );
      await this.loadPage(0);
      await this.selectSample(0);
    } catch (error) {
      this.el("stats").innerHTML = renderServiceError(String(error));
      return;
    }
    this.wireEvents();
  }

  private buildSquarePickers(): void {
    for (const piece of ["wk", "wr", "bk"] as const) {
      const select = this.el<HTMLSelectElement>(`${piece}-square`);
      const options: string[] = [];
      for (const f of FILES) {
        for (let r = 1; r <= 8; r++) options.push(`${f}${r}`);
      }
      select.innerHTML = options
        .map((sq) => `<option value="${sq}">${sq}</option>`)
        .join("");
    }
  }

  private wireEvents(): void {
    this.el("prev").addEventListener("click", () => this.step(-1));
    this.el("next").addEventListener("click", () => this.step(+1));
    this.el("page-prev").addEventListener("click", () => this.loadPage(this.state.pageOffset - PAGE_SIZE));
    this.el("page-next").addEventListener("click", () => this.loadPage(this.state.pageOffset + PAGE_SIZE));
    this.el<HTMLInputElement>("sample-index").addEventListener("change", (ev) => {
      const value = Number((ev.target as HTMLInputElement).value);
      if (Number.isInteger(value)) void this.selectSample(value);
    });
    for (const piece of ["wk", "wr", "bk"] as const) {
      this.el<HTMLSelectElement>(`${piece}-square`).addEventListener("change", (ev) => {
        this.state.sampleIndex = null; // free-edit mode
        this.state.placements = {
          ...this.state.placements,
          [piece]: (ev.target as HTMLSelectElement).value,
        };
        this.renderBoardPane(null);
        void this.requestPrediction();
      });
    }
    this.el<HTMLSelectElement>("model-select").addEventListener("change", (ev) => {
      this.state.modelId = (ev.target as HTMLSelectElement).value;
      void this.requestPrediction(); // board untouched
    });
  }

  private step(delta: number): void {
    const index = (this.state.sampleIndex ?? 0) + delta;
    if (index >= 0 && index < this.state.total) void this.selectSample(index);
  }

  async loadPage(offset: number): Promise<void> {
    if (offset < 0) return;
    const page = await this.api.samples(offset, PAGE_SIZE);
    if (page.samples.length === 0 && offset > 0) return;
    this.state.pageOffset = offset;
    this.state.total = page.total;
    this.el("sample-rows").innerHTML = renderSampleRows(page.samples);
    for (const row of Array.from(this.root.querySelectorAll("#sample-rows tr"))) {
      row.addEventListener("click", () => {
        void this.selectSample(Number((row as HTMLElement).dataset.index));
      });
    }
  }

  async selectSample(index: number): Promise<void> {
    const page = await this.api.samples(index, 1);
    const sample = page.samples[0];
    if (!sample) return;
    this.state.sampleIndex = index;
    this.state.total = page.total;
    this.state.placements = { wk: sample.wk, wr: sample.wr, bk: sample.bk };
    this.el<HTMLInputElement>("sample-index").value = String(index);
    for (const piece of ["wk", "wr", "bk"] as const) {
      this.el<HTMLSelectElement>(`${piece}-square`).value = sample[piece];
    }
    this.renderBoardPane(sample);
    void this.requestPrediction();
  }

  private renderBoardPane(sample: Sample | null): void {
    this.el("board").innerHTML = renderBoard(this.state.placements);
    this.el("caption").innerHTML = sample
      ? renderSampleCaption(sample)
      : `<div class="caption">free edit &mdash; WK ${this.state.placements.wk}, ` +
        `WR ${this.state.placements.wr}, BK ${this.state.placements.bk}</div>`;
  }

  async requestPrediction(): Promise<void> {
    if (!this.state.modelId) return;
    this.pending?.abort();
    const controller = new AbortController();
    this.pending = controller;
    const target = this.el("prediction");
    const { wk, wr, bk } = this.state.placements;
    try {
      const result = await this.api.predict(wk, wr, bk, this.state.modelId, controller.signal);
      if (this.pending !== controller) return; // a newer edit superseded us
      target.innerHTML = renderPrediction(result);
    } catch (error) {
      if (controller.signal.aborted) return;
      if (error instanceof ApiError && error.status === 400) {
        target.innerHTML = renderPlacementError(error.message);
      } else {
        target.innerHTML = renderServiceError(String(error));
      }
    }
  }
}

export function mount(root: Document, api = new ApiClient()): App {
  const app = new App(api, root);
  void app.start();
  return app;
}
