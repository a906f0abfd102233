/** Interactive refocus viewer.
 *
 * Click a pixel of the reference view to focus on its plane (the focus
 * disparity always comes from the server's cached disparity map), scrub the
 * K slider for depth of field, and launch full SR renders as pollable jobs.
 *
 * Preview traffic is debounced and sequence-gated: a response is shown only
 * if no newer preview was requested meanwhile, so rapid scrubbing always
 * converges to the final slider value.
 */

import { ApiClient, ApiError, DatasetInfo, RenderJob } from "./api.js";
import { debounce } from "./debounce.js";
import { RequestGate } from "./requestGate.js";

export interface ViewerOptions {
  debounceMs?: number;
  pollMs?: number;
}

export interface ViewerState {
  focusPoint: { x: number; y: number } | null;
  df: number | null;
  k: number;
  /** sequence number of the preview currently displayed (0 = none) */
  appliedSeq: number;
  job: RenderJob | null;
  error: string | null;
}

const TEMPLATE = `
  <div class="viewer">
    <div class="viewer-error" data-role="error" hidden></div>
    <div class="viewer-panes">
      <figure>
        <figcaption>reference view (click to focus)</figcaption>
        <img data-role="center" alt="reference view" draggable="false">
      </figure>
      <figure>
        <figcaption>bokeh preview</figcaption>
        <img data-role="preview" alt="bokeh preview">
      </figure>
      <figure data-role="result-pane" hidden>
        <figcaption>SR render</figcaption>
        <img data-role="result" alt="super-resolved render">
      </figure>
    </div>
    <div class="viewer-controls">
      <span>focus: <span data-role="df">(click the image)</span></span>
      <label>K <input data-role="k" type="range" min="0" max="5" step="0.1" value="2">
        <span data-role="k-value">2.0</span></label>
      <label>scale <input data-role="scale" type="number" min="1" step="1" value="2"></label>
      <label>iterations <input data-role="noi" type="number" min="1" step="1" value="10"></label>
      <button data-role="render" type="button">render</button>
      <span data-role="job-status"></span>
    </div>
  </div>`;

export class Viewer {
  readonly state: ViewerState = {
    focusPoint: null,
    df: null,
    k: 2.0,
    appliedSeq: 0,
    job: null,
    error: null,
  };

  private info: DatasetInfo | null = null;
  private readonly gate = new RequestGate();
  private readonly inFlight = new Set<Promise<void>>();
  private readonly pollMs: number;
  private readonly requestPreviewDebounced: () => void;

  private readonly centerImg: HTMLImageElement;
  private readonly previewImg: HTMLImageElement;
  private readonly resultImg: HTMLImageElement;
  private readonly resultPane: HTMLElement;
  private readonly errorBox: HTMLElement;
  private readonly dfLabel: HTMLElement;
  private readonly kSlider: HTMLInputElement;
  private readonly kLabel: HTMLElement;
  private readonly scaleInput: HTMLInputElement;
  private readonly noiInput: HTMLInputElement;
  private readonly jobStatus: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    options: ViewerOptions = {},
  ) {
    this.pollMs = options.pollMs ?? 500;
    root.innerHTML = TEMPLATE;
    const pick = <T extends HTMLElement>(role: string): T =>
      root.querySelector(`[data-role="${role}"]`) as T;
    this.centerImg = pick("center");
    this.previewImg = pick("preview");
    this.resultImg = pick("result");
    this.resultPane = pick("result-pane");
    this.errorBox = pick("error");
    this.dfLabel = pick("df");
    this.kSlider = pick("k");
    this.kLabel = pick("k-value");
    this.scaleInput = pick("scale");
    this.noiInput = pick("noi");
    this.jobStatus = pick("job-status");

    this.requestPreviewDebounced = debounce(
      () => this.requestPreview(),
      options.debounceMs ?? 150,
    );

    this.centerImg.addEventListener("click", (ev) => this.onImageClick(ev));
    this.kSlider.addEventListener("input", () =>
      this.setK(Number(this.kSlider.value)),
    );
    pick("render").addEventListener("click", () => void this.startRender());
  }

  /** Load dataset metadata and the reference view. */
  async init(): Promise<DatasetInfo> {
    this.info = await this.api.datasetInfo();
    this.centerImg.src = this.api.centerImageUrl();
    return this.info;
  }

  /** Scripted/DOM entry point for focusing on a reference-view pixel.
   * Out-of-bounds coordinates are ignored. */
  async clickAt(x: number, y: number): Promise<void> {
    if (!this.info) return;
    if (x < 0 || y < 0 || x >= this.info.width || y >= this.info.height) return;
    try {
      const d = await this.api.disparityAt(x, y);
      this.state.focusPoint = { x, y };
      this.state.df = d;
      this.dfLabel.textContent = `(${x}, ${y}) df=${d.toFixed(3)}`;
      this.clearError();
    } catch (err) {
      this.showError(err); // state unchanged: previous focus stays valid
      return;
    }
    this.requestPreview();
  }

  /** Slider entry point; previews are debounced. */
  setK(k: number): void {
    this.state.k = k;
    this.kSlider.value = String(k);
    this.kLabel.textContent = k.toFixed(1);
    if (this.state.df !== null) this.requestPreviewDebounced();
  }

  /** Issue a preview for the current (df, k); stale responses are dropped. */
  private requestPreview(): void {
    const df = this.state.df;
    if (df === null) return;
    const seq = this.gate.next();
    const k = this.state.k;
    const task = this.api
      .preview({ df, k })
      .then((blob) => {
        if (!this.gate.isLatest(seq)) return; // a newer request exists
        this.state.appliedSeq = seq;
        this.showPreview(blob);
        this.clearError();
      })
      .catch((err) => {
        if (this.gate.isLatest(seq)) this.showError(err);
      });
    this.trackInFlight(task);
  }

  /** Validate the SR form, submit a render job, and poll it to completion.
   * Resolves with the final job snapshot (null when blocked client-side). */
  async startRender(): Promise<RenderJob | null> {
    if (this.state.df === null) {
      this.showError(new Error("click the image to pick a focus plane first"));
      return null;
    }
    const scale = Number(this.scaleInput.value);
    const noi = Number(this.noiInput.value);
    if (!Number.isInteger(noi) || noi < 1) {
      this.showError(new Error("iterations must be a whole number >= 1"));
      return null;
    }
    if (!Number.isInteger(scale) || scale < 1) {
      this.showError(new Error("scale must be a whole number >= 1"));
      return null;
    }
    try {
      const jobId = await this.api.startRender({
        df: this.state.df,
        k: this.state.k,
        scale,
        noi,
      });
      this.clearError();
      return await this.pollJob(jobId);
    } catch (err) {
      this.showError(err);
      return null;
    }
  }

  private async pollJob(jobId: string): Promise<RenderJob> {
    for (;;) {
      const job = await this.api.getJob(jobId);
      this.state.job = job;
      this.jobStatus.textContent =
        job.state === "queued"
          ? `${job.id}: queued (renders run one at a time)`
          : `${job.id}: ${job.state} ${job.progress}/${job.noi}`;
      if (job.state === "done") {
        this.resultImg.src = this.api.jobResultUrl(jobId);
        this.resultPane.hidden = false;
        return job;
      }
      if (job.state === "failed") {
        this.showError(new Error(job.error ?? "render failed"));
        return job;
      }
      await new Promise((resolve) => setTimeout(resolve, this.pollMs));
    }
  }

  /** Resolves once every currently in-flight preview has settled. */
  async settle(): Promise<void> {
    while (this.inFlight.size > 0) {
      await Promise.allSettled([...this.inFlight]);
    }
  }

  private trackInFlight(task: Promise<void>): void {
    this.inFlight.add(task);
    void task.finally(() => this.inFlight.delete(task));
  }

  private onImageClick(ev: MouseEvent): void {
    if (!this.info) return;
    const rect = this.centerImg.getBoundingClientRect();
    if (rect.width === 0 || rect.height === 0) return;
    const x = Math.floor(((ev.clientX - rect.left) / rect.width) * this.info.width);
    const y = Math.floor(((ev.clientY - rect.top) / rect.height) * this.info.height);
    void this.clickAt(x, y);
  }

  private showPreview(blob: Blob): void {
    // happy-dom lacks object URLs; state carries the applied sequence either way
    if (typeof URL.createObjectURL === "function") {
      const url = URL.createObjectURL(blob);
      if (this.previewImg.src.startsWith("blob:")) {
        URL.revokeObjectURL(this.previewImg.src);
      }
      this.previewImg.src = url;
    }
  }

  private showError(err: unknown): void {
    const prefix = err instanceof ApiError && err.field ? `${err.field}: ` : "";
    this.state.error = prefix + (err instanceof Error ? err.message : String(err));
    this.errorBox.textContent = this.state.error;
    this.errorBox.hidden = false;
  }

  private clearError(): void {
    this.state.error = null;
    this.errorBox.hidden = true;
  }
}
