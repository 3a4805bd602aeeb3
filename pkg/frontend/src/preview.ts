// Debounced route-preview controller for the diagnostics panel.
// Requests are debounced while the user types and stale responses are
// discarded (cancel-by-supersede); any failure just hides the badge.

import type { ApiClient } from "./api.js";
import type { RouteDecision } from "./types.js";

export type PreviewListener = (decision: RouteDecision | null) => void;

export class RoutePreview {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;

  constructor(
    private client: ApiClient,
    private listener: PreviewListener,
    private debounceMs = 250,
  ) {}

  /** Call on every input change; empty text hides the preview. */
  update(text: string): void {
    if (this.timer !== null) clearTimeout(this.timer);
    const trimmed = text.trim();
    if (!trimmed) {
      this.generation += 1;
      this.timer = null;
      this.listener(null);
      return;
    }
    const generation = ++this.generation;
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fetch(trimmed, generation);
    }, this.debounceMs);
  }

  private async fetch(text: string, generation: number): Promise<void> {
    try {
      const decision = await this.client.previewRoute(text);
      if (generation === this.generation) this.listener(decision);
    } catch {
      if (generation === this.generation) this.listener(null);
    }
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.generation += 1;
  }
}
