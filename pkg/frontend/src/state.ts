/** What-if explorer state: one feature map, its latest service views.
 *
 * Concurrency rules: at most one in-flight flip per control, and responses
 * apply latest-wins, so the rendered rating always describes the feature
 * map on screen. Every displayed number comes from a service response; no
 * model math happens here.
 */
import {
  ApiClient,
  ExplainResponse,
  FeatureMap,
  RateResponse,
  SchemaEntry,
  SuggestResponse,
} from "./api.js";

export function defaultFeatureMap(
  schema: SchemaEntry[],
  numericValues: FeatureMap = {},
): FeatureMap {
  const features: FeatureMap = {};
  for (const entry of schema) {
    features[entry.name] = entry.kind === "binary" ? 0 : (numericValues[entry.name] ?? 0);
  }
  return features;
}

export class WhatIfStore {
  schema: SchemaEntry[] = [];
  features: FeatureMap = {};
  rate: RateResponse | null = null;
  explain: ExplainResponse | null = null;
  suggest: SuggestResponse | null = null;
  error: string | null = null;
  notice: string | null = null;
  readonly pending = new Set<string>();

  private version = 0;
  private listeners: Array<() => void> = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async init(numericValues: FeatureMap = {}): Promise<void> {
    this.schema = await this.api.schema();
    this.features = defaultFeatureMap(this.schema, numericValues);
    await this.refreshViews();
  }

  /** Fetch rate/explain/suggest for the current map; applies only if no
   * newer interaction has started meanwhile. */
  private async refreshViews(): Promise<void> {
    const version = ++this.version;
    const snapshot = { ...this.features };
    const [rate, explain, suggest] = await Promise.all([
      this.api.rate(snapshot),
      this.api.explain(snapshot),
      this.api.suggest(snapshot),
    ]);
    if (version !== this.version) return;
    this.rate = rate;
    this.explain = explain;
    this.suggest = suggest;
    this.emit();
  }

  async toggleAmenity(name: string): Promise<void> {
    const entry = this.schema.find((s) => s.name === name);
    if (!entry || entry.kind !== "binary") {
      this.error = `not a toggleable amenity: ${name}`;
      this.emit();
      return;
    }
    if (this.pending.has(name)) {
      // second rapid click: the flip is already on its way
      this.notice = `still applying ${name}`;
      this.emit();
      return;
    }

    const base = { ...this.features };
    this.features = { ...base, [name]: base[name] ? 0 : 1 };
    this.pending.add(name);
    this.error = null;
    this.notice = null;
    const version = ++this.version;
    this.emit();

    try {
      const flipped = { ...this.features };
      const [what, explain, suggest] = await Promise.all([
        this.api.whatif(base, [name]),
        this.api.explain(flipped),
        this.api.suggest(flipped),
      ]);
      this.pending.delete(name);
      if (version !== this.version) {
        // a newer interaction owns the view; just unmark the control
        this.emit();
        return;
      }
      this.rate = what.after;
      this.explain = explain;
      this.suggest = suggest;
      this.notice = null;
      this.emit();
    } catch (err) {
      this.pending.delete(name);
      // revert just this control, then resync the views to whatever is shown
      this.features = { ...this.features, [name]: base[name] };
      this.error = err instanceof Error ? err.message : String(err);
      this.emit();
      await this.refreshViews();
    }
  }

  async applySuggestion(name: string): Promise<void> {
    const listed = this.suggest?.items.some((item) => item.feature === name) ?? false;
    if (!listed) {
      this.notice = `no longer suggested: ${name}`;
      this.emit();
      return;
    }
    await this.toggleAmenity(name);
  }
}
