/** Wiring: store + renderer + event delegation on one root element. */
import { ApiClient, FeatureMap, FetchLike } from "./api.js";
import { render } from "./render.js";
import { WhatIfStore } from "./state.js";

export interface MountOptions {
  baseUrl: string;
  numericValues?: FeatureMap;
  fetchFn?: FetchLike;
}

export async function mount(root: HTMLElement, options: MountOptions): Promise<WhatIfStore> {
  const api = options.fetchFn
    ? new ApiClient(options.baseUrl, options.fetchFn)
    : new ApiClient(options.baseUrl);
  const store = new WhatIfStore(api);
  store.onChange(() => render(store, root));

  root.addEventListener("change", (event) => {
    const target = event.target as HTMLElement | null;
    const name = target?.dataset?.toggle;
    if (name) void store.toggleAmenity(name);
  });
  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement | null)?.closest?.("[data-suggest]");
    const name = (target as HTMLElement | null)?.dataset?.suggest;
    if (name) void store.applySuggestion(name);
  });

  await store.init(options.numericValues ?? {});
  return store;
}
