/** Wires the explorer together: load, layout, render, filter-as-you-type. */

import { FilterRequestError, fetchGraph, postFilter } from "./api.js";
import { LatestWins, debounce } from "./debounce.js";
import { GraphViewModel } from "./model.js";
import { renderGraph, updateHighlights } from "./render.js";

export const DEBOUNCE_MS = 250;
export const LAYOUT_SEED = 20;

export interface App {
  vm: GraphViewModel;
  input: HTMLInputElement;
}

function show(element: HTMLElement, text: string | null): void {
  element.textContent = text ?? "";
  element.style.display = text ? "block" : "none";
}

export async function startApp(root: Document = document): Promise<App> {
  const svg = root.querySelector<SVGSVGElement>("#canvas")!;
  const input = root.querySelector<HTMLInputElement>("#expr")!;
  const errorBanner = root.querySelector<HTMLElement>("#error")!;
  const noticeBanner = root.querySelector<HTMLElement>("#notice")!;
  const featureList = root.querySelector<HTMLElement>("#features")!;

  let vm = new GraphViewModel();
  try {
    const doc = await fetchGraph();
    vm = GraphViewModel.fromDoc(
      doc,
      svg.clientWidth || 900,
      svg.clientHeight || 600,
      LAYOUT_SEED,
    );
    renderGraph(svg, vm);
    featureList.textContent = vm.features.length
      ? `features: ${vm.features.join(", ")}`
      : "features: (none)";
    show(errorBanner, null);
  } catch (err) {
    show(errorBanner, `failed to load graph: ${(err as Error).message}`);
  }

  const inflight = new LatestWins();

  const runFilter = async (expr: string) => {
    try {
      const response = await postFilter(expr, inflight.begin());
      vm.applyFilter(expr, response);
      show(errorBanner, null);
      show(noticeBanner, vm.notice);
      updateHighlights(svg, vm);
    } catch (err) {
      if ((err as Error).name === "AbortError") {
        return; // a newer request superseded this one
      }
      if (err instanceof FilterRequestError) {
        const where = err.offset === undefined ? "" : ` at offset ${err.offset}`;
        vm.applyFailure(expr, err.message, err.offset);
        show(errorBanner, `${err.message}${where}`);
      } else {
        vm.applyFailure(expr, (err as Error).message);
        show(errorBanner, `service error: ${(err as Error).message}`);
      }
      show(noticeBanner, null);
      // previous highlights stay in place on failure
    }
  };

  const debounced = debounce((expr: string) => {
    void runFilter(expr);
  }, DEBOUNCE_MS);

  input.addEventListener("input", () => {
    const expr = input.value.trim();
    if (expr === "") {
      debounced.cancel();
      inflight.cancel();
      vm.clear();
      show(errorBanner, null);
      show(noticeBanner, null);
      updateHighlights(svg, vm);
      return;
    }
    debounced(expr);
  });

  return { vm, input };
}

declare global {
  interface Window {
    __appStarted?: Promise<App>;
  }
}

function autoStart(): void {
  // the canvas is absent when this module is imported outside the page
  if (document.querySelector("#canvas") !== null) {
    window.__appStarted = startApp();
  }
}

if (typeof document !== "undefined") {
  if (document.readyState !== "loading") {
    autoStart();
  } else {
    document.addEventListener("DOMContentLoaded", autoStart);
  }
}
