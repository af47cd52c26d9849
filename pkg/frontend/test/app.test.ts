import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { startApp, type App } from "../src/main.js";
import { redEdgeIdsInDom } from "../src/render.js";

import graphDoc from "./fixtures/graph.json";
import responses from "./fixtures/filter_responses.json";

const FIG4 = "FA & !FB & FC";

function jsonResponse(status: number, body: unknown) {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  };
}

/** Fetch stub speaking the service's wire contract, from recorded replies. */
function stubFetch(graph: unknown = graphDoc) {
  const calls: Array<{ url: string; expr?: string }> = [];
  const impl = async (url: string, init?: RequestInit) => {
    if (url.endsWith("/graph")) {
      calls.push({ url });
      return jsonResponse(200, graph);
    }
    if (url.endsWith("/filter")) {
      const { expr } = JSON.parse(String(init?.body)) as { expr: string };
      calls.push({ url, expr });
      if (init?.signal?.aborted) {
        throw new DOMException("aborted", "AbortError");
      }
      if (expr in responses) {
        return jsonResponse(200, responses[expr as keyof typeof responses]);
      }
      if (expr === "FA &") {
        return jsonResponse(400, {
          error: "expected identifier, 'true', 'false', '!' or '(' (at offset 4)",
          offset: 4,
        });
      }
      return jsonResponse(400, { error: `unknown feature: ${expr}` });
    }
    throw new Error(`unexpected url ${url}`);
  };
  vi.stubGlobal("fetch", vi.fn(impl));
  return calls;
}

function mountDom() {
  document.body.innerHTML = `
    <div id="topbar">
      <input id="expr" type="text" />
      <div id="features"></div>
      <div id="error" style="display:none"></div>
      <div id="notice" style="display:none"></div>
    </div>
    <svg id="canvas"></svg>
  `;
}

async function typeExpression(app: App, text: string) {
  app.input.value = text;
  app.input.dispatchEvent(new Event("input", { bubbles: true }));
  await vi.advanceTimersByTimeAsync(260);
}

function svg(): SVGSVGElement {
  return document.querySelector<SVGSVGElement>("#canvas")!;
}

describe("explorer end to end (stubbed service)", () => {
  beforeEach(() => {
    vi.useFakeTimers();
    mountDom();
  });
  afterEach(() => {
    vi.useRealTimers();
    vi.unstubAllGlobals();
  });

  it("renders the ten-component fixture", async () => {
    stubFetch();
    const app = await startApp(document);
    expect(app.vm.nodes).toHaveLength(10);
    expect(svg().querySelectorAll("g.node")).toHaveLength(10);
    expect(svg().querySelectorAll("line[data-edge-id]")).toHaveLength(11);
    expect(document.querySelector("#features")!.textContent).toContain("FA");
    expect(redEdgeIdsInDom(svg())).toEqual([]);
  });

  it("highlights exactly the service-reported edges in red", async () => {
    stubFetch();
    const app = await startApp(document);
    await typeExpression(app, FIG4);
    expect(redEdgeIdsInDom(svg())).toEqual(responses[FIG4].highlighted);
    const dimmed = svg().querySelectorAll("line.dim").length;
    expect(dimmed).toBe(11 - responses[FIG4].highlighted.length);
  });

  it("clearing the textbox removes all highlights", async () => {
    stubFetch();
    const app = await startApp(document);
    await typeExpression(app, FIG4);
    expect(redEdgeIdsInDom(svg())).not.toEqual([]);
    await typeExpression(app, "");
    expect(redEdgeIdsInDom(svg())).toEqual([]);
    expect(svg().querySelectorAll("line.dim")).toHaveLength(0);
    expect(document.querySelector<HTMLElement>("#notice")!.style.display).toBe("none");
  });

  it("surfaces syntax errors without clearing the previous state", async () => {
    stubFetch();
    const app = await startApp(document);
    await typeExpression(app, FIG4);
    const before = redEdgeIdsInDom(svg());
    await typeExpression(app, "FA &");
    const error = document.querySelector<HTMLElement>("#error")!;
    expect(error.style.display).toBe("block");
    expect(error.textContent).toContain("offset 4");
    expect(redEdgeIdsInDom(svg())).toEqual(before);
  });

  it("announces the empty product set", async () => {
    stubFetch();
    const app = await startApp(document);
    await typeExpression(app, "FA & !FA");
    const notice = document.querySelector<HTMLElement>("#notice")!;
    expect(notice.textContent).toBe("empty product set");
    expect(redEdgeIdsInDom(svg())).toEqual([]);
  });

  it("debounces typing into a single request", async () => {
    const calls = stubFetch();
    const app = await startApp(document);
    app.input.value = "F";
    app.input.dispatchEvent(new Event("input"));
    await vi.advanceTimersByTimeAsync(100);
    app.input.value = "FC";
    app.input.dispatchEvent(new Event("input"));
    await vi.advanceTimersByTimeAsync(100);
    app.input.value = "FC & FD";
    app.input.dispatchEvent(new Event("input"));
    await vi.advanceTimersByTimeAsync(260);
    const filterCalls = calls.filter((c) => c.url.endsWith("/filter"));
    expect(filterCalls).toHaveLength(1);
    expect(filterCalls[0].expr).toBe("FC & FD");
    expect(redEdgeIdsInDom(svg())).toEqual(responses["FC & FD"].highlighted);
  });

  it("shows an error banner for a malformed document without crashing", async () => {
    stubFetch({ features: "oops" });
    const app = await startApp(document);
    expect(app.vm.nodes).toHaveLength(0);
    const error = document.querySelector<HTMLElement>("#error")!;
    expect(error.style.display).toBe("block");
    expect(error.textContent).toContain("failed to load graph");
  });

  it("renders an empty canvas with the feature list for an empty graph", async () => {
    stubFetch({ features: ["FA", "FB"], nodes: [], edges: [] });
    await startApp(document);
    expect(svg().querySelectorAll("g.node")).toHaveLength(0);
    expect(document.querySelector("#features")!.textContent).toBe(
      "features: FA, FB",
    );
  });
});
