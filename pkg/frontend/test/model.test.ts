import { describe, expect, it } from "vitest";

import type { GraphDoc } from "../src/api.js";
import { GraphViewModel } from "../src/model.js";

import graphDoc from "./fixtures/graph.json";
import responses from "./fixtures/filter_responses.json";

const doc = graphDoc as GraphDoc;
const FIG4 = "FA & !FB & FC";

function makeVm(): GraphViewModel {
  return GraphViewModel.fromDoc(doc, 900, 600, 20);
}

describe("GraphViewModel.fromDoc", () => {
  it("carries all nodes, edges, and features", () => {
    const vm = makeVm();
    expect(vm.nodes.map((n) => n.id)).toEqual(doc.nodes);
    expect(vm.edges.map((e) => e.id)).toEqual(doc.edges.map((e) => e.id));
    expect(vm.features).toEqual(doc.features);
    expect(vm.redEdgeIds()).toEqual([]);
  });

  it("keeps edge pc strings verbatim for tooltips", () => {
    const vm = makeVm();
    const byId = new Map(vm.edges.map((e) => [e.id, e.pc]));
    for (const edge of doc.edges) {
      expect(byId.get(edge.id)).toBe(edge.pc);
    }
  });
});

describe("applyFilter", () => {
  it("mirrors the service response exactly", () => {
    const vm = makeVm();
    vm.applyFilter(FIG4, responses[FIG4]);
    expect(vm.redEdgeIds()).toEqual(responses[FIG4].highlighted);
    for (const edge of vm.edges) {
      expect(edge.dimmed).toBe(!edge.highlighted);
    }
    expect(vm.notice).toBeNull();
    expect(vm.error).toBeNull();
  });

  it("replaces the previous highlight set wholesale", () => {
    const vm = makeVm();
    vm.applyFilter(FIG4, responses[FIG4]);
    vm.applyFilter("true", responses["true"]);
    expect(vm.redEdgeIds()).toEqual(responses["true"].highlighted);
  });

  it("reports the empty product set", () => {
    const vm = makeVm();
    vm.applyFilter("FA & !FA", responses["FA & !FA"]);
    expect(vm.redEdgeIds()).toEqual([]);
    expect(vm.notice).toBe("empty product set");
  });
});

describe("applyFailure", () => {
  it("retains the previous highlights", () => {
    const vm = makeVm();
    vm.applyFilter(FIG4, responses[FIG4]);
    vm.applyFailure("FA &", "syntax error", 4);
    expect(vm.redEdgeIds()).toEqual(responses[FIG4].highlighted);
    expect(vm.error).toContain("syntax error");
  });
});

describe("clear", () => {
  it("removes highlights, dimming, and messages", () => {
    const vm = makeVm();
    vm.applyFilter(FIG4, responses[FIG4]);
    vm.clear();
    expect(vm.redEdgeIds()).toEqual([]);
    expect(vm.edges.every((e) => !e.dimmed)).toBe(true);
    expect(vm.notice).toBeNull();
    expect(vm.error).toBeNull();
    expect(vm.lastResponse).toBeNull();
  });
});
