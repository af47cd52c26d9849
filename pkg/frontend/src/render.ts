/** SVG rendering of the component graph. */

import type { EdgeView, GraphViewModel } from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_RADIUS = 22;

function el<K extends string>(tag: K, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function edgeClass(edge: EdgeView): string {
  if (edge.highlighted) {
    return "edge red";
  }
  return edge.dimmed ? "edge dim" : "edge";
}

export function renderGraph(svg: SVGSVGElement, vm: GraphViewModel): void {
  svg.textContent = "";
  const defs = el("defs", {});
  for (const [id, cls] of [
    ["arrow", "arrowhead"],
    ["arrow-red", "arrowhead red"],
    ["arrow-dim", "arrowhead dim"],
  ]) {
    const marker = el("marker", {
      id,
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    const path = el("path", { d: "M 0 0 L 10 5 L 0 10 z" });
    path.setAttribute("class", cls);
    marker.appendChild(path);
    defs.appendChild(marker);
  }
  svg.appendChild(defs);

  const byId = new Map(vm.nodes.map((n) => [n.id, n]));
  const edgeLayer = el("g", { class: "edges" });
  for (const edge of vm.edges) {
    const a = byId.get(edge.src);
    const b = byId.get(edge.dst);
    if (!a || !b) {
      continue;
    }
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const d = Math.sqrt(dx * dx + dy * dy) || 1;
    // stop at the node circle so the arrowhead stays visible
    const tx = b.x - (dx / d) * (NODE_RADIUS + 4);
    const ty = b.y - (dy / d) * (NODE_RADIUS + 4);
    const sx = a.x + (dx / d) * NODE_RADIUS;
    const sy = a.y + (dy / d) * NODE_RADIUS;
    const line = el("line", {
      x1: String(sx),
      y1: String(sy),
      x2: String(tx),
      y2: String(ty),
      "data-edge-id": edge.id,
    });
    line.setAttribute("class", edgeClass(edge));
    const title = el("title", {});
    title.textContent = `${edge.id}  [${edge.pc}]  (${edge.witnesses} witness${
      edge.witnesses === 1 ? "" : "es"
    })`;
    line.appendChild(title);
    edgeLayer.appendChild(line);
  }
  svg.appendChild(edgeLayer);

  const nodeLayer = el("g", { class: "nodes" });
  for (const node of vm.nodes) {
    const group = el("g", { class: "node", "data-node-id": node.id });
    group.appendChild(
      el("circle", { cx: String(node.x), cy: String(node.y), r: String(NODE_RADIUS) }),
    );
    const label = el("text", {
      x: String(node.x),
      y: String(node.y + 4),
      "text-anchor": "middle",
    });
    label.textContent = node.id;
    group.appendChild(label);
    nodeLayer.appendChild(group);
  }
  svg.appendChild(nodeLayer);
  updateHighlights(svg, vm);
}

/** Restyle edges in place after a filter response; no relayout. */
export function updateHighlights(svg: SVGSVGElement, vm: GraphViewModel): void {
  const byId = new Map(vm.edges.map((e) => [e.id, e]));
  for (const line of svg.querySelectorAll<SVGLineElement>("line[data-edge-id]")) {
    const edge = byId.get(line.getAttribute("data-edge-id") ?? "");
    if (!edge) {
      continue;
    }
    line.setAttribute("class", edgeClass(edge));
    const marker = edge.highlighted ? "arrow-red" : edge.dimmed ? "arrow-dim" : "arrow";
    line.setAttribute("marker-end", `url(#${marker})`);
  }
}

export function redEdgeIdsInDom(svg: SVGSVGElement): string[] {
  return [...svg.querySelectorAll<SVGLineElement>("line[data-edge-id]")]
    .filter((line) => line.classList.contains("red"))
    .map((line) => line.getAttribute("data-edge-id") ?? "");
}
