/** View state for the component-interaction explorer.
 *
 * Highlight flags mirror the last successful filter response and nothing
 * else; the client never computes implications itself.
 */

import type { FilterResponse, GraphDoc } from "./api.js";
import { forceLayout, type Point } from "./layout.js";

export interface NodeView extends Point {
  id: string;
}

export interface EdgeView {
  id: string;
  src: string;
  dst: string;
  pc: string;
  witnesses: number;
  highlighted: boolean;
  dimmed: boolean;
}

export class GraphViewModel {
  nodes: NodeView[] = [];
  edges: EdgeView[] = [];
  features: string[] = [];
  expression = "";
  notice: string | null = null;
  error: string | null = null;
  lastResponse: FilterResponse | null = null;

  static fromDoc(doc: GraphDoc, width = 900, height = 600, seed = 1): GraphViewModel {
    const vm = new GraphViewModel();
    vm.features = [...doc.features];
    const positions = forceLayout(doc.nodes, doc.edges, width, height, seed);
    vm.nodes = doc.nodes.map((id) => ({ id, ...positions.get(id)! }));
    vm.edges = doc.edges.map((e) => ({
      id: e.id,
      src: e.src,
      dst: e.dst,
      pc: e.pc,
      witnesses: e.witnesses.length,
      highlighted: false,
      dimmed: false,
    }));
    return vm;
  }

  /** Apply a successful service response for the given expression. */
  applyFilter(expression: string, response: FilterResponse): void {
    this.expression = expression;
    this.lastResponse = response;
    this.error = null;
    const red = new Set(response.highlighted);
    for (const edge of this.edges) {
      edge.highlighted = red.has(edge.id);
      edge.dimmed = !red.has(edge.id);
    }
    this.notice = response.satisfiable ? null : "empty product set";
  }

  /** A failed request keeps the previous highlight state. */
  applyFailure(expression: string, message: string, offset?: number): void {
    this.expression = expression;
    this.error = offset === undefined ? message : `${message}`;
    this.notice = null;
  }

  /** Clearing the textbox removes every highlight and message. */
  clear(): void {
    this.expression = "";
    this.lastResponse = null;
    this.error = null;
    this.notice = null;
    for (const edge of this.edges) {
      edge.highlighted = false;
      edge.dimmed = false;
    }
  }

  redEdgeIds(): string[] {
    return this.edges.filter((e) => e.highlighted).map((e) => e.id);
  }
}
