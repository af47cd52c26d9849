/** Typed client for the analysis service; all reasoning stays server-side. */

export interface Witness {
  from: string;
  to: string;
  pc: string;
}

export interface GraphEdge {
  id: string;
  src: string;
  dst: string;
  pc: string;
  witnesses: Witness[];
}

export interface GraphDoc {
  features: string[];
  nodes: string[];
  edges: GraphEdge[];
}

export interface FilterResponse {
  highlighted: string[];
  satisfiable: boolean;
}

/** Service-reported failure (syntax error, unknown feature, bad request). */
export class FilterRequestError extends Error {
  readonly offset?: number;
  readonly status: number;

  constructor(message: string, status: number, offset?: number) {
    super(message);
    this.status = status;
    this.offset = offset;
  }
}

export class MalformedGraphError extends Error {}

function checkGraphDoc(doc: unknown): GraphDoc {
  const d = doc as GraphDoc;
  if (
    d === null ||
    typeof d !== "object" ||
    !Array.isArray(d.features) ||
    !Array.isArray(d.nodes) ||
    !Array.isArray(d.edges) ||
    d.edges.some(
      (e) =>
        typeof e?.id !== "string" ||
        typeof e?.src !== "string" ||
        typeof e?.dst !== "string" ||
        typeof e?.pc !== "string",
    )
  ) {
    throw new MalformedGraphError("graph document has an unexpected shape");
  }
  return d;
}

export async function fetchGraph(base = ""): Promise<GraphDoc> {
  const resp = await fetch(`${base}/graph`);
  if (!resp.ok) {
    throw new Error(`GET /graph failed: ${resp.status}`);
  }
  let doc: unknown;
  try {
    doc = await resp.json();
  } catch {
    throw new MalformedGraphError("graph document is not valid JSON");
  }
  return checkGraphDoc(doc);
}

export async function postFilter(
  expr: string,
  signal?: AbortSignal,
  base = "",
): Promise<FilterResponse> {
  const resp = await fetch(`${base}/filter`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ expr }),
    signal,
  });
  const body = (await resp.json()) as FilterResponse & {
    error?: string;
    offset?: number;
  };
  if (!resp.ok) {
    throw new FilterRequestError(
      body.error ?? `filter failed: ${resp.status}`,
      resp.status,
      body.offset,
    );
  }
  return { highlighted: body.highlighted, satisfiable: body.satisfiable };
}
