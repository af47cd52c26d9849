"""HTTP service for the interactive result explorer.

Serves the component-graph document verbatim and answers filter requests:
an edge is highlighted when the user's feature expression (strengthened
by the feature model unless disabled) implies the edge's presence
condition.  An unsatisfiable expression denotes the empty product set and
highlights nothing.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import featexpr as fx


class GraphService:
    """Immutable snapshot of graph, store, and feature model."""

    def __init__(self, graph_doc, fm_constraints=None, include_fm=True):
        self.doc = graph_doc
        registry = fx.FeatureRegistry()
        store = fx.PcStore(registry)
        for name in graph_doc.get("features", []):
            registry.register(name)
        self.edges = []
        for edge in graph_doc.get("edges", []):
            self.edges.append((edge["id"], store.parse_pc(edge["pc"])))
        if fm_constraints:
            fm = fx.FeatureModel.compile(
                [fx.parse_feature_expr(c, registry) for c in fm_constraints], store
            )
            self.fm_pc = fm.compiled
        else:
            self.fm_pc = store.true
        self.include_fm = include_fm
        self.store = store
        registry.open = False  # filter expressions may not invent features
        self._lock = threading.Lock()

    @classmethod
    def from_files(cls, graph_path, fm_path=None, include_fm=True):
        doc = json.loads(Path(graph_path).read_text())
        constraints = None
        if fm_path is not None:
            constraints = [
                line.split("#", 1)[0].strip()
                for line in Path(fm_path).read_text().splitlines()
            ]
            constraints = [c for c in constraints if c]
        return cls(doc, constraints, include_fm)

    def filter(self, expr_text):
        """Highlighted edge ids for a feature expression, in document order."""
        with self._lock:
            expr = fx.parse_feature_expr(expr_text, self.store.registry)
            antecedent = self.store.to_pc(expr)
            if self.include_fm:
                antecedent = antecedent & self.fm_pc
            if antecedent.is_false:
                return {"highlighted": [], "satisfiable": False}
            highlighted = [
                edge_id
                for edge_id, pc in self.edges
                if fx.implies(antecedent, pc)
            ]
            return {"highlighted": highlighted, "satisfiable": True}


def _make_handler(service, graph_bytes, ui_dir):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # tests want quiet servers
            pass

        def _send(self, status, payload, content_type="application/json"):
            body = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self._send(204, b"", "text/plain")

        def do_GET(self):
            path = self.path.split("?", 1)[0]
            if path == "/graph":
                self._send(200, graph_bytes)
                return
            if ui_dir is not None:
                target = "index.html" if path == "/" else path.lstrip("/")
                candidate = (ui_dir / target).resolve()
                if (
                    candidate.is_file()
                    and ui_dir.resolve() in candidate.parents
                ):
                    ctype = mimetypes.guess_type(candidate.name)[0] or "text/plain"
                    self._send(200, candidate.read_bytes(), ctype)
                    return
            self._send(404, {"error": "not found"})

        def do_POST(self):
            if self.path.split("?", 1)[0] != "/filter":
                self._send(404, {"error": "not found"})
                return
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw)
            except json.JSONDecodeError as exc:
                self._send(400, {"error": f"malformed JSON: {exc}"})
                return
            expr = body.get("expr") if isinstance(body, dict) else None
            if not isinstance(expr, str):
                self._send(400, {"error": "body must be an object with an 'expr' string"})
                return
            try:
                result = service.filter(expr)
            except fx.FeatureExprSyntaxError as exc:
                self._send(400, {"error": str(exc), "offset": exc.offset})
                return
            except fx.UnknownFeatureError as exc:
                self._send(400, {"error": str(exc)})
                return
            self._send(200, result)

    return Handler


def make_server(graph_path, fm_path=None, port=8080, include_fm=True, ui_dir=None):
    """Build (server, service); caller runs server.serve_forever()."""
    service = GraphService.from_files(graph_path, fm_path, include_fm)
    graph_bytes = Path(graph_path).read_bytes()
    ui = Path(ui_dir) if ui_dir is not None else None
    handler = _make_handler(service, graph_bytes, ui)
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    return server, service
