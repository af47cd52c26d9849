"""Pipeline driver: extract, ta2tsv, solve, analyze, bench, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import featexpr as fx
from .analysis import (
    behaviour_alteration_program,
    build_component_graph,
    export_graph_json,
)
from .datalog import load_facts, parse_program
from .engine import EvalOptions, apply_feature_model, evaluate_lifted
from .extractor import extract_dir, load_extraction_config
from .synth import SyntheticSpec, run_benchmark
from .tamodel import emit_ta, parse_ta, ta2tsv


class StageError(Exception):
    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@dataclass
class PipelineConfig:
    """Resolved inputs for a full pipeline run; paths must exist up front."""

    source_dir: Path
    extraction_config: Path
    output_dir: Path
    rules_path: Path | None = None  # None selects the bundled analysis
    feature_model_path: Path | None = None
    serve_port: int = 8080

    @classmethod
    def from_args(cls, args):
        cfg = cls(
            source_dir=Path(args.src),
            extraction_config=Path(args.config),
            output_dir=Path(args.out),
            rules_path=Path(args.rules) if args.rules else None,
            feature_model_path=Path(args.feature_model) if args.feature_model else None,
        )
        cfg.validate()
        return cfg

    def validate(self):
        required = {
            "source directory": self.source_dir,
            "extraction config": self.extraction_config,
        }
        if self.rules_path is not None:
            required["rules file"] = self.rules_path
        if self.feature_model_path is not None:
            required["feature model"] = self.feature_model_path
        for what, path in required.items():
            if not path.exists():
                raise FileNotFoundError(f"{what} does not exist: {path}")


def _run_stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc


def cmd_extract(args):
    cfg = _run_stage("extract", load_extraction_config, args.config)
    store = fx.PcStore()
    graph = _run_stage("extract", extract_dir, args.src, cfg, store)
    text = _run_stage("extract", emit_ta, graph)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(f"wrote {out} ({len(graph.nodes)} nodes, {len(graph.edges)} edges)")
    return 0


def cmd_ta2tsv(args):
    doc = _run_stage("ta2tsv", parse_ta, Path(args.ta).read_text())
    written = _run_stage("ta2tsv", ta2tsv, doc, args.out)
    print(f"wrote {len(written)} fact files to {args.out}")
    return 0


def _load_rules(rules_path):
    if rules_path is None:
        return parse_program(behaviour_alteration_program().program_text)
    return parse_program(Path(rules_path).read_text())


def _solve(facts_dir, rules_path, fm_path, fm_during_eval, out_dir):
    program = _run_stage("solve", _load_rules, rules_path)
    store = fx.PcStore()
    db = _run_stage("solve", load_facts, facts_dir, program.decls, store)
    fm = None
    if fm_path is not None:
        fm = _run_stage("solve", fx.FeatureModel.load, fm_path, store)
    opts = EvalOptions(feature_model=fm, prune_with_fm_during_eval=fm_during_eval)
    out_db, stats = _run_stage("solve", evaluate_lifted, program, db, store, opts)
    fm_removed = 0
    if fm is not None and not fm_during_eval:
        out_db, fm_removed = apply_feature_model(out_db, fm)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    render_cache: dict[int, str] = {}

    def render(pc):
        text = render_cache.get(pc.node)
        if text is None:
            text = "" if pc.is_true else fx.render_pc(pc)
            render_cache[pc.node] = text
        return text

    for name in program.output_relations():
        with (out_dir / f"{name}.facts").open("w") as fh:
            for tup in sorted(out_db.tuples(name)):
                pc = out_db.tuples(name)[tup]
                fh.write("\t".join(tup) + f"\t{render(pc)}\n")

    report_lines = stats.report_text()
    report_lines += f"fm_removed\t{fm_removed}\n"
    report_lines += f"load_dropped_unsat\t{db.dropped_unsat}\n"
    (out_dir / "stats.txt").write_text(report_lines)
    record = stats.as_dict()
    record["fm_removed"] = fm_removed
    record["load_dropped_unsat"] = db.dropped_unsat
    (out_dir / "stats.json").write_text(json.dumps(record, indent=2) + "\n")
    return program, store, out_db, stats, fm_removed


def cmd_solve(args):
    _, _, out_db, stats, fm_removed = _solve(
        args.facts, args.rules, args.feature_model, args.fm_during_eval, args.out
    )
    if args.stats:
        sys.stdout.write(stats.report_text())
        sys.stdout.write(f"fm_removed\t{fm_removed}\n")
    print(f"solved: {stats.output_facts} derived facts -> {args.out}")
    return 0


def cmd_analyze(args):
    pipeline = _run_stage("analyze", PipelineConfig.from_args, args)
    out_dir = pipeline.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    cfg = _run_stage("extract", load_extraction_config, pipeline.extraction_config)
    store = fx.PcStore()
    graph = _run_stage("extract", extract_dir, pipeline.source_dir, cfg, store)
    ta_path = out_dir / "model.ta"
    ta_path.write_text(_run_stage("extract", emit_ta, graph))

    doc = _run_stage("ta2tsv", parse_ta, ta_path.read_text())
    facts_dir = out_dir / "facts"
    _run_stage("ta2tsv", ta2tsv, doc, facts_dir)

    program, solve_store, out_db, stats, _ = _solve(
        facts_dir,
        pipeline.rules_path,
        pipeline.feature_model_path,
        args.fm_during_eval,
        out_dir,
    )

    if "behAlter" in program.decls and "cFunction" in program.decls:
        component_graph = _run_stage(
            "analyze",
            build_component_graph,
            out_db.tuples("behAlter"),
            out_db.tuples("cFunction"),
            solve_store,
        )
        (out_dir / "graph.json").write_text(export_graph_json(component_graph))
        print(
            f"analyzed: {len(component_graph.edges)} component edges -> "
            f"{out_dir / 'graph.json'}"
        )
    else:
        print("analyzed: rules define no behAlter/cFunction; graph.json skipped")
    return 0


def cmd_bench(args):
    spec = SyntheticSpec(
        tuples=args.tuples,
        features=args.features,
        variational_pct=args.variational_pct,
        planted_unsat=args.planted_unsat,
        seed=args.seed,
    )
    report = _run_stage("bench", run_benchmark, spec, args.repetitions)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    sys.stdout.write(text)
    return 0


def cmd_serve(args):
    from .server import make_server

    port = args.port
    env_port = os.environ.get("PCLIFT_PORT")
    if env_port:
        port = int(env_port)
    server, _ = _run_stage(
        "serve",
        make_server,
        args.graph,
        args.feature_model,
        port,
        not args.no_fm,
        args.ui,
    )
    host, actual_port = server.server_address[:2]
    print(f"serving on http://{host}:{actual_port} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pclift",
        description="Variability-aware fact extraction and Datalog analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract a TA model from sources")
    p.add_argument("--src", required=True, help="source directory")
    p.add_argument("--config", required=True, help="extraction config (INI)")
    p.add_argument("--out", required=True, help="output TA file")
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("ta2tsv", help="convert a TA model to fact files")
    p.add_argument("--ta", required=True, help="input TA file")
    p.add_argument("--out", required=True, help="output fact directory")
    p.set_defaults(fn=cmd_ta2tsv)

    p = sub.add_parser("solve", help="run Datalog rules over fact files")
    p.add_argument("--facts", required=True, help="fact directory")
    p.add_argument("--rules", help="rules file (.dl); default: behaviour alteration")
    p.add_argument("--feature-model", help="feature model file")
    p.add_argument(
        "--fm-during-eval",
        action="store_true",
        help="check satisfiability modulo the feature model during inference",
    )
    p.add_argument("--stats", action="store_true", help="print the stats report")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("analyze", help="extract, convert, solve, and export a graph")
    p.add_argument("--src", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--rules")
    p.add_argument("--feature-model")
    p.add_argument("--fm-during-eval", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("bench", help="benchmark lifted vs condition-free runs")
    p.add_argument("--tuples", type=int, default=10_000)
    p.add_argument("--features", type=int, default=50)
    p.add_argument("--variational-pct", type=float, default=1.0)
    p.add_argument("--planted-unsat", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("serve", help="serve a graph document for the UI")
    p.add_argument("--graph", required=True, help="graph.json path")
    p.add_argument("--feature-model")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument(
        "--no-fm",
        action="store_true",
        help="do not strengthen filter expressions with the feature model",
    )
    p.add_argument("--ui", help="directory of UI static files to serve at /")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except StageError as exc:
        print(f"error in {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
