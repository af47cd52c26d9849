#!/usr/bin/env python3
"""End-to-end demo on the bundled fixtures.

Extracts the ten-component system, runs the behaviour-alteration rules,
prints the component interactions with their presence conditions, and
(with --serve) starts the HTTP service for the browser UI.
"""

import argparse
import json
from pathlib import Path

from pclift.cli import main as cli_main

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "pclift" / "fixtures"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fixture", choices=["fig1", "comp10"], default="comp10")
    parser.add_argument("--out", default="out/demo")
    parser.add_argument("--serve", action="store_true")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--ui", help="directory of built UI files to host at /")
    args = parser.parse_args()

    fixture = FIXTURES / args.fixture
    argv = [
        "analyze",
        "--src", str(fixture / "src"),
        "--config", str(fixture / "extraction.ini"),
        "--out", args.out,
    ]
    fm = fixture / "fm.txt"
    if fm.exists():
        argv += ["--feature-model", str(fm)]
    if cli_main(argv) != 0:
        raise SystemExit(1)

    doc = json.loads((Path(args.out) / "graph.json").read_text())
    print(f"\nfeatures: {', '.join(doc['features'])}")
    print(f"{len(doc['nodes'])} components, {len(doc['edges'])} interactions:")
    for edge in doc["edges"]:
        print(f"  {edge['src']:>4} -> {edge['dst']:<4}  [{edge['pc']}]")

    if args.serve:
        argv = ["serve", "--graph", str(Path(args.out) / "graph.json"),
                "--port", str(args.port)]
        if fm.exists():
            argv += ["--feature-model", str(fm)]
        if args.ui:
            argv += ["--ui", args.ui]
        raise SystemExit(cli_main(argv))


if __name__ == "__main__":
    main()
