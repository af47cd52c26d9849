#!/usr/bin/env python3
"""Benchmark sweep: lifted evaluation against the condition-free baseline.

Runs the synthetic workload at several scales (the largest matches the
acceptance criterion: 1e5 tuples, 500 features, 1% variational facts) and
archives the full reports under artifacts/.
"""

import argparse
import json
from pathlib import Path

from pclift.synth import SyntheticSpec, run_benchmark

SCALES = [
    SyntheticSpec(tuples=10_000, features=100, variational_pct=1.0, planted_unsat=20, seed=42),
    SyntheticSpec(tuples=50_000, features=300, variational_pct=1.0, planted_unsat=50, seed=42),
    SyntheticSpec(tuples=100_000, features=500, variational_pct=1.0, planted_unsat=50, seed=42),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repetitions", type=int, default=5)
    parser.add_argument("--out", default="artifacts/bench_sweep.json")
    args = parser.parse_args()

    reports = []
    for spec in SCALES:
        print(f"tuples={spec.tuples} features={spec.features} ...", flush=True)
        report = run_benchmark(spec, repetitions=args.repetitions)
        timing = report["timing"]
        counts = report["counts"]
        print(
            f"  ground {timing['ground_trimmed_mean']:.3f}s"
            f"  lifted {timing['lifted_trimmed_mean']:.3f}s"
            f"  overhead {timing['overhead_percent']:.1f}%"
            f"  unsat-dropped {counts['unsat_dropped']}"
        )
        reports.append(report)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(reports, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
