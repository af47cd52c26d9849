import json
from pathlib import Path

import pytest

from pclift.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "pclift" / "fixtures"
FIG1 = FIXTURES / "fig1"
COMP10 = FIXTURES / "comp10"


def run(*argv):
    return main([str(a) for a in argv])


class TestStages:
    def test_extract_writes_ta(self, tmp_path):
        out = tmp_path / "model.ta"
        assert run(
            "extract", "--src", FIG1 / "src", "--config", FIG1 / "extraction.ini",
            "--out", out,
        ) == 0
        text = out.read_text()
        assert "$INSTANCE C1 COMPONENT" in text
        assert "varWrite C2.c#GlobVar C1.cpp#A#x" in text

    def test_ta2tsv_writes_facts(self, tmp_path):
        ta = tmp_path / "model.ta"
        run("extract", "--src", FIG1 / "src", "--config", FIG1 / "extraction.ini", "--out", ta)
        facts = tmp_path / "facts"
        assert run("ta2tsv", "--ta", ta, "--out", facts) == 0
        assert (facts / "varWrite.facts").exists()
        assert (facts / "instance.facts").exists()

    def test_solve_writes_outputs_and_stats(self, tmp_path):
        ta = tmp_path / "model.ta"
        facts = tmp_path / "facts"
        out = tmp_path / "out"
        run("extract", "--src", FIG1 / "src", "--config", FIG1 / "extraction.ini", "--out", ta)
        run("ta2tsv", "--ta", ta, "--out", facts)
        assert run("solve", "--facts", facts, "--out", out, "--stats") == 0
        rows = (out / "behAlter.facts").read_text().splitlines()
        assert len(rows) == 1
        f0, f1, pc = rows[0].split("\t")
        assert f0.endswith("#updateX") and f1.endswith("#foo")
        assert pc == "FA & !FB"
        stats = json.loads((out / "stats.json").read_text())
        assert stats["output_facts"] == 4
        assert stats["unsat_dropped"] == 0
        assert "stats.txt" in {p.name for p in out.iterdir()}

    def test_stats_reconcile_with_written_facts(self, tmp_path):
        from pclift import featexpr as fx

        out = tmp_path / "run"
        run(
            "analyze", "--src", COMP10 / "src", "--config", COMP10 / "extraction.ini",
            "--out", out,
        )
        stats = json.loads((out / "stats.json").read_text())
        store = fx.PcStore()
        total = with_pc = 0
        handles = set()
        for name in ("transVarWrite", "behAlter"):
            for row in (out / f"{name}.facts").read_text().splitlines():
                total += 1
                pc_text = row.split("\t")[-1]
                if pc_text:
                    with_pc += 1
                    handles.add(store.parse_pc(pc_text).node)
        assert stats["output_facts"] == total
        assert stats["output_facts_with_pc"] == with_pc
        assert stats["unique_pcs"] == len(handles)
        assert stats["output_pc_percent"] == pytest.approx(100.0 * with_pc / total)

    def test_analyze_chains_everything(self, tmp_path):
        out = tmp_path / "run"
        assert run(
            "analyze", "--src", FIG1 / "src", "--config", FIG1 / "extraction.ini",
            "--out", out,
        ) == 0
        doc = json.loads((out / "graph.json").read_text())
        (edge,) = doc["edges"]
        assert edge["id"] == "C1->C2"
        assert edge["pc"] == "FA & !FB"
        assert (out / "model.ta").exists()
        assert (out / "facts" / "cFunction.facts").exists()

    def test_missing_config_fails_with_stage(self, tmp_path, capsys):
        assert run(
            "extract", "--src", FIG1 / "src", "--config", tmp_path / "nope.ini",
            "--out", tmp_path / "x.ta",
        ) == 1
        assert "error in extract" in capsys.readouterr().err

    def test_bad_rules_fail_in_solve_stage(self, tmp_path, capsys):
        facts = tmp_path / "facts"
        ta = tmp_path / "model.ta"
        run("extract", "--src", FIG1 / "src", "--config", FIG1 / "extraction.ini", "--out", ta)
        run("ta2tsv", "--ta", ta, "--out", facts)
        rules = tmp_path / "bad.dl"
        rules.write_text(".decl p(x: symbol)\np(y) :- p(x).\n")
        assert run("solve", "--facts", facts, "--rules", rules, "--out", tmp_path / "o") == 1
        assert "error in solve" in capsys.readouterr().err


class TestFeatureModelFiltering:
    def test_contradicting_results_removed(self, tmp_path):
        facts = tmp_path / "facts"
        facts.mkdir()
        (facts / "varWrite.facts").write_text(
            "a\tm\tFeat0\nm\tb\tFeat1\nx\ty\tFeat0\n"
        )
        (facts / "write.facts").write_text("")
        (facts / "varInfFunc.facts").write_text("")
        (facts / "cFunction.facts").write_text("")
        fm = tmp_path / "fm.txt"
        fm.write_text("!(Feat0 & Feat1)\n")
        out = tmp_path / "out"
        assert run(
            "solve", "--facts", facts, "--feature-model", fm, "--out", out
        ) == 0
        rows = (out / "transVarWrite.facts").read_text().splitlines()
        tuples = {tuple(r.split("\t")[:2]) for r in rows}
        assert ("a", "b") not in tuples  # Feat0 & Feat1 contradicts the model
        assert ("x", "y") in tuples
        stats = json.loads((out / "stats.json").read_text())
        assert stats["fm_removed"] == 1

    def test_fm_during_eval_prunes_instead(self, tmp_path):
        facts = tmp_path / "facts"
        facts.mkdir()
        (facts / "varWrite.facts").write_text("a\tm\tFeat0\nm\tb\tFeat1\n")
        fm = tmp_path / "fm.txt"
        fm.write_text("!(Feat0 & Feat1)\n")
        out = tmp_path / "out"
        assert run(
            "solve", "--facts", facts, "--feature-model", fm,
            "--fm-during-eval", "--out", out,
        ) == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["unsat_dropped"] == 1
        assert stats["fm_removed"] == 0
        rows = (out / "transVarWrite.facts").read_text().splitlines()
        tuples = {tuple(r.split("\t")[:2]) for r in rows}
        assert ("a", "b") not in tuples


class TestBenchCli:
    def test_report_written_and_deterministic_counts(self, tmp_path, capsys):
        out1 = tmp_path / "b1.json"
        out2 = tmp_path / "b2.json"
        args = [
            "bench", "--tuples", "600", "--features", "8",
            "--variational-pct", "2", "--planted-unsat", "3",
            "--seed", "7", "--repetitions", "3",
        ]
        assert run(*args, "--out", out1) == 0
        assert run(*args, "--out", out2) == 0
        capsys.readouterr()
        r1 = json.loads(out1.read_text())
        r2 = json.loads(out2.read_text())
        assert r1["counts"] == r2["counts"]
        assert r1["counts"]["unsat_dropped"] == 3
        assert (
            r1["counts"]["ground_output_facts"] - r1["counts"]["lifted_output_facts"]
            == r1["counts"]["unsat_dropped"]
        )

    def test_comp10_analyze(self, tmp_path):
        out = tmp_path / "run"
        assert run(
            "analyze", "--src", COMP10 / "src", "--config", COMP10 / "extraction.ini",
            "--feature-model", COMP10 / "fm.txt", "--out", out,
        ) == 0
        doc = json.loads((out / "graph.json").read_text())
        assert len(doc["nodes"]) == 10
        assert len(doc["edges"]) == 11
        assert len(doc["features"]) == 9
