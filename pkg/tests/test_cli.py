import csv
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from qsumm.annotate import annotate_threshold
from qsumm.cli import main
from qsumm.ingest import read_corpus

FAST = ["--epochs", "3"]


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--questions", "16", "--pool", "6", "--planted", "2", "--seed", "3",
                 "--out", str(d / "corpus.jsonl"),
                 "--bioasq-out", str(d / "bioasq.json"),
                 "--abstracts-out", str(d / "abstracts.jsonl")]) == 0
    return d


def _exp(work, name, *extra):
    out = work / name
    rc = main(["experiment", "--corpus", str(work / "corpus.jsonl"), "--folds", "4",
               *FAST, "--out-dir", str(out), *extra])
    return rc, out


def test_synth_writes_corpus(work):
    header, qs = read_corpus(work / "corpus.jsonl")
    assert header["seed"] == 3 and len(qs) == 16


def test_ingest_roundtrip(work):
    out = work / "ingested.jsonl"
    assert main(["ingest", "--bioasq", str(work / "bioasq.json"),
                 "--abstracts", str(work / "abstracts.jsonl"), "--out", str(out)]) == 0
    _, a = read_corpus(out)
    _, b = read_corpus(work / "corpus.jsonl")
    assert [[s.raw for s in q.sentences] for q in a] == [[s.raw for s in q.sentences] for q in b]


def test_ingest_missing_file(work, capsys):
    assert main(["ingest", "--bioasq", str(work / "nope.json"), "--out", str(work / "x")]) == 1
    assert "error" in capsys.readouterr().err


def test_annotate_threshold_matches_oracle(work):
    out = work / "ann.jsonl"
    assert main(["annotate", "--corpus", str(work / "corpus.jsonl"), "--strategy", "threshold",
                 "--t", "0.1", "--out", str(out)]) == 0
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert lines[0]["header"]["strategy"] == "threshold-0.1"
    rows = lines[1:]
    assert len(rows) == 16 * 6
    assert [r["label"] for r in rows] == annotate_threshold([r["su4_f1"] for r in rows], 0.1)


def test_annotate_dual_has_exclusions(work):
    out = work / "dual.jsonl"
    assert main(["annotate", "--corpus", str(work / "corpus.jsonl"), "--strategy", "dual",
                 "--hi", "0.7", "--lo", "0.3", "--out", str(out)]) == 0
    labels = [json.loads(x)["label"] for x in out.read_text().splitlines()[1:]]
    assert None in labels and 0 in labels


def test_annotate_bad_bounds(work):
    assert main(["annotate", "--corpus", str(work / "corpus.jsonl"), "--strategy", "dual",
                 "--hi", "0.3", "--lo", "0.7", "--out", str(work / "bad.jsonl")]) == 1


def test_experiment_outputs_and_rerun_identical(work):
    rc, a = _exp(work, "run_a")
    assert rc == 0
    rc, b = _exp(work, "run_b")
    assert rc == 0
    assert (a / "folds.csv").read_text() == (b / "folds.csv").read_text()
    assert (a / "report.json").read_text() == (b / "report.json").read_text()
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["seed"] == 42 and manifest["toolkit_version"]
    assert len(manifest["inputs"]) == 1
    report = json.loads((a / "report.json").read_text())
    micro = next(r for r in csv.reader((a / "folds.csv").read_text().splitlines()) if r[0] == "micro")
    assert float(micro[1]) == pytest.approx(report["aggregate"]["micro_mean"], abs=1e-6)


def test_experiment_folds_one_is_argument_error(work):
    rc, _ = _exp(work, "bad", "--folds", "1")
    assert rc == 1


def test_experiment_too_many_folds(work):
    rc, _ = _exp(work, "toomany", "--folds", "40")
    assert rc == 1


def test_compare_three_runs_chart_matches_csv(work):
    runs = []
    for name, extra in (("cmp_thr", []), ("cmp_topk", ["--strategy", "topk"]),
                        ("cmp_rand", ["--approach", "random"])):
        rc, out = _exp(work, name, *extra)
        assert rc == 0
        runs.append(str(out))
    out = work / "cmp"
    assert main(["compare", "--runs", *runs, "--out", str(out)]) == 0
    rows = list(csv.reader((out / "comparison.csv").read_text().splitlines()))
    header = rows[0]
    assert header[0] == "fold" and header[-1] == "winner" and len(header) == 5
    means = [float(x) for x in next(r for r in rows if r[0] == "mean")[1:4]]
    root = ET.fromstring((out / "comparison.svg").read_text())
    bars = root.findall("{http://www.w3.org/2000/svg}rect[@class='bar']")
    assert len(bars) == 3
    assert len(root.findall("{http://www.w3.org/2000/svg}g[@class='errorbar']")) == 3
    assert [float(b.get("data-mean")) for b in bars] == pytest.approx(means, abs=1e-6)
    heights = [float(b.get("height")) for b in bars]
    i = means.index(max(means))
    for h, m in zip(heights, means):
        assert h / heights[i] == pytest.approx(m / means[i], abs=0.01)


def test_compare_single_run(work):
    rc, a = _exp(work, "single")
    out = work / "cmp1"
    assert main(["compare", "--runs", str(a), "--out", str(out)]) == 0
    assert (out / "comparison.csv").read_text().splitlines()[0].count(",") == 2


def test_compare_mismatched_seeds(work):
    _, a = _exp(work, "seed1", "--approach", "random", "--seed", "1")
    _, b = _exp(work, "seed2", "--approach", "random", "--seed", "2")
    assert main(["compare", "--runs", str(a), str(b), "--out", str(work / "cmpx")]) == 1


def test_rouge_identical_and_disjoint(work):
    c = work / "cand.txt"
    r = work / "ref.txt"
    c.write_text("the gunman was killed\nalpha beta gamma\n")
    r.write_text("the gunman was killed\ndelta epsilon zeta\n")
    out = work / "rouge.csv"
    assert main(["rouge", "--candidates", str(c), "--references", str(r), "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [float(x["f1"]) for x in rows] == [1.0, 0.0]


def test_rouge_multi_reference_json(work):
    c = work / "cand.json"
    r = work / "refs.json"
    c.write_text(json.dumps(["police killed the gunman"]))
    r.write_text(json.dumps([["nothing shared", "the gunman police killed"]]))
    out = work / "rouge2.csv"
    assert main(["rouge", "--candidates", str(c), "--references", str(r), "--out", str(out)]) == 0
    row = list(csv.DictReader(out.read_text().splitlines()))[0]
    assert float(row["f1"]) == pytest.approx(0.6, abs=1e-6)


def test_rouge_length_mismatch(work):
    c = work / "c1.txt"
    c.write_text("a\nb\n")
    r = work / "r1.txt"
    r.write_text("a\n")
    assert main(["rouge", "--candidates", str(c), "--references", str(r)]) == 1


def test_train_and_summarize(work):
    model_dir = work / "model"
    assert main(["train", "--corpus", str(work / "corpus.jsonl"), *FAST,
                 "--out-dir", str(model_dir)]) == 0
    assert (model_dir / "model.json").exists() and (model_dir / "vocab.json").exists()
    out = work / "summaries.jsonl"
    assert main(["summarize", "--corpus", str(work / "corpus.jsonl"), "--model", str(model_dir),
                 "--n", "2", "--out", str(out)]) == 0
    rows = [json.loads(x) for x in out.read_text().splitlines()]
    assert len(rows) == 16 and all(len(r["indices"]) == 2 for r in rows)


def test_config_file_supplies_defaults(work):
    cfg = work / "q.cfg"
    cfg.write_text("folds = 1\n")
    rc = main(["--config", str(cfg), "experiment", "--corpus", str(work / "corpus.jsonl"),
               "--out-dir", str(work / "cfgrun")])
    assert rc == 1


def test_unknown_subcommand_exits_one():
    assert subprocess.run([sys.executable, "-m", "qsumm", "frobnicate"],
                          capture_output=True).returncode == 1


def test_version_flag():
    res = subprocess.run([sys.executable, "-m", "qsumm", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "qsumm" in res.stdout
