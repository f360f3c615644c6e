"""Command-line entry point: ``qsumm <subcommand>``.

Exit codes: 0 success, 1 user error, 2 internal error.
"""

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .annotate import DualThreshold, Marcu, Threshold, TopK, annotate_question, score_sentences
from .charts import bar_chart, fold_lines
from .config import ConfigError, effective, load_config
from .errors import QsummError
from .ingest import (
    AbstractStore,
    IngestReport,
    build_pools,
    generate_synthetic,
    parse_bioasq,
    read_corpus,
    to_bioasq,
    write_corpus,
)
from .models import Hyperparams, LinearModel
from .pipeline import (
    ExperimentConfig,
    ExperimentReport,
    compare_runs,
    run_experiment,
    summarize,
    train_fold,
    usable_questions,
)
from .rouge import rouge_su, rouge_su_multi
from .textproc import process_text, use_wordlists
from .vectorspace import Vocabulary

log = logging.getLogger("qsumm")


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- helpers ------------------------------------------------------------

def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir, cfg, inputs, started):
    manifest = {
        "toolkit_version": __version__,
        "config": cfg,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "seed": cfg.get("seed"),
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _strategy(cfg):
    name = cfg["strategy"]
    if name == "topk":
        return TopK(int(cfg["k"]))
    if name == "threshold":
        return Threshold(float(cfg["t"]))
    if name == "marcu":
        return Marcu(Threshold(float(cfg["t"])))
    if name == "dual":
        return DualThreshold(float(cfg["hi"]), float(cfg["lo"]))
    raise UserError(f"unknown strategy {name!r}")


def _hyperparams(cfg):
    return Hyperparams(
        lam=float(cfg["lambda"]),
        epsilon=float(cfg["epsilon"]),
        epochs=int(cfg["epochs"]),
        seed=int(cfg["seed"]),
        class_weight=cfg["class_weight"],
        t0=None if cfg.get("t0") is None else float(cfg["t0"]),
    )


def _experiment_config(cfg):
    try:
        return ExperimentConfig(
            approach=cfg["approach"],
            strategy=_strategy(cfg),
            n_summary_sentences=int(cfg["n"]),
            k_folds=int(cfg["folds"]),
            hyperparams=_hyperparams(cfg),
            seed=int(cfg["seed"]),
            min_df=int(cfg["min_df"]),
        )
    except ValueError as exc:
        raise UserError(str(exc)) from exc


def _effective(args, keys):
    file_cfg = load_config(getattr(args, "config", None))
    cfg = effective({k: getattr(args, k, None) for k in keys}, file_cfg)
    use_wordlists(cfg.get("stopwords"), cfg.get("abbreviations"))
    return cfg


def _ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


# --- subcommands --------------------------------------------------------

def cmd_synth(args):
    cfg = _effective(args, ["seed"])
    qs = generate_synthetic(args.questions, args.pool, args.planted, int(cfg["seed"]))
    write_corpus(args.out, qs, seed=int(cfg["seed"]),
                 extra={"synthetic": {"questions": args.questions, "pool": args.pool,
                                      "planted": args.planted}})
    if args.bioasq_out:
        data, store = to_bioasq(qs)
        with open(args.bioasq_out, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=1)
        if args.abstracts_out:
            store.save(args.abstracts_out)
    print(f"wrote {len(qs)} synthetic questions to {args.out}")


def cmd_ingest(args):
    cfg = _effective(args, ["include_titles"])
    report = IngestReport()
    questions = parse_bioasq(args.bioasq, report)
    store = AbstractStore.load(args.abstracts) if args.abstracts else AbstractStore()
    build_pools(questions, store, include_titles=bool(cfg["include_titles"]), report=report)
    write_corpus(args.out, questions, extra={
        "inputs": {"bioasq": _sha256(args.bioasq),
                   "abstracts": _sha256(args.abstracts) if args.abstracts else None},
        "include_titles": bool(cfg["include_titles"]),
    })
    usable = sum(q.usable for q in questions)
    print(f"wrote {len(questions)} questions ({usable} usable, {len(report.warnings)} warnings) "
          f"to {args.out}")


def cmd_annotate(args):
    cfg = _effective(args, ["strategy", "k", "t", "hi", "lo"])
    try:
        strategy = _strategy(cfg)
    except ValueError as exc:
        raise UserError(str(exc)) from exc
    _, questions = read_corpus(args.corpus)
    usable, skipped = usable_questions(questions)
    n = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        header = {"format_version": 1, "strategy": strategy.id, "corpus": _sha256(args.corpus),
                  "skipped": skipped}
        fh.write(json.dumps({"header": header}, sort_keys=True) + "\n")
        for q in usable:
            scores = score_sentences(q)
            labels = annotate_question(q, strategy, scores)
            for i, (s, lab) in enumerate(zip(scores, labels)):
                row = {"question_id": q.id, "sentence_index": i, "su4_f1": s,
                       "label": lab, "strategy": strategy.id}
                fh.write(json.dumps(row, sort_keys=True) + "\n")
                n += 1
    print(f"annotated {n} sentences of {len(usable)} questions with {strategy.id}")


def _fold_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["fold", report.name + ":mean", report.name + ":std", "n_questions"])
    for f in report.folds:
        w.writerow([f.fold, f"{f.mean:.6f}", f"{f.std:.6f}", len(f.scores)])
    w.writerow(["macro", f"{report.macro_mean:.6f}", f"{report.macro_std:.6f}",
                len(report.all_scores())])
    w.writerow(["micro", f"{report.micro_mean:.6f}", f"{report.micro_std:.6f}",
                len(report.all_scores())])
    return buf.getvalue()


def cmd_experiment(args):
    started = _now()
    keys = ["approach", "strategy", "k", "t", "hi", "lo", "n", "folds", "seed",
            "lambda", "epsilon", "epochs", "t0", "class_weight", "min_df"]
    cfg = _effective(args, keys)
    exp = _experiment_config(cfg)
    _, questions = read_corpus(args.corpus)
    report = run_experiment(questions, exp)
    out = _ensure_dir(args.out_dir)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.dumps())
    with open(os.path.join(out, "folds.csv"), "w", encoding="utf-8") as fh:
        fh.write(_fold_csv(report))
    with open(os.path.join(out, "folds.svg"), "w", encoding="utf-8") as fh:
        fh.write(fold_lines([report.name], [[f.mean] for f in report.folds]))
    _write_manifest(out, {**cfg, "experiment": exp.snapshot()}, [args.corpus], started)
    print(f"{report.name}: F1 SU4 macro {report.macro_mean:.4f} +/- {report.macro_std:.4f} "
          f"(micro {report.micro_mean:.4f}) over {len(report.folds)} folds")


def cmd_compare(args):
    started = _now()
    reports = []
    for d in args.runs:
        path = os.path.join(d, "report.json") if os.path.isdir(d) else d
        try:
            with open(path, encoding="utf-8") as fh:
                reports.append(ExperimentReport.from_json(json.load(fh)))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UserError(f"cannot read run report {path}: {exc}") from exc
    names = [r.name for r in reports]
    if len(set(names)) != len(names):
        names = [f"{n}#{i}" for i, n in enumerate(names)]
    comp = compare_runs(reports, names)
    out = _ensure_dir(args.out)
    with open(os.path.join(out, "comparison.csv"), "w", encoding="utf-8") as fh:
        fh.write(comp.to_csv())
    with open(os.path.join(out, "comparison.svg"), "w", encoding="utf-8") as fh:
        fh.write(bar_chart(comp.names, comp.means, comp.stds))
    with open(os.path.join(out, "folds.svg"), "w", encoding="utf-8") as fh:
        fh.write(fold_lines(comp.names, comp.fold_means))
    _write_manifest(out, {"runs": list(args.runs)},
                    [os.path.join(d, "report.json") if os.path.isdir(d) else d for d in args.runs],
                    started)
    for n, m, s, w in zip(comp.names, comp.means, comp.stds, comp.wins):
        print(f"{n}: {m:.4f} +/- {s:.4f}, best on {w} folds")


def _read_summaries(path):
    """One summary per line, or a JSON list (of strings or of string lists)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise UserError(f"{path}: invalid JSON ({exc})") from exc
    return [line for line in text.splitlines()]


def _units(text):
    return process_text(text).rouge_units()


def cmd_rouge(args):
    cfg = _effective(args, ["mode", "dskip"])

    cands = _read_summaries(args.candidates)
    refs = _read_summaries(args.references)
    if len(cands) != len(refs):
        raise UserError(f"{len(cands)} candidates but {len(refs)} references")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "precision", "recall", "f1"])
    for i, (c, r) in enumerate(zip(cands, refs)):
        if isinstance(r, list):
            s = rouge_su_multi(_units(c), [_units(x) for x in r], int(cfg["dskip"]), cfg["mode"])
        else:
            s = rouge_su(_units(c), _units(r), int(cfg["dskip"]), cfg["mode"])
        w.writerow([i, f"{s.precision:.6f}", f"{s.recall:.6f}", f"{s.f1:.6f}"])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def cmd_train(args):
    started = _now()
    keys = ["approach", "strategy", "k", "t", "hi", "lo", "seed",
            "lambda", "epsilon", "epochs", "t0", "class_weight", "min_df"]
    cfg = _effective(args, keys)
    exp = _experiment_config(cfg)
    if exp.approach == "random":
        raise UserError("the random baseline has no model to train")
    _, questions = read_corpus(args.corpus)
    usable, _ = usable_questions(questions)
    vocab, model = train_fold(usable, exp)
    out = _ensure_dir(args.out_dir)
    vocab.save(os.path.join(out, "vocab.json"))
    model.save(os.path.join(out, "model.json"))
    _write_manifest(out, {**cfg, "experiment": exp.snapshot()}, [args.corpus], started)
    print(f"trained {model.kind} on {model.n_examples} sentences, objective {model.objective:.5f}")


def cmd_summarize(args):
    cfg = _effective(args, ["n"])
    model_dir = args.model
    model = LinearModel.load(os.path.join(model_dir, "model.json"))
    vocab = Vocabulary.load(os.path.join(model_dir, "vocab.json"))
    if model.vocab_hash and model.vocab_hash != vocab.digest():
        raise UserError("model and vocabulary do not belong together")
    _, questions = read_corpus(args.corpus)
    usable, _ = usable_questions(questions)
    with open(args.out, "w", encoding="utf-8") as fh:
        for q in usable:
            s = summarize(q, model, vocab, int(cfg["n"]))
            fh.write(json.dumps({"question_id": q.id, "indices": s.indices, "summary": s.text},
                                ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(usable)} summaries to {args.out}")


# --- parser -------------------------------------------------------------

def _add_strategy_flags(p):
    p.add_argument("--strategy", choices=["topk", "threshold", "marcu", "dual"])
    p.add_argument("--k", type=int, help="TopK: sentences labelled 1 per question (3)")
    p.add_argument("--t", type=float, help="Threshold: label 1 iff SU4 > t (0.1)")
    p.add_argument("--hi", type=float, help="dual threshold upper bound (0.7)")
    p.add_argument("--lo", type=float, help="dual threshold lower bound (0.3)")


def _add_model_flags(p):
    p.add_argument("--approach", choices=["regression", "classification", "random"])
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--t0", type=float, help="step offset (default 1/lambda)")
    p.add_argument("--class-weight", dest="class_weight", choices=["balanced", "none"])
    p.add_argument("--min-df", dest="min_df", type=int)


def build_parser():
    parser = _Parser(prog="qsumm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qsumm {__version__}")
    parser.add_argument("--config", help=f"key=value config file (or ${'QSUMM_CONFIG'})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a planted-summary corpus")
    p.add_argument("--questions", type=int, default=100)
    p.add_argument("--pool", type=int, default=10)
    p.add_argument("--planted", type=int, default=3)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--bioasq-out", help="also write BioASQ-shaped JSON")
    p.add_argument("--abstracts-out", help="and the matching abstract store")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="BioASQ JSON + abstract store -> corpus file")
    p.add_argument("--bioasq", required=True)
    p.add_argument("--abstracts")
    p.add_argument("--out", required=True)
    p.add_argument("--include-titles", dest="include_titles", action="store_true", default=None)
    p.add_argument("--no-titles", dest="include_titles", action="store_false")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("annotate", help="write per-sentence SU4 scores and labels")
    p.add_argument("--corpus", required=True)
    _add_strategy_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("experiment", help="k-fold cross-validated run")
    p.add_argument("--corpus", required=True)
    _add_model_flags(p)
    _add_strategy_flags(p)
    p.add_argument("--n", type=int, help="sentences per summary (3)")
    p.add_argument("--folds", type=int, help="number of folds (10)")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compare", help="compare experiment runs")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("rouge", help="score candidate summaries against references")
    p.add_argument("--candidates", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--mode", choices=["S", "SU"])
    p.add_argument("--dskip", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rouge)

    p = sub.add_parser("train", help="train one model on a whole corpus")
    p.add_argument("--corpus", required=True)
    _add_model_flags(p)
    _add_strategy_flags(p)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("summarize", help="summarize a corpus with a trained model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, help="directory written by 'train'")
    p.add_argument("--n", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_summarize)
    return parser


def _validate(args):
    if getattr(args, "folds", None) is not None and args.folds < 2:
        raise UserError("--folds must be >= 2")
    if getattr(args, "n", None) is not None and args.n < 1:
        raise UserError("--n must be >= 1")
    hi, lo = getattr(args, "hi", None), getattr(args, "lo", None)
    if hi is not None and lo is not None and not lo < hi:
        raise UserError(f"--lo ({lo}) must be below --hi ({hi})")
    if getattr(args, "dskip", None) is not None and args.dskip < 0:
        raise UserError("--dskip must be >= 0")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        args.func(args)
    except (UserError, QsummError, ConfigError) as exc:
        print(f"qsumm: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"qsumm: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"qsumm: internal error: {exc}", file=sys.stderr)
        return 2
    finally:
        use_wordlists(None, None)
    return 0


if __name__ == "__main__":
    sys.exit(main())
