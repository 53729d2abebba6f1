"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (or failed check).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from winsumm import DataError
from winsumm.corpus import (
    build_vocabulary, is_content, load_corpus, make_document, read_text, shape_document, split_pairs,
)
from winsumm.harness import pipeline
from winsumm.harness.checks import model_gradcheck
from winsumm.harness.config import RunConfig, load_config
from winsumm.labeling import label_corpus, write_labels
from winsumm.model import CheckpointError, predict
from winsumm.rouge import rouge_scores

log = logging.getLogger("winsumm")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> str:
    if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
        raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")
    return text


def _run_options() -> argparse.ArgumentParser:
    """One ``--flag`` per RunConfig field; unset flags leave the config file value."""
    parent = Parser(add_help=False)
    parent.add_argument("--config", help="flat 'key = value' config file")
    group = parent.add_argument_group("run configuration overrides")
    for f in fields(RunConfig):
        kind = type(f.default)
        group.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, default=None,
                           type=_bool if kind is bool else kind, metavar=f.name.upper(),
                           help=f"(default: {f.default!r})")
    return parent


def _config(args) -> RunConfig:
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    try:
        return load_config(args.config, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> Parser:
    parser = Parser(prog="winsumm", description="Window-labeled extractive summarization of long documents.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)
    run = _run_options()

    sub.add_parser("ingest", parents=[run], help="load, split and index a corpus")
    sub.add_parser("label", parents=[run], help="write extractive labels for every document")
    sub.add_parser("train", parents=[run], help="train the sentence ranker")

    p = sub.add_parser("summarize", parents=[run], help="extract summaries with a trained ranker")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--doc", action="append", default=[], help="paper text file (repeatable)")

    p = sub.add_parser("evaluate", parents=[run], help="ROUGE recall of systems on a split")
    p.add_argument("--system", action="append", choices=["lead", "textrank", "ranker"])
    p.add_argument("--checkpoint")
    p.add_argument("--eval-split", default="test", choices=["train", "valid", "test"], help="split to score")

    p = sub.add_parser("sweep", parents=[run], help="window-size sweep (validation ROUGE-1)")
    p.add_argument("--sizes", default="3,5,7,10,15")

    p = sub.add_parser("rouge", help="ROUGE-1/2/L recall of one candidate against one reference")
    p.add_argument("--cand", required=True)
    p.add_argument("--ref", required=True)

    p = sub.add_parser("gradcheck", help="finite-difference check of the full model gradient")
    p.add_argument("--encoder", choices=["simple", "hierarchical", "both"], default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-4)
    return parser


def cmd_ingest(args) -> int:
    cfg = _config(args)
    pairs = load_corpus(cfg.corpus)
    train, valid, test = split_pairs(pairs, cfg.seed, cfg.split_fractions)
    vocab = build_vocabulary(train, cfg.min_count)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    vocab.save(out / "vocab.txt")
    lines = ["doc_id\tsplit\tsentences\tgold_sentences"]
    for name, part in (("train", train), ("valid", valid), ("test", test)):
        lines += [f"{p.id}\t{name}\t{p.doc.n}\t{p.gold.n}" for p in part]
    (out / "split.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"pairs\t{len(pairs)}\ntrain\t{len(train)}\nvalid\t{len(valid)}\ntest\t{len(test)}\nvocab\t{len(vocab)}")
    return 0


def cmd_label(args) -> int:
    cfg = _config(args)
    pairs = load_corpus(cfg.corpus)
    run = label_corpus(pairs, cfg.label_method, cfg.window, cfg.label_metric, cfg.window_scoring,
                       cfg.zero_block_positive)
    path = Path(cfg.labels) if cfg.labels else Path(cfg.out) / "labels.tsv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_labels(path, run.labeled)
    rates = run.positive_rates
    mean_rate = sum(rates.values()) / len(rates) if rates else 0.0
    print(f"labeled\t{len(run.labeled)}\nskipped\t{len(run.skipped)}\nmean_positive_rate\t{mean_rate:.4f}\nfile\t{path}")
    return 0


def cmd_train(args) -> int:
    cfg = _config(args)
    result = pipeline.train(cfg)
    print(f"checkpoint\t{result.checkpoint}\nloss_curve\t{result.curve_path}\nbest_epoch\t{result.best_epoch}")
    return 0


def cmd_summarize(args) -> int:
    cfg = _config(args)
    params, vocab = pipeline.load_ranker(args.checkpoint)
    docs = [make_document(Path(p).name.split(".")[0], read_text(Path(p)), p) for p in args.doc]
    if cfg.corpus:
        for path in sorted(Path(cfg.corpus).glob("*.paper.txt")):
            docs.append(make_document(path.name[: -len(".paper.txt")], read_text(path), str(path)))
    if not docs:
        raise UsageError("nothing to summarize: pass --doc or --corpus")
    out = Path(cfg.out) / "summaries" / "ranker"
    out.mkdir(parents=True, exist_ok=True)
    for doc in docs:
        if doc.n == 0:
            log.warning("skipping %s: no sentences", doc.id)
            continue
        probs = predict(shape_document(doc, vocab, cfg.max_sents, cfg.max_toks), params)
        selected = pipeline.select_summary(probs, cfg.budget)
        lines = [" ".join(map(str, selected))] + [pipeline.collapse(doc.sentences[i].text) for i in selected]
        (out / f"{doc.id}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"{doc.id}\t{len(selected)}/{doc.n}\t{out / (doc.id + '.txt')}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    systems = args.system or ["lead", "textrank"] + (["ranker"] if args.checkpoint else [])
    reports = pipeline.evaluate(cfg, systems, args.checkpoint, args.eval_split)
    print("system\trouge1\trouge2\trougeL\tdocs\tskipped")
    for r in reports:
        m = r.means
        print(f"{r.system}\t{m[0]:.4f}\t{m[1]:.4f}\t{m[2]:.4f}\t{len(r.rows)}\t{len(r.skipped)}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    rows = pipeline.sweep_window(cfg, sizes)
    print("window\tranker_rouge1\toracle_rouge1")
    for w, r, o in rows:
        print(f"{w}\t{r:.4f}\t{o:.4f}")
    return 0


def _content_norms(path: str) -> list[str]:
    doc = make_document("x", read_text(Path(path)))
    return [t.norm for s in doc.sentences for t in s.tokens if is_content(t.norm)]


def cmd_rouge(args) -> int:
    s = rouge_scores(_content_norms(args.cand), _content_norms(args.ref))
    print(f"{s.r1!r}\t{s.r2!r}\t{s.rl!r}")
    return 0


def cmd_gradcheck(args) -> int:
    modes = ["simple", "hierarchical"] if args.encoder == "both" else [args.encoder]
    worst = 0.0
    for mode in modes:
        report = model_gradcheck(mode, seed=args.seed, step=args.step)
        err = max(report.values())
        worst = max(worst, err)
        print(f"{mode}\tmax_relative_error\t{err:.3e}")
    print(f"overall\t{worst:.3e}\t{'PASS' if worst < args.tol else 'FAIL'}")
    return 0 if worst < args.tol else 2


COMMANDS = {
    "ingest": cmd_ingest, "label": cmd_label, "train": cmd_train, "summarize": cmd_summarize,
    "evaluate": cmd_evaluate, "sweep": cmd_sweep, "rouge": cmd_rouge, "gradcheck": cmd_gradcheck,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"winsumm: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, CheckpointError, pipeline.TrainingDiverged) as exc:
        print(f"winsumm: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
