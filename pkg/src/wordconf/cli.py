"""Command line front-end.

Every command writes its output file(s) plus a ``<output>.config`` sidecar
holding the full effective configuration as sorted ``key=value`` lines.
Failures exit non-zero after printing one line ``error: <category>: <message>``
to standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import load_bitext, load_monolingual, load_toolwords, save_monolingual
from .errors import AlignmentError, WordconfError
from .evaluation import (
    STRATEGIES,
    TOOLWORD_POLICIES,
    best_points,
    check_alignment,
    emit_report,
    format_point,
    load_labels,
    roc_sweep,
)
from .features import disambiguate, feature_confidence, load_lexicon, tag_corpus_for_training
from .fusion import combine_vectors, feature_rows, load_weights, save_weights, train_perceptron
from .lm import SMOOTHING_KINDS, load_arpa, save_arpa, train_ngram
from .scoring import (
    NORMALIZATIONS,
    WeightFn,
    inter_mi_confidence,
    intra_mi_confidence,
    ngram_confidence,
    normalize_scores,
    read_scores,
    write_scores,
)
from .triggers import (
    SmoothingParams,
    build_trigger_list,
    count_cooccurrences,
    load_trigger_list,
    normalize_trigger_list,
    save_trigger_list,
)

logger = logging.getLogger("wordconf")

MEASURES = ("intra-mi", "inter-mi", "ngram", "features")

PRESETS = {
    "intra-best": {"exclude_toolwords": True, "normalize": "none", "weight": "constant", "window": None},
    "inter-best": {"exclude_toolwords": True, "normalize": "none", "weight": "window", "window": 4},
}

DEFAULTS = {"exclude_toolwords": False, "normalize": "none", "weight": "constant", "window": None}


class UsageError(WordconfError):
    category = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def write_sidecar(output, args, extra=None) -> Path:
    path = Path(str(output) + ".config")
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config["version"] = __version__
    config.update(extra or {})
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(config):
            value = config[key]
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            fh.write(f"{key}={value}\n")
    return path


def _toolwords(args):
    if args.exclude_toolwords and not args.toolwords:
        raise UsageError("--exclude-toolwords needs --toolwords")
    return load_toolwords(args.toolwords) if args.toolwords else frozenset()


def cmd_build_triggers(args):
    if args.mode == "inter":
        tgt = args.tgt or args.corpus
        if not args.src or not tgt:
            raise UsageError("--mode inter needs --src and --tgt")
        data = load_bitext(args.src, tgt)
    else:
        if not args.corpus:
            raise UsageError("--mode intra needs --corpus")
        data = load_monolingual(args.corpus, skip_empty=args.skip_empty)
    toolwords = _toolwords(args)
    counts = count_cooccurrences(data, args.mode, toolwords, args.exclude_toolwords)
    triggers = build_trigger_list(counts, SmoothingParams(args.smoothing_c, args.alpha), args.top_k)
    if args.normalize_triggers:
        triggers = normalize_trigger_list(triggers)
    save_trigger_list(triggers, args.out)
    write_sidecar(args.out, args)
    logger.info("wrote %d trigger pairs to %s", len(triggers), args.out)


def cmd_train_lm(args):
    corpus = load_monolingual(args.corpus, skip_empty=args.skip_empty)
    model = train_ngram(corpus, args.order, args.smoothing, args.add_k, args.min_count)
    save_arpa(model, args.out)
    write_sidecar(args.out, args)


def cmd_train_feature_lm(args):
    corpus = load_monolingual(args.corpus, skip_empty=args.skip_empty)
    lexicon = load_lexicon(args.lexicon)
    tagged = tag_corpus_for_training(corpus, lexicon, args.seed)
    if args.tagged_out:
        save_monolingual(tagged, args.tagged_out)
        write_sidecar(args.tagged_out, args)
    model = train_ngram(tagged, args.order, args.smoothing, args.add_k, args.min_count)
    save_arpa(model, args.out)
    write_sidecar(args.out, args)


def cmd_tag(args):
    corpus = load_monolingual(args.corpus, skip_empty=args.skip_empty)
    lexicon = load_lexicon(args.lexicon)
    if args.tag_lm:
        model = load_arpa(args.tag_lm)
        tagged = [disambiguate(s, lexicon, model, greedy=args.greedy) for s in corpus]
    else:
        tagged = tag_corpus_for_training(corpus, lexicon, args.seed)
    save_monolingual(tagged, args.out)
    write_sidecar(args.out, args)


def _resolve_score_options(args):
    settings = dict(DEFAULTS)
    if args.preset:
        settings.update(PRESETS[args.preset])
    explicit = {k: getattr(args, k) for k in settings if getattr(args, k) is not None}
    if "window" in explicit and "weight" not in explicit:
        explicit["weight"] = "window"
    settings.update(explicit)
    for key, value in settings.items():
        setattr(args, key, value)
    if args.weight == "window":
        if args.window is None:
            raise UsageError("window weighting needs --window")
        return WeightFn.window(args.window)
    if args.weight == "exponential":
        if args.rate is None:
            raise UsageError("exponential weighting needs --rate")
        return WeightFn.exponential(args.rate)
    return WeightFn.constant()


def _triggers_for(args, measure):
    explicit = args.intra_triggers if measure == "intra-mi" else args.inter_triggers
    path = explicit or args.triggers
    if not path:
        raise UsageError(f"--measure {measure} needs --triggers")
    return load_trigger_list(path)


def cmd_score(args):
    measures = list(dict.fromkeys(args.measure))
    weight = _resolve_score_options(args)
    toolwords = _toolwords(args)
    hyps = load_monolingual(args.hyp)
    src = None
    if "inter-mi" in measures:
        if not args.src:
            raise UsageError("--measure inter-mi needs --src")
        src = load_monolingual(args.src)
        if len(src) != len(hyps):
            raise AlignmentError(f"{len(src)} source sentences but {len(hyps)} hypotheses")

    outputs = {}
    if len(measures) == 1:
        outputs[measures[0]] = Path(args.out)
    else:
        os.makedirs(args.out, exist_ok=True)
        outputs = {m: Path(args.out) / f"{m}.tsv" for m in measures}

    for measure in measures:
        if measure == "intra-mi":
            triggers = _triggers_for(args, measure)
            vectors = [intra_mi_confidence(h, triggers, weight, toolwords, args.exclude_toolwords) for h in hyps]
        elif measure == "inter-mi":
            triggers = _triggers_for(args, measure)
            vectors = [inter_mi_confidence(s, h, triggers, weight, toolwords, args.exclude_toolwords)
                       for s, h in zip(src, hyps)]
        elif measure == "ngram":
            if not args.lm:
                raise UsageError("--measure ngram needs --lm")
            model = load_arpa(args.lm)
            vectors = [ngram_confidence(h, model) for h in hyps]
        else:
            if not args.lexicon or not args.tag_lm:
                raise UsageError("--measure features needs --lexicon and --tag-lm")
            lexicon = load_lexicon(args.lexicon)
            model = load_arpa(args.tag_lm)
            vectors = [feature_confidence(h, lexicon, model, greedy=args.greedy) for h in hyps]
        vectors = [normalize_scores(v, args.normalize) for v in vectors]
        write_scores(outputs[measure], hyps, vectors)
        write_sidecar(outputs[measure], args, {"measure": measure})


def _load_score_sets(paths):
    sets = []
    hyps = None
    for path in paths:
        h, vectors = read_scores(path)
        if hyps is not None and h != hyps:
            raise AlignmentError(f"{path} scores different hypotheses than {paths[0]}")
        hyps = h
        sets.append(vectors)
    return hyps, sets


def _measure_names(paths, names):
    if names:
        if len(names) != len(paths):
            raise UsageError(f"{len(names)} names for {len(paths)} score files")
        return list(names)
    return [Path(p).name.split(".")[0] for p in paths]


def cmd_fuse(args):
    hyps, sets = _load_score_sets(args.train_scores)
    labels = load_labels(args.labels)
    check_alignment([len(h) for h in hyps], labels)
    X, skipped, _ = feature_rows(sets)
    flat = [g for sent in labels for g in sent]
    keep = ~skipped
    rows = X[keep]
    gold = [g for g, k in zip(flat, keep) if k]
    names = _measure_names(args.train_scores, args.names)
    weights = train_perceptron(rows, gold, args.epochs, args.rate, args.seed,
                               averaged=not args.bare, names=names)
    save_weights(weights, args.out)
    write_sidecar(args.out, args, {"trained_epochs": weights.epochs,
                                   "training_error": repr(weights.training_error)})
    print("weights\t" + "\t".join(f"{n}={w!r}" for n, w in zip(names + ["bias"], weights.weights.tolist())))
    if args.combined_out:
        apply_paths = args.apply_scores or args.train_scores
        if len(apply_paths) != len(args.train_scores):
            raise UsageError("--apply-scores needs one file per training measure")
        apply_hyps, apply_sets = _load_score_sets(apply_paths)
        write_scores(args.combined_out, apply_hyps, combine_vectors(apply_sets, weights))
        write_sidecar(args.combined_out, args)


def cmd_combine(args):
    weights = load_weights(args.weights)
    hyps, sets = _load_score_sets(args.scores)
    write_scores(args.out, hyps, combine_vectors(sets, weights))
    write_sidecar(args.out, args)


def _evaluate(scores_path, labels, args):
    hyps, vectors = read_scores(scores_path)
    check_alignment([len(h) for h in hyps], labels)
    return roc_sweep(vectors, labels, args.strategy, args.steps, args.lo, args.hi, args.toolword_policy)


def cmd_evaluate(args):
    labels = load_labels(args.labels)
    points = _evaluate(args.scores, labels, args)
    best = emit_report(points, args.out)
    write_sidecar(args.out, args)
    for name, point in best.items():
        print(f"{name}\t{format_point(point)}")


def cmd_sweep(args):
    labels = load_labels(args.labels)
    os.makedirs(args.out, exist_ok=True)
    names = _measure_names(args.scores, args.names)
    summary = Path(args.out) / "summary.tsv"
    lines = ["measure\tthreshold\tCAR\tCRR\tCER\tF"]
    for name, path in zip(names, args.scores):
        points = _evaluate(path, labels, args)
        emit_report(points, Path(args.out) / f"{name}.report.tsv")
        best_f, _ = best_points(points)
        lines.append("\t".join([name] + [repr(float(v)) for v in
                                         (best_f.threshold, best_f.CAR, best_f.CRR, best_f.CER, best_f.F)]))
        print(f"{name}\tbest-F\t{format_point(best_f)}")
    summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_sidecar(summary, args)


def _add_corpus_opts(p):
    p.add_argument("--skip-empty", action="store_true", help="drop empty lines instead of failing")


def _add_lm_opts(p, order):
    p.add_argument("--order", type=int, default=order)
    p.add_argument("--smoothing", choices=SMOOTHING_KINDS, default="witten-bell")
    p.add_argument("--add-k", type=float, default=1.0, help="constant for add-k smoothing")
    p.add_argument("--min-count", type=int, default=1, help="rarer words map to <unk>")


def _add_sweep_opts(p):
    p.add_argument("--labels", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="quantile")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--lo", type=float, default=0.0, help="grid start")
    p.add_argument("--hi", type=float, default=1.0, help="grid end")
    p.add_argument("--toolword-policy", choices=TOOLWORD_POLICIES, default="exclude")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wordconf", description="Word-level confidence measures for MT output")
    parser.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-triggers", help="build an intra- or inter-lingual trigger list")
    p.add_argument("--mode", choices=("intra", "inter"), required=True)
    p.add_argument("--corpus", help="monolingual corpus (intra mode)")
    p.add_argument("--src", help="source side of the bitext (inter mode)")
    p.add_argument("--tgt", help="target side of the bitext (inter mode)")
    p.add_argument("--toolwords")
    p.add_argument("--exclude-toolwords", action="store_true")
    p.add_argument("--smoothing-c", type=int, default=0, help="added to every joint count")
    p.add_argument("--alpha", type=float, default=0.0, help="interpolation weight toward independence")
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--normalize-triggers", action="store_true", help="divide each list by its maximum")
    p.add_argument("--out", required=True)
    _add_corpus_opts(p)
    p.set_defaults(func=cmd_build_triggers)

    p = sub.add_parser("train-lm", help="train a word n-gram model and save it as ARPA")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    _add_lm_opts(p, 4)
    _add_corpus_opts(p)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("train-feature-lm", help="tag a corpus at random and train a tag n-gram model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tagged-out", help="also write the tagged training corpus")
    _add_lm_opts(p, 6)
    _add_corpus_opts(p)
    p.set_defaults(func=cmd_train_feature_lm)

    p = sub.add_parser("tag", help="replace words by feature tags")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--tag-lm", help="disambiguate with this tag model instead of at random")
    p.add_argument("--greedy", action="store_true", help="left-to-right greedy disambiguation")
    p.add_argument("--out", required=True)
    _add_corpus_opts(p)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("score", help="score hypothesis words with one or more measures")
    p.add_argument("--measure", action="append", choices=MEASURES, required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--src", help="source sentences (inter-mi)")
    p.add_argument("--triggers", help="trigger list for the requested MI measure")
    p.add_argument("--intra-triggers")
    p.add_argument("--inter-triggers")
    p.add_argument("--lm", help="ARPA word model (ngram)")
    p.add_argument("--lexicon", help="feature lexicon (features)")
    p.add_argument("--tag-lm", help="ARPA tag model (features)")
    p.add_argument("--greedy", action="store_true", help="greedy tag disambiguation")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--weight", choices=("constant", "exponential", "window"))
    p.add_argument("--rate", type=float, help="decay rate of exponential weighting")
    p.add_argument("--window", type=int, help="triggering window half-width")
    p.add_argument("--normalize", choices=NORMALIZATIONS)
    p.add_argument("--toolwords")
    p.add_argument("--exclude-toolwords", action="store_true", default=None)
    p.add_argument("--out", required=True, help="score file, or directory when several measures are given")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("fuse", help="train perceptron fusion weights")
    p.add_argument("--train-scores", nargs="+", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--names", nargs="+", help="measure names (default: score file stems)")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--rate", type=float, default=0.1)
    p.add_argument("--bare", action="store_true", help="return final rather than averaged weights")
    p.add_argument("--out", required=True)
    p.add_argument("--combined-out", help="write fused scores")
    p.add_argument("--apply-scores", nargs="+", help="score files to fuse (default: the training files)")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("combine", help="apply saved fusion weights to score files")
    p.add_argument("--weights", required=True)
    p.add_argument("--scores", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("evaluate", help="ROC sweep of one score file against reference labels")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    _add_sweep_opts(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="ROC sweeps of several score files with a best-F summary")
    p.add_argument("--scores", nargs="+", required=True)
    p.add_argument("--names", nargs="+")
    p.add_argument("--out", required=True, help="output directory")
    _add_sweep_opts(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except WordconfError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: value: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
