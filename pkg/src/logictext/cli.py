"""Command-line interface for the logictext toolkit."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

from logictext import __version__, analysis, counterfactual, diff, metrics, reporters
from logictext.config import default_config
from logictext.dataset_io import (
    PromptConfig,
    atomic_write_text,
    load_dataset,
    model_input_records,
    read_predictions,
    write_dataset,
    write_jsonl,
)
from logictext.exceptions import LogicTextError
from logictext.logic_form import DEFAULT_REGISTRY, linearize, parse_form
from logictext.logic_graph import (
    MaskPolicy,
    attention_mask,
    graph_to_dict,
    graph_to_rdf,
    mask_record,
)

logger = logging.getLogger("logictext")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_CODE_HELP = """\
Exit codes:
  0 - Success, or help displayed
  1 - Invalid input or processing error (diagnostic printed to stderr)
  2 - Usage error (unknown subcommand or flag, bad flag value)
  99 - Unexpected error
"""

POLICIES = {
    "children-only": MaskPolicy.CHILDREN_ONLY,
    "parent-and-children": MaskPolicy.PARENT_AND_CHILDREN,
}
STRATEGIES = {
    "random": counterfactual.StrategyKind.RANDOM_STRING,
    "disturb": counterfactual.StrategyKind.DISTURB,
    "mix": counterfactual.StrategyKind.MIX,
}
METRICS = ("blec", "blec-star", "mtr", "bleu")
REPORT_FORMATS = ("text", "json", "markdown")


def parse_ratio(value: str) -> Fraction | None:
    """Parse ``--ratio``: a non-negative number or fraction, or ``inf``."""
    if value.strip().lower() in ("inf", "infinity"):
        return None
    try:
        ratio = Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid ratio: {value!r}")
    if ratio < 0:
        raise argparse.ArgumentTypeError(f"ratio must be non-negative: {value!r}")
    return ratio


def parse_seed(value: str) -> int:
    """Parse ``--seed`` as an unsigned 64-bit integer."""
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed: {value!r}")
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits: {value!r}")
    return seed


def positive_int(value: str) -> int:
    """Parse a count argument that must be at least 1."""
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value!r}")
    return number


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog="logictext",
        description="Logical-form toolkit: parsing, attention masks, counterfactual data and metrics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EXIT_CODE_HELP,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    parser.add_argument("--quiet", "-q", action="store_true", help="Suppress output except errors")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Validate command
    validate_parser = subparsers.add_parser("validate", help="Validate a dataset file")
    validate_parser.add_argument("--data", type=Path, required=True, help="Dataset file")
    validate_parser.add_argument(
        "--lenient",
        action="store_true",
        help="Report every invalid record instead of stopping at the first",
    )

    # Mask command
    mask_parser = subparsers.add_parser("mask", help="Export attention-mask matrices")
    source = mask_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--form", help="Single linearized logical form")
    source.add_argument("--data", type=Path, help="Dataset file (one mask per record)")
    mask_parser.add_argument(
        "--policy",
        choices=sorted(POLICIES),
        default="children-only",
        help="Mask policy (default: children-only)",
    )
    mask_parser.add_argument("--out", type=Path, help="Output file (default: stdout)")

    # Synth command
    synth_parser = subparsers.add_parser("synth", help="Synthesize counterfactual samples")
    synth_parser.add_argument("--data", type=Path, required=True, help="Original dataset file")
    synth_parser.add_argument(
        "--strategy", choices=sorted(STRATEGIES), required=True, help="Replacement strategy"
    )
    synth_parser.add_argument(
        "--ratio",
        type=parse_ratio,
        default=Fraction(1),
        help="Synthetic-to-original size ratio, or 'inf' (default: 1)",
    )
    synth_parser.add_argument(
        "--count",
        type=positive_int,
        help="Samples to emit with --ratio inf (default: dataset size)",
    )
    synth_parser.add_argument("--seed", type=parse_seed, help="Random seed (unsigned 64-bit)")
    synth_parser.add_argument("--out", type=Path, required=True, help="Output dataset file")
    synth_parser.add_argument(
        "--include-original",
        action="store_true",
        help="Write the original samples before the synthetic ones",
    )

    # Eval command
    eval_parser = subparsers.add_parser("eval", help="Score predictions against a dataset")
    eval_parser.add_argument("--gold", type=Path, required=True, help="Gold dataset file")
    eval_parser.add_argument("--pred", type=Path, required=True, help="Predictions, one per line")
    eval_parser.add_argument("--metric", choices=METRICS, required=True, help="Metric")
    eval_parser.add_argument("--lexicon", type=Path, help="BLEC keyword lexicon file")
    eval_parser.add_argument(
        "--include-operators",
        action="store_true",
        help="Count operators without a matching keyword as mispredicted (mtr)",
    )
    _add_report_arguments(eval_parser)

    # Stats command
    stats_parser = subparsers.add_parser("stats", help="Complexity-bucketed statistics")
    stats_parser.add_argument("--data", type=Path, required=True, help="Dataset file")
    stats_parser.add_argument("--pred", type=Path, help="Predictions, one per line")
    stats_parser.add_argument(
        "--by", choices=[a.value for a in analysis.Axis], default="depth", help="Complexity axis"
    )
    stats_parser.add_argument("--width", type=positive_int, default=1, help="Bucket width")
    stats_parser.add_argument(
        "--pairs", type=positive_int, metavar="N", help="Also list the top N operator-header pairs"
    )
    _add_report_arguments(stats_parser)

    # Inputs command
    inputs_parser = subparsers.add_parser("inputs", help="Write model-input records")
    inputs_parser.add_argument("--data", type=Path, required=True, help="Dataset file")
    inputs_parser.add_argument("--out", type=Path, required=True, help="Output JSON-lines file")
    inputs_parser.add_argument("--prefix", help="Prefix prompt (default from configuration)")

    # Graph command
    graph_parser = subparsers.add_parser("graph", help="Export the logical graph of a form")
    graph_parser.add_argument("--form", required=True, help="Linearized logical form")
    graph_parser.add_argument("--out", type=Path, help="Output file (default: stdout)")
    graph_parser.add_argument(
        "--format", choices=["turtle", "json"], default="turtle", help="Output format"
    )

    # Diff command
    diff_parser = subparsers.add_parser("diff", help="Compare two logical forms")
    diff_parser.add_argument("--form-a", required=True, help="First logical form")
    diff_parser.add_argument("--form-b", required=True, help="Second logical form")

    # Info command
    subparsers.add_parser("info", help="Display toolkit information")

    return parser


def _add_report_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=REPORT_FORMATS, help="Report format on stdout and for --export"
    )
    parser.add_argument(
        "--export",
        type=Path,
        help="Export report to file (format auto-detected from extension)",
    )


def configure_logging(verbose: bool, quiet: bool) -> None:
    """Configure the root handler once and set the package level."""
    logging.basicConfig(format=LOG_FORMAT)
    if verbose:
        logger.setLevel(logging.DEBUG)
    elif quiet:
        logger.setLevel(logging.ERROR)
    else:
        logger.setLevel(logging.WARNING)


def run_cli(argv: Sequence[str] | None = None) -> int:
    """
    Run the CLI.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 2

    configure_logging(args.verbose, args.quiet)

    handlers = {
        "validate": handle_validate,
        "mask": handle_mask,
        "synth": handle_synth,
        "eval": handle_eval,
        "stats": handle_stats,
        "inputs": handle_inputs,
        "graph": handle_graph,
        "diff": handle_diff,
        "info": handle_info,
    }
    handler = handlers.get(args.command)
    if handler is None:
        parser.print_help()
        return 0

    try:
        return handler(args)
    except (LogicTextError, OSError, ValueError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"❌ ERROR: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # pragma: no cover - safety net
        logger.exception("Unexpected error in %s", args.command)
        print(f"❌ UNEXPECTED ERROR: {e}", file=sys.stderr)
        return 99


def main() -> None:
    """Main CLI entry point."""
    sys.exit(run_cli())


def _say(args: argparse.Namespace, text: str) -> None:
    if not args.quiet:
        print(text)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def handle_validate(args: argparse.Namespace) -> int:
    """Handle validate command."""
    dataset = load_dataset(args.data, strict=not args.lenient)

    for sample, line in zip(dataset.records, dataset.lines):
        for warning in DEFAULT_REGISTRY.check_arity(sample.tree):
            logger.warning("%s:%d: %s", args.data.name, line, warning)

    if dataset.errors:
        for error in dataset.errors:
            print(f"❌ line {error.line}: {error.message}", file=sys.stderr)
        _say(args, f"{len(dataset)} valid, {len(dataset.errors)} invalid sample(s) in {args.data}")
        return 1

    _say(args, f"✅ {len(dataset)} sample(s) valid in {args.data}")
    return 0


def handle_mask(args: argparse.Namespace) -> int:
    """Handle mask command."""
    policy = POLICIES[args.policy]
    if args.form is not None:
        mask = attention_mask(parse_form(args.form), policy)
        _emit(json.dumps(mask.to_record()) + "\n", args.out)
        return 0

    dataset = load_dataset(args.data)
    records = [
        mask_record(attention_mask(sample.tree, policy), sample_id=line)
        for sample, line in zip(dataset.records, dataset.lines)
    ]
    if args.out is None:
        _emit("".join(json.dumps(r) + "\n" for r in records), None)
    else:
        write_jsonl(args.out, records)
        _say(args, f"Wrote {len(records)} mask(s) to {args.out}")
    return 0


def handle_synth(args: argparse.Namespace) -> int:
    """Handle synth command."""
    seed = args.seed
    if seed is None:
        seed = default_config.default_seed
        _say(args, f"Using default seed {seed}")

    if args.count is not None and args.ratio is not None:
        logger.warning("--count only applies with --ratio inf; ignoring it")

    strategy = counterfactual.ReplacementStrategy(
        kind=STRATEGIES[args.strategy],
        ratio=args.ratio if args.ratio is not None else Fraction(1),
        seed=seed,
        infinite=args.ratio is None,
        emit_count=args.count,
    )
    dataset = load_dataset(args.data)
    samples = counterfactual.synthesize_dataset(
        dataset.records, strategy, include_original=args.include_original
    )
    write_dataset(args.out, samples)
    _say(args, f"Wrote {len(samples)} sample(s) to {args.out} ({args.strategy}, seed {seed})")
    return 0


def _report_format(args: argparse.Namespace) -> str:
    return args.format or "text"


def _export(args: argparse.Namespace, reports: Sequence[reporters.Report]) -> None:
    if not args.export:
        return
    format = args.format or reporters.format_from_path(args.export)
    reporters.export_report(list(reports), args.export, format)
    _say(args, f"📄 Report exported to: {args.export}")


def handle_eval(args: argparse.Namespace) -> int:
    """Handle eval command."""
    gold = load_dataset(args.gold).records
    predictions = read_predictions(args.pred)
    lexicon = metrics.OperatorLexicon.from_file(args.lexicon) if args.lexicon else None

    report: metrics.ScoreReport
    if args.metric == "bleu":
        report = metrics.bleu_score([sample.sent for sample in gold], predictions)
    elif args.metric == "mtr":
        report = metrics.mtr_score(gold, predictions, args.include_operators, lexicon)
    else:
        mode = metrics.BlecMode.BLEC if args.metric == "blec" else metrics.BlecMode.BLEC_STAR
        report = metrics.corpus_score(gold, predictions, mode, lexicon)

    if not args.quiet:
        sys.stdout.write(reporters.render_reports([report], _report_format(args)))
    _export(args, [report])
    return 0


def handle_stats(args: argparse.Namespace) -> int:
    """Handle stats command."""
    dataset = load_dataset(args.data).records
    predictions = read_predictions(args.pred) if args.pred else None

    reports: list[reporters.Report] = [
        analysis.bucket_report(dataset, predictions, analysis.Axis(args.by), args.width)
    ]
    if args.pairs:
        reports.append(analysis.pairs_report(analysis.cooccurrence(dataset), args.pairs))

    if not args.quiet:
        sys.stdout.write(reporters.render_reports(reports, _report_format(args)))
    _export(args, reports)
    return 0


def handle_inputs(args: argparse.Namespace) -> int:
    """Handle inputs command."""
    prompt = PromptConfig(prefix=args.prefix) if args.prefix is not None else PromptConfig()
    dataset = load_dataset(args.data)
    records = model_input_records(dataset.records, prompt)
    write_jsonl(args.out, records)
    _say(args, f"Wrote {len(records)} model input(s) to {args.out}")
    return 0


def handle_graph(args: argparse.Namespace) -> int:
    """Handle graph command."""
    tree = parse_form(args.form)
    if args.format == "json":
        text = json.dumps({"form": linearize(tree), **graph_to_dict(tree)}, indent=2) + "\n"
    else:
        text = graph_to_rdf(tree).serialize(format="turtle")
    _emit(text, args.out)
    return 0


def handle_diff(args: argparse.Namespace) -> int:
    """Handle diff command."""
    result = diff.compare_forms(args.form_a, args.form_b)
    if not args.quiet:
        diff.print_form_diff(result)
    return 0


def handle_info(args: argparse.Namespace) -> int:
    """Print toolkit information."""
    print("=" * 80)
    print("logictext")
    print("=" * 80)
    print(f"\nVersion:   {__version__}")
    print(f"Operators: {len(DEFAULT_REGISTRY)}")
    print(f"Lexicon:   {default_config.lexicon_path}")
    print(f"Seed:      {default_config.default_seed}")
    print("\nCommands:")
    print("  logictext validate   - Check a dataset file")
    print("  logictext mask       - Export attention-mask matrices")
    print("  logictext synth      - Synthesize counterfactual samples")
    print("  logictext eval       - Score predictions (blec, blec-star, mtr, bleu)")
    print("  logictext stats      - Complexity-bucketed statistics")
    print("  logictext inputs     - Write model-input records")
    print("  logictext graph      - Export a logical graph (Turtle or JSON)")
    print("  logictext diff       - Compare two logical forms")
    print("  logictext info       - Display this information")
    print("\nExamples:")
    print('  logictext mask --form "hop { argmax { all_rows ; attendance } ; date }"')
    print("  logictext synth --data train.jsonl --strategy disturb --ratio 1 --seed 7 --out cf.jsonl")
    print("  logictext eval --gold test.jsonl --pred pred.txt --metric blec-star")
    print("=" * 80)
    return 0


if __name__ == "__main__":
    main()
