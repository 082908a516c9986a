"""Command-line entry point.

Exit codes: 0 success, 1 data error, 2 usage or configuration error.
Logs go to stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import _kernels
from .dataset import (MASK_POLICIES, balance, emit_records, evaluate,
                      filter_threshold, form_counts, format_percent,
                      parse_percent, read_form_counts, read_gold, read_samples,
                      write_records, write_samples)
from .errors import DataError, UnknownForm
from .io import load_encoding_table, read_manifest
from .lexicon import (AMBIGUOUS_POLICIES, load_heteronym_inventory,
                      load_pron_lexicon)
from .pipeline import Context, label_corpus
from .synth import gen_synthetic, load_synth_spec, write_corpus

log = logging.getLogger("heterolabel")

DEFAULT_THRESHOLDS = "0.00%,0.01%,0.02%,0.03%"


class ConfigError(Exception):
    pass


def _existing(path, what):
    if path is None:
        raise ConfigError(f"--{what} is required")
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {p}")
    return p


def _thresholds(text):
    try:
        taus = [parse_percent(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise ConfigError(str(e)) from None
    if not taus:
        raise ConfigError("no thresholds given")
    return sorted(set(taus))


def _load_lexicons(args):
    lexicon = load_pron_lexicon(_existing(args.lexicon, "lexicon"))
    inventory = load_heteronym_inventory(_existing(args.inventory, "inventory"))
    return lexicon, inventory


def count_table(rows) -> str:
    """Table-1 style summary: one column per threshold."""
    taus = [tau for tau, _ in rows[0][1]]
    lines = ["\t".join(["Threshold"] + [format_percent(t) for t in taus])]
    for name, counts in rows:
        lines.append("\t".join([name] + [str(n) for _, n in counts]))
    return "\n".join(lines) + "\n"


def _threshold_rows(samples, taus, base=None, inventory=None):
    rows = []
    nonbal = [(tau, len(filter_threshold(samples, tau))) for tau in taus]
    if base is not None:
        bal = [(tau, len(balance(filter_threshold(samples, tau), base, inventory)))
               for tau in taus]
        rows.append(("Num samples (bal)", bal))
    rows.append(("Num samples (non bal)", nonbal))
    return rows


# --- subcommands ----------------------------------------------------------


def cmd_disambiguate(args):
    taus = _thresholds(args.thresholds)
    if args.cap < 2:
        raise ConfigError("--cap must be >= 2")
    manifest_path = _existing(args.manifest, "manifest")
    lexicon, inventory = _load_lexicons(args)
    table = load_encoding_table(_existing(args.table, "table")) if args.table else None
    records = read_manifest(manifest_path)
    if table is None and any(not r.precomputed for r in records):
        raise ConfigError("manifest has frame encodings; --table is required")

    ctx = Context(lexicon, inventory, table, args.ambiguous, args.cap)
    log.info("event=start records=%d jobs=%d backend=%s", len(records), args.jobs,
             _kernels.BACKEND)
    outcomes = sorted(label_corpus(records, ctx, args.jobs), key=lambda o: o.sentence_id)
    samples = [o.sample for o in outcomes if o.sample is not None]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_samples(out / "results.jsonl", samples)
    skipped = {}
    for o in outcomes:
        if o.skipped:
            skipped[o.skipped] = skipped.get(o.skipped, 0) + 1
    lines = ["metric\tvalue", f"sentences\t{len(records)}", f"labeled\t{len(samples)}"]
    lines += [f"skipped:{k}\t{v}" for k, v in sorted(skipped.items())]
    lines += [f"kept@{format_percent(t)}\t{len(filter_threshold(samples, t))}" for t in taus]
    summary = "\n".join(lines) + "\n"
    (out / "summary.tsv").write_text(summary, encoding="utf-8")
    sys.stdout.write(summary)
    log.info("event=done labeled=%d out=%s", len(samples), out)


def cmd_build_dataset(args):
    taus = _thresholds(args.thresholds)
    results = _existing(args.results, "results")
    lexicon, inventory = _load_lexicons(args)
    base = None
    if args.balance:
        # balancing tops up existing counts; from an empty base nothing qualifies
        if not args.base:
            raise ConfigError("--balance requires --base")
        base = read_form_counts(_existing(args.base, "base"))
    samples = read_samples(results)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for tau in taus:
        kept = filter_threshold(samples, tau)
        label = format_percent(tau).replace("%", "pct")
        variants = [("", kept)]
        if base is not None:
            variants.append(("_bal", balance(kept, base, inventory)))
        for suffix, chosen in variants:
            chosen = sorted(chosen, key=lambda s: s.sentence_id)
            records = emit_records(chosen, lexicon, inventory, args.mask_policy, args.ambiguous)
            path = out / f"train_{label}{suffix}.tsv"
            write_records(path, records)
            log.info("event=write path=%s records=%d", path, len(records))
    sys.stdout.write(count_table(_threshold_rows(samples, taus, base, inventory)))


def cmd_stats(args):
    taus = _thresholds(args.thresholds)
    samples = read_samples(_existing(args.results, "results"))
    base = inventory = None
    if args.base:
        base = read_form_counts(_existing(args.base, "base"))
        if args.inventory:
            inventory = load_heteronym_inventory(_existing(args.inventory, "inventory"))
    sys.stdout.write(count_table(_threshold_rows(samples, taus, base, inventory)))
    if args.forms:
        sys.stdout.write("\nword\tform\t" + "\t".join(format_percent(t) for t in taus) + "\n")
        per_tau = [form_counts(filter_threshold(samples, t)) for t in taus]
        for word, form in sorted(form_counts(samples)):
            counts = "\t".join(str(c[(word, form)]) for c in per_tau)
            sys.stdout.write(f"{word}\t{form}\t{counts}\n")


def cmd_eval(args):
    taus = _thresholds(args.thresholds)
    samples = read_samples(_existing(args.results, "results"))
    gold = read_gold(_existing(args.gold, "gold"))
    inventory = None
    if args.inventory:
        inventory = load_heteronym_inventory(_existing(args.inventory, "inventory"))
    text = evaluate(gold, samples, taus, inventory).to_tsv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen_synth(args):
    spec_path = _existing(args.spec, "spec")
    lexicon, inventory = _load_lexicons(args)
    try:
        spec = load_synth_spec(spec_path, inventory, lexicon, args.seed)
        corpus = gen_synthetic(spec, inventory, lexicon)
    except (UnknownForm, DataError) as e:
        raise ConfigError(str(e)) from None
    write_corpus(corpus, args.out)
    log.info("event=gen-synth sentences=%d out=%s", len(corpus.records), args.out)


# --- argument parsing -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heterolabel",
        description="Label heteronyms with aligner distances and build G2P training data.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def lex_args(p, required=True):
        p.add_argument("--lexicon", required=required, help="CMUdict-format lexicon")
        p.add_argument("--inventory", required=required, help="heteronym inventory TSV")

    def thr(p):
        p.add_argument("--thresholds", default=DEFAULT_THRESHOLDS,
                       help="comma-separated, percent (0.01%%) or ratio (0.0001)")

    p = sub.add_parser("disambiguate", help="score heteronym candidates for a manifest")
    lex_args(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--table", help="encoding table; omit when the manifest is precomputed")
    p.add_argument("--out", required=True)
    p.add_argument("--ambiguous", choices=AMBIGUOUS_POLICIES, default="mask")
    p.add_argument("--cap", type=int, default=64, help="max candidates per sentence")
    p.add_argument("--jobs", type=int, default=1)
    thr(p)
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("build-dataset", help="emit G2P training TSVs per threshold")
    lex_args(p)
    p.add_argument("--results", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-policy", choices=MASK_POLICIES, default="mask")
    p.add_argument("--ambiguous", choices=AMBIGUOUS_POLICIES, default="mask")
    p.add_argument("--balance", action="store_true", help="also write balanced variants")
    p.add_argument("--base", help="gold form counts TSV (word, form_id, count)")
    thr(p)
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("eval", help="TP/FP table against gold labels")
    p.add_argument("--results", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--inventory")
    p.add_argument("--out")
    thr(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-synth", help="write a synthetic corpus")
    lex_args(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("stats", help="kept-sample counts per threshold")
    p.add_argument("--results", required=True)
    p.add_argument("--base")
    p.add_argument("--inventory")
    p.add_argument("--forms", action="store_true", help="also print per-form counts")
    thr(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s %(message)s")
    try:
        args.func(args)
    except ConfigError as e:
        log.error("config error: %s", e)
        return 2
    except (DataError, OSError, UnicodeDecodeError) as e:
        log.error("data error: %s", e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
