"""Command-line front-end.

Subcommands: ``select``, ``score``, ``analyze`` (diversity / pseudo /
cross-model), ``synth``, ``convert``.  Every selection or synth run writes
a JSON manifest next to its output recording the command line, input
digests, and library version, so reruns are auditable.

Exit codes: 0 success, 2 invalid flags, 3 input validation failure,
4 runtime error.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import cross_model_similarity, pseudo_label_report, subset_diversity
from .errors import FselectError, ValidationError
from .io import (
    FeatureBundle,
    FeatureMatrix,
    SelectionResult,
    load_bundle,
    load_features,
    load_labels,
    load_selection_indices,
    save_features,
    save_features_csv,
    save_labels,
    save_labels_csv,
    save_selection,
    sniff_format,
)
from .scoring import FusionWeights, apl, ram, ram_apl_score
from .selectors import METHODS, SelectorConfig, plan_budget, run_selector
from .synth import SynthSpec, generate, inject_symmetric_noise

_FLOAT = "%.9g"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4


def _fmt(x: float) -> str:
    return _FLOAT % float(x)


def _sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _write_manifest(
    path: Path,
    args: argparse.Namespace,
    input_paths: list[Path],
    config: dict,
    started: float,
) -> None:
    manifest = {
        "command_line": list(getattr(args, "_argv", [])),
        "config": config,
        "inputs": {str(p): _sha256(p) for p in input_paths},
        "seed": config.get("seed"),
        "version": __version__,
        "duration_seconds": time.monotonic() - started,
    }
    path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _add_feature_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--features",
        action="append",
        required=True,
        metavar="PATH",
        help="feature file (FSEL binary or CSV); repeat for several extractors",
    )
    p.add_argument("--labels", required=True, metavar="PATH", help="label file (LSEL or CSV)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fselect",
        description="Feature-based subset selection engine",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser("select", help="select a budgeted subset")
    _add_feature_args(p_select)
    p_select.add_argument("--method", required=True, choices=METHODS)
    p_select.add_argument("--rate", required=True, type=float, help="sampling rate p in (0, 1]")
    p_select.add_argument("--alpha", type=float, default=0.2)
    p_select.add_argument("--beta", type=float, default=1.0)
    p_select.add_argument("--equal-weights", action="store_true")
    p_select.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    p_select.add_argument("--seed", type=int, default=None)
    p_select.add_argument("--primary-matrix", default=None, metavar="ID")
    p_select.add_argument("--threads", type=int, default=1)
    p_select.add_argument("--out", required=True, metavar="PATH")
    p_select.add_argument("--report", default=None, metavar="PATH")

    p_score = sub.add_parser("score", help="emit per-sample score table")
    _add_feature_args(p_score)
    p_score.add_argument("--rate", required=True, type=float)
    p_score.add_argument("--alpha", type=float, default=0.2)
    p_score.add_argument("--beta", type=float, default=1.0)
    p_score.add_argument("--equal-weights", action="store_true")
    p_score.add_argument("--out", default=None, metavar="PATH")

    p_analyze = sub.add_parser("analyze", help="post-hoc metrics")
    asub = p_analyze.add_subparsers(dest="metric", required=True)
    p_div = asub.add_parser("diversity", help="pairwise cosine distance of a selection")
    _add_feature_args(p_div)
    p_div.add_argument("--selection", required=True, metavar="PATH")
    p_div.add_argument("--out", default=None)
    p_pseudo = asub.add_parser("pseudo", help="pseudo-label accuracy per extractor")
    _add_feature_args(p_pseudo)
    p_pseudo.add_argument("--out", default=None)
    p_cross = asub.add_parser("cross-model", help="cross-extractor similarity matrix")
    _add_feature_args(p_cross)
    p_cross.add_argument("--out", default=None)

    p_synth = sub.add_parser("synth", help="generate a synthetic bundle")
    p_synth.add_argument("--classes", required=True, type=int)
    p_synth.add_argument("--per-class", required=True, type=int)
    p_synth.add_argument("--dims", required=True, help="comma-separated dims, one per extractor")
    p_synth.add_argument("--separation", type=float, default=10.0)
    p_synth.add_argument("--spread", type=float, default=1.0)
    p_synth.add_argument("--imbalance", type=float, default=1.0)
    p_synth.add_argument("--noise", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out-dir", required=True, metavar="DIR")

    p_convert = sub.add_parser("convert", help="convert between binary and CSV")
    p_convert.add_argument("--input", required=True, metavar="PATH")
    p_convert.add_argument("--output", required=True, metavar="PATH")
    p_convert.add_argument("--kind", required=True, choices=("features", "labels"))
    p_convert.add_argument("--to", required=True, choices=("binary", "csv"))
    p_convert.add_argument("--from", dest="from_", choices=("binary", "csv"), default=None)
    p_convert.add_argument("--extractor-id", default=None)

    return parser


def _score_table(
    bundle: FeatureBundle, w: FusionWeights
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ram_score = ram(bundle)
    apl_score = apl(bundle)
    score = ram_apl_score(ram_score, apl_score, w)
    return ram_score.values, apl_score.values, score


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_select(args: argparse.Namespace) -> int:
    started = time.monotonic()
    bundle = load_bundle(args.features, args.labels)
    plan = plan_budget(bundle.labels, args.rate)
    cfg = SelectorConfig(
        method=args.method,
        seed=args.seed,
        lambda_=args.lambda_,
        alpha=args.alpha,
        beta=args.beta,
        equal_weights=args.equal_weights,
        primary_matrix=args.primary_matrix,
        threads=args.threads,
    )
    result = run_selector(bundle, plan, cfg)
    out_path = Path(args.out)
    save_selection(result, out_path)

    if args.report is not None:
        lines = [f"# fselect-report\tmethod={args.method}\trate={_fmt(args.rate)}"]
        budget_cells = "\t".join(
            f"{cid}={m}" for cid, m in sorted(result.per_class_budget.items())
        )
        lines.append(f"# class_budgets\t{budget_cells}")
        chosen = np.zeros(bundle.n, dtype=bool)
        chosen[result.selected] = True
        if args.method == "ram_apl":
            if args.equal_weights:
                w = FusionWeights.equal()
            else:
                w = FusionWeights.schedule(args.alpha, args.beta, args.rate)
            lines.append(f"# weights\tw1={_fmt(w.w1)}\tw2={_fmt(w.w2)}")
            r, phi, score = _score_table(bundle, w)
            lines.append("index\tlabel\trank_mean\tpseudo_acc\tscore\tselected")
            for j in range(bundle.n):
                lines.append(
                    f"{j}\t{bundle.labels.labels[j]}\t{_fmt(r[j])}\t"
                    f"{_fmt(phi[j])}\t{_fmt(score[j])}\t{int(chosen[j])}"
                )
        else:
            lines.append("index\tlabel\tscore\tselected")
            for j in range(bundle.n):
                cell = _fmt(result.scores[j]) if result.scores is not None else ""
                lines.append(
                    f"{j}\t{bundle.labels.labels[j]}\t{cell}\t{int(chosen[j])}"
                )
        Path(args.report).write_text("\n".join(lines) + "\n", encoding="utf-8")

    config = {
        "method": args.method,
        "rate": args.rate,
        "alpha": args.alpha,
        "beta": args.beta,
        "equal_weights": args.equal_weights,
        "lambda": args.lambda_,
        "seed": args.seed,
        "primary_matrix": args.primary_matrix,
        "threads": args.threads,
    }
    inputs = [Path(p) for p in args.features] + [Path(args.labels)]
    _write_manifest(
        out_path.with_name(out_path.name + ".manifest.json"),
        args,
        inputs,
        config,
        started,
    )
    return EXIT_OK


def _cmd_score(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.features, args.labels)
    if args.equal_weights:
        w = FusionWeights.equal()
    else:
        w = FusionWeights.schedule(args.alpha, args.beta, args.rate)
    r, phi, score = _score_table(bundle, w)
    lines = [f"# weights\tw1={_fmt(w.w1)}\tw2={_fmt(w.w2)}"]
    lines.append("index\tlabel\trank_mean\tpseudo_acc\tscore")
    for j in range(bundle.n):
        lines.append(
            f"{j}\t{bundle.labels.labels[j]}\t{_fmt(r[j])}\t"
            f"{_fmt(phi[j])}\t{_fmt(score[j])}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.features, args.labels)
    if args.metric == "diversity":
        indices = load_selection_indices(args.selection)
        counts: dict[int, int] = {}
        for cid in bundle.labels.labels[indices]:
            counts[int(cid)] = counts.get(int(cid), 0) + 1
        sel = SelectionResult(
            selected=indices,
            per_class_budget=counts,
            p=indices.size / bundle.n,
            method="external",
            n=bundle.n,
        )
        report = subset_diversity(bundle.matrices[0], bundle.labels, sel)
        lines = ["class\tmean_cosine_distance"]
        for cid in sorted(report.per_class):
            lines.append(f"{cid}\t{_fmt(report.per_class[cid])}")
        lines.append(f"whole\t{_fmt(report.whole)}")
    elif args.metric == "pseudo":
        report = pseudo_label_report(bundle)
        lines = ["extractor\toverall\t" + "\t".join(f"class{c}" for c in range(bundle.labels.c))]
        for i, eid in enumerate(report.extractor_ids):
            cells = "\t".join(_fmt(v) for v in report.per_class[i])
            lines.append(f"{eid}\t{_fmt(report.overall[i])}\t{cells}")
    elif args.metric == "cross-model":
        sim = cross_model_similarity(bundle)
        lines = [f"# reduced_dim\t{sim.reduced_dim}"]
        lines.append("extractor\t" + "\t".join(sim.extractor_ids))
        for i, eid in enumerate(sim.extractor_ids):
            cells = "\t".join(_fmt(v) for v in sim.pairwise[i])
            lines.append(f"{eid}\t{cells}")
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown metric {args.metric!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    started = time.monotonic()
    try:
        dims = tuple(int(d) for d in args.dims.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --dims {args.dims!r}: {exc}") from exc
    spec = SynthSpec(
        c=args.classes,
        per_class=args.per_class,
        dims=dims,
        separation=args.separation,
        spread=args.spread,
        imbalance_ratio=args.imbalance,
        noise_rate=args.noise,
        seed=args.seed,
    )
    bundle = generate(spec)
    labels = bundle.labels
    if spec.noise_rate > 0:
        labels = inject_symmetric_noise(labels, spec.noise_rate, spec.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i, fm in enumerate(bundle.matrices):
        path = out_dir / f"features_{i}.fsel"
        save_features(fm, path)
        written.append(path)
    labels_path = out_dir / "labels.lsel"
    save_labels(labels, labels_path)
    written.append(labels_path)
    config = {
        "classes": args.classes,
        "per_class": args.per_class,
        "dims": list(dims),
        "separation": args.separation,
        "spread": args.spread,
        "imbalance": args.imbalance,
        "noise": args.noise,
        "seed": args.seed,
    }
    _write_manifest(out_dir / "manifest.json", args, written, config, started)
    return EXIT_OK


def _cmd_convert(args: argparse.Namespace) -> int:
    in_path = Path(args.input)
    if not in_path.exists():
        raise ValidationError(f"input file {in_path} does not exist")
    src = args.from_ if args.from_ is not None else sniff_format(in_path)
    if args.kind == "features":
        m = load_features(in_path, format=src)
        if args.extractor_id is not None:
            m = FeatureMatrix(extractor_id=args.extractor_id, data=m.data)
        if args.to == "binary":
            save_features(m, args.output)
        else:
            save_features_csv(m, args.output)
    else:
        y = load_labels(in_path, format=src)
        if args.to == "binary":
            save_labels(y, args.output)
        else:
            save_labels_csv(y, args.output)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._argv = ["fselect"] + argv
    try:
        if args.command == "select":
            return _cmd_select(args)
        if args.command == "score":
            return _cmd_score(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "convert":
            return _cmd_convert(args)
        parser.error(f"unknown command {args.command!r}")
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"fselect: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"fselect: missing input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FselectError as exc:
        print(f"fselect: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"fselect: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"fselect: unexpected error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
