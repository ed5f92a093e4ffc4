"""Batch command-line front end.

Every subcommand echoes its full configuration (defaults and seed
included) into the output header, writes JSON or CSV to stdout or
--out, and uses the exit-code contract: 0 success, 1 verification
failure (with a machine-readable report), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import complexity as cxmod
from . import covers, folding, genericity, graphs, presentations, surgery, words


def _emit(payload: dict, args: argparse.Namespace) -> None:
    if getattr(args, "format", "json") == "csv":
        text = _to_csv(payload)
    else:
        text = json.dumps(payload, indent=2, default=str) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _to_csv(payload: dict) -> str:
    lines = []
    for key, value in payload.get("config", {}).items():
        lines.append(f"# {key}={value}")
    rows = payload.get("samples") or payload.get("rows") or []
    if rows:
        lines.append("sample,metric,value")
        for row in rows:
            index = row.get("sample", row.get("index", ""))
            for key, value in row.items():
                if key in ("sample", "index"):
                    continue
                lines.append(f"{index},{key},{value}")
    for key, value in payload.items():
        if key in ("config", "samples", "rows"):
            continue
        lines.append(f"# {key}={json.dumps(value, default=str)}")
    return "\n".join(lines) + "\n"


def _config_echo(args: argparse.Namespace, names: list[str]) -> dict:
    return {name: getattr(args, name) for name in names}


def _parse_tuple(args: argparse.Namespace) -> words.GenTuple:
    if args.tuple_json:
        with open(args.tuple_json) as fh:
            data = json.load(fh)
        rank = data["rank"]
        entries = tuple(words.parse_word(s, rank) for s in data["words"])
        return words.GenTuple(rank, entries)
    entries = tuple(words.parse_word(s, args.rank) for s in args.words)
    return words.GenTuple(args.rank, entries)


def cmd_fold(args: argparse.Namespace) -> int:
    import hashlib

    t = _parse_tuple(args)
    wedge = folding.wedge_of_loops(t)
    trace = folding.fold_all(wedge, policy=args.policy)
    digests = [
        hashlib.sha256(
            repr(graphs.canonical_key(trace.stage(k).graph)).encode()
        ).hexdigest()[:16]
        for k in range(trace.num_stages)
    ]
    payload = {
        "config": _config_echo(args, ["rank", "words", "tuple_json", "policy", "dump_stages"]),
        "initial_edges": wedge.num_edges,
        "folds": trace.num_folds,
        "terminal": graphs.format_graph(trace.terminal),
        "terminal_is_rose": graphs.is_rose(trace.terminal),
        "records": [(r.kept, r.removed) for r in trace.records],
        "stage_digests": digests,
        "delta_index": trace.delta_index,
    }
    if args.dump_stages:
        payload["stages"] = [
            graphs.format_graph(trace.stage(k).graph) for k in range(trace.num_stages)
        ]
    _emit(payload, args)
    return 0


def cmd_verify_covers(args: argparse.Namespace) -> int:
    report = covers.survey_two_cover_characterization(
        args.rank, args.max_edges, args.max_path_len, args.max_candidates
    )
    payload = {
        "config": _config_echo(args, ["rank", "max_edges", "max_path_len", "max_candidates"]),
        **report.to_dict(),
    }
    _emit(payload, args)
    return 1 if report.violations else 0


def _word_stats_sample(task: tuple) -> dict:
    rank, length, seed, index, eps = task
    cfg = genericity.SampleConfig(rank=rank, length=length, samples=1, seed=seed)
    w = genericity.random_reduced_word(cfg, index)
    bound = genericity.repeat_length_bound(rank, length)
    plain = genericity.longest_repeated_subword(w, include_inverses=False)
    with_inv = genericity.longest_repeated_subword(w, include_inverses=True)
    worst = 0.0
    if with_inv >= bound:
        for gamma in genericity.repeated_subwords_at_least(w, bound, True):
            worst = max(worst, genericity.disjoint_coverage_bidirectional(w, gamma))
    return {
        "sample": index,
        "longest_repeat": plain,
        "longest_repeat_with_inverses": with_inv,
        "within_bound": with_inv <= bound,
        "max_coverage": worst,
        "within_eps": worst <= eps,
    }


def cmd_word_stats(args: argparse.Namespace) -> int:
    tasks = [
        (args.rank, args.length, args.seed, i, args.epsilon)
        for i in range(args.samples)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_word_stats_sample, tasks, chunksize=8))
    else:
        rows = [_word_stats_sample(t) for t in tasks]
    rows.sort(key=lambda r: r["sample"])
    bound = genericity.repeat_length_bound(args.rank, args.length)
    within = sum(1 for r in rows if r["within_bound"])
    eps_ok = sum(1 for r in rows if r["within_eps"])
    lo1, hi1 = genericity.wilson_interval(within, len(rows))
    lo2, hi2 = genericity.wilson_interval(eps_ok, len(rows))
    payload = {
        "config": _config_echo(
            args, ["rank", "length", "samples", "seed", "epsilon", "jobs"]
        )
        | {"bound": bound},
        "samples": rows,
        "aggregate": {
            "within_bound": {
                "fraction": within / len(rows),
                "wilson_low": round(lo1, 4),
                "wilson_high": round(hi1, 4),
            },
            "within_eps": {
                "fraction": eps_ok / len(rows),
                "wilson_low": round(lo2, 4),
                "wilson_high": round(hi2, 4),
            },
        },
    }
    _emit(payload, args)
    return 0


def cmd_alpha_injectivity(args: argparse.Namespace) -> int:
    cfg = genericity.SampleConfig(
        rank=args.rank, length=args.length, samples=args.samples, seed=args.seed
    )
    report = genericity.alpha_injectivity_experiment(
        cfg, alpha_target=args.alpha, max_edges=args.max_edges
    )
    payload = {
        "config": _config_echo(
            args, ["rank", "length", "samples", "seed", "alpha", "max_edges"]
        ),
        "samples": report.rows,
        "aggregate": report.aggregate,
    }
    _emit(payload, args)
    return 0


def cmd_build_presentation(args: argparse.Namespace) -> int:
    p, rejects = presentations.sample_presentation(
        args.rank, args.length, args.seed, args.attempts
    )
    payload = {
        "config": _config_echo(args, ["rank", "length", "seed", "attempts"]),
        "rejections": rejects,
        **p.to_dict(),
    }
    _emit(payload, args)
    return 0


def cmd_sc_check(args: argparse.Namespace) -> int:
    if args.presentation:
        with open(args.presentation) as fh:
            data = json.load(fh)
        rank = data["rank"]
        v = [words.parse_word(s, rank) for s in data["v"]]
        u = [words.parse_word(s, rank) for s in data["u"]]
        p = presentations.build_relators(v, u)
    else:
        p, _ = presentations.sample_presentation(args.rank, args.length, args.seed)
    report = presentations.piece_report(p.relators)
    payload = {
        "config": _config_echo(
            args, ["presentation", "rank", "length", "seed", "lam"]
        ),
        **report.to_dict(),
        "satisfies": report.satisfies(args.lam),
    }
    if args.format == "csv":
        lines = [f"# {k}={v}" for k, v in payload["config"].items()]
        lines += [
            f"# max_piece_length={report.max_piece_length}",
            f"# min_relator_length={report.min_relator_length}",
            f"# lambda_value={report.lambda_value}",
            f"# satisfies={payload['satisfies']}",
            "relator_i,relator_j,max_piece",
        ]
        for (i, j), value in sorted(report.pair_table.items()):
            lines.append(f"{i},{j},{value}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(payload, args)
    return 0 if report.satisfies(args.lam) else 1


def _load_relators(args: argparse.Namespace) -> cxmod.UWordIndex:
    rels = [words.parse_word(s, args.rank) for s in args.relators]
    return cxmod.UWordIndex(rels)


def cmd_complexity(args: argparse.Namespace) -> int:
    idx = _load_relators(args)
    w = words.parse_word(args.word, args.rank)
    thresholds = cxmod.Thresholds()
    value = cxmod.complexity(w, idx, thresholds, args.depth)
    k, seg = cxmod.c1(w, idx)
    payload = {
        "config": _config_echo(args, ["rank", "relators", "word", "depth"]),
        **value.to_dict(),
        "thresholds": thresholds.__dict__,
        "segmentation": seg.to_dict(),
    }
    _emit(payload, args)
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    idx = _load_relators(args)
    w = words.parse_word(args.word, args.rank)
    rel, sign, offset, length = (int(x) for x in args.relator_rotation.split(":"))
    base = idx.relators[rel]
    if sign < 0:
        base = base.inverse()
    rotated = words.Word(args.rank, base.letters[offset:] + base.letters[:offset])
    pattern = rotated.subword(0, length)
    replacement = idx.u_complement(pattern, cxmod.UCert(rel, sign, offset, 1))
    outcome = cxmod.reduction_move(
        w, pattern, replacement, idx, None, cxmod.Thresholds(), args.depth
    )
    payload = {
        "config": _config_echo(
            args, ["rank", "relators", "word", "relator_rotation", "depth"]
        ),
        "pattern": str(pattern),
        "replacement": str(replacement),
        **outcome.to_dict(),
    }
    _emit(payload, args)
    return 0


def cmd_surgery_demo(args: argparse.Namespace) -> int:
    report = surgery.surgery_demo(
        rank=args.rank, relator_length=args.relator_length, seed=args.seed,
        depth=args.depth,
    )
    payload = {
        "config": _config_echo(args, ["rank", "relator_length", "seed", "depth"]),
        **report.__dict__,
    }
    _emit(payload, args)
    ok = report.refolds_to_rose and report.delta_after_refolds and report.strictly_smaller
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rosefold", description="labeled-graph folding and genericity toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default=None, help="write output to this path")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("fold", help="wedge a tuple and fold it")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--words", nargs="*", default=[], help="tuple entries as word text")
    p.add_argument("--tuple-json", dest="tuple_json", default=None)
    p.add_argument("--policy", choices=folding.POLICIES, default="least")
    p.add_argument("--dump-stages", dest="dump_stages", action="store_true")
    common(p)
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser(
        "verify-covers",
        help="exhaustively classify small core graphs against the cover characterization",
    )
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--max-edges", dest="max_edges", type=int, default=6)
    p.add_argument("--max-path-len", dest="max_path_len", type=int, default=14)
    p.add_argument("--max-candidates", dest="max_candidates", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_verify_covers)

    p = sub.add_parser("word-stats", help="repeated-subword and coverage statistics")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--length", type=int, default=4096)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_word_stats)

    p = sub.add_parser("alpha-injectivity", help="injectivity ratios of lifts")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--length", type=int, default=256)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--max-edges", dest="max_edges", type=int, default=4)
    common(p)
    p.set_defaults(func=cmd_alpha_injectivity)

    p = sub.add_parser("build-presentation", help="sample a two-family presentation")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempts", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_build_presentation)

    p = sub.add_parser("sc-check", help="piece statistics and the lambda condition")
    p.add_argument("--presentation", default=None, help="presentation JSON path")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=1 / 8)
    common(p)
    p.set_defaults(func=cmd_sc_check)

    p = sub.add_parser("complexity", help="factor complexity of a word")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--relators", nargs="+", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--depth", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("reduce", help="apply an occurrence-replacement move")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--relators", nargs="+", required=True)
    p.add_argument("--word", required=True)
    p.add_argument(
        "--relator-rotation",
        dest="relator_rotation",
        required=True,
        help="rel:sign:offset:length selecting the pattern from a relator rotation",
    )
    p.add_argument("--depth", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("surgery-demo", help="end-to-end fold/replace/refold pipeline")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--relator-length", dest="relator_length", type=int, default=40)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--depth", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_surgery_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
