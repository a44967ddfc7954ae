"""Command-line interface: generate data, evaluate, compare and sweep k.

Every file written is accompanied by ``<file>.manifest.json`` describing the
run. Defaults for the seed and the number of worker processes can be set with
the ``LWNB_SEED`` and ``LWNB_WORKERS`` environment variables.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import __version__
from .classifiers import DISCRETIZE, GAUSSIAN, KINDS, ClassifierConfig
from .dataset import CsvConfig, DatasetError, load_csv, write_csv
from .evaluation import cross_validate, evaluate
from .generators import gen_checkers, gen_two_spheres

DEFAULT_SEED = 1


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {name}={raw!r} is not an integer") from None


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def _emit(args, text: str, manifest: dict) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    manifest = {
        "tool": "lwnb",
        "tool_version": __version__,
        "command": args.command,
        **manifest,
        "outputs": [str(args.out)],
    }
    atomic_write(args.out, text)
    atomic_write(manifest_path(args.out), json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load(args):
    try:
        raw = Path(args.data).read_bytes()
    except OSError as e:
        raise SystemExit(f"error: cannot read {args.data}: {e.strerror}") from None
    cfg = CsvConfig(class_column=args.class_column, missing=args.missing)
    d = load_csv(raw, cfg)
    source = {"path": str(args.data), "sha256": hashlib.sha256(raw).hexdigest(),
              "class_column": args.class_column, "missing": args.missing}
    return d, source


def cmd_generate(args) -> None:
    if args.kind == "two_spheres":
        if args.n % 2:
            args.parser.error("two_spheres needs an even --n (half per class)")
        d = gen_two_spheres(args.n // 2, args.seed)
    else:
        d = gen_checkers(args.n, args.seed)
    buf = io.StringIO()
    write_csv(d, buf)
    _emit(args, buf.getvalue(), {"generator": {"kind": args.kind, "n": args.n}, "seed": args.seed})


def _config(parser, kind: str, k, mode: str) -> ClassifierConfig:
    try:
        return ClassifierConfig(kind, None if kind == "nb" else k, mode)
    except ValueError as e:
        parser.error(str(e))


def _parse_spec(parser, text: str) -> ClassifierConfig:
    try:
        return ClassifierConfig.parse(text)
    except ValueError as e:
        parser.error(str(e))


def _protocol(args) -> dict:
    return {"runs": args.runs, "folds": args.folds, "seed": args.seed}


def cmd_evaluate(args) -> None:
    cfg = _config(args.parser, args.clf, args.k, args.numeric_mode)
    d, source = _load(args)
    report = evaluate(d, [cfg], Path(args.data).stem, args.runs, args.folds, args.seed, workers=args.workers)
    buf = io.StringIO()
    report.write_tsv(buf)
    _emit(args, buf.getvalue(), {"dataset": source, "classifiers": [cfg.label], **_protocol(args)})


def cmd_compare(args) -> None:
    base = _parse_spec(args.parser, args.baseline)
    challengers = [_parse_spec(args.parser, c) for c in args.challenger]
    d, source = _load(args)
    report = evaluate(d, challengers, Path(args.data).stem, args.runs, args.folds, args.seed,
                      baseline=base, alpha=args.alpha, workers=args.workers)
    buf = io.StringIO()
    report.write_tsv(buf)
    _emit(args, buf.getvalue(), {"dataset": source, "baseline": base.label,
                                 "classifiers": [c.label for c in challengers], "alpha": args.alpha,
                                 **_protocol(args)})


def cmd_sweep_k(args) -> None:
    if not args.k:
        args.parser.error("at least one k value is required")
    if any(k < 1 for k in args.k):
        args.parser.error("k values must be >= 1")
    kinds = list(dict.fromkeys(args.clf))
    d, source = _load(args)
    columns = {}
    for kind in kinds:
        series = []
        for k in args.k:
            cfg = _config(args.parser, kind, k, args.numeric_mode)
            series.append(cross_validate(d, cfg, args.runs, args.folds, args.seed, args.workers).mean())
        columns[kind] = series
    lines = ["# " + " ".join(["k"] + kinds)]
    for i, k in enumerate(args.k):
        lines.append(" ".join([str(k)] + [f"{columns[c][i]:.6f}" for c in kinds]))
    _emit(args, "\n".join(lines) + "\n", {
        "dataset": source, "classifiers": kinds, "k": list(args.k),
        "numeric_mode": args.numeric_mode, **_protocol(args),
    })


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _at_least_two(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    seed = _env_int("LWNB_SEED", DEFAULT_SEED)
    workers = _env_int("LWNB_WORKERS", 1)
    p = argparse.ArgumentParser(prog="lwnb", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, runs_default: int):
        sp.add_argument("--data", required=True, help="CSV file with a header row")
        sp.add_argument("--class-column", default=None, help="class column name (default: last)")
        sp.add_argument("--missing", default="?", help="missing-value token (default: ?)")
        sp.add_argument("--runs", type=_positive, default=runs_default)
        sp.add_argument("--folds", type=_at_least_two, default=10)
        sp.add_argument("--seed", type=int, default=seed, help=f"default {seed} (env LWNB_SEED)")
        sp.add_argument("--workers", type=_positive, default=workers, help="worker processes (env LWNB_WORKERS)")
        sp.add_argument("--out", default=None, help="output file (default: stdout, no manifest)")

    g = sub.add_parser("generate", help="write a synthetic dataset as CSV")
    g.add_argument("--kind", required=True, choices=["two_spheres", "checkers"])
    g.add_argument("--n", type=_positive, required=True, help="total number of instances")
    g.add_argument("--seed", type=int, default=seed)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate, parser=g)

    e = sub.add_parser("evaluate", help="repeated stratified CV of one classifier")
    common(e, 10)
    e.add_argument("--clf", required=True, choices=KINDS)
    e.add_argument("--k", type=int, default=None)
    e.add_argument("--numeric-mode", choices=[GAUSSIAN, DISCRETIZE], default=GAUSSIAN)
    e.set_defaults(func=cmd_evaluate, parser=e)

    c = sub.add_parser("compare", help="challengers vs a baseline with the corrected resampled t-test")
    common(c, 10)
    c.add_argument("--baseline", required=True, help="classifier spec, e.g. nb or lwnb/k=50/discretize")
    c.add_argument("--challenger", required=True, action="append", help="repeatable classifier spec")
    c.add_argument("--alpha", type=float, default=0.05)
    c.set_defaults(func=cmd_compare, parser=c)

    s = sub.add_parser("sweep-k", help="mean CV accuracy for a range of k values")
    common(s, 1)
    s.add_argument("--clf", required=True, nargs="+", choices=[k for k in KINDS if k != "nb"])
    s.add_argument("--k", type=int, nargs="*", required=True)
    s.add_argument("--numeric-mode", choices=[GAUSSIAN, DISCRETIZE], default=GAUSSIAN)
    s.set_defaults(func=cmd_sweep_k, parser=s)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            args.func(args)
    except (DatasetError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e.filename or ''}: {e.strerror}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
