"""Command-line front end.

Subcommands: ``cluster``, ``select``, ``predict``, ``constraints``, ``ari``
and ``bench``.  All randomness is controlled by ``--seed``, data goes to
files or stdout, logs to stderr, and every run writes a manifest recording
resolved parameters and checksums of the files it read and wrote.

Exit codes: 0 success, 1 internal or numeric failure, 2 user input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    ConstraintFormatError,
    Dataset,
    DatasetFormatError,
    empty_constraints,
    load_constraints,
    load_dataset,
    normalize,
    sample_constraints,
    save_constraints,
)
from .evaluation import (
    BenchmarkConfig,
    adjusted_rand_index,
    resolve_link_count,
    run_benchmark,
    write_report_csv,
    write_report_summary,
)
from .kernel import apply_constraints, local_scaling_kernel
from .lsmi import cross_validate
from .model_select import LsmiConfig, grid_search
from .solver import PredictionError, cluster, load_model, predict, save_model


class UserInputError(ValueError):
    """Bad flag combination or bad user-supplied value."""


def _default_jobs() -> int:
    env = os.environ.get("SMICLUST_JOBS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(args, command: str, inputs, outputs, started: float, **extra) -> None:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "manifest_out"):
            continue
        params[key] = str(value) if isinstance(value, Path) else value
    doc = {
        "command": command,
        "parameters": params,
        "inputs": {str(p): _sha256(p) for p in inputs if p and Path(p).exists()},
        "outputs": {str(p): _sha256(p) for p in outputs if p and Path(p).exists()},
        "wall_time_s": time.perf_counter() - started,
        **extra,
    }
    Path(args.manifest_out).write_text(
        json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_labels_csv(path, labels) -> None:
    lines = ["index,label"] + [f"{i + 1},{int(lab)}" for i, lab in enumerate(labels)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_labels_csv(path) -> np.ndarray:
    """Labels from a CSV written by this tool (index,label) or a bare column."""
    values = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        cells = line.split(",")
        try:
            values.append(int(float(cells[-1])))
        except ValueError:
            if lineno == 1:  # header
                continue
            raise DatasetFormatError(f"{path}: non-numeric label on line {lineno}") from None
    if not values:
        raise DatasetFormatError(f"{path}: no labels found")
    return np.array(values, dtype=int)


def _write_kernel_csv(path, entries) -> None:
    lines = [",".join(repr(float(v)) for v in row) for row in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_grid(text, kind=float):
    try:
        return tuple(kind(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise UserInputError(f"bad grid value in {text!r}") from None


def _load_input(args) -> Dataset:
    ds = load_dataset(args.input, args.format)
    return normalize(ds, args.normalize)


def _load_links(args, n: int):
    if args.constraints is None:
        return empty_constraints(n)
    return load_constraints(args.constraints, n)


def _add_io_flags(sub, with_constraints=True):
    sub.add_argument("--input", required=True, type=Path, help="input CSV file")
    sub.add_argument("--format", choices=("csv", "labeled-csv"), default="csv")
    sub.add_argument("--classes", required=True, type=int, help="number of clusters")
    if with_constraints:
        sub.add_argument("--constraints", type=Path, help="link file (i j +1/-1, 1-based)")
    sub.add_argument(
        "--normalize", choices=("none", "minmax-symmetric", "zscore"), default="none"
    )
    sub.add_argument("--seed", type=int, default=0)


def cmd_cluster(args) -> int:
    started = time.perf_counter()
    if args.auto and args.t is not None:
        raise UserInputError("--auto and an explicit --t are mutually exclusive")
    if not args.auto and args.t is None:
        raise UserInputError("either --t or --auto is required")
    ds = _load_input(args)
    cs = _load_links(args, ds.n)
    outputs = [args.labels_out]
    if args.auto:
        result = grid_search(
            ds,
            cs,
            args.classes,
            t_grid=_parse_grid(args.t_grid, int) if args.t_grid else None,
            gamma_grid=_parse_grid(args.gamma_grid) if args.gamma_grid else None,
            eta_grid=_parse_grid(args.eta_grid) if args.eta_grid else None,
            lsmi_cfg=LsmiConfig(center_cap=args.center_cap, folds=args.folds),
            seed=args.seed,
            jobs=args.jobs,
        )
        labels, model = result.best.labels, result.model
        print(
            f"selected t={result.best.t} gamma={result.best.gamma} "
            f"eta={result.best.eta} (score {result.best.score:.4f})",
            file=sys.stderr,
        )
    else:
        labels, model = cluster(ds, cs, args.t, args.gamma, args.eta, args.classes)
    _write_labels_csv(args.labels_out, labels)
    if args.model_out:
        save_model(model, args.model_out)
        outputs.append(args.model_out)
    if args.dump_kernel:
        edited = apply_constraints(local_scaling_kernel(ds.features, model.t), cs)
        _write_kernel_csv(args.dump_kernel, edited.entries)
        outputs.append(args.dump_kernel)
    _write_manifest(args, "cluster", [args.input, args.constraints], outputs, started)
    return 0


def cmd_select(args) -> int:
    started = time.perf_counter()
    ds = _load_input(args)
    cs = _load_links(args, ds.n)
    result = grid_search(
        ds,
        cs,
        args.classes,
        t_grid=_parse_grid(args.t_grid, int) if args.t_grid else None,
        gamma_grid=_parse_grid(args.gamma_grid) if args.gamma_grid else None,
        eta_grid=_parse_grid(args.eta_grid) if args.eta_grid else None,
        lsmi_cfg=LsmiConfig(center_cap=args.center_cap, folds=args.folds),
        seed=args.seed,
        jobs=args.jobs,
    )
    # Per-candidate wall times go into the manifest, keeping this file
    # byte-reproducible across reruns.
    lines = ["t,gamma,eta,lsmi,n_v,score,error"]
    for cand in result.candidates:
        lines.append(
            f"{cand.t},{cand.gamma!r},{cand.eta!r},{cand.lsmi!r},{cand.n_v},"
            f"{cand.score!r},{cand.error or ''}"
        )
    Path(args.table_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_labels_csv(args.labels_out, result.best.labels)
    outputs = [args.table_out, args.labels_out]
    if args.model_out:
        save_model(result.model, args.model_out)
        outputs.append(args.model_out)
    if args.dump_cv:
        _, _, cv_table = cross_validate(
            ds.features,
            result.best.labels,
            folds=args.folds,
            center_cap=args.center_cap,
            seed=args.seed,
        )
        folds = len(cv_table[0].fold_cv)
        cv_lines = ["kappa,delta,mean_cv," + ",".join(f"fold_{m}" for m in range(folds))]
        for rec in cv_table:
            cells = [repr(rec.kappa), repr(rec.delta), repr(rec.mean_cv)]
            cells += [repr(v) for v in rec.fold_cv]
            cv_lines.append(",".join(cells))
        Path(args.dump_cv).write_text("\n".join(cv_lines) + "\n", encoding="utf-8")
        outputs.append(args.dump_cv)
    print(
        f"best: t={result.best.t} gamma={result.best.gamma} eta={result.best.eta} "
        f"lsmi={result.best.lsmi:.4f} n_v={result.best.n_v}",
        file=sys.stderr,
    )
    timings = [
        {"t": cand.t, "gamma": cand.gamma, "eta": cand.eta, "seconds": cand.seconds}
        for cand in result.candidates
    ]
    _write_manifest(
        args, "select", [args.input, args.constraints], outputs, started,
        candidate_seconds=timings,
    )
    return 0


def cmd_predict(args) -> int:
    started = time.perf_counter()
    model = load_model(args.model)
    ds = load_dataset(args.input, "csv", allow_empty=True)
    if ds is None:
        Path(args.output).write_text("index,label\n", encoding="utf-8")
    else:
        labels = predict(model, ds.features)
        _write_labels_csv(args.output, labels)
    _write_manifest(args, "predict", [args.model, args.input], [args.output], started)
    return 0


def cmd_constraints(args) -> int:
    started = time.perf_counter()
    ds = load_dataset(args.input, "labeled-csv")
    n_links = resolve_link_count(args.links, ds.n)
    cs = sample_constraints(ds.labels, n_links, seed=args.seed)
    save_constraints(cs, args.output)
    _write_manifest(args, "constraints", [args.input], [args.output], started)
    return 0


def cmd_ari(args) -> int:
    started = time.perf_counter()
    labels_a = _read_labels_csv(args.a)
    labels_b = _read_labels_csv(args.b)
    print(adjusted_rand_index(labels_a, labels_b))
    _write_manifest(args, "ari", [args.a, args.b], [], started)
    return 0


def cmd_bench(args) -> int:
    started = time.perf_counter()
    doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    config = BenchmarkConfig.from_dict(doc, base_dir=Path(args.config).parent)
    if args.jobs is not None:
        config = dataclasses.replace(config, jobs=args.jobs)
    report = run_benchmark(config)
    write_report_csv(report, args.report_out)
    write_report_summary(report, args.summary_out)
    for links, mean, std in zip(report.link_counts, report.mean_ari, report.std_ari):
        print(f"links={links}: ARI {mean:.4f} +/- {std:.4f}", file=sys.stderr)
    _write_manifest(
        args, "bench", [args.config], [args.report_out, args.summary_out], started
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smiclust",
        description="Information-maximization clustering with pairwise link constraints",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a dataset, optionally with links")
    _add_io_flags(p)
    p.add_argument("--t", type=int, help="neighborhood size of the local-scaling kernel")
    p.add_argument("--gamma", type=float, default=0.0, help="must-link strength")
    p.add_argument("--eta", type=float, default=0.0, help="cannot-link strength")
    p.add_argument("--auto", action="store_true", help="pick t, gamma, eta by grid search")
    p.add_argument("--t-grid", help="comma-separated t values for --auto")
    p.add_argument("--gamma-grid", help="comma-separated gamma values for --auto")
    p.add_argument("--eta-grid", help="comma-separated eta values for --auto")
    p.add_argument("--center-cap", type=int, default=500)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--labels-out", type=Path, default=Path("labels.csv"))
    p.add_argument("--model-out", type=Path)
    p.add_argument("--dump-kernel", type=Path, help="write the edited kernel matrix as CSV")
    p.add_argument("--manifest-out", type=Path, default=Path("cluster.manifest.json"))
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("select", help="grid-search t, gamma, eta and report all candidates")
    _add_io_flags(p)
    p.add_argument("--t-grid", help="comma-separated t values")
    p.add_argument("--gamma-grid", help="comma-separated gamma values")
    p.add_argument("--eta-grid", help="comma-separated eta values")
    p.add_argument("--center-cap", type=int, default=500)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--table-out", type=Path, default=Path("candidates.csv"))
    p.add_argument("--labels-out", type=Path, default=Path("labels.csv"))
    p.add_argument("--model-out", type=Path)
    p.add_argument(
        "--dump-cv", type=Path, help="write the winner's LSMI cross-validation table as CSV"
    )
    p.add_argument("--manifest-out", type=Path, default=Path("select.manifest.json"))
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("predict", help="label new points with a saved model")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", type=Path, default=Path("predictions.csv"))
    p.add_argument("--manifest-out", type=Path, default=Path("predict.manifest.json"))
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("constraints", help="sample links from a labeled dataset")
    p.add_argument("--input", required=True, type=Path, help="labeled-csv dataset")
    p.add_argument(
        "--links", required=True, type=float, help="link count, or fraction of all pairs if < 1"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, default=Path("constraints.txt"))
    p.add_argument("--manifest-out", type=Path, default=Path("constraints.manifest.json"))
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("ari", help="adjusted Rand index between two label files")
    p.add_argument("--a", required=True, type=Path)
    p.add_argument("--b", required=True, type=Path)
    p.add_argument("--manifest-out", type=Path, default=Path("ari.manifest.json"))
    p.set_defaults(func=cmd_ari)

    p = sub.add_parser("bench", help="run a benchmark sweep from a JSON config")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--report-out", type=Path, default=Path("report.csv"))
    p.add_argument("--summary-out", type=Path, default=Path("summary.json"))
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--manifest-out", type=Path, default=Path("bench.manifest.json"))
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        UserInputError,
        DatasetFormatError,
        ConstraintFormatError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PredictionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
