"""Command-line interface.

    coreclust generate --components 3 --n 150 --seed 1 --out synth.csv
    coreclust core --input synth.csv --label-col component --k 3 --seed 7 --out-dir run1
    coreclust eval --result run1/result.json
    coreclust eval --result run1/result.json --result2 run2/result.json
    coreclust replay run1/manifest.json

Exit codes: 0 success, 2 usage error, 3 data error, 4 computation failure.
``CORECLUST_OUT_DIR`` and ``CORECLUST_THREADS`` override the defaults of
``--out-dir`` and ``--threads``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path


from . import __version__
from .clique import CliqueTooLarge
from .clustering import ClusterConfig, ClusteringError
from .cooccurrence import EstimatorError
from .corecluster import ConfigError, CoreClusteringResult, CoreConfig, core_clustering, weak_fraction
from .dataset import DataError, GaussianMixtureSpec, generate_gaussian_mixture, load_bcw, load_csv, load_iris, save_csv, triangle_mixture
from .evaluation import AGREEMENT_HEADER, REPORT_HEADER, agreement, format_csv, report

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 2, 3, 4
BUILTIN = {"builtin:iris": load_iris, "builtin:bcw": load_bcw}

log = logging.getLogger("coreclust")


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coreclust", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"coreclust {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a synthetic Gaussian mixture dataset")
    g.add_argument("--components", type=_positive_int, default=3)
    g.add_argument("--n", type=_positive_int, default=150)
    g.add_argument("--side", type=float, default=2.5,
                   help="distance between neighbouring component means")
    g.add_argument("--variance", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="synthetic.csv")

    c = sub.add_parser("core", help="compute core clusters")
    c.add_argument("--input", required=True, help="CSV path, or builtin:iris / builtin:bcw")
    c.add_argument("--label-col", default=None)
    c.add_argument("--method", choices=["kmeanspp", "hierarchical", "trimmed_kmeans", "nearest_centroid"],
                   default="kmeanspp")
    c.add_argument("--k", type=_positive_int, default=3)
    c.add_argument("--alpha", type=float, default=0.1)
    c.add_argument("--iterations", type=_positive_int, default=1000)
    c.add_argument("--estimator", choices=["bootstrap", "direct"], default="bootstrap")
    c.add_argument("--direct-pairs", choices=["within", "all"], default="within")
    c.add_argument("--mixture", default=None,
                   help="mixture JSON written by 'generate'; required for --estimator direct")
    c.add_argument("--restarts", type=_positive_int, default=10)
    c.add_argument("--linkage", choices=["complete", "single", "average"], default="complete")
    c.add_argument("--trim", type=float, default=0.05)
    c.add_argument("--max-iter", type=_positive_int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out-dir", default=os.environ.get("CORECLUST_OUT_DIR", "coreclust-out"))
    c.add_argument("--threads", type=_positive_int, default=int(os.environ.get("CORECLUST_THREADS", "1")))
    c.add_argument("--dump-graphs", action="store_true", help="write each threshold graph as an edge list")

    e = sub.add_parser("eval", help="purity report, or agreement between two results")
    e.add_argument("--result", required=True)
    e.add_argument("--result2", default=None)
    e.add_argument("--labels", default=None, help="CSV holding ground-truth labels (default: labels in the result)")
    e.add_argument("--label-col", default=None)
    e.add_argument("--name", default="", help="dataset name for the report row")
    e.add_argument("--out", default=None, help="write the CSV here instead of stdout")

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    r.add_argument("--out-dir", default=None, help="write outputs of a replayed 'core' run here instead")
    return parser


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(path: Path, command: str, flags: dict, seed, outputs, started, m_effective=None):
    manifest = {
        "command": command,
        "flags": flags,
        "seed": seed,
        "software_version": __version__,
        "m_effective": m_effective,
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def _flags(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("command", "func", "verbose")}


def cmd_generate(args) -> int:
    started = time.perf_counter()
    if args.variance <= 0 or args.side < 0:
        raise UsageError("--variance must be positive and --side non-negative")
    spec = triangle_mixture(args.side, args.components, args.variance)
    data = generate_gaussian_mixture(spec, args.n, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(data, out)
    spec_path = out.with_suffix(".mixture.json")
    spec_path.write_text(json.dumps({
        "means": spec.means.tolist(),
        "variances": spec.variances.tolist(),
        "weights": spec.weights.tolist(),
    }, indent=2) + "\n", encoding="utf-8")
    _write_manifest(out.with_suffix(".manifest.json"), "generate", _flags(args), args.seed,
                    [out, spec_path], started)
    return EXIT_OK


def _load_input(path: str, label_col):
    if path in BUILTIN:
        return BUILTIN[path]()
    return load_csv(path, label_col)


def _load_mixture(path) -> GaussianMixtureSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return GaussianMixtureSpec(doc["means"], doc.get("variances"), doc.get("weights"))
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read mixture {path}: {exc}") from exc


def cmd_core(args) -> int:
    started = time.perf_counter()
    if not 0.0 <= args.alpha <= 1.0:
        raise UsageError("--alpha must lie in [0, 1]")
    try:
        cluster = ClusterConfig(args.method, k=args.k, restarts=args.restarts, linkage=args.linkage,
                                trim_fraction=args.trim if args.method == "trimmed_kmeans" else 0.0,
                                max_iter=args.max_iter)
        cfg = CoreConfig(args.alpha, args.iterations, args.estimator, cluster, args.seed, args.direct_pairs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.estimator == "direct" and not args.mixture:
        raise UsageError("--estimator direct needs --mixture")
    data = _load_input(args.input, args.label_col)
    if args.k > data.n:
        raise UsageError(f"--k {args.k} exceeds the {data.n} items")
    if args.method == "nearest_centroid" and data.labels is None:
        raise UsageError("nearest_centroid needs --label-col")
    generator = _load_mixture(args.mixture) if args.mixture else None

    result = core_clustering(data, cfg, generator, workers=args.threads)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "result.json", out / "items.csv", out / "edges.csv"]
    result.save_json(paths[0])
    result.save_items_csv(paths[1], data)
    result.cooc.save_edges(paths[2], 1.0 - args.alpha)
    if args.dump_graphs:
        from .clique import build_threshold_graph
        for c in result.clusters:
            g = build_threshold_graph(result.cooc, result.original.members(c), args.alpha)
            path = out / f"graph_{c}.csv"
            g.save_edges(path)
            paths.append(path)
    log.info("weak fraction %.4f, core sizes %s", weak_fraction(result), result.core_sizes)
    _write_manifest(out / "manifest.json", "core", _flags(args), args.seed, paths, started, result.m_effective)
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        r1 = CoreClusteringResult.load_json(args.result)
        r2 = CoreClusteringResult.load_json(args.result2) if args.result2 else None
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read result: {exc}") from exc
    if r2 is not None:
        try:
            m = agreement(r1, r2)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
        text = format_csv(AGREEMENT_HEADER, [m.row()])
    else:
        labels = None
        if args.labels:
            labels = load_csv(args.labels, args.label_col).labels
            if labels is None:
                raise UsageError("--labels needs --label-col")
        elif r1.truth is None:
            raise UsageError("result has no labels; pass --labels and --label-col")
        try:
            rep = report(r1, labels)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
        algorithm = r1.config.get("cluster", {}).get("method", "")
        text = format_csv(REPORT_HEADER, [rep.row(args.name, algorithm)])
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        command, flags = manifest["command"], manifest["flags"]
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read manifest: {exc}") from exc
    if args.out_dir and command == "core":
        flags = {**flags, "out_dir": args.out_dir}
    ns = build_parser().parse_args([command, *_argv_for(command, flags)])
    return COMMANDS[command](ns)


def _argv_for(command: str, flags: dict) -> list[str]:
    argv = []
    for key, value in flags.items():
        opt = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(opt)
        elif value is not None:
            argv += [opt, str(value)]
    return argv


COMMANDS = {"generate": cmd_generate, "core": cmd_core, "eval": cmd_eval, "replay": cmd_replay}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"coreclust: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"coreclust: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ClusteringError, EstimatorError, CliqueTooLarge) as exc:
        print(f"coreclust: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
