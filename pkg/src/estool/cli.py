"""Command-line pipeline driver.

Subcommands: convert, reconstruct, stats, sweep, entropy, cost, inspect.
Report-producing commands write delimited output (CSV/JSON) and render a
matching PNG figure next to it.

Option precedence is flags > config file > defaults; the config file is
flat ``key = value`` text with the same names as the long flags
(threshold, steps, trajectory, seed, workers, margin, out, queue_cap).
Manifests list one ``relative/path<TAB>label`` entry per line, resolved
against the manifest's own directory.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 validation
failure (corrupt or inconsistent data files). Set ESTOOL_LOG=INFO or
DEBUG for progress logging.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass

import numpy as np

from . import analysis, cost, plots, storage
from .color import ImageFormatError, read_ppm, write_pgm
from .generator import ConversionConfig, generate_events
from .reconstruct import edge_integral, to_gray_levels
from .trajectory import KINDS, make_trajectory

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

DEFAULTS = {
    "threshold": 0.18,
    "steps": 8,
    "trajectory": "odg",
    "seed": 0,
    "workers": 1,
    "margin": 16,
    "out": ".",
    "queue_cap": 0,  # 0 means 2 * workers
}

logger = logging.getLogger("estool")


class CliConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Manifest:
    root: str
    entries: tuple[tuple[str, str], ...]  # (relative path, label)


def read_manifest(path: str) -> Manifest:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    entries = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise CliConfigError(f"{path}:{lineno}: expected 'path<TAB>label'")
        rel, label = line.split("\t", 1)
        rel, label = rel.strip(), label.strip()
        if not rel or not label:
            raise CliConfigError(f"{path}:{lineno}: empty path or label")
        if rel in seen:
            raise CliConfigError(f"{path}:{lineno}: duplicate entry {rel!r}")
        seen.add(rel)
        entries.append((rel, label))
    if not entries:
        raise CliConfigError(f"{path}: manifest is empty")
    return Manifest(root=os.path.dirname(os.path.abspath(path)), entries=tuple(entries))


def read_run_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in DEFAULTS:
                raise CliConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge flag values over config-file values over defaults."""
    merged = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        for key, raw in read_run_config(config_path).items():
            if key in ("threshold",):
                merged[key] = float(raw)
            elif key in ("steps", "seed", "workers", "margin", "queue_cap"):
                merged[key] = int(raw)
            else:
                merged[key] = raw
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if merged["workers"] < 1:
        raise CliConfigError("workers must be >= 1")
    if merged["trajectory"] not in KINDS:
        raise CliConfigError(f"trajectory must be one of {KINDS}")
    if merged["queue_cap"] == 0:
        merged["queue_cap"] = 2 * merged["workers"]
    return merged


def conversion_config(opts: dict) -> ConversionConfig:
    traj = make_trajectory(opts["trajectory"], opts["steps"], opts["seed"])
    return ConversionConfig(
        thresh=opts["threshold"],
        steps=opts["steps"],
        trajectory=traj,
        valid_margin=opts["margin"],
    )


def _parse_float_list(spec: str) -> list[float]:
    """Parse '0.1,0.2,0.3' or 'start:stop:step' (inclusive of stop)."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise CliConfigError(f"range spec must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise CliConfigError("range step must be positive")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count) if start + i * step <= stop + 1e-12]
    try:
        return [float(p) for p in spec.split(",") if p.strip()]
    except ValueError:
        raise CliConfigError(f"bad number list {spec!r}") from None


def _parse_int_list(spec: str) -> list[int]:
    try:
        return [int(p) for p in spec.split(",") if p.strip()]
    except ValueError:
        raise CliConfigError(f"bad integer list {spec!r}") from None


def _load_corpus(manifest: Manifest) -> list[np.ndarray]:
    images = []
    for rel, _ in manifest.entries:
        images.append(read_ppm(os.path.join(manifest.root, rel)))
    return images


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------

def _convert_worker(task):
    index, src, dst, cfg, margin = task
    try:
        stream = generate_events(read_ppm(src), cfg)
    except (ImageFormatError, OSError, ValueError) as exc:
        return index, os.path.basename(dst), None, str(exc)
    storage.write_stream(stream, dst)
    rates = {pol: analysis.event_rate(stream, pol, margin) for pol in analysis.POLARITIES}
    return index, os.path.basename(dst), rates, None


def cmd_convert(args) -> int:
    opts = resolve_options(args)
    cfg = conversion_config(opts)
    manifest = read_manifest(args.manifest)
    out_dir = opts["out"]
    os.makedirs(out_dir, exist_ok=True)

    tasks = []
    stems = set()
    for index, (rel, _) in enumerate(manifest.entries):
        stem = os.path.splitext(os.path.basename(rel))[0]
        if stem in stems:
            raise CliConfigError(f"duplicate output stem {stem!r}; rename manifest entries")
        stems.add(stem)
        tasks.append((
            index,
            os.path.join(manifest.root, rel),
            os.path.join(out_dir, stem + ".evs"),
            cfg,
            opts["margin"],
        ))

    results: dict[int, tuple] = {}
    workers = opts["workers"]
    if workers == 1:
        for task in tasks:
            results[task[0]] = _convert_worker(task)
    else:
        # Image-granularity tasks on a bounded submission window so huge
        # manifests never swamp the executor queue.
        window = max(opts["queue_cap"], workers)
        queue = iter(tasks)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = {pool.submit(_convert_worker, task)
                       for task in itertools.islice(queue, window)}
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    res = fut.result()
                    results[res[0]] = res
                for task in itertools.islice(queue, len(done)):
                    pending.add(pool.submit(_convert_worker, task))

    per_image = []
    failures = 0
    for index in range(len(tasks)):
        _, name, rates, error = results[index]
        if error is not None:
            failures += 1
            logger.warning("skipped %s: %s", name, error)
            continue
        per_image.append({"name": name, **{k: rates[k] for k in analysis.POLARITIES}})
    if not per_image:
        print("error: no image could be converted", file=sys.stderr)
        return EXIT_IO

    values = np.array([[row[pol] for pol in analysis.POLARITIES] for row in per_image])
    summary = {
        "threshold": cfg.thresh,
        "steps": cfg.steps,
        "trajectory": opts["trajectory"],
        "margin": opts["margin"],
        "images": len(per_image),
        "skipped": failures,
        "event_rate": {
            pol: {"mean": float(values[:, i].mean()), "sigma": float(values[:, i].std())}
            for i, pol in enumerate(analysis.POLARITIES)
        },
        "per_image": per_image,
    }
    with open(os.path.join(out_dir, "stats.json"), "w", encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("converted %d images (%d skipped) into %s", len(per_image), failures, out_dir)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------

def cmd_reconstruct(args) -> int:
    opts = resolve_options(args)
    stream = storage.read_stream(args.evs)
    traj = make_trajectory(opts["trajectory"], stream.steps, opts["seed"])
    recon = edge_integral(storage.to_event_frames(stream), traj)
    gray = to_gray_levels(recon, stream.steps)
    scale = 255 // (2 * stream.steps)
    out_path = args.out if args.out else os.path.splitext(args.evs)[0] + ".pgm"
    write_pgm(out_path, (gray * scale).astype(np.uint8))
    print(out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------

def cmd_stats(args) -> int:
    opts = resolve_options(args)
    names = sorted(n for n in os.listdir(args.evs_dir) if n.endswith(".evs"))
    if not names:
        raise CliConfigError(f"no .evs files in {args.evs_dir}")
    streams = [storage.read_stream(os.path.join(args.evs_dir, n)) for n in names]
    margin = opts["margin"]
    stats = analysis.rate_stats(streams, margin)
    rates = [analysis.event_rate(s, "all", margin) for s in streams]
    counts, edges = analysis.event_rate_histogram(rates, args.bins)

    print(f"Event rate over {len(streams)} streams (margin {margin})")
    print(f"  {'':8s}{'Mean':>10s}{'Sigma':>10s}")
    for label, mean, sigma in (
        ("Events", stats.mean_total, stats.sigma_total),
        ("ON", stats.mean_on, stats.sigma_on),
        ("OFF", stats.mean_off, stats.sigma_off),
    ):
        print(f"  {label:8s}{mean:9.3%}{sigma:10.3%}")

    out_dir = opts["out"]
    os.makedirs(out_dir, exist_ok=True)
    hist_csv = os.path.join(out_dir, "rate_histogram.csv")
    with open(hist_csv, "w", encoding="ascii") as fh:
        fh.write("bin_low,bin_high,count\n")
        for low, high, count in zip(edges[:-1], edges[1:], counts):
            fh.write(f"{low:.10g},{high:.10g},{int(count)}\n")
    with open(os.path.join(out_dir, "rate_stats.json"), "w", encoding="ascii") as fh:
        json.dump({
            "streams": len(streams),
            "margin": margin,
            "all": {"mean": stats.mean_total, "sigma": stats.sigma_total},
            "on": {"mean": stats.mean_on, "sigma": stats.sigma_on},
            "off": {"mean": stats.mean_off, "sigma": stats.sigma_off},
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    plots.save_histogram_figure(counts, edges, os.path.join(out_dir, "rate_histogram.png"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    opts = resolve_options(args)
    thresholds = _parse_float_list(args.thresholds)
    manifest = read_manifest(args.manifest)
    corpus = _load_corpus(manifest)
    cfg = conversion_config(opts)
    curve = analysis.threshold_sweep(corpus, thresholds, cfg)
    out_dir = opts["out"]
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "threshold_sweep.csv")
    analysis.write_curve_csv(curve, csv_path, header=("threshold", "mean_event_rate"))
    plots.save_sweep_figure(curve, os.path.join(out_dir, "threshold_sweep.png"))
    print(csv_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------

def cmd_entropy(args) -> int:
    opts = resolve_options(args)
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    for kind in kinds:
        if kind not in KINDS:
            raise CliConfigError(f"unknown trajectory kind {kind!r}")
    step_values = _parse_int_list(args.t_values)
    manifest = read_manifest(args.manifest)
    corpus = _load_corpus(manifest)
    # Carrier config: entropy_vs_steps builds its own trajectories and only
    # reads the threshold, frame geometry and margin from here.
    cfg = ConversionConfig(thresh=opts["threshold"], valid_margin=opts["margin"])
    curves = analysis.entropy_vs_steps(corpus, kinds, step_values, cfg, seed=opts["seed"])
    out_dir = opts["out"]
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "entropy_curves.csv")
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write("trajectory,steps,mean_entropy\n")
        for kind in kinds:
            for steps, value in curves[kind].points:
                fh.write(f"{kind},{int(steps)},{value:.10g}\n")
    plots.save_entropy_figure(curves, os.path.join(out_dir, "entropy_curves.png"))
    print(csv_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# cost
# ---------------------------------------------------------------------------

def cmd_cost(args) -> int:
    if bool(args.preset) == bool(args.net):
        raise CliConfigError("give exactly one of --preset or --net")
    if args.preset:
        depth = {"resnet18": 18, "resnet34": 34}.get(args.preset)
        if depth is None:
            raise CliConfigError(f"unknown preset {args.preset!r} (have resnet18, resnet34)")
        net = cost.resnet_preset(depth, args.model)
        title = f"{args.preset} / {args.model}"
    else:
        with open(args.net, "r", encoding="utf-8") as fh:
            net = cost.parse_network_config(fh.read())
        title = f"{os.path.basename(args.net)} / {args.model}"

    steps = args.steps if args.steps is not None else DEFAULTS["steps"]
    rows = cost.network_rows(net, args.model, steps, args.fire_rate)
    total = cost.OpCount()
    for row in rows:
        total = total + row.total
    model_energy = cost.energy(total)
    frames = steps if args.model in ("lif", "liaf") else 1
    per_frame = cost.power_per_frame(model_energy, frames)

    print(f"{title}: steps={steps} fire_rate={args.fire_rate}")
    print(f"  FP32 adds:  {total.adds:.6e}")
    print(f"  FP32 mults: {total.mults:.6e}")
    print(f"  energy:     {model_energy:.6e} pJ")
    print(f"  per frame:  {per_frame:.6e} pJ over {frames} frame(s)")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        csv_path = os.path.join(args.out, "cost_layers.csv")
        with open(csv_path, "w", encoding="ascii") as fh:
            fh.write("layer,kind,synaptic_adds,synaptic_mults,state_adds,state_mults\n")
            for row in rows:
                fh.write(
                    f"{row.name},{row.kind},{row.synaptic.adds:.10g},"
                    f"{row.synaptic.mults:.10g},{row.state.adds:.10g},{row.state.mults:.10g}\n"
                )
        with open(os.path.join(args.out, "cost_summary.json"), "w", encoding="ascii") as fh:
            json.dump({
                "model": args.model,
                "steps": steps,
                "fire_rate": args.fire_rate,
                "adds": total.adds,
                "mults": total.mults,
                "energy_pj": model_energy,
                "energy_per_frame_pj": per_frame,
            }, fh, indent=2, sort_keys=True)
            fh.write("\n")
        plots.save_cost_figure(total.adds, total.mults, model_energy, per_frame,
                               title, os.path.join(args.out, "cost.png"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# inspect
# ---------------------------------------------------------------------------

def cmd_inspect(args) -> int:
    stream = storage.read_stream(args.evs)
    print(f"frame:     {stream.frame_w}x{stream.frame_h}")
    print(f"steps:     {stream.steps}")
    print(f"threshold: {stream.thresh!r}")
    print(f"events:    {len(stream)}")
    limit = len(stream) if args.limit is None else min(args.limit, len(stream))
    for x, y, t, p in stream.events[:limit].tolist():
        print(f"  x={x} y={y} t={t} p={p:+d}")
    if limit < len(stream):
        print(f"  ... {len(stream) - limit} more")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / dispatch
# ---------------------------------------------------------------------------

def _add_common(parser, *names):
    if "threshold" in names:
        parser.add_argument("--threshold", type=float, help="event trigger threshold in (0, 1)")
    if "steps" in names:
        parser.add_argument("--steps", type=int, help="number of difference frames")
    if "trajectory" in names:
        parser.add_argument("--trajectory", choices=KINDS, help="window motion kind")
    if "seed" in names:
        parser.add_argument("--seed", type=int, help="seed for the saccade walk")
    if "workers" in names:
        parser.add_argument("--workers", type=int, help="parallel worker processes")
    if "margin" in names:
        parser.add_argument("--margin", type=int, help="valid-region border width")
    if "out" in names:
        parser.add_argument("--out", help="output directory")
    if "config" in names:
        parser.add_argument("--config", help="flat key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="estool",
        description="Convert images to event streams, reconstruct and analyze them, "
                    "and estimate consumer network cost.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a manifest of PPM images to .evs files")
    p.add_argument("--manifest", required=True, help="path<TAB>label manifest file")
    _add_common(p, "threshold", "steps", "trajectory", "seed", "workers", "margin",
                "out", "config")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("reconstruct", help="reconstruct a gray PGM image from an .evs file")
    p.add_argument("evs", help="event stream file")
    p.add_argument("--out", help="output PGM path (default: alongside the input)")
    _add_common(p, "trajectory", "seed", "config")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("stats", help="event-rate statistics and histogram for a directory "
                                     "of .evs files (CSV + JSON + PNG)")
    p.add_argument("evs_dir", help="directory containing .evs files")
    p.add_argument("--bins", type=int, default=20, help="histogram bin count")
    _add_common(p, "margin", "out", "config")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="mean event rate per threshold "
                                     "(CSV: threshold,mean_event_rate; + PNG)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--thresholds", required=True,
                   help="comma list '0.1,0.2' or range 'start:stop:step'")
    _add_common(p, "steps", "trajectory", "seed", "margin", "out", "config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("entropy", help="mean reconstruction entropy per trajectory kind and "
                                       "step count (CSV: trajectory,steps,mean_entropy; + PNG)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--kinds", default="odg,rcls,saccade", help="comma list of kinds")
    p.add_argument("--t-values", default="1,2,3,4,5,6,7,8", dest="t_values",
                   help="comma list of step counts")
    _add_common(p, "threshold", "seed", "margin", "out", "config")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("cost", help="FP32 operand counts and energy for a consumer network")
    p.add_argument("--model", required=True, choices=cost.MODELS)
    p.add_argument("--preset", help="resnet18 or resnet34")
    p.add_argument("--net", help="flat key=value network config file")
    p.add_argument("--steps", type=int, help="time steps for spiking models")
    p.add_argument("--fire-rate", type=float, default=0.30, dest="fire_rate",
                   help="expected spike sparsity for the lif model")
    p.add_argument("--out", help="directory for CSV/JSON/PNG output")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("inspect", help="dump an .evs header and its records")
    p.add_argument("evs")
    p.add_argument("--limit", type=int, help="records to print (default: all)")
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("ESTOOL_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliConfigError, cost.NetworkConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (storage.StorageError, ImageFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
