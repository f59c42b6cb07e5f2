"""Command-line interface: gen / embed / metrics / grid / serve.

Exit codes: 0 success, 2 validation error (bad inputs or flags), 3 runtime
failure (numerics failed after validation).  Defaults mirror the reference
configuration: k=15 neighbors, 10 equal stages, 500 epochs, gamma=5.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datasets, matrixio
from .artifact import (
    EmbeddingArtifact,
    ExplanationHead,
    StageEntry,
    load_artifact,
    save_artifact,
)
from .errors import (
    FormatError,
    RuntimeFailure,
    ShapeMismatch,
    ValidationError,
)
from .explain import glyph_ref_scale, grid_aggregate
from .graph import build_knn, fuzzy_weights, normalized_laplacian, symmetrize
from .metrics import evaluate_stages
from .optimizer import OptimizerConfig, fit_ab
from .progressive import make_schedule, run_progressive
from .spectral import eigendecompose, subspace


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


# --- gen ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.name or args.kind.replace("-", "_")
    sidecar: dict = {"kind": args.kind, "n": args.n, "seed": args.seed}

    if args.kind == "swiss-roll":
        data, intrinsic = datasets.gen_swiss_roll(args.n, args.noise, args.seed)
        sidecar["params"] = {"noise_sigma": args.noise}
        sidecar["intrinsic"] = {"t": intrinsic[:, 0].tolist(),
                                "h": intrinsic[:, 1].tolist()}
    elif args.kind == "multiscale-loop":
        data, theta = datasets.gen_multiscale_loop(
            args.n, args.dims, args.freq, args.amp, args.noise, args.seed)
        sidecar["params"] = {"m": args.dims, "freq": args.freq,
                             "amp": args.amp, "noise_sigma": args.noise}
        sidecar["intrinsic"] = {"theta": theta.tolist()}
    else:  # gaussian-blobs
        data = datasets.gen_gaussian_blobs(
            args.n, args.dims, args.blobs, args.spread, args.seed)
        sidecar["params"] = {"m": args.dims, "n_blobs": args.blobs,
                             "spread": args.spread}
        sidecar["intrinsic"] = {"labels": data.labels.tolist()}

    matrix_path = out_dir / f"{name}.spem"
    matrixio.save_matrix(matrix_path, data.points)
    (out_dir / f"{name}.meta.json").write_text(json.dumps(sidecar, indent=2))
    if data.labels is not None:
        np.savetxt(out_dir / f"{name}.labels.csv", data.labels, fmt="%d")
    print(f"wrote {matrix_path} ({data.n} x {data.m})")
    return 0


# --- embed -------------------------------------------------------------------

def _load_labels(path) -> np.ndarray:
    raw = np.loadtxt(path, ndmin=1)
    if not np.all(raw == np.round(raw)):
        raise FormatError(f"{path}: labels must be integers")
    return raw.astype(np.int64)


def cmd_embed(args) -> int:
    data = matrixio.load_points(args.input, label_column=args.label_column)
    labels = data.labels
    if args.labels is not None:
        labels = _load_labels(args.labels)
        if labels.shape[0] != data.n:
            raise ShapeMismatch(
                f"{labels.shape[0]} labels for {data.n} points"
            )
    started = _now()

    nbrs = build_knn(data, args.k, metric=args.metric)
    g = symmetrize(fuzzy_weights(nbrs))
    lap = normalized_laplacian(g)
    s_full = data.n - 1
    spectrum = eigendecompose(lap, s_full, mode=args.eigensolver)

    schedule = make_schedule(s_full, args.stages, args.schedule, args.epochs)
    curve = fit_ab(args.min_dist, args.spread)
    cfg = OptimizerConfig(
        epochs=args.epochs, initial_lr=args.lr,
        negative_samples=args.neg, gamma=args.gamma,
        seed=args.seed, deterministic=not args.relaxed,
    )
    stream = None if args.quiet else sys.stderr
    results = run_progressive(spectrum, g, schedule, cfg, curve,
                              m_prime=args.m_prime, progress_stream=stream)

    stages = [
        StageEntry(
            s=r.s, epochs_used=r.epochs_used, p=r.p.values, y=r.y,
            response=np.linalg.norm(r.p.values, axis=1), full=False,
        )
        for r in results
    ]
    if args.full_spectrum:
        full_schedule = make_schedule(s_full, 1, "equal", args.epochs)
        full_res = run_progressive(spectrum, g, full_schedule, cfg, curve,
                                   m_prime=args.m_prime,
                                   progress_stream=stream)[-1]
        stages.append(StageEntry(
            s=full_res.s, epochs_used=full_res.epochs_used,
            p=full_res.p.values, y=full_res.y,
            response=np.linalg.norm(full_res.p.values, axis=1), full=True,
        ))

    final = results[-1]
    k_head = min(args.glyph_modes, final.s)
    u_final = subspace(spectrum, final.s)
    head = ExplanationHead(
        k=k_head,
        u_head=spectrum.modes[:, :k_head],
        response=np.linalg.norm(final.p.values, axis=1),
        glyph_ref_scale=glyph_ref_scale(u_final, final.p, k_head),
    )
    meta = {
        "format_version": 1,
        "n": data.n,
        "m": data.m,
        "m_prime": args.m_prime,
        "k": args.k,
        "seed": args.seed,
        "metric": args.metric,
        "curve": {"a": curve.a, "b": curve.b,
                  "min_dist": curve.min_dist, "spread": curve.spread},
        "gamma": args.gamma,
        "schedule": {"mode": args.schedule,
                     "sizes": schedule.sizes.tolist(),
                     "epochs": schedule.epochs_per_stage.tolist()},
        "timestamps": None if cfg.deterministic
        else {"started": started, "finished": _now()},
    }
    art = EmbeddingArtifact(meta=meta, eigenvalues=spectrum.eigenvalues,
                            stages=stages, head=head, labels=labels)
    save_artifact(args.out, art)
    print(f"wrote {args.out}: {len(stages)} stages, "
          f"final s={final.s}, n={data.n}")
    return 0


# --- metrics -----------------------------------------------------------------

def cmd_metrics(args) -> int:
    art = load_artifact(args.artifact)
    data = matrixio.load_points(args.data, label_column=args.label_column)
    if data.n != int(art.meta["n"]) or data.m != int(art.meta["m"]):
        raise ShapeMismatch(
            f"artifact was built from a {art.meta['n']} x {art.meta['m']} "
            f"matrix, got {data.n} x {data.m}"
        )
    progressive_stages = [(st.s, st.y) for st in art.stages if not st.full]
    reference = next((st.y for st in art.stages if st.full),
                     progressive_stages[-1][1])
    report = evaluate_stages(data, progressive_stages, k=args.k,
                             demap_k=args.demap_k, reference=reference)

    stem = Path(args.artifact).with_suffix("")
    json_path = Path(args.out_json) if args.out_json else Path(f"{stem}.metrics.json")
    csv_path = Path(args.out_csv) if args.out_csv else Path(f"{stem}.metrics.csv")
    json_path.write_text(report.to_json())
    csv_path.write_text(report.to_csv())
    sys.stdout.write(report.to_csv())

    if args.attach:
        doc = json.loads(report.to_json())
        save_artifact(args.artifact, replace(art, metrics=doc))
        print(f"attached metrics to {args.artifact}")
    return 0


# --- grid --------------------------------------------------------------------

def _parse_thumb_shape(text: str) -> tuple[int, int]:
    try:
        h, w = (int(part) for part in text.lower().split("x"))
    except ValueError as exc:
        raise ValidationError(
            f"--thumb-shape must look like 8x8, got {text!r}"
        ) from exc
    if h < 1 or w < 1:
        raise ValidationError("thumbnail dimensions must be >= 1")
    return h, w


def cmd_grid(args) -> int:
    art = load_artifact(args.artifact)
    data = matrixio.load_points(args.data, label_column=args.label_column)
    h, w = _parse_thumb_shape(args.thumb_shape)
    if h * w != data.m:
        raise ShapeMismatch(
            f"thumb shape {h}x{w} needs {h * w} features, data has {data.m}"
        )
    if args.stage == "final":
        stage = art.final_stage
    else:
        wanted = int(args.stage)
        match = [st for st in art.stages if st.s == wanted and not st.full]
        if not match:
            raise ValidationError(f"artifact has no stage with s={wanted}")
        stage = match[0]
    thumbs = data.points.reshape(data.n, h, w)
    summary = grid_aggregate(stage.y, thumbs, args.cols, args.rows)
    payload = {
        "grid_cols": summary.grid_cols,
        "grid_rows": summary.grid_rows,
        "stage_s": stage.s,
        "thumb_shape": [h, w],
        "cells": [
            {
                "col": col, "row": row,
                "count": cell["count"],
                "mean_position": cell["mean_position"].tolist(),
                "mean_thumbnail": cell["mean_thumbnail"].ravel().tolist(),
            }
            for (col, row), cell in sorted(summary.cells.items())
        ],
    }
    Path(args.out).write_text(json.dumps(payload))
    print(f"wrote {args.out}: {len(payload['cells'])} non-empty cells")
    return 0


# --- serve -------------------------------------------------------------------

def cmd_serve(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise ValidationError(f"{args.dir} is not a directory")
    from .server import serve_forever
    try:
        serve_forever(str(root), args.port, args.host)
    except KeyboardInterrupt:
        pass
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spem",
        description="Progressive spectral embeddings: generate data, embed, "
                    "score, aggregate, and serve artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("kind", choices=["swiss-roll", "multiscale-loop",
                                      "gaussian-blobs"])
    gen.add_argument("--n", type=int, default=2000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise", type=float, default=None,
                     help="noise sigma (default 0 for swiss-roll, "
                          "0.05 for multiscale-loop)")
    gen.add_argument("--dims", type=int, default=30,
                     help="ambient dimension for loop/blobs")
    gen.add_argument("--freq", type=int, default=16)
    gen.add_argument("--amp", type=float, default=0.15)
    gen.add_argument("--blobs", type=int, default=5)
    gen.add_argument("--spread", type=float, default=0.1)
    gen.add_argument("--out", default=".")
    gen.add_argument("--name", default=None)
    gen.set_defaults(func=cmd_gen)

    embed = sub.add_parser("embed", help="run the progressive embedding")
    embed.add_argument("input", help="binary .spem matrix or CSV")
    embed.add_argument("--out", default="artifact.json")
    embed.add_argument("--k", type=int, default=15)
    embed.add_argument("--metric", choices=["euclidean", "cosine"],
                       default="euclidean")
    embed.add_argument("--epochs", type=int, default=500)
    embed.add_argument("--stages", type=int, default=10)
    embed.add_argument("--schedule", choices=["equal", "log"], default="equal")
    embed.add_argument("--gamma", type=float, default=5.0)
    embed.add_argument("--min-dist", type=float, default=0.1)
    embed.add_argument("--spread", type=float, default=1.0)
    embed.add_argument("--neg", type=int, default=5)
    embed.add_argument("--lr", type=float, default=1.0)
    embed.add_argument("--seed", type=int, default=0)
    embed.add_argument("--m-prime", type=int, default=2)
    embed.add_argument("--glyph-modes", type=int, default=10)
    embed.add_argument("--eigensolver", choices=["auto", "dense", "iterative"],
                       default="auto")
    embed.add_argument("--full-spectrum", action="store_true",
                       help="append a non-progressive full run, flagged full")
    embed.add_argument("--relaxed", action="store_true",
                       help="racy parallel optimization; not reproducible")
    embed.add_argument("--label-column", action="store_true",
                       help="CSV input carries labels in its final column")
    embed.add_argument("--labels", default=None,
                       help="single-column label file to embed in the artifact")
    embed.add_argument("--quiet", action="store_true")
    embed.set_defaults(func=cmd_embed)

    met = sub.add_parser("metrics", help="score an artifact against its data")
    met.add_argument("artifact")
    met.add_argument("data")
    met.add_argument("--k", type=int, default=15)
    met.add_argument("--demap-k", type=int, default=15)
    met.add_argument("--out-json", default=None)
    met.add_argument("--out-csv", default=None)
    met.add_argument("--attach", action="store_true",
                     help="embed the report into the artifact file")
    met.add_argument("--label-column", action="store_true")
    met.set_defaults(func=cmd_metrics)

    grid = sub.add_parser("grid", help="grid-average thumbnails over a stage")
    grid.add_argument("artifact")
    grid.add_argument("data")
    grid.add_argument("--cols", type=int, default=20)
    grid.add_argument("--rows", type=int, default=20)
    grid.add_argument("--thumb-shape", default="8x8")
    grid.add_argument("--stage", default="final")
    grid.add_argument("--out", default="grid.json")
    grid.add_argument("--label-column", action="store_true")
    grid.set_defaults(func=cmd_grid)

    serve = sub.add_parser("serve", help="serve a directory read-only")
    serve.add_argument("dir")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen" and args.noise is None:
        args.noise = 0.05 if args.kind == "multiscale-loop" else 0.0
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeFailure as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
