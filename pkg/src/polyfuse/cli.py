"""Command-line entry point.

Subcommands: ingest, features, train, evaluate, report, synth,
serve-annotations. Exit codes: 0 success, 2 validation error, 3
media/feature error, 4 training error. Commands never mutate the
manifest; all outputs land in the configured cache/output directories.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from polyfuse import errors
from polyfuse.config import RunConfig, load_config

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_MEDIA = 3
EXIT_TRAINING = 4

logger = logging.getLogger("polyfuse")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except errors.ManifestError as exc:
        logger.error("validation failed: %s", exc)
        return EXIT_VALIDATION
    except (errors.DecodeFailure, errors.TooShort, errors.WindowOutOfRange) as exc:
        logger.error("media error: %s", exc)
        return EXIT_MEDIA
    except (errors.DegenerateLabels, errors.NonFiniteLoss) as exc:
        logger.error("training error: %s", exc)
        return EXIT_TRAINING
    except (errors.PolyfuseError, ValueError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyfuse",
        description="Utterance-level multimodal sentiment analysis toolkit",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help="TOML run configuration")
        p.add_argument("--root", type=Path, help="base directory for relative paths")
        p.add_argument("--manifest", type=Path, help="override paths.manifest")
        p.add_argument("--media-root", type=Path, help="override paths.media_root")
        p.add_argument("--cache-dir", type=Path, help="override paths.cache_dir")
        p.add_argument("--output-dir", type=Path, help="override paths.output_dir")
        p.add_argument("--embeddings", type=Path, help="override paths.embeddings")
        p.add_argument("--seed", type=int, help="override train.seed")
        p.add_argument("--split-seed", type=int, help="override split.seed")
        p.add_argument("--workers", type=int, help="override run.workers")

    p_ingest = sub.add_parser("ingest", help="validate a manifest and print statistics")
    common(p_ingest)
    p_ingest.set_defaults(handler=cmd_ingest)

    p_features = sub.add_parser("features", help="build per-utterance feature caches")
    common(p_features)
    p_features.add_argument(
        "--modalities", default="audio,visual,text",
        help="comma-separated subset of audio,visual,text",
    )
    p_features.set_defaults(handler=cmd_features)

    for name, handler, help_text in (
        ("train", cmd_train, "train all configured models"),
        ("evaluate", cmd_evaluate, "run the full protocol and write report.json"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.set_defaults(handler=handler)

    p_report = sub.add_parser("report", help="render a saved report")
    common(p_report)
    p_report.add_argument("--format", choices=("text_table", "json"), default="text_table")
    p_report.set_defaults(handler=cmd_report)

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus")
    p_synth.add_argument("--scenario", required=True,
                         choices=("separable", "xor_correlated", "ramp_temporal"))
    p_synth.add_argument("--out", type=Path, required=True)
    p_synth.add_argument("--utterances", type=int, default=200)
    p_synth.add_argument("--speakers", type=int, default=10)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--modality-noise", type=float, default=0.0)
    p_synth.add_argument("--video-format", choices=("mp4", "npz"), default="mp4")
    p_synth.add_argument("--frame-size", type=int, default=64)
    p_synth.add_argument("--fps", type=float, default=16.0)
    p_synth.set_defaults(handler=cmd_synth)

    p_serve = sub.add_parser("serve-annotations", help="run the annotation service")
    common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--annotators", default="a1,a2,a3")
    p_serve.add_argument("--store", type=Path, help="annotation log path")
    p_serve.add_argument(
        "--ui-dir", type=Path, default=Path("frontend/dist"),
        help="built browser UI to serve at /ui (skipped when absent)",
    )
    p_serve.set_defaults(handler=cmd_serve)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: dict = {}
    paths = {}
    for key in ("manifest", "media_root", "cache_dir", "output_dir", "embeddings"):
        value = getattr(args, key, None)
        if value is not None:
            paths[key] = str(value)
    if paths:
        overrides["paths"] = paths
    if getattr(args, "seed", None) is not None:
        overrides.setdefault("train", {})["seed"] = args.seed
    if getattr(args, "split_seed", None) is not None:
        overrides.setdefault("split", {})["seed"] = args.split_seed
    if getattr(args, "workers", None) is not None:
        overrides.setdefault("run", {})["workers"] = args.workers
    return load_config(config_path=args.config, root=args.root, cli_overrides=overrides)


def _load_resolved(cfg: RunConfig):
    from polyfuse.corpus import load_manifest, resolve_labels

    manifest = load_manifest(cfg.path("manifest"), media_root=cfg.path("media_root"))
    return resolve_labels(manifest)


def cmd_ingest(args: argparse.Namespace) -> int:
    from polyfuse.corpus import compute_statistics, render_statistics

    cfg = _config_from_args(args)
    manifest = _load_resolved(cfg)
    stats = compute_statistics(manifest)
    out_dir = cfg.path("output_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "statistics.json").write_text(stats.to_json(), encoding="utf-8")
    (out_dir / "statistics.txt").write_text(render_statistics(stats), encoding="utf-8")
    print(render_statistics(stats), end="")
    logger.info("manifest valid: %d videos, %d utterances, %d annotations",
                stats.videos, stats.utterances, stats.annotations)
    return EXIT_OK


def cmd_features(args: argparse.Namespace) -> int:
    from polyfuse import cache as cache_mod
    from polyfuse.features import (
        build_audio_features,
        build_text_features,
        build_visual_features,
    )
    from polyfuse.text.embeddings import load_embeddings

    cfg = _config_from_args(args)
    manifest = _load_resolved(cfg)
    modalities = tuple(m.strip() for m in args.modalities.split(",") if m.strip())
    workers = cfg.section("run")["workers"]
    cache_dir = cfg.path("cache_dir")
    media_root = cfg.path("media_root")

    failed_total = 0
    for modality in modalities:
        if modality == "text":
            table = load_embeddings(cfg.path("embeddings"))
            report = build_text_features(
                manifest, table, cache_mod.file_hash(cfg.path("embeddings")),
                cache_dir, max_tokens=cfg.section("text")["max_tokens"],
            )
        elif modality == "audio":
            report = build_audio_features(
                manifest, media_root, cache_dir,
                params=cfg.audio_feature_params(), workers=workers,
            )
        elif modality == "visual":
            report = build_visual_features(
                manifest, media_root, cache_dir,
                params=cfg.visual_feature_params(), workers=workers,
            )
        else:
            logger.error("unknown modality %r", modality)
            return EXIT_VALIDATION
        print(f"{modality}: built={len(report.built)} skipped={len(report.skipped)} "
              f"failed={len(report.failed)}")
        for uid, reason in sorted(report.failed.items()):
            logger.error("%s/%s failed: %s", modality, uid, reason)
        failed_total += len(report.failed)
    return EXIT_MEDIA if failed_total else EXIT_OK


def _run_protocol(cfg: RunConfig):
    from polyfuse.corpus import filter_subjective, make_splits
    from polyfuse.evaluation.protocol import run_protocol
    from polyfuse.features import load_feature_set

    manifest = filter_subjective(_load_resolved(cfg))
    split = make_splits(
        manifest,
        ratios=tuple(cfg.section("split")["ratios"]),
        seed=cfg.section("split")["seed"],
    )
    modalities = cfg.modalities_in_jobs()
    from polyfuse.corpus.labels import trainable_labels

    uids = sorted(trainable_labels(manifest))
    features = load_feature_set(manifest, cfg.path("cache_dir"), modalities, uids)
    result = run_protocol(
        manifest, split, cfg.jobs(), features, config=cfg.protocol_config()
    )
    return manifest, split, result


def cmd_train(args: argparse.Namespace) -> int:
    from polyfuse.artifacts import save_artifact

    cfg = _config_from_args(args)
    manifest, split, result = _run_protocol(cfg)
    out_dir = cfg.path("output_dir")
    models_dir = out_dir / "models"
    for name, artifact in result.models.items():
        save_artifact(artifact, models_dir / name)
    if result.speaker_stats is not None:
        result.speaker_stats.save(out_dir / "speaker_stats.json")
    (out_dir / "split.json").write_text(
        json.dumps(
            {"seed": split.seed, "ratios": list(split.ratios), "split": split.split,
             "fingerprint": split.fingerprint(),
             "realized": split.realized_fractions()},
            sort_keys=True, indent=2,
        ) + "\n",
        encoding="utf-8",
    )
    (out_dir / "report.json").write_text(result.report.to_json(), encoding="utf-8")
    (out_dir / "config.json").write_text(cfg.effective_json(), encoding="utf-8")
    print(f"trained {len(result.models)} models -> {models_dir}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    _, _, result = _run_protocol(cfg)
    out_dir = cfg.path("output_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(result.report.to_json(), encoding="utf-8")
    (out_dir / "config.json").write_text(cfg.effective_json(), encoding="utf-8")
    for entry in result.report.entries:
        print(f"{entry.strategy}:{entry.set_label} accuracy={entry.metrics.accuracy:.2f}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from polyfuse.evaluation.report import EvaluationReport, render_report

    cfg = _config_from_args(args)
    report_path = cfg.path("output_dir") / "report.json"
    report = EvaluationReport.from_json(report_path.read_text(encoding="utf-8"))
    require = [job.key for job in cfg.jobs()]
    rendered = render_report(report, fmt=args.format, require=require)
    (cfg.path("output_dir") / f"report.{'txt' if args.format == 'text_table' else 'json'}").write_text(
        rendered, encoding="utf-8"
    )
    print(rendered, end="")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    from polyfuse.synth import SynthSpec, generate_corpus

    spec = SynthSpec(
        scenario=args.scenario,
        n_utterances=args.utterances,
        n_speakers=args.speakers,
        seed=args.seed,
        modality_noise=args.modality_noise,
        video_format=args.video_format,
        frame_size=args.frame_size,
        fps=args.fps,
    )
    result = generate_corpus(args.out, spec)
    print(f"wrote {result.manifest_path} ({len(result.manifest.utterances)} utterances, "
          f"{len(result.manifest.videos)} speakers)")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from polyfuse.service.app import create_app

    cfg = _config_from_args(args)
    store = args.store or (cfg.path("output_dir") / "annotations.jsonl")
    app = create_app(
        manifest_path=cfg.path("manifest"),
        media_root=cfg.path("media_root"),
        store_path=store,
        annotators=tuple(a.strip() for a in args.annotators.split(",") if a.strip()),
        ui_dir=args.ui_dir if args.ui_dir.is_dir() else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
