"""Command-line front end: ``uwbcfar synth | detect | bench``.

Exit codes: 0 success, 1 usage or configuration error, 2 data-format error,
3 correctness-gate failure (the two CFAR backends disagreed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import bench, formats
from .cfar import BACKENDS
from .errors import BackendMismatchError, FrameFormatError, InputError, UwbCfarError
from .pipeline import detect
from .synth import generate_scene

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_GATE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(path):
    return formats.load_run_config(path) if path else formats.RunConfig()


def _write_text(path, text):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_synth(args) -> int:
    config = _load_config(args.config)
    scene = config.scene
    if args.seed is not None:
        scene = scene.replace(seed=args.seed)
    frame, truth = generate_scene(scene)
    formats.write_frame(args.output, frame)
    print(json.dumps(dataclasses.asdict(truth)))
    return EXIT_OK


def cmd_detect(args) -> int:
    config = _load_config(args.config)
    pipeline = config.pipeline
    if args.backend:
        pipeline = pipeline.replace(backend=args.backend)
    if args.clutter_subtraction:
        pipeline = pipeline.replace(clutter_subtraction=True)
    frame = formats.read_frame(args.frame)
    band, result = detect(frame, pipeline)
    _write_text(args.out_detections, formats.detections_csv(band, result.detections))
    if args.out_heatmap:
        Path(args.out_heatmap).write_bytes(formats.heatmap_pgm(band.power))
        marks = "row,col\n" + "".join(f"{d.row},{d.col}\n" for d in result.detections)
        Path(str(args.out_heatmap) + ".detections.csv").write_text(marks)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    if args.mode == "cfar":
        report = bench.bench_cfar(config.bench, seed=args.seed or 0, threads=args.threads)
    else:
        if args.frame:
            frame = formats.read_frame(args.frame)
        else:
            scene = config.scene if args.seed is None else config.scene.replace(seed=args.seed)
            frame, _ = generate_scene(scene)
        report = bench.bench_pipeline(
            frame,
            config.pipeline,
            config.bench.repetitions,
            config.bench.warmup,
            threads=args.threads,
        )
    render = {"text": bench.to_text, "csv": bench.to_csv, "json": bench.to_json}[args.format]
    _write_text(args.out, render(report, args.mode))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uwbcfar", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1, help="worker threads for CFAR kernels (default 1)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="write a synthetic frame file")
    p.add_argument("output", help="frame file to write")
    p.add_argument("-c", "--config", help="run config file (key = value lines)")
    p.add_argument("--seed", type=int, help="noise seed, overrides the config")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("detect", help="run the processing chain on a frame file")
    p.add_argument("frame", help="frame file to read")
    p.add_argument("-c", "--config", help="run config file")
    p.add_argument("--backend", choices=BACKENDS, help="CFAR backend, overrides the config")
    p.add_argument("--clutter-subtraction", action="store_true", help="remove each range bin's slow-time mean first")
    p.add_argument("--out-detections", help="detections CSV (default: stdout)")
    p.add_argument("--out-heatmap", help="band power map as binary PGM; marks go to <path>.detections.csv")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("bench", help="time the CFAR backends or the processing steps")
    p.add_argument("--mode", choices=("cfar", "pipeline"), default="cfar")
    p.add_argument("-c", "--config", help="run config file")
    p.add_argument("--frame", help="frame file for pipeline mode (default: synthesize one)")
    p.add_argument("--seed", type=int, help="seed for the benchmark map or synthetic frame")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except BackendMismatchError as err:
        print(f"uwbcfar: correctness gate failed: {err}", file=sys.stderr)
        return EXIT_GATE
    except (FrameFormatError, InputError) as err:
        print(f"uwbcfar: data error: {err}", file=sys.stderr)
        return EXIT_FORMAT
    except (UwbCfarError, OSError) as err:
        print(f"uwbcfar: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
