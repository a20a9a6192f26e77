"""Command-line surface tying the library modules together.

Usage errors exit with status 2 (argparse), processing errors with 1 and
a diagnostic on stderr. All outputs are deterministic functions of the
inputs and key files.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from etcjpeg.cipher import CipherParams, KeySet, decrypt, encrypt, load_sidecar, write_sidecar
from etcjpeg.image import (
    Axis,
    ColorImage,
    ColorSpace,
    GrayscaleBasedImage,
    Plane,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
)
from etcjpeg.jpeg import JpegConfig, JpegFile, QuantTable, decode, encode
from etcjpeg.metrics import psnr
from etcjpeg.pipeline import format_csv, parse_pipeline, rd_sweep
from etcjpeg.pnm import read_raw, write_raw
from etcjpeg.qtable import GTableParams, corpus_gtable, save_report
from etcjpeg.sns import get_policy, simulate_upload


def _add_keys_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--keys", required=True, help="key file with k1/k2/k3 hex lines")


def _resolve_table(name: str) -> str | QuantTable:
    if name in ("y", "cbcr"):
        return name
    return QuantTable.from_text(Path(name).read_text(encoding="ascii"))


def _corpus_paths(directory: str) -> list[Path]:
    root = Path(directory)
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() in (".ppm", ".pgm"))
    if not paths:
        raise ValueError(f"no .ppm/.pgm files in {directory}")
    return paths


def _cmd_encrypt(args: argparse.Namespace) -> int:
    keys = KeySet.from_file(args.keys)
    image = read_raw(args.input)
    if not isinstance(image, ColorImage):
        raise ValueError("encrypt expects a color PPM input")
    params = CipherParams(
        source_space=ColorSpace(args.space),
        axis=Axis(args.axis),
        block_width=args.block,
        block_height=args.block,
    )
    scrambled = encrypt(image, keys, params)
    write_raw(scrambled.plane, args.output)
    write_sidecar(str(args.output) + ".meta", scrambled, params)
    return 0


def _cmd_decrypt(args: argparse.Namespace) -> int:
    keys = KeySet.from_file(args.keys)
    plane = read_raw(args.input)
    if not isinstance(plane, Plane):
        raise ValueError("decrypt expects a grayscale PGM input")
    meta_path = args.meta if args.meta else str(args.input) + ".meta"
    params, width, height = load_sidecar(meta_path)
    scrambled = GrayscaleBasedImage(
        plane=plane,
        source_space=params.source_space,
        axis=params.axis,
        original_width=width,
        original_height=height,
        encrypted=True,
    )
    restored = decrypt(scrambled, keys, params.block_width, params.block_height)
    write_raw(restored, args.output)
    return 0


def _cmd_compress(args: argparse.Namespace) -> int:
    image = read_raw(args.input)
    if isinstance(image, ColorImage):
        # Standard color path: transform outside the codec, then encode.
        image = rgb_to_ycbcr(image)
        cfg = JpegConfig(quality=args.quality, subsampling=args.subsampling)
    else:
        cfg = JpegConfig(quality=args.quality, table=_resolve_table(args.table))
    encode(image, cfg).save(args.output)
    return 0


def _cmd_decompress(args: argparse.Namespace) -> int:
    decoded = decode(JpegFile.load(args.input))
    image = decoded.image
    if isinstance(image, ColorImage):
        write_raw(ycbcr_to_rgb(image), args.output)
    else:
        write_raw(image, args.output)
    if args.dump_tables:
        with open(args.dump_tables, "w", encoding="ascii") as fh:
            for tid in sorted(decoded.quant_tables):
                fh.write(f"# table {tid}\n")
                fh.write(decoded.quant_tables[tid].to_text())
    return 0


def _cmd_gtable(args: argparse.Namespace) -> int:
    table, report = corpus_gtable(
        _corpus_paths(args.corpus),
        GTableParams(epsilon=args.epsilon),
        space=ColorSpace(args.space),
        axis=Axis(args.axis),
    )
    Path(args.out).write_text(table.to_text(), encoding="ascii")
    if args.stats:
        save_report(report, args.stats)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    policy = get_policy(args.policy, facebook_quality=args.facebook_quality)
    simulate_upload(JpegFile.load(args.input), policy).save(args.output)
    return 0


def _cmd_psnr(args: argparse.Namespace) -> int:
    a, b = read_raw(args.a), read_raw(args.b)
    value = psnr(a, b)
    print("inf" if value == float("inf") else f"{value:.6f}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    keys = KeySet.from_file(args.keys) if args.keys else None
    gtable = None
    if args.gtable:
        gtable = QuantTable.from_text(Path(args.gtable).read_text(encoding="ascii"))
    pipelines = [parse_pipeline(p) for p in args.pipelines.split(",")]
    if keys is None and any(p.encrypt_space is not None for p in pipelines):
        raise ValueError("encrypted pipelines require --keys")
    if gtable is None and any(p.encrypt_space is not None and p.table == "g" for p in pipelines):
        raise ValueError("pipelines using the adaptive table require --gtable")
    qualities = [int(q) for q in args.qualities.split(",")]
    images = []
    for path in _corpus_paths(args.corpus):
        image = read_raw(path)
        if isinstance(image, ColorImage):
            images.append((path.stem, image))
    if not images:
        raise ValueError("sweep corpus contains no color PPM images")
    points = rd_sweep(
        images, pipelines, qualities, keys=keys, gtable=gtable,
        axis=Axis(args.axis), block_size=args.block,
    )
    csv_text = format_csv(points)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="ascii")
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etcjpeg",
        description="Block-scrambling encryption, baseline JPEG, and rate-distortion tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encrypt", help="scramble a color image into an encrypted grayscale PGM")
    _add_keys_arg(p)
    p.add_argument("--space", choices=["rgb", "ycbcr"], default="rgb", help="plane source space")
    p.add_argument("--axis", choices=["horizontal", "vertical"], default="horizontal")
    p.add_argument("--block", type=int, default=8, help="block size (default 8)")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("decrypt", help="restore the color image from an encrypted PGM + sidecar")
    _add_keys_arg(p)
    p.add_argument("--meta", help="sidecar path (default: <input>.meta)")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("compress", help="encode a PPM/PGM as baseline JPEG")
    p.add_argument("--quality", type=int, default=95)
    p.add_argument("--subsampling", choices=["444", "420"], default="444")
    p.add_argument("--table", default="y", help="'y', 'cbcr', or a table file (single-component only)")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("decompress", help="decode a baseline JPEG to PPM/PGM")
    p.add_argument("--dump-tables", help="write embedded quantization tables to this file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_decompress)

    p = sub.add_parser("gtable", help="derive the adaptive quantization table from a corpus")
    p.add_argument("--corpus", required=True, help="directory of .ppm/.pgm images")
    p.add_argument("--epsilon", type=int, default=16)
    p.add_argument("--space", choices=["rgb", "ycbcr"], default="ycbcr")
    p.add_argument("--axis", choices=["horizontal", "vertical"], default="horizontal")
    p.add_argument("--out", required=True, help="output table file (8x8 text)")
    p.add_argument("--stats", help="optional JSON stats sidecar")
    p.set_defaults(func=_cmd_gtable)

    p = sub.add_parser("simulate", help="apply a provider recompression policy to a JPEG")
    p.add_argument("--policy", required=True, help="'twitter', 'facebook', or a policy file")
    p.add_argument("--facebook-quality", type=int, default=85)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("psnr", help="print PSNR in dB between two images")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=_cmd_psnr)

    p = sub.add_parser("sweep", help="rate-distortion sweep over a corpus, CSV output")
    p.add_argument("--corpus", required=True)
    p.add_argument("--keys", help="key file (required for encrypted pipelines)")
    p.add_argument("--gtable", help="adaptive table file (required for *-g pipelines)")
    p.add_argument("--pipelines", required=True, help="comma list, e.g. enc-ycbcr-g,plain-444@twitter")
    p.add_argument("--qualities", default="70,80,90,100", help="comma list of quality factors")
    p.add_argument("--axis", choices=["horizontal", "vertical"], default="horizontal")
    p.add_argument("--block", type=int, default=8)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single diagnostic funnel for the CLI
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
