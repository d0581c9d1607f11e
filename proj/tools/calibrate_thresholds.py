#!/usr/bin/env python3
"""Pick per-product thresholds that maximise micro F1 of the morphological
baseline on a synthetic development suite, and print an INI file."""

import argparse
import json
import pathlib
import struct
import subprocess
import tempfile

PRODUCTS = ["mf", "cem", "ace", "mag1c", "mag1c-sas"]


def run(cli, *args):
    return subprocess.run([cli, *args], check=True, capture_output=True, text=True).stdout


def read_map(stem):
    payload = pathlib.Path(str(stem) + ".bin").read_bytes()
    return struct.unpack(f"<{len(payload) // 4}f", payload)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--seed", type=int, default=100)
    ap.add_argument("--scenes", type=int, default=10)
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--bands", type=int, default=50)
    ap.add_argument("--candidates", type=int, default=60)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = pathlib.Path(tmp)
        run(args.cli, "--seed", str(args.seed), "synth", "--out-dir", str(root / "suite"), "--scenes",
            str(args.scenes), "--height", str(args.size), "--width", str(args.size), "--bands", str(args.bands))
        stems = sorted(p.stem for p in (root / "suite" / "gt").glob("*.json"))
        lines = []
        for product in PRODUCTS:
            out = root / product
            out.mkdir()
            values = []
            for stem in stems:
                run(args.cli, "compute", "--product", product, "--cube", str(root / "suite" / (stem + ".bin")),
                    "--spectrum", str(root / "suite" / "spectrum.csv"), "--out", str(out / (stem + ".bin")))
                (out / (stem + ".meta.json")).unlink()
                values.extend(read_map(out / stem))
            values.sort()
            # Candidates from the upper tail, where plume pixels live.
            cands = sorted({values[int(len(values) * (0.80 + 0.1999 * k / (args.candidates - 1)))]
                            for k in range(args.candidates)})
            best = None
            for t in cands:
                report = json.loads(run(args.cli, "eval", "--pred-dir", str(out), "--gt-dir",
                                        str(root / "suite" / "gt"), "--threshold", repr(t)))
                if best is None or report["f1"] > best[1]:
                    best = (t, report["f1"])
            lines.append(f"# dev micro F1 {best[1]:.4f} (seeds {args.seed}..{args.seed + args.scenes - 1})")
            lines.append(f"[{product}]\nthreshold = {best[0]:.6g}\n")
    print("\n".join(lines))


if __name__ == "__main__":
    main()
