#!/usr/bin/env python3
"""Writes the bundled 512x512 natural test images as binary PGM.

The sources are public-domain photographs shipped with scikit-image. RGB images
are converted with Rec. 601 luma, rounded half away from zero.
"""
import argparse
import pathlib

import numpy as np
import skimage.data


def to_gray(rgb):
    rgb = rgb.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("outdir", nargs="?", default="tests/data/natural")
    args = parser.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    images = {
        "camera": skimage.data.camera(),
        "astronaut": to_gray(skimage.data.astronaut()),
        "moon": skimage.data.moon(),
    }
    for name, img in images.items():
        assert img.shape == (512, 512), name
        write_pgm(out / f"{name}.pgm", img)
        print(out / f"{name}.pgm")


if __name__ == "__main__":
    main()
