#!/usr/bin/env python3
"""Converts the per-class JSON dump of Fashion-MNIST into IDX train/test files.

The JSON package stores 7000 images per class without the original split
(class 0 also carries two empty records, which are dropped).
The first 6000 of each class become training data and the next 1000 test
data; classes are interleaved so every prefix is class balanced.
"""
import json
import struct
import sys
from pathlib import Path

TRAIN_PER_CLASS = 6000
TEST_PER_CLASS = 1000


def write_idx(prefix: Path, images, labels):
    with open(f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with open(f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main(src: Path, dest: Path):
    per_class = []
    for c in range(10):
        data = json.loads((src / f"{c}.json").read_text())["data"]
        # the dump contains a few empty records
        data = [img for img in data if len(img) == 28 * 28]
        if len(data) < TRAIN_PER_CLASS + TEST_PER_CLASS:
            sys.exit(f"class {c}: only {len(data)} images")
        per_class.append(data)

    def interleave(lo, hi):
        images, labels = [], []
        for j in range(lo, hi):
            for c in range(10):
                images.append(per_class[c][j])
                labels.append(c)
        return images, labels

    dest.mkdir(parents=True, exist_ok=True)
    write_idx(dest / "train", *interleave(0, TRAIN_PER_CLASS))
    write_idx(dest / "t10k", *interleave(TRAIN_PER_CLASS, TRAIN_PER_CLASS + TEST_PER_CLASS))


if __name__ == "__main__":
    main(Path(sys.argv[1]), Path(sys.argv[2]))
