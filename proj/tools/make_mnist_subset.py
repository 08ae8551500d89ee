#!/usr/bin/env python3
# Copyright 2026 The SIFL Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds a reduced MNIST split in IDX format from the npm `mnist` package.

The npm package (https://www.npmjs.com/package/mnist) bundles 10,000 MNIST
digits as per-class JSON arrays of 784 floats in [0, 1]. This script pools
them, shuffles with a fixed seed and writes train/test IDX files.

    npm pack mnist@1.1.0 && tar xzf mnist-1.1.0.tgz
    python3 tools/make_mnist_subset.py package/src/digits data/mnist_subset
"""

import argparse
import json
import pathlib
import struct

import numpy as np


def load_digits(digits_dir: pathlib.Path):
    images, labels = [], []
    for digit in range(10):
        raw = json.loads((digits_dir / f"{digit}.json").read_text())["data"]
        arr = np.asarray(raw, dtype=np.float64).reshape(-1, 784)
        images.append(np.rint(arr * 255.0).clip(0, 255).astype(np.uint8))
        labels.append(np.full(arr.shape[0], digit, dtype=np.uint8))
    return np.concatenate(images), np.concatenate(labels)


def write_idx_images(path: pathlib.Path, images: np.ndarray):
    with path.open("wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, images.shape[0], 28, 28))
        f.write(images.tobytes())


def write_idx_labels(path: pathlib.Path, labels: np.ndarray):
    with path.open("wb") as f:
        f.write(struct.pack(">II", 0x00000801, labels.shape[0]))
        f.write(labels.tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("digits_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--train", type=int, default=5000)
    parser.add_argument("--test", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=20220101)
    args = parser.parse_args()

    images, labels = load_digits(args.digits_dir)
    if args.train + args.test > images.shape[0]:
        raise SystemExit(f"only {images.shape[0]} digits available")
    order = np.random.default_rng(args.seed).permutation(images.shape[0])
    train = order[: args.train]
    test = order[args.train : args.train + args.test]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx_images(args.out_dir / "train-images-idx3-ubyte", images[train])
    write_idx_labels(args.out_dir / "train-labels-idx1-ubyte", labels[train])
    write_idx_images(args.out_dir / "t10k-images-idx3-ubyte", images[test])
    write_idx_labels(args.out_dir / "t10k-labels-idx1-ubyte", labels[test])
    print(f"wrote {len(train)} train / {len(test)} test digits to {args.out_dir}")


if __name__ == "__main__":
    main()
