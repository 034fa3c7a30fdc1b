"""File formats end to end: synthetic CSV dataset, PGM images, trained model files.

Exercises the on-disk surfaces: a dataset directory of CSV matrices with a
dataset.json, the same layout with binary 8-bit PGM images, and the
two-file library container (.json metadata + .bin arrays).
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

import tensorspaces as ts

workdir = Path(tempfile.mkdtemp(prefix="tensorspaces_demo_"))
print("working under", workdir)

# 1. Write a synthetic dataset as CSV matrices and read it back.
data = ts.generate_synthetic(
    class_count=2, shape=(6, 4, 4), family="ht",
    planted_ranks={"leaf": 2, "internal": 3},
    samples_per_class=8, noise_sigma=0.1, seed=5,
)
meta = ts.write_csv_dataset(data, workdir / "csv_data", seed=5)
print("dataset metadata:", meta)
loaded = ts.load_image_dataset(workdir / "csv_data", [[6, 4], [4]])
sample = loaded["class00"][0]
print("CSV roundtrip exact:", np.array_equal(sample, data["class00"][0]))

# 2. The same layout works for 8-bit grayscale PGM images.
pgm_root = workdir / "pgm_data"
rng = np.random.default_rng(0)
for label in ("faces_a", "faces_b"):
    d = pgm_root / label
    d.mkdir(parents=True)
    for k in range(6):
        img = rng.integers(0, 256, size=(12, 10)).astype(np.uint8)
        Image.fromarray(img, mode="L").save(d / f"img{k}.pgm", format="PPM")
images = ts.load_image_dataset(pgm_root, [[3, 4], [2, 5]])
print("PGM tensors:", images["faces_a"][0].shape, "scaled to [0, 1]:",
      0.0 <= images["faces_a"][0].min() and images["faces_a"][0].max() <= 1.0)

# 3. Train on the CSV data, save the library, reload, classify.
lib = ts.train_library(
    {label: samples[:5] for label, samples in loaded.items()},
    "ht", ranks={"leaf": 2, "internal": 3},
)
ts.save_library(lib, workdir / "model")
back = ts.load_library(workdir / "model")
test = {label: samples[5:] for label, samples in loaded.items()}
print("reloaded library error:", ts.evaluate(back, test).error_rate)
print("library files:", sorted(p.name for p in workdir.glob("model.*")))
