#!/usr/bin/env python3
"""Regenerate the desk-scale LIBSVM fixtures under data/.

The committed files are the source of truth; this script documents how they
were produced and regenerates them bit-for-bit with numpy's PCG64 generator.

    python3 tools/make_fixtures.py data/
"""

import pathlib
import sys

import numpy as np


def write_libsvm(path, X, y):
    with open(path, "w") as out:
        for row, label in zip(X, y):
            parts = ["+1" if label > 0 else "-1"]
            for j, v in enumerate(row):
                if v != 0.0:
                    parts.append(f"{j + 1}:{v:.6g}")
            out.write(" ".join(parts) + "\n")


def scale_to_unit_box(X):
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return np.round(2.0 * (X - lo) / span - 1.0, 6)


def planted_logistic(rng, X, noise):
    w = rng.standard_normal(X.shape[1])
    w /= np.linalg.norm(w)
    t = X @ w * 3.0 + noise * rng.standard_normal(X.shape[0])
    return np.where(t >= 0.0, 1, -1)


def heart_synth(rng):
    # 270 x 13, mix of binary, small-categorical and continuous columns,
    # scaled to [-1, 1] like heart_scale.
    n_rows, cols = 270, []
    for j in range(13):
        kind = j % 3
        if kind == 0:
            cols.append(rng.integers(0, 2, n_rows).astype(float))
        elif kind == 1:
            cols.append(rng.integers(0, 4, n_rows).astype(float))
        else:
            cols.append(rng.normal(50.0, 12.0, n_rows))
    X = scale_to_unit_box(np.column_stack(cols))
    return X, planted_logistic(rng, X, noise=1.0)


def splice_synth(rng):
    # 500 x 60, four-level categorical columns scaled to [-1, 1].
    X = rng.integers(0, 4, (500, 60)).astype(float)
    X = scale_to_unit_box(X)
    return X, planted_logistic(rng, X, noise=2.0)


def breast_cancer():
    from sklearn.datasets import load_breast_cancer

    data = load_breast_cancer()
    X = scale_to_unit_box(data.data)
    y = np.where(data.target == 1, 1, -1)
    return X, y


def small_fixture():
    # Hand-sized 10-row file with 0/1 labels to exercise label mapping.
    lines = [
        "1 1:0.5 3:2.0 4:-1.25",
        "0 2:1.0 5:0.125",
        "1 1:-0.75 2:0.25 3:1.5",
        "0 4:2.5",
        "1 1:1.0 5:-0.5",
        "0 2:-1.5 3:0.75 5:1.0",
        "1 3:-2.0 4:0.5",
        "0 1:0.25 2:0.5 3:0.75 4:1.0 5:1.25",
        "1 5:3.0",
        "0 1:-1.0 4:-0.375",
    ]
    return "\n".join(lines) + "\n"


def bad_fixture():
    # Repeated feature index on line 3; used by the CLI error-path test.
    return "+1 1:0.5 2:0.25\n-1 1:0.1 3:0.7\n+1 2:0.3 2:0.4\n"


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(20250804))
    write_libsvm(out / "heart_synth.libsvm", *heart_synth(rng))
    write_libsvm(out / "splice_synth.libsvm", *splice_synth(rng))
    write_libsvm(out / "breast_cancer_scale.libsvm", *breast_cancer())
    (out / "tiny10.libsvm").write_text(small_fixture())
    (out / "bad.libsvm").write_text(bad_fixture())


if __name__ == "__main__":
    main()
