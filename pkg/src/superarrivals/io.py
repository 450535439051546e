"""Locale-independent CSV output shared by every exporter."""

from __future__ import annotations

from pathlib import Path

import numpy as np

SIG_DIGITS = 12


def fmt(value) -> str:
    return format(float(value), f".{SIG_DIGITS}g")


def write_csv(path, header, columns) -> None:
    columns = [np.asarray(c) for c in columns]
    if len({len(c) for c in columns}) > 1:
        raise ValueError("CSV columns must have equal length")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}
