"""Atomic emission of CSV tables, JSON reports and SVG plots."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from numpy.typing import ArrayLike

logger = logging.getLogger(__name__)

_SVG_RC: Mapping[str, Any] = {"svg.hashsalt": "qsrelax", "svg.fonttype": "none"}


def write_atomic(path: Path, data: bytes) -> Path:
    """Write to a temporary file in the target directory, then rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug("wrote %s (%d bytes)", path, len(data))
    return path


def json_text(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    return write_atomic(path, json_text(payload).encode("ascii"))


def _cell(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    return write_atomic(path, csv_text(header, rows).encode("utf-8"))


@dataclass(frozen=True, slots=True)
class Series:
    label: str
    x: ArrayLike
    y: ArrayLike


def svg_plot(
    series: Sequence[Series],
    *,
    xlabel: str,
    ylabel: str,
    title: str = "",
    logx: bool = False,
    logy: bool = False,
    markers: bool = False,
) -> bytes:
    """Render line plots to deterministic SVG bytes."""
    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(6.4, 4.0))
        ax = fig.add_subplot()
        for s in series:
            marker = "o" if markers else None
            ax.plot(np.asarray(s.x), np.asarray(s.y), marker=marker, label=s.label)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def write_svg(path: Path, series: Sequence[Series], **kwargs: Any) -> Path:
    return write_atomic(path, svg_plot(series, **kwargs))


class OutputDirectory:
    """Artifact sink for one run; records the names of files it wrote."""

    def __init__(self, root: Path, formats: Sequence[str]) -> None:
        super().__init__()
        self.root = root
        self.formats = frozenset(formats)
        self.written: list[str] = []

    def wants(self, fmt: str) -> bool:
        return fmt in self.formats

    def _record(self, path: Path) -> Path:
        self.written.append(path.name)
        return path

    def csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
        if self.wants("csv"):
            self._record(write_csv(self.root / name, header, rows))

    def svg(self, name: str, series: Sequence[Series], **kwargs: Any) -> None:
        if self.wants("svg"):
            self._record(write_svg(self.root / name, series, **kwargs))

    def json(self, name: str, payload: Mapping[str, Any]) -> None:
        if self.wants("json"):
            write_json(self.root / name, payload)
