"""CSV ingestion, report documents and atomic file output."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import ValidationError

HEADER = ("score", "response")


class InputOutputError(OSError):
    """A file could not be read or written."""


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path, text: str) -> None:
    """Write `text` to `path` through a temporary file and a rename.

    Nothing is left at `path` if writing fails part way.
    """
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.chmod(tmp, 0o666 & ~_umask())
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> list[tuple[float, int]]:
    """Parse a ``score,response`` file into pairs, in file order."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputOutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows or tuple(c.strip() for c in rows[0]) != HEADER:
        raise ValidationError(f"{path}: line 1: expected header 'score,response'")
    pairs = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValidationError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
        try:
            score = float(row[0])
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: score {row[0]!r} is not a number")
        try:
            response = int(row[1])
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: response {row[1]!r} is not an integer")
        if not (0.0 <= score <= 1.0):
            raise ValidationError(f"{path}: line {lineno}: score {score!r} outside [0, 1]")
        if response not in (0, 1):
            raise ValidationError(f"{path}: line {lineno}: response {response} not in {{0, 1}}")
        pairs.append((score, response))
    return pairs


def format_csv(pairs) -> str:
    buf = io.StringIO()
    buf.write(",".join(HEADER) + "\n")
    for score, response in pairs:
        buf.write(f"{float(score):.17g},{int(response)}\n")
    return buf.getvalue()


def write_csv(pairs, path) -> None:
    atomic_write(path, format_csv(pairs))


def sweep_to_csv(result) -> str:
    keys = list(result.series)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([result.axis_name, *keys])
    for i, a in enumerate(result.axis):
        writer.writerow([a, *(repr(float(result.series[k][i])) for k in keys)])
    return buf.getvalue()


@dataclass
class ReportDocument:
    n: int
    provenance: dict
    ece_sections: list[dict] | None = None
    ecce_section: dict | None = None

    def __post_init__(self):
        if self.ece_sections is None and self.ecce_section is None:
            raise ValidationError("a report needs at least one section")

    def to_json(self) -> str:
        doc = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def ece_section(rep) -> dict:
    return {"strategy": rep.spec.strategy.value, "m": rep.spec.m, "ece1": rep.ece1, "ece2": rep.ece2}


def ecce_section(rep) -> dict:
    return {
        "ecce_mad": rep.ecce_mad,
        "ecce_r": rep.ecce_r,
        "sigma_n": rep.sigma_n,
        "mad_normalized": rep.mad_normalized,
        "r_normalized": rep.r_normalized,
        "p_mad": rep.p_mad,
        "p_r": rep.p_r,
    }
