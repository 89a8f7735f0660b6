"""
Canonical text and CSV renderings of results.

A canonical document starts with a format tag line such as
``qpclab-transcript/1`` followed by JSON with two-space indentation, fixed
field order and ASCII output. Equal results render to equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from qpclab.analysis.results import ExperimentReport
from qpclab.attacks.results import AttackReport
from qpclab.protocol.results import Transcript

FORMAT_VERSION = 1
CSV_HEADER = ("outcome", "count", "trials", "rate", "half_width", "oracle")

_KINDS: dict[type, str] = {
    Transcript: "transcript",
    AttackReport: "attack-report",
    ExperimentReport: "experiment-report",
}

Result = Transcript | AttackReport | ExperimentReport


def format_tag(kind: str) -> str:
    return f"qpclab-{kind}/{FORMAT_VERSION}"


def dumps(result: Result | list[AttackReport], extra: dict[str, Any] | None = None) -> str:
    """
    Render a result as a canonical text document.

    A list of attack reports renders as one attack-report document holding
    all of them.

    Parameters
    ----------
    result : Transcript, AttackReport, ExperimentReport or list[AttackReport]
        What to render.
    extra : dict, optional
        Further top-level fields, appended after the result's own.

    Raises
    ------
    TypeError
        If result is not a known result type.
    """
    if isinstance(result, list):
        kind = _KINDS[AttackReport]
        body: dict[str, Any] = {"reports": [r.to_dict() for r in result]}
    else:
        kind = _KINDS.get(type(result), "")
        if not kind:
            raise TypeError(f"Cannot serialize a {type(result).__name__}.")
        body = result.to_dict()

    if extra:
        body = {**body, **extra}

    return format_tag(kind) + "\n" + json.dumps(body, indent=2, ensure_ascii=True) + "\n"


def read_tag(text: str) -> tuple[str, int]:
    """
    Parse the format tag line of a canonical document.

    Raises
    ------
    ValueError
        If the first line is not a qpclab format tag.
    """
    first = text.split("\n", 1)[0]
    prefix, _, version = first.rpartition("/")
    if not prefix.startswith("qpclab-") or not version.isdigit():
        raise ValueError(f"Not a qpclab document: first line is {first!r}.")

    return prefix[len("qpclab-"):], int(version)


def loads(text: str) -> dict[str, Any]:
    """
    Read the body of a canonical document as plain data.

    Raises
    ------
    ValueError
        If the tag is missing or names an unsupported version.
    """
    kind, version = read_tag(text)
    if version != FORMAT_VERSION:
        raise ValueError(f"Unsupported {kind} format version {version}.")

    return json.loads(text.split("\n", 1)[1])


def report_csv(report: ExperimentReport) -> str:
    """One CSV row per tallied outcome, with a header row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for tally in report.tallies:
        writer.writerow(
            [
                tally.outcome,
                tally.count,
                tally.trials,
                repr(tally.rate),
                repr(tally.half_width),
                "" if tally.oracle is None else repr(tally.oracle),
            ]
        )
    return buffer.getvalue()


def write_text(path: str | Path, text: str) -> None:
    """Write a document with '\\n' line endings regardless of platform."""
    with open(path, "w", encoding="ascii", newline="") as handle:
        handle.write(text)
