"""Readers for run-to-failure vibration snapshots.

The supported layout is the classic NASA/IMS one: plain-text files, one
row per sample, tab-separated sensor channels, and the acquisition
timestamp encoded in the filename as ``YYYY.MM.DD.HH.MM.SS``.  Files
carry no header, so the sample rate is supplied by the caller.  A
configurable delimiter makes the same parser usable for generic
delimited signal files.
"""

import os
import warnings
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .core_signal import Signal
from .errors import SignalParseError

__all__ = [
    "SnapshotFile",
    "read_ims_file",
    "write_ims_file",
    "iterate_run_to_failure",
    "RunToFailureSequence",
]

IMS_EXPECTED_ROWS = 20480
TIMESTAMP_FORMAT = "%Y.%m.%d.%H.%M.%S"


@dataclass
class SnapshotFile:
    """One parsed snapshot: channel matrix (rows = time) plus metadata."""

    path: Path
    timestamp: datetime
    channels: np.ndarray
    sample_rate_hz: float

    @property
    def n_channels(self):
        return self.channels.shape[1]

    def channel_signal(self, channel):
        if not (0 <= channel < self.n_channels):
            raise ValueError(
                f"channel {channel} out of range for {self.n_channels}-channel file"
            )
        return Signal(self.channels[:, channel], self.sample_rate_hz)


def _parse_timestamp(path):
    try:
        return datetime.strptime(Path(path).name, TIMESTAMP_FORMAT)
    except ValueError:
        return None


def read_ims_file(path, sample_rate_hz, delimiter="\t", expected_rows=IMS_EXPECTED_ROWS):
    """Parse a delimited all-numeric snapshot file.

    A row count different from ``expected_rows`` only produces a warning
    (real datasets contain truncated files); a non-numeric token raises
    :class:`SignalParseError` carrying the offending 1-based line number.
    """
    path = Path(path)
    rows = []
    width = None
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            parts = stripped.split(delimiter) if delimiter else stripped.split()
            try:
                row = [float(tok) for tok in parts]
            except ValueError:
                raise SignalParseError(
                    f"{path.name}: non-numeric content on line {line_no}", line=line_no
                ) from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise SignalParseError(
                    f"{path.name}: expected {width} columns on line {line_no}, got {len(row)}",
                    line=line_no,
                )
            rows.append(row)
    if not rows:
        raise SignalParseError(f"{path.name}: file contains no samples")
    channels = np.asarray(rows, dtype=np.float64)
    if expected_rows and channels.shape[0] != expected_rows:
        warnings.warn(
            f"{path.name}: {channels.shape[0]} rows, expected {expected_rows}"
        )
    timestamp = _parse_timestamp(path) or datetime.fromtimestamp(os.path.getmtime(path))
    return SnapshotFile(
        path=path, timestamp=timestamp, channels=channels, sample_rate_hz=float(sample_rate_hz)
    )


def write_ims_file(path, channels, delimiter="\t"):
    """Serialize a channel matrix in the same text layout, losslessly.

    Values print with ``%.17g`` so a parse/serialize round trip reproduces
    every float64 bit pattern.
    """
    channels = np.atleast_2d(np.asarray(channels, dtype=np.float64))
    with open(path, "w") as fh:
        for row in channels:
            fh.write(delimiter.join(f"{v:.17g}" for v in row))
            fh.write("\n")


@dataclass
class RunToFailureSequence:
    """Chronologically ordered signals plus per-file failure notes."""

    signals: list
    paths: list
    errors: list  # (path, message) for files that failed to parse

    def __len__(self):
        return len(self.signals)


def iterate_run_to_failure(
    directory,
    channel,
    sample_rate_hz,
    delimiter="\t",
    expected_rows=IMS_EXPECTED_ROWS,
):
    """Read every snapshot in a directory in filename-timestamp order.

    Files whose names do not parse as timestamps, or whose contents fail
    to parse, are recorded in ``errors`` and skipped; iteration continues.
    The sequence index of the result is the chronological "test file No.".
    """
    directory = Path(directory)
    entries = sorted(p for p in directory.iterdir() if p.is_file())
    if not entries:
        raise FileNotFoundError(f"no files found in {directory}")

    stamped, errors = [], []
    for path in entries:
        ts = _parse_timestamp(path)
        if ts is None:
            errors.append((str(path), "filename does not encode a timestamp"))
            continue
        stamped.append((ts, path))
    stamped.sort(key=lambda item: (item[0], item[1].name))

    signals, paths = [], []
    for _, path in stamped:
        try:
            snapshot = read_ims_file(path, sample_rate_hz, delimiter, expected_rows)
            signals.append(snapshot.channel_signal(channel))
            paths.append(path)
        except (SignalParseError, ValueError, OSError) as exc:
            errors.append((str(path), str(exc)))
    if not signals:
        raise FileNotFoundError(f"no parseable snapshot files in {directory}")
    return RunToFailureSequence(signals=signals, paths=paths, errors=errors)
