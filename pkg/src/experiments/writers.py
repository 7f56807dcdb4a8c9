"""
Report Writers

JSON lines (one check per line, sorted keys, no timestamps) and a pandas CSV
summary. Identical runs produce byte-identical files.
"""
import json
import logging
import sys
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.config.settings import settings
from src.experiments.base import BaseReportWriter, CheckRecord
from src.utils.io import _json_serializer, ensure_directory_exists, write_json_lines

logger = logging.getLogger(__name__)

Destination = Union[str, Path, IO[str]]


def _open(destination: Destination):
    if isinstance(destination, (str, Path)):
        if str(destination) == "-":
            return sys.stdout, False
        # relative report paths land under OUTPUT_DIR
        path = settings.output_path / destination
        ensure_directory_exists(path.parent)
        return open(path, "w", encoding="utf-8", newline=""), True
    return destination, False


class JsonLinesReportWriter(BaseReportWriter):
    """One JSON document per check record."""

    def __init__(self, destination: Destination, name: Optional[str] = None):
        super().__init__(name)
        self.destination = destination

    def write(self, records: List[CheckRecord]) -> bool:
        stream, owned = _open(self.destination)
        try:
            count = write_json_lines((r.to_dict() for r in records), stream)
        finally:
            if owned:
                stream.close()
        logger.info(f"Wrote {count} report lines")
        return True


def _flatten(value: Any) -> Any:
    """Scalar cells stay as-is; containers become canonical JSON strings."""
    if isinstance(value, (str, int, float, bool, type(None))):
        return value
    if not isinstance(value, (list, dict, tuple, set, frozenset, np.ndarray)):
        value = _json_serializer(value)
        if not isinstance(value, (list, dict)):
            return value
    return json.dumps(value, sort_keys=True, default=_json_serializer)


class CsvSummaryWriter(BaseReportWriter):
    """Summary table, one row per check record.

    Columns come first in ``columns`` order (when given), then the remaining
    keys sorted.
    """

    def __init__(
        self,
        destination: Destination,
        columns: Optional[Sequence[str]] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.destination = destination
        self.columns = list(columns or [])

    def to_frame(self, records: List[CheckRecord]) -> pd.DataFrame:
        rows: List[Dict[str, Any]] = [
            {k: _flatten(v) for k, v in r.to_dict().items()} for r in records
        ]
        df = pd.DataFrame(rows)
        leading = [c for c in self.columns if c in df.columns]
        rest = sorted(c for c in df.columns if c not in leading)
        return df[leading + rest] if len(df.columns) else df

    def write(self, records: List[CheckRecord]) -> bool:
        df = self.to_frame(records)
        stream, owned = _open(self.destination)
        try:
            df.to_csv(stream, index=False, float_format="%.12g", lineterminator="\n")
        finally:
            if owned:
                stream.close()
        logger.info(f"Wrote CSV summary with {len(df)} rows")
        return True


def make_writer(fmt: str, destination: Destination, columns: Optional[Sequence[str]] = None) -> BaseReportWriter:
    """Writer for the ``--format`` flag."""
    if fmt == "json":
        return JsonLinesReportWriter(destination)
    if fmt == "csv":
        return CsvSummaryWriter(destination, columns=columns)
    raise ValueError(f"unknown report format {fmt!r}")
