"""
Report I/O Utilities

JSON helpers shared by the report writers.
"""
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Mapping, TextIO, Union

import numpy as np


def ensure_directory_exists(directory: Union[str, Path]) -> Path:
    """Ensure that a directory exists, creating it if necessary.

    Args:
        directory: Directory path

    Returns:
        Path object for the directory
    """
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _json_serializer(obj: Any) -> Any:
    """JSON serializer for objects not serializable by default."""
    if isinstance(obj, np.bool_):
        return bool(obj)
    elif isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, Fraction):
        return str(obj)
    elif hasattr(obj, "to_dict"):
        return obj.to_dict()
    elif isinstance(obj, (set, frozenset)):
        return sorted(obj)
    elif isinstance(obj, tuple):
        return list(obj)

    raise TypeError(f"Type {type(obj)} not serializable")


def dumps_line(record: Mapping[str, Any]) -> str:
    """Serialize one record as a canonical single JSON line."""
    return json.dumps(record, sort_keys=True, default=_json_serializer, allow_nan=True)


def write_json_lines(records: Iterable[Mapping[str, Any]], stream: TextIO) -> int:
    """Write records to an open text stream, one JSON document per line.

    Returns:
        Number of lines written
    """
    count = 0
    for record in records:
        stream.write(dumps_line(record))
        stream.write("\n")
        count += 1
    return count


def chunk_list(lst: List[Any], chunk_size: int) -> List[List[Any]]:
    """Split a list into chunks of the specified size."""
    return [lst[i:i + chunk_size] for i in range(0, len(lst), chunk_size)]
