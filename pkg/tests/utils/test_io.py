# tests/utils/test_io.py - Report I/O helper tests
import io
from fractions import Fraction

import numpy as np
import pytest

from src.utils.io import chunk_list, dumps_line, ensure_directory_exists, write_json_lines


class TestSerialization:
    def test_numpy_and_fraction_values(self):
        """Test that numpy scalars, arrays and fractions serialize"""
        line = dumps_line({"b": np.int64(3), "a": np.array([1, 2]), "c": Fraction(3, 2), "d": np.bool_(True)})
        assert line == '{"a": [1, 2], "b": 3, "c": "3/2", "d": true}'

    def test_sets_are_sorted(self):
        """Test that sets serialize in sorted order"""
        assert dumps_line({"s": {3, 1, 2}}) == '{"s": [1, 2, 3]}'

    def test_unknown_type(self):
        """Test that unsupported objects are rejected"""
        with pytest.raises(TypeError):
            dumps_line({"x": object()})

    def test_write_json_lines(self):
        """Test one line per record"""
        stream = io.StringIO()
        assert write_json_lines([{"a": 1}, {"a": 2}], stream) == 2
        assert stream.getvalue() == '{"a": 1}\n{"a": 2}\n'


class TestFiles:
    def test_ensure_directory_exists(self, tmp_path):
        """Test that nested directories are created and reused"""
        target = tmp_path / "nested" / "reports"
        assert ensure_directory_exists(target) == target
        assert target.is_dir()
        assert ensure_directory_exists(str(target)) == target


class TestChunking:
    def test_chunk_list(self):
        """Test chunks of the requested size with a short tail"""
        assert chunk_list(list(range(5)), 2) == [[0, 1], [2, 3], [4]]
