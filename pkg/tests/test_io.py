import struct

import numpy as np
import pytest

from heterolabel.errors import (BadMagic, BadVersion, DimMismatch, DuplicateSymbol,
                                ManifestError, MissingSymbol, NonFiniteValue,
                                TruncatedPayload)
from heterolabel.io import (EncodingTable, ManifestRecord, format_encoding_table,
                            matrix_from_bytes, matrix_to_bytes, parse_encoding_table,
                            parse_manifest, read_manifest, read_matrix, write_manifest,
                            write_matrix)


class TestMatrixFile:
    def test_round_trip(self, tmp_path):
        m = np.array([[1.5, -2.0, 3.25], [0.1, 1e-30, 7e20]], dtype=np.float32)
        write_matrix(tmp_path / "m.alnf", m)
        raw = (tmp_path / "m.alnf").read_bytes()
        back = read_matrix(tmp_path / "m.alnf")
        assert back.dtype == np.float32 and back.shape == (2, 3)
        assert back.tobytes() == m.tobytes()
        assert matrix_to_bytes(back) == raw

    def test_layout(self):
        raw = matrix_to_bytes(np.array([[1.0, 2.0]]))
        assert raw[:4] == b"ALNF" and raw[4] == 1
        assert struct.unpack("<II", raw[5:13]) == (1, 2)
        assert struct.unpack("<2f", raw[13:]) == (1.0, 2.0)
        assert len(raw) == 13 + 8

    def test_bad_magic(self):
        raw = matrix_to_bytes(np.zeros((2, 2)))
        with pytest.raises(BadMagic):
            matrix_from_bytes(b"XXXX" + raw[4:])
        with pytest.raises(BadMagic):
            matrix_from_bytes(b"XX")

    def test_bad_version(self):
        raw = bytearray(matrix_to_bytes(np.zeros((1, 1))))
        raw[4] = 2
        with pytest.raises(BadVersion):
            matrix_from_bytes(bytes(raw))

    def test_truncated(self):
        raw = matrix_to_bytes(np.zeros((4, 4)))
        with pytest.raises(TruncatedPayload):
            matrix_from_bytes(raw[:-4])  # 15 floats under a 4x4 header
        with pytest.raises(TruncatedPayload):
            matrix_from_bytes(raw + b"\0\0\0\0")
        with pytest.raises(TruncatedPayload):
            matrix_from_bytes(raw[:9])

    def test_non_finite(self):
        raw = bytearray(matrix_to_bytes(np.zeros((1, 2))))
        raw[13:17] = struct.pack("<f", float("nan"))
        with pytest.raises(NonFiniteValue):
            matrix_from_bytes(bytes(raw))
        with pytest.raises(NonFiniteValue):
            matrix_to_bytes(np.array([[np.inf]]))

    def test_empty_dims_allowed_by_format(self):
        assert matrix_from_bytes(matrix_to_bytes(np.zeros((0, 3)))).shape == (0, 3)


class TestEncodingTable:
    def test_parse(self):
        t = parse_encoding_table("dim 2\nɹ 1.0 0.0\ni 0.0 1.0\n")
        assert t.dim == 2 and len(t) == 2
        np.testing.assert_array_equal(t.encode(["i", "ɹ"]), [[0, 1], [1, 0]])

    def test_wrong_width(self):
        with pytest.raises(DimMismatch) as exc:
            parse_encoding_table("dim 2\nɹ 1.0 0.0 3.0\n")
        assert exc.value.line_no == 2

    def test_duplicate(self):
        with pytest.raises(DuplicateSymbol):
            parse_encoding_table("dim 2\nɹ 1 0\nɹ 0 1\n")

    @pytest.mark.parametrize("text", ["", "dims 2\n", "dim x\n", "dim 0\n"])
    def test_bad_header(self, text):
        with pytest.raises(DimMismatch):
            parse_encoding_table(text)

    def test_missing_symbol(self):
        with pytest.raises(MissingSymbol):
            parse_encoding_table("dim 1\na 1\n").encode(["a", "b"])

    def test_format_round_trip_exact(self):
        rng = np.random.default_rng(0)
        t = EncodingTable(5, {s: rng.normal(size=5).astype(np.float32) for s in ["#a", "ɹ", "d͡ʒ"]})
        back = parse_encoding_table(format_encoding_table(t))
        for s, v in t.vectors.items():
            assert back.vectors[s].tobytes() == v.tobytes()
        assert format_encoding_table(back) == format_encoding_table(t)


class TestManifest:
    def test_round_trip(self, tmp_path):
        recs = [ManifestRecord("a", "read it", frames=tmp_path / "f" / "a.alnf"),
                ManifestRecord("b", "lead", candidates={"lead_verb": tmp_path / "x.alnf"})]
        write_manifest(tmp_path / "m.jsonl", recs)
        text = (tmp_path / "m.jsonl").read_text()
        assert '"frames": "f/a.alnf"' in text
        assert read_manifest(tmp_path / "m.jsonl") == recs

    @pytest.mark.parametrize("line", [
        '{"id": "a", "text": "x"}',
        '{"id": "a", "text": "x", "frames": "f", "candidates": {"k": "p"}}',
        '{"id": 3, "text": "x", "frames": "f"}',
        '{"id": "a", "text": "x", "candidates": {}}',
        'not json',
    ])
    def test_invalid(self, line):
        with pytest.raises(ManifestError):
            parse_manifest(line)

    def test_duplicate_ids(self):
        line = '{"id": "a", "text": "x", "frames": "f"}'
        with pytest.raises(ManifestError):
            parse_manifest(line + "\n" + line)
