import numpy as np
import pytest

from bestalign.dp_align import solve_optimized
from bestalign.errors import ValidationError
from bestalign.fileio import (
    ParseError,
    decode_embeddings,
    dump_document,
    encode_embeddings,
    load_document,
    parse_csv,
    read_embeddings,
    write_embeddings,
)


def test_binary_layout_test_vector():
    data = encode_embeddings(np.array([[1.0, -2.0], [0.5, 0.0], [3.0, 0.25]]))
    expected = (
        b"MALN"
        + b"\x01\x00"
        + b"\x03\x00\x00\x00"
        + b"\x02\x00\x00\x00"
        + bytes.fromhex("0000803f" "000000c0" "0000003f" "00000000" "00004040" "0000803e")
    )
    assert data == expected


def test_round_trip_bytes_identical(tmp_path):
    x = np.random.default_rng(0).standard_normal((17, 5))
    p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
    write_embeddings(p1, x)
    seq = read_embeddings(p1)
    write_embeddings(p2, seq)
    assert p1.read_bytes() == p2.read_bytes()
    assert seq.frames.dtype == np.float64
    np.testing.assert_array_equal(seq.frames, x.astype(np.float32).astype(np.float64))


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda b: b[:10], "offset 10"),
        (lambda b: b[:20], "offset 20"),
        (lambda b: b + b"\x00", "trailing"),
        (lambda b: b"MALX" + b[4:], "offset 0"),
        (lambda b: b[:4] + b"\x02\x00" + b[6:], "offset 4"),
        (lambda b: b[:6] + b"\x00\x00\x00\x00" + b[10:], "offset 6"),
    ],
)
def test_malformed_binary(mutate, fragment):
    data = encode_embeddings(np.ones((3, 2)))
    with pytest.raises(ParseError, match=fragment):
        decode_embeddings(mutate(data))


def test_non_finite_payload_rejected():
    with pytest.raises(ValidationError):
        decode_embeddings(encode_embeddings(np.array([[np.nan, 1.0]])))


def test_csv_parsing():
    seq = parse_csv("# comment\n1, 2.5\n\n-3,4e-1\n")
    np.testing.assert_array_equal(seq.frames, np.array([[1, 2.5], [-3, 0.4]], dtype=np.float32).astype(float))
    with pytest.raises(ParseError, match="line 2"):
        parse_csv("1,2\n3\n")
    with pytest.raises(ParseError):
        parse_csv("1,abc\n")
    with pytest.raises(ParseError):
        parse_csv("\n# nothing\n")


def test_csv_and_binary_agree(tmp_path):
    x = np.random.default_rng(5).standard_normal((12, 3))
    y = np.random.default_rng(6).standard_normal((5, 3))
    for name, arr in (("a", x), ("t", y)):
        write_embeddings(tmp_path / f"{name}.bin", arr)
        (tmp_path / f"{name}.csv").write_text("\n".join(",".join(repr(float(v)) for v in row) for row in arr))
    rb = solve_optimized(read_embeddings(tmp_path / "a.bin"), read_embeddings(tmp_path / "t.bin"))
    rc = solve_optimized(read_embeddings(tmp_path / "a.csv"), read_embeddings(tmp_path / "t.csv"))
    assert rb.loss == rc.loss and rb.path == rc.path


def test_document_round_trip():
    doc = {"schema_version": 1, "loss": 0.1 + 0.2, "path": [0, 0, 1], "grad": [[1e-300, -2.5]]}
    text = dump_document(doc)
    assert load_document(text) == doc
    assert dump_document(load_document(text)) == text
    with pytest.raises(ValidationError):
        load_document("[1, 2]")
