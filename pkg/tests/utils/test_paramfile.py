"""Tests for cylint.utils.paramfile: key-value parameter files."""

from pathlib import Path

import pytest

from cylint.utils.paramfile import ParamFileError, parse_param_text, read_param_file

SAMPLE = """
# exotic family
tau0 = 0.5
rho = poly        # slot kind
rho.c2 = 1.0
profile = jacobi-ex1
"""


class TestParseParamText:
    """Line grammar of parameter files."""

    def test_parses_numbers_words_and_slot_args(self) -> None:
        pf = parse_param_text(SAMPLE)
        assert pf.keys() == ["tau0", "rho", "rho.c2", "profile"]
        assert pf.get("tau0").number == 0.5
        assert pf.get("rho").word == "poly"
        assert pf.get("profile").word == "jacobi-ex1"
        assert pf.numbers() == {"tau0": 0.5, "rho.c2": 1.0}

    def test_line_numbers_kept(self) -> None:
        pf = parse_param_text(SAMPLE)
        assert pf.get("tau0").line == 3

    def test_missing_key_returns_none(self) -> None:
        assert parse_param_text("a = 1").get("b") is None

    def test_empty_text(self) -> None:
        assert parse_param_text("# only a comment\n\n").entries == []

    @pytest.mark.parametrize(
        "text, message",
        [
            ("tau0 0.5", "expected 'key = value'"),
            ("1tau = 0.5", "invalid key"),
            ("a = 1\na = 2", "duplicate key"),
            ("a =", "missing value"),
            ("a = nan", "finite"),
            ("a = two words", "number or a word"),
        ],
    )
    def test_syntax_errors(self, text: str, message: str) -> None:
        with pytest.raises(ParamFileError, match=message):
            parse_param_text(text, source="x.params")

    def test_error_mentions_source_and_line(self) -> None:
        with pytest.raises(ParamFileError, match="x.params:2"):
            parse_param_text("a = 1\nb", source="x.params")


class TestReadParamFile:
    def test_reads_from_disk(self, tmp_path: Path) -> None:
        path = tmp_path / "p.params"
        path.write_text("W0 = 2.5\n")
        pf = read_param_file(path)
        assert pf.numbers() == {"W0": 2.5}
        assert pf.source == str(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ParamFileError, match="Failed to read"):
            read_param_file(tmp_path / "nope.params")
