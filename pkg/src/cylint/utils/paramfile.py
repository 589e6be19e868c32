"""Parser for flat key-value parameter files.

Format, one entry per line:

    tau0 = 0.5            # constant
    rho = poly            # function slot and its kind
    rho.c2 = 1.0          # slot argument
    profile = jacobi-ex1  # string option

Blank lines and `#` comments are ignored. Which keys are legal is decided by
the family schema when the file is bound (see cylint.catalog.bind_params).
"""

import math
import re
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)?$")
_WORD_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


class ParamFileError(Exception):
    """Exception raised for malformed parameter files."""

    pass


class ParamEntry(BaseModel):
    """A single `key = value` line."""

    key: str
    number: Optional[float] = None
    word: Optional[str] = None
    line: int

    @property
    def is_number(self) -> bool:
        return self.number is not None


class ParamFile(BaseModel):
    """Parsed parameter file, entries in file order."""

    entries: list[ParamEntry]
    source: str = "<string>"

    def get(self, key: str) -> Optional[ParamEntry]:
        for entry in self.entries:
            if entry.key == key:
                return entry
        return None

    def keys(self) -> list[str]:
        return [e.key for e in self.entries]

    def numbers(self) -> dict[str, float]:
        """All numeric entries keyed by name."""
        return {e.key: e.number for e in self.entries if e.number is not None}


def _parse_value(raw: str) -> tuple[Optional[float], Optional[str]]:
    try:
        number = float(raw)
    except ValueError:
        number = None
    if number is not None:
        if not math.isfinite(number):
            raise ValueError(f"numbers must be finite, got '{raw}'")
        return number, None
    if _WORD_RE.match(raw):
        return None, raw
    raise ValueError(f"expected a number or a word, got '{raw}'")


def parse_param_text(text: str, source: str = "<string>") -> ParamFile:
    """
    Parse parameter-file text.

    Args:
        text: File contents
        source: Name used in error messages

    Returns:
        ParamFile with one entry per assignment

    Raises:
        ParamFileError: On syntax errors or duplicate keys
    """
    entries: list[ParamEntry] = []
    seen: set[str] = set()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParamFileError(f"{source}:{lineno}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY_RE.match(key):
            raise ParamFileError(f"{source}:{lineno}: invalid key '{key}'")
        if key in seen:
            raise ParamFileError(f"{source}:{lineno}: duplicate key '{key}'")
        if not value:
            raise ParamFileError(f"{source}:{lineno}: missing value for '{key}'")
        try:
            number, word = _parse_value(value)
        except ValueError as e:
            raise ParamFileError(f"{source}:{lineno}: {e}")
        seen.add(key)
        entries.append(ParamEntry(key=key, number=number, word=word, line=lineno))
    return ParamFile(entries=entries, source=source)


def read_param_file(path: Union[str, Path]) -> ParamFile:
    """
    Read and parse a parameter file from disk.

    Raises:
        ParamFileError: If the file cannot be read or parsed
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except Exception as e:
        raise ParamFileError(f"Failed to read parameter file {p}: {e}")
    return parse_param_text(text, source=str(p))
