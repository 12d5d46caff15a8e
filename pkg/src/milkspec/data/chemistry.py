"""Wet-lab chemistry panel ingestion.

One row per milk sample: treatment group, milking time, polyphenol and FRAP
concentrations, and the gas-chromatography fatty-acid profile in percent of
total fatty acids. Empty cells are masked, never imputed; downstream
statistics drop masked values pairwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from milkspec.errors import DataFormatError

GROUP_NAMES = ("SIG", "CTR", "ASIG")  # codes 0, 1, 2
GROUP_CODES = {name: code for code, name in enumerate(GROUP_NAMES)}
TIME_LABELS = ("T0", "T12")

# Accepted fatty-acid column names: the individual acids and the aggregate
# indices reported with them (saturated/mono/poly totals and omega ratios).
FATTY_ACID_VOCABULARY = frozenset(
    {
        "C4:0", "C6:0", "C8:0", "C10:0", "C10:1c9", "C11:0", "C12:0",
        "C12:1c11", "C13:0iso", "C13:0ante", "C13:0", "C14:0iso", "C14:0",
        "C15:0iso", "C15:0ante", "C14:1c9", "C15:0", "C16:0iso", "C16:0",
        "C17:0iso", "C16:1c7", "C16:1c9", "C17:0ante", "C17:0", "C17:1c9",
        "C18:0", "C18:1t6-8", "C18:1t9", "C18:1t10", "C18:1t11", "C18:1t12",
        "C18:1c9", "C18:1c11", "C18:1c12", "C18:1c13", "C18:1t16",
        "C18:2t9t12", "C18:2t9c13", "C18:2t8c12", "C18:2t11c15", "C18:2n-6",
        "C20:0", "C18:3n3", "C18:2c9t11", "C21:0", "C20:2n6", "C22:0",
        "C20:3n6", "C20:3n3", "C20:4n6", "C20:5n3", "C24:0", "C22:5n3",
        "FA_SAT", "FA_MONO", "FA_POLY", "OMEGA6", "OMEGA3", "OMEGA6_3",
    }
)

_REQUIRED_COLUMNS = ("sample_id", "group", "time", "polyphenols", "frap")


@dataclass(frozen=True)
class ChemistryPanel:
    """Per-sample wet-lab targets. Missing values are NaN and listed in
    ``missing``."""

    sample_id: str
    cow_group: int
    time: str
    polyphenols: float
    frap: float
    fatty_acids: dict[str, float] = field(default_factory=dict)
    missing: frozenset[str] = frozenset()

    @property
    def group_name(self) -> str:
        return GROUP_NAMES[self.cow_group]

    def value(self, parameter: str) -> float:
        """Look up any chemistry parameter by column name (NaN if masked)."""
        if parameter == "polyphenols":
            return self.polyphenols
        if parameter == "frap":
            return self.frap
        if parameter in self.fatty_acids:
            return self.fatty_acids[parameter]
        raise KeyError(parameter)

    @property
    def parameters(self) -> list[str]:
        return ["polyphenols", "frap", *self.fatty_acids.keys()]


def _parse_group(token: str, line_no: int) -> int:
    token = token.strip()
    if token in GROUP_CODES:
        return GROUP_CODES[token]
    if token in ("0", "1", "2"):
        return int(token)
    raise DataFormatError(f"line {line_no}: unknown group token {token!r}")


def _parse_time(token: str, line_no: int) -> str:
    token = token.strip()
    if token not in TIME_LABELS:
        raise DataFormatError(f"line {line_no}: unknown time token {token!r}")
    return token


def _parse_cell(token: str, column: str, line_no: int) -> tuple[float, bool]:
    """Parse a concentration cell; returns (value, is_missing)."""
    token = token.strip()
    if token == "":
        return math.nan, True
    try:
        value = float(token)
    except ValueError:
        raise DataFormatError(
            f"line {line_no}: column {column!r} is not numeric: {token!r}"
        ) from None
    if not math.isfinite(value):
        raise DataFormatError(f"line {line_no}: column {column!r} is not finite")
    if value < 0:
        raise DataFormatError(
            f"line {line_no}: negative concentration {value} in column {column!r}"
        )
    return value, False


def parse_chemistry_table(text: str) -> list[ChemistryPanel]:
    """Parse the chemistry CSV (UTF-8, comma separator, dot decimal).

    The header row must name ``sample_id, group, time, polyphenols, frap``;
    every remaining column must be a known fatty-acid or aggregate name.
    Raises :class:`DataFormatError` for unknown group/time tokens, negative
    concentrations, duplicate sample ids, or an unknown column.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("empty chemistry table") from None
    header = [h.strip() for h in header]

    for column in _REQUIRED_COLUMNS:
        if column not in header:
            raise DataFormatError(f"chemistry table is missing column {column!r}")
    fatty_columns = [c for c in header if c not in _REQUIRED_COLUMNS]
    unknown = [c for c in fatty_columns if c not in FATTY_ACID_VOCABULARY]
    if unknown:
        raise DataFormatError(f"unknown fatty-acid column(s): {', '.join(unknown)}")

    index = {name: header.index(name) for name in header}
    panels = []
    seen_ids = set()
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DataFormatError(
                f"line {line_no}: expected {len(header)} cells, got {len(row)}"
            )
        sample_id = row[index["sample_id"]].strip()
        if not sample_id:
            raise DataFormatError(f"line {line_no}: empty sample_id")
        if sample_id in seen_ids:
            raise DataFormatError(f"line {line_no}: duplicate sample_id {sample_id!r}")
        seen_ids.add(sample_id)

        missing = set()
        polyphenols, poly_missing = _parse_cell(row[index["polyphenols"]], "polyphenols", line_no)
        if poly_missing:
            missing.add("polyphenols")
        frap, frap_missing = _parse_cell(row[index["frap"]], "frap", line_no)
        if frap_missing:
            missing.add("frap")

        fatty_acids = {}
        for column in fatty_columns:
            value, is_missing = _parse_cell(row[index[column]], column, line_no)
            fatty_acids[column] = value
            if is_missing:
                missing.add(column)

        panels.append(
            ChemistryPanel(
                sample_id=sample_id,
                cow_group=_parse_group(row[index["group"]], line_no),
                time=_parse_time(row[index["time"]], line_no),
                polyphenols=polyphenols,
                frap=frap,
                fatty_acids=fatty_acids,
                missing=frozenset(missing),
            )
        )
    return panels


def read_chemistry_csv(path: str) -> list[ChemistryPanel]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_chemistry_table(fh.read())
