"""ENVI header/cube I/O and region-of-interest extraction.

The on-disk format is the instrument-native pair of a text header ("ENVI"
magic, ``key = value`` lines, brace-delimited lists) and a raw binary
payload in band-sequential (bsq), band-interleaved-by-line (bil) or
band-interleaved-by-pixel (bip) order. In memory every cube is held in one
canonical (line, sample, band) float array so downstream math never cares
about the source interleave.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from milkspec.errors import DataFormatError

# ENVI code -> numpy dtype character (endianness prefixed at read time)
DATA_TYPES = {4: "f4", 12: "u2"}
INTERLEAVES = ("bsq", "bil", "bip")

# payload extensions probed when reading a <stem>.hdr from disk
_PAYLOAD_EXTENSIONS = ("", ".img", ".raw", ".dat", ".bsq", ".bil", ".bip")


@dataclass(frozen=True)
class WavelengthGrid:
    """Strictly increasing band-center wavelengths in nanometres."""

    wavelengths_nm: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "wavelengths_nm", tuple(float(w) for w in self.wavelengths_nm))
        wl = self.wavelengths_nm
        if any(w <= 0 for w in wl):
            raise DataFormatError("wavelengths must be positive")
        if any(b <= a for a, b in zip(wl, wl[1:])):
            raise DataFormatError("wavelengths must be strictly increasing")

    def __len__(self):
        return len(self.wavelengths_nm)


@dataclass(frozen=True)
class EnviHeader:
    samples: int
    lines: int
    bands: int
    data_type: int = 4
    interleave: str = "bsq"
    byte_order: int = 0
    header_offset: int = 0
    wavelengths: WavelengthGrid | None = None
    # unknown header keys are preserved verbatim so writes can round-trip them
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if min(self.samples, self.lines, self.bands) < 1:
            raise DataFormatError("samples, lines and bands must all be >= 1")
        if self.data_type not in DATA_TYPES:
            raise DataFormatError(
                f"unsupported data type {self.data_type} (supported: {sorted(DATA_TYPES)})"
            )
        if self.interleave not in INTERLEAVES:
            raise DataFormatError(f"unsupported interleave {self.interleave!r}")
        if self.byte_order not in (0, 1):
            raise DataFormatError(f"byte order must be 0 or 1, got {self.byte_order}")
        if self.wavelengths is not None and len(self.wavelengths) != self.bands:
            raise DataFormatError(
                f"wavelength count {len(self.wavelengths)} != bands {self.bands}"
            )

    @property
    def dtype(self) -> np.dtype:
        prefix = "<" if self.byte_order == 0 else ">"
        return np.dtype(prefix + DATA_TYPES[self.data_type])

    @property
    def payload_size(self) -> int:
        return self.lines * self.samples * self.bands * self.dtype.itemsize


@dataclass(frozen=True)
class HyperCube:
    """A reflectance cube in canonical (line, sample, band) order."""

    header: EnviHeader
    values: np.ndarray

    def __post_init__(self):
        expected = (self.header.lines, self.header.samples, self.header.bands)
        if self.values.shape != expected:
            raise DataFormatError(
                f"cube shape {self.values.shape} does not match header {expected}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DataFormatError("cube contains non-finite values")


@dataclass(frozen=True)
class Roi:
    """Axis-aligned square region: top-left corner plus side length."""

    row0: int
    col0: int
    side: int


@dataclass(frozen=True)
class RoiSpectrum:
    sample_id: str
    mean_reflectance: np.ndarray
    pixel_count: int


def _split_header_statements(text: str) -> list[tuple[str, str]]:
    """Split header text into (key, value) pairs, joining brace lists that
    span multiple lines."""
    pairs = []
    pending_key = None
    pending_value: list[str] = []
    for line in text.splitlines()[1:]:
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if pending_key is not None:
            pending_value.append(line)
            if "}" in line:
                pairs.append((pending_key, " ".join(pending_value)))
                pending_key, pending_value = None, []
            continue
        if "=" not in line:
            continue
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if "{" in value and "}" not in value:
            pending_key, pending_value = key, [value]
        else:
            pairs.append((key, value))
    if pending_key is not None:
        raise DataFormatError(f"unterminated brace list for header key {pending_key!r}")
    return pairs


def parse_envi_header(text: str) -> EnviHeader:
    """Parse ENVI header text into a validated :class:`EnviHeader`.

    Raises :class:`DataFormatError` for a missing "ENVI" magic line, missing
    samples/lines/bands, an unsupported data type or interleave, or a
    wavelength list whose length differs from the band count. Keys this
    reader does not interpret are kept verbatim in ``header.extra``.
    """
    if not text.strip():
        raise DataFormatError("empty header text")
    first = text.splitlines()[0].strip()
    if first != "ENVI":
        raise DataFormatError('header must start with the "ENVI" magic line')

    fields: dict[str, str] = {}
    for key, value in _split_header_statements(text):
        fields[key] = value

    def take_int(key, default=None):
        if key not in fields:
            if default is None:
                raise DataFormatError(f"header is missing required key {key!r}")
            return default
        raw = fields.pop(key)
        try:
            return int(raw)
        except ValueError:
            raise DataFormatError(f"header key {key!r} is not an integer: {raw!r}") from None

    samples = take_int("samples")
    lines = take_int("lines")
    bands = take_int("bands")
    data_type = take_int("data type")
    header_offset = take_int("header offset", 0)
    byte_order = take_int("byte order", 0)
    interleave = fields.pop("interleave", "bsq").strip().lower()

    wavelengths = None
    if "wavelength" in fields:
        raw = fields.pop("wavelength").strip()
        if not (raw.startswith("{") and raw.endswith("}")):
            raise DataFormatError("wavelength list must be brace-delimited")
        tokens = [t for t in raw[1:-1].replace("\n", " ").split(",") if t.strip()]
        try:
            values = tuple(float(t) for t in tokens)
        except ValueError:
            raise DataFormatError("wavelength list contains a non-numeric entry") from None
        wavelengths = WavelengthGrid(values)

    return EnviHeader(
        samples=samples,
        lines=lines,
        bands=bands,
        data_type=data_type,
        interleave=interleave,
        byte_order=byte_order,
        header_offset=header_offset,
        wavelengths=wavelengths,
        extra=dict(fields),
    )


def _to_canonical(arr: np.ndarray, interleave: str, header: EnviHeader) -> np.ndarray:
    l, s, b = header.lines, header.samples, header.bands
    if interleave == "bsq":  # disk order (band, line, sample)
        return arr.reshape(b, l, s).transpose(1, 2, 0)
    if interleave == "bil":  # disk order (line, band, sample)
        return arr.reshape(l, b, s).transpose(0, 2, 1)
    return arr.reshape(l, s, b)  # bip is already canonical


def _from_canonical(values: np.ndarray, interleave: str) -> np.ndarray:
    if interleave == "bsq":
        return values.transpose(2, 0, 1)
    if interleave == "bil":
        return values.transpose(0, 2, 1)
    return values


def read_cube(header: EnviHeader, raw: bytes) -> HyperCube:
    """Decode a raw payload into a canonical cube.

    Integer payloads are promoted to reals unscaled; if the header carries a
    "reflectance scale factor" the values are divided by it and the key is
    dropped from the returned header (the values are plain reflectance
    afterwards, so writing the cube back out must not rescale).
    """
    expected = header.header_offset + header.payload_size
    if len(raw) != expected:
        raise DataFormatError(
            f"payload is {len(raw)} bytes, expected {expected} "
            f"(offset {header.header_offset} + data {header.payload_size})"
        )
    flat = np.frombuffer(raw, dtype=header.dtype, offset=header.header_offset)
    values = _to_canonical(flat, header.interleave, header).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise DataFormatError("payload contains non-finite values")

    extra = dict(header.extra)
    scale = extra.pop("reflectance scale factor", None)
    if scale is not None:
        values = values / float(scale)

    out_header = EnviHeader(
        samples=header.samples,
        lines=header.lines,
        bands=header.bands,
        data_type=header.data_type,
        interleave=header.interleave,
        byte_order=header.byte_order,
        header_offset=0,
        wavelengths=header.wavelengths,
        extra=extra,
    )
    return HyperCube(out_header, values)


def write_cube(cube: HyperCube, interleave: str | None = None) -> tuple[str, bytes]:
    """Serialize a cube to (header text, payload bytes).

    The payload is written in the cube's data type; values that the type
    cannot represent exactly (e.g. fractional values with uint16) raise,
    since a lossy write would break the read/write round trip.
    """
    header = cube.header
    interleave = header.interleave if interleave is None else interleave
    if interleave not in INTERLEAVES:
        raise DataFormatError(f"unsupported interleave {interleave!r}")

    dtype = np.dtype(("<" if header.byte_order == 0 else ">") + DATA_TYPES[header.data_type])
    disk = np.ascontiguousarray(_from_canonical(cube.values, interleave))
    if header.data_type == 12:
        if not np.array_equal(disk, np.floor(disk)) or disk.min() < 0 or disk.max() > 0xFFFF:
            raise DataFormatError("values are not representable as uint16")
        payload = disk.astype(dtype).tobytes()
    else:
        payload = disk.astype(dtype).tobytes()

    lines = ["ENVI"]
    lines.append(f"samples = {header.samples}")
    lines.append(f"lines = {header.lines}")
    lines.append(f"bands = {header.bands}")
    lines.append("header offset = 0")
    lines.append(f"data type = {header.data_type}")
    lines.append(f"interleave = {interleave}")
    lines.append(f"byte order = {header.byte_order}")
    if header.wavelengths is not None:
        wl = ", ".join(repr(w) for w in header.wavelengths.wavelengths_nm)
        lines.append("wavelength = {" + wl + "}")
    for key, value in header.extra.items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n", payload


def read_cube_file(header_path: str) -> HyperCube:
    """Read a cube from a ``.hdr`` file, locating its payload by stem."""
    with open(header_path, "r", encoding="utf-8") as fh:
        header = parse_envi_header(fh.read())
    stem, _ = os.path.splitext(header_path)
    for ext in _PAYLOAD_EXTENSIONS:
        candidate = stem + ext
        if candidate != header_path and os.path.isfile(candidate):
            with open(candidate, "rb") as fh:
                return read_cube(header, fh.read())
    raise DataFormatError(f"no payload file found next to {header_path}")


def write_cube_files(cube: HyperCube, path_stem: str, interleave: str | None = None) -> tuple[str, str]:
    """Write ``<stem>.hdr`` and ``<stem>.img`` and return both paths."""
    text, payload = write_cube(cube, interleave)
    hdr_path, img_path = path_stem + ".hdr", path_stem + ".img"
    with open(hdr_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(img_path, "wb") as fh:
        fh.write(payload)
    return hdr_path, img_path


def extract_center_roi(lines: int, samples: int, side: int) -> Roi:
    """Centered square ROI; odd margins are split with the floor going first.

    Mirrors the acquisition protocol of cutting a fixed-size square from the
    central part of each sample frame.
    """
    if side < 1:
        raise DataFormatError("ROI side must be >= 1")
    if side > lines or side > samples:
        raise DataFormatError(
            f"ROI side {side} exceeds frame dimensions {lines}x{samples}"
        )
    return Roi(row0=(lines - side) // 2, col0=(samples - side) // 2, side=side)


def roi_mean_spectrum(cube: HyperCube, roi: Roi, sample_id: str) -> RoiSpectrum:
    """Per-band arithmetic mean over the ROI pixels."""
    if roi.side < 1:
        raise DataFormatError("empty ROI")
    if (
        roi.row0 < 0
        or roi.col0 < 0
        or roi.row0 + roi.side > cube.header.lines
        or roi.col0 + roi.side > cube.header.samples
    ):
        raise DataFormatError("ROI extends outside the cube")
    block = cube.values[roi.row0 : roi.row0 + roi.side, roi.col0 : roi.col0 + roi.side, :]
    return RoiSpectrum(
        sample_id=sample_id,
        mean_reflectance=block.mean(axis=(0, 1)),
        pixel_count=roi.side * roi.side,
    )


def extract_roi_block(cube: HyperCube, roi: Roi) -> np.ndarray:
    """The ROI as a (rows, cols, bands) view, for spatial noise estimation."""
    if (
        roi.row0 < 0
        or roi.col0 < 0
        or roi.row0 + roi.side > cube.header.lines
        or roi.col0 + roi.side > cube.header.samples
    ):
        raise DataFormatError("ROI extends outside the cube")
    return cube.values[roi.row0 : roi.row0 + roi.side, roi.col0 : roi.col0 + roi.side, :]
