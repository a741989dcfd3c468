"""Frame sequences, Middlebury ``.flo`` flow files and binary masks."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

FLO_MAGIC = np.float32(202021.25)
FRAME_SUFFIXES = (".png", ".ppm")
_NUMBER = re.compile(r"(\d+)")


class DataError(Exception):
    """Input data that cannot be used (missing, unreadable or inconsistent)."""


def _frame_number(path: Path) -> int | None:
    found = _NUMBER.findall(path.stem)
    return int(found[-1]) if found else None


def numbered_files(directory, suffixes=FRAME_SUFFIXES) -> list[Path]:
    """Files in ``directory`` carrying a number in their stem, sorted numerically."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"not a directory: {directory}")
    entries = []
    for p in directory.iterdir():
        if p.is_file() and p.suffix.lower() in suffixes:
            n = _frame_number(p)
            if n is not None:
                entries.append((n, p))
    entries.sort(key=lambda e: e[0])
    numbers = [n for n, _ in entries]
    if len(set(numbers)) != len(numbers):
        raise DataError(f"duplicate frame numbers in {directory}")
    return [p for _, p in entries]


def read_frame(path) -> np.ndarray:
    """Read an 8-bit PNG/PPM as an ``(H, W, 3)`` float64 array in [0, 1]."""
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    except (OSError, ValueError) as exc:
        raise DataError(f"unreadable frame {path}: {exc}") from exc
    return arr / 255.0


def write_frame(frame: np.ndarray, path) -> None:
    arr = np.clip(np.rint(np.asarray(frame) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path)


def load_frame_sequence(directory) -> list[np.ndarray]:
    files = numbered_files(directory)
    if len(files) == 0:
        raise DataError(f"no numbered frames in {directory}")
    if len(files) < 2:
        raise DataError(f"need >= 2 frames, found {len(files)} in {directory}")
    frames = [read_frame(p) for p in files]
    shape = frames[0].shape
    for p, f in zip(files, frames):
        if f.shape != shape:
            raise DataError(f"dimension mismatch: {p.name} is {f.shape[1]}x{f.shape[0]}, "
                            f"expected {shape[1]}x{shape[0]}")
    if shape[0] < 8 or shape[1] < 8:
        raise DataError(f"frames must be at least 8x8, got {shape[1]}x{shape[0]}")
    return frames


def read_flo(path) -> np.ndarray:
    """Read a Middlebury ``.flo`` file into an ``(H, W, 2)`` float32 array of (u, v)."""
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise DataError(f"{path}: truncated header")
    magic = np.frombuffer(data, "<f4", count=1)[0]
    if magic != FLO_MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    width, height = (int(x) for x in np.frombuffer(data, "<i4", count=2, offset=4))
    if width <= 0 or height <= 0:
        raise DataError(f"{path}: invalid dimensions {width}x{height}")
    expected = 12 + 8 * width * height
    if len(data) < expected:
        raise DataError(f"{path}: truncated payload ({len(data)} of {expected} bytes)")
    flow = np.frombuffer(data, "<f4", count=2 * width * height, offset=12)
    flow = flow.reshape(height, width, 2).astype(np.float32)
    if not np.all(np.isfinite(flow)):
        raise DataError(f"{path}: non-finite flow values")
    return flow


def write_flo(flow: np.ndarray, path) -> None:
    flow = np.asarray(flow)
    if flow.ndim != 3 or flow.shape[2] != 2:
        raise ValueError(f"flow must be (H, W, 2), got {flow.shape}")
    height, width = flow.shape[:2]
    with open(path, "wb") as fh:
        fh.write(FLO_MAGIC.astype("<f4").tobytes())
        fh.write(np.array([width, height], dtype="<i4").tobytes())
        fh.write(np.ascontiguousarray(flow, dtype="<f4").tobytes())


def write_mask(mask: np.ndarray, path) -> None:
    """Write a binary mask as an 8-bit single-channel image (0 / 255)."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    if not np.all((mask == 0) | (mask == 1)):
        raise ValueError("mask values must be 0 or 1")
    img = Image.fromarray(mask.astype(np.uint8) * 255, mode="L")
    try:
        img.save(path)
    except OSError as exc:
        raise DataError(f"cannot write mask {path}: {exc}") from exc


def read_mask(path) -> np.ndarray:
    """Read a mask image; any nonzero gray value counts as foreground."""
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("L"))
    except (OSError, ValueError) as exc:
        raise DataError(f"unreadable mask {path}: {exc}") from exc
    return (arr > 127).astype(np.uint8)


def load_mask_sequence(directory) -> dict[int, np.ndarray]:
    """Masks keyed by the frame number embedded in each filename."""
    return {_frame_number(p): read_mask(p) for p in numbered_files(directory, (".png", ".pgm", ".ppm"))}


def write_gray16(values: np.ndarray, path) -> None:
    arr = np.asarray(values)
    if arr.min(initial=0) < 0 or arr.max(initial=0) > 65535:
        raise ValueError("values out of 16-bit range")
    Image.fromarray(arr.astype(np.uint16)).save(path)


def write_gray(values: np.ndarray, path) -> None:
    """Write a [0, 1] real grid as an 8-bit grayscale debug image."""
    arr = np.clip(np.rint(np.asarray(values, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)
