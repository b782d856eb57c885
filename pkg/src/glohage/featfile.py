"""GFV1 feature file format.

Binary layout: 4-byte ASCII magic "GFV1", uint32-LE row count N, uint32-LE
dimension K, then N*K float32-LE values, row-major. Row order matches the
manifest order used at extraction time.
"""

import struct

import numpy as np

from .errors import MalformedHeaderError, MissingFileError, TruncatedPixelDataError

MAGIC = b"GFV1"


def write_features(path, rows):
    """Write an (N, K) float array as a GFV1 file."""
    arr = np.ascontiguousarray(rows, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"expected 2-D array, got shape {arr.shape}")
    n, k = arr.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", n, k))
        fh.write(arr.tobytes())


def read_features(path):
    """Read a GFV1 file into an (N, K) float32 array."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        raise MissingFileError(f"no such file: {path}")
    if len(data) < 12 or data[:4] != MAGIC:
        raise MalformedHeaderError(f"not a GFV1 file: {path}")
    n, k = struct.unpack("<II", data[4:12])
    need = 12 + 4 * n * k
    if len(data) < need:
        raise TruncatedPixelDataError(
            f"GFV1 body too short: need {need} bytes, found {len(data)}"
        )
    return np.frombuffer(data[12:need], dtype="<f4").reshape(n, k).copy()
