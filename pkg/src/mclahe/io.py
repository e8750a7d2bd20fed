"""NPY (v1.0/v2.0) and headerless raw binary array files."""

from __future__ import annotations

import ast
import os
import struct
from dataclasses import dataclass

import numpy as np

from .core import as_image

MAGIC = b"\x93NUMPY"
SUPPORTED_DTYPES = ("f4", "f8", "u1", "u2", "i2", "i4")


class NpyFormatError(ValueError):
    """Base class for malformed or unsupported array files."""


class BadMagicError(NpyFormatError):
    pass


class UnsupportedVersionError(NpyFormatError):
    pass


class UnsupportedDtypeError(NpyFormatError):
    pass


class FortranOrderError(NpyFormatError):
    pass


class TruncatedPayloadError(NpyFormatError):
    pass


@dataclass(frozen=True)
class ArrayFileMeta:
    dtype_code: str
    fortran_order: bool
    shape: tuple[int, ...]

    def __post_init__(self):
        if self.dtype_code not in SUPPORTED_DTYPES:
            raise UnsupportedDtypeError(f"unsupported dtype {self.dtype_code!r}")
        if any(int(s) <= 0 for s in self.shape):
            raise NpyFormatError(f"shape entries must be positive, got {self.shape}")

    @property
    def numpy_dtype(self) -> np.dtype:
        return np.dtype("<" + self.dtype_code)

    @property
    def nbytes(self) -> int:
        return self.numpy_dtype.itemsize * int(np.prod(self.shape, dtype=np.int64))


def _parse_descr(descr: str) -> str:
    if not isinstance(descr, str) or len(descr) < 2:
        raise UnsupportedDtypeError(f"unsupported dtype {descr!r}")
    order, code = descr[0], descr[1:]
    if code not in SUPPORTED_DTYPES:
        raise UnsupportedDtypeError(f"unsupported dtype {descr!r}")
    single_byte = np.dtype(code).itemsize == 1
    if order == "<" or (order == "|" and single_byte) or (order == ">" and single_byte):
        return code
    raise UnsupportedDtypeError(f"unsupported byte order in dtype {descr!r}")


def read_npy_header(fh) -> tuple[ArrayFileMeta, int]:
    """Parse the header of an open NPY file; returns the metadata and header size."""
    magic = fh.read(6)
    if magic != MAGIC:
        raise BadMagicError(f"not an NPY file (magic {magic!r})")
    version = tuple(fh.read(2))
    if version == (1, 0):
        (hlen,) = struct.unpack("<H", fh.read(2))
        start = 10
    elif version == (2, 0):
        (hlen,) = struct.unpack("<I", fh.read(4))
        start = 12
    else:
        raise UnsupportedVersionError(f"unsupported NPY version {version}")
    raw = fh.read(hlen)
    if len(raw) != hlen:
        raise TruncatedPayloadError("header shorter than its declared length")
    try:
        header = ast.literal_eval(raw.decode("latin1"))
    except (SyntaxError, ValueError) as exc:
        raise NpyFormatError(f"unreadable header: {exc}") from None
    if not isinstance(header, dict) or not {"descr", "fortran_order", "shape"} <= header.keys():
        raise NpyFormatError("header must define descr, fortran_order and shape")
    if header["fortran_order"]:
        raise FortranOrderError("Fortran-ordered arrays are not supported")
    shape = tuple(int(s) for s in header["shape"])
    if not shape:
        raise NpyFormatError("zero-rank arrays are not supported")
    meta = ArrayFileMeta(_parse_descr(header["descr"]), False, shape)
    return meta, start + hlen


def read_npy(path) -> tuple[np.ndarray, ArrayFileMeta]:
    """Read an NPY file into a float64 array."""
    with open(path, "rb") as fh:
        meta, _ = read_npy_header(fh)
        payload = fh.read()
    if len(payload) != meta.nbytes:
        raise TruncatedPayloadError(
            f"payload has {len(payload)} bytes, expected {meta.nbytes}"
        )
    data = np.frombuffer(payload, dtype=meta.numpy_dtype).reshape(meta.shape)
    return as_image(data), meta


def _encode(image, dtype_code: str) -> np.ndarray:
    if dtype_code not in SUPPORTED_DTYPES:
        raise UnsupportedDtypeError(f"unsupported dtype {dtype_code!r}")
    arr = np.asarray(image)
    dtype = np.dtype("<" + dtype_code)
    if dtype.kind in "iu":
        info = np.iinfo(dtype)
        rounded = np.rint(arr.astype(np.float64))
        if rounded.size and (rounded.min() < info.min or rounded.max() > info.max):
            raise ValueError(
                f"values [{rounded.min()}, {rounded.max()}] out of range for {dtype_code}"
            )
        return np.ascontiguousarray(rounded.astype(dtype))
    return np.ascontiguousarray(arr.astype(dtype))


def npy_bytes(image, dtype_code: str = "f8") -> bytes:
    """Serialize ``image`` as an NPY v1.0 file."""
    arr = _encode(image, dtype_code)
    shape = "(" + "".join(f"{s}, " for s in arr.shape)
    shape = shape[:-2] + ",)" if arr.ndim == 1 else shape[:-2] + ")"
    descr = "|u1" if dtype_code == "u1" else "<" + dtype_code
    header = f"{{'descr': '{descr}', 'fortran_order': False, 'shape': {shape}, }}"
    # magic(6) + version(2) + length(2) + header + newline, padded to 64 bytes
    pad = -(10 + len(header) + 1) % 64
    header = (header + " " * pad + "\n").encode("latin1")
    return MAGIC + bytes((1, 0)) + struct.pack("<H", len(header)) + header + arr.tobytes()


def write_npy(path, image, dtype_code: str = "f8") -> None:
    data = npy_bytes(image, dtype_code)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def read_raw(path, meta: ArrayFileMeta) -> np.ndarray:
    """Read headerless row-major binary data described by ``meta``."""
    if meta.fortran_order:
        raise FortranOrderError("Fortran-ordered raw data is not supported")
    size = os.path.getsize(path)
    if size != meta.nbytes:
        raise TruncatedPayloadError(f"raw file has {size} bytes, expected {meta.nbytes}")
    data = np.fromfile(path, dtype=meta.numpy_dtype).reshape(meta.shape)
    return as_image(data)
