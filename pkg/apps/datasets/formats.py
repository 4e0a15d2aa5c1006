"""
Binary containers.

WSFT (feature grids, and masks with d = 1)::

    b'WSFT' | u16 version | u32 h | u32 w | u32 d | h*w*d float32     (little-endian)

WSFH (pixel head checkpoints)::

    b'WSFH' | u16 version | u32 d | (d + 1) float64, weights then bias
"""
import struct
from pathlib import Path

import numpy as np

from apps.core.exceptions import FormatError
from apps.core.tensors import BinaryMask, FeatureMap, ProbMask
from apps.training.head import PixelHead

FEATURE_MAGIC = b'WSFT'
HEAD_MAGIC = b'WSFH'
FORMAT_VERSION = 1

FEATURE_HEADER = struct.Struct('<4sHIII')
HEAD_HEADER = struct.Struct('<4sHI')


def _check_header(data, header, magic, path):
    if len(data) < len(magic):
        raise FormatError('file too short for magic bytes', path=path, offset=len(data))
    if data[:len(magic)] != magic:
        raise FormatError(f'bad magic {data[:len(magic)]!r}, expected {magic!r}', path=path, offset=0)
    if len(data) < header.size:
        raise FormatError('truncated header', path=path, offset=len(data))
    fields = header.unpack_from(data)
    if fields[1] != FORMAT_VERSION:
        raise FormatError(f'unsupported version {fields[1]}', path=path, offset=len(magic))
    return fields


def _check_payload(data, expected, path):
    if len(data) < expected:
        raise FormatError(f'truncated payload, expected {expected} bytes', path=path, offset=len(data))
    if len(data) > expected:
        raise FormatError('unexpected trailing bytes', path=path, offset=expected)


def _first_non_finite(values, header_size, item_size, path):
    bad = ~np.isfinite(values)
    if bad.any():
        index = int(np.argmax(bad))
        raise FormatError('non-finite value', path=path, offset=header_size + item_size * index)


def feature_bytes(features: FeatureMap) -> bytes:
    header = FEATURE_HEADER.pack(FEATURE_MAGIC, FORMAT_VERSION, *features.values.shape)
    return header + features.values.astype('<f4').tobytes()


def parse_feature_bytes(data: bytes, path=None) -> FeatureMap:
    _, _, height, width, depth = _check_header(data, FEATURE_HEADER, FEATURE_MAGIC, path)
    if min(height, width, depth) < 1:
        raise FormatError(f'dims must be >= 1, got {height}x{width}x{depth}', path=path,
                          offset=len(FEATURE_MAGIC) + 2)
    count = height * width * depth
    _check_payload(data, FEATURE_HEADER.size + 4 * count, path)
    values = np.frombuffer(data, dtype='<f4', count=count, offset=FEATURE_HEADER.size)
    _first_non_finite(values, FEATURE_HEADER.size, 4, path)
    return FeatureMap(values.reshape(height, width, depth))


def write_feature_file(path, features: FeatureMap):
    Path(path).write_bytes(feature_bytes(features))


def read_feature_file(path) -> FeatureMap:
    return parse_feature_bytes(Path(path).read_bytes(), path=path)


def write_mask_file(path, mask):
    """Store a ProbMask or BinaryMask as a WSFT container with d = 1."""
    values = np.asarray(mask.values, dtype=np.float32)
    write_feature_file(path, FeatureMap(values[:, :, None]))


def read_prob_mask(path) -> ProbMask:
    features = read_feature_file(path)
    if features.depth != 1:
        raise FormatError(f'mask files have depth 1, got {features.depth}', path=path)
    values = features.values[:, :, 0]
    if values.min() < 0.0 or values.max() > 1.0:
        raise FormatError('mask values outside [0, 1]', path=path)
    return ProbMask(values)


def read_binary_mask(path) -> BinaryMask:
    values = read_prob_mask(path).values
    if not np.all((values == 0.0) | (values == 1.0)):
        raise FormatError('binary mask holds values other than 0 and 1', path=path)
    return BinaryMask(values == 1.0)


def head_bytes(head: PixelHead) -> bytes:
    header = HEAD_HEADER.pack(HEAD_MAGIC, FORMAT_VERSION, head.depth)
    return header + head.parameters().astype('<f8').tobytes()


def parse_head_bytes(data: bytes, path=None) -> PixelHead:
    _, _, depth = _check_header(data, HEAD_HEADER, HEAD_MAGIC, path)
    if depth < 1:
        raise FormatError('head depth must be >= 1', path=path, offset=len(HEAD_MAGIC) + 2)
    _check_payload(data, HEAD_HEADER.size + 8 * (depth + 1), path)
    parameters = np.frombuffer(data, dtype='<f8', count=depth + 1, offset=HEAD_HEADER.size)
    _first_non_finite(parameters, HEAD_HEADER.size, 8, path)
    return PixelHead.from_parameters(parameters)


def write_head_file(path, head: PixelHead):
    Path(path).write_bytes(head_bytes(head))


def read_head_file(path) -> PixelHead:
    return parse_head_bytes(Path(path).read_bytes(), path=path)


def read_feature_dims(path):
    """``(h, w, d)`` from the header alone."""
    with open(path, 'rb') as handle:
        data = handle.read(FEATURE_HEADER.size)
    _, _, height, width, depth = _check_header(data, FEATURE_HEADER, FEATURE_MAGIC, path)
    return height, width, depth
