"""
Dense tensor and mask primitives shared by every WSFL app.

Feature grids are ``(h, w, d)`` float32 arrays in row-major ``(y, x, c)``
order; masks are ``(h, w)`` arrays. Boxes use canonical ``(x1, y1, x2, y2)``
storage and are half-open: pixel ``(x, y)`` is inside iff
``x1 <= x < x2`` and ``y1 <= y < y2``.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import ndimage

from .exceptions import InvalidInputError

# 8-connectivity structuring element for component labelling
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def _frozen(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ImageDims:
    height: int
    width: int

    def __post_init__(self):
        if int(self.height) != self.height or int(self.width) != self.width:
            raise InvalidInputError(f'image dims must be integers, got {self.height}x{self.width}')
        if self.height < 1 or self.width < 1:
            raise InvalidInputError(f'image dims must be >= 1, got {self.height}x{self.width}')
        object.__setattr__(self, 'height', int(self.height))
        object.__setattr__(self, 'width', int(self.width))

    @property
    def shape(self):
        return (self.height, self.width)


@dataclass(frozen=True)
class BBox:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        coords = (self.x1, self.y1, self.x2, self.y2)
        for value in coords:
            if not math.isfinite(value):
                raise InvalidInputError(f'box coordinates must be finite, got {coords}')
            if value < 0:
                raise InvalidInputError(f'box coordinates must be non-negative, got {coords}')
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise InvalidInputError(
                f'box {coords} is not in (x1, y1, x2, y2) order with x1 < x2 and y1 < y2'
            )
        for name, value in zip(('x1', 'y1', 'x2', 'y2'), coords):
            object.__setattr__(self, name, float(value))

    @classmethod
    def full(cls, dims: ImageDims) -> 'BBox':
        return cls(0.0, 0.0, float(dims.width), float(dims.height))

    @classmethod
    def from_list(cls, values) -> 'BBox':
        if len(values) != 4:
            raise InvalidInputError(f'a box needs 4 coordinates, got {len(values)}')
        return cls(*(float(v) for v in values))

    @property
    def width(self):
        return self.x2 - self.x1

    @property
    def height(self):
        return self.y2 - self.y1

    @property
    def area(self):
        return self.width * self.height

    def as_list(self):
        return [self.x1, self.y1, self.x2, self.y2]

    def raster_key(self):
        """Sort key placing boxes in raster order of their corners."""
        return (self.y1, self.x1, self.y2, self.x2)

    def within(self, dims: ImageDims) -> bool:
        return self.x2 <= dims.width and self.y2 <= dims.height


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """A per-image ``h x w x d`` descriptor grid."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float32, order='C')
        if values.ndim != 3:
            raise InvalidInputError(f'feature map must be 3-D (h, w, d), got shape {values.shape}')
        if min(values.shape) < 1:
            raise InvalidInputError(f'feature map dims must be >= 1, got {values.shape}')
        if not np.all(np.isfinite(values)):
            raise InvalidInputError('feature map contains non-finite values')
        object.__setattr__(self, 'values', _frozen(values))

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def depth(self):
        return self.values.shape[2]

    @property
    def grid(self):
        return (self.height, self.width)

    def positions(self) -> np.ndarray:
        """All descriptors as a ``(h*w, d)`` float64 matrix in raster order."""
        return self.values.reshape(-1, self.depth).astype(np.float64)


@dataclass(frozen=True, eq=False)
class ProbMask:
    """Foreground probabilities in [0, 1], optionally with their logits."""

    values: np.ndarray
    logits: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order='C')
        if values.ndim != 2:
            raise InvalidInputError(f'mask must be 2-D, got shape {values.shape}')
        if not np.all(np.isfinite(values)):
            raise InvalidInputError('mask contains non-finite values')
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise InvalidInputError('mask values must lie in [0, 1]')
        object.__setattr__(self, 'values', _frozen(values))
        if self.logits is not None:
            logits = np.array(self.logits, dtype=np.float64, order='C')
            if logits.shape != values.shape:
                raise InvalidInputError('logits and probabilities differ in shape')
            object.__setattr__(self, 'logits', _frozen(logits))

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True, eq=False)
class BinaryMask:
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values)
        if values.ndim != 2:
            raise InvalidInputError(f'mask must be 2-D, got shape {values.shape}')
        if values.dtype != bool:
            if not np.all((values == 0) | (values == 1)):
                raise InvalidInputError('binary mask values must be 0 or 1')
            values = values.astype(bool)
        object.__setattr__(self, 'values', _frozen(np.ascontiguousarray(values)))

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def count(self) -> int:
        return int(self.values.sum())


@dataclass(frozen=True, eq=False)
class Component:
    """One 8-connected foreground region; pixels listed in raster order."""

    label: int
    ys: np.ndarray
    xs: np.ndarray

    @property
    def size(self) -> int:
        return int(self.ys.size)

    @property
    def bbox(self) -> BBox:
        return BBox(
            float(self.xs.min()), float(self.ys.min()),
            float(self.xs.max() + 1), float(self.ys.max() + 1),
        )

    def pixels(self):
        return set(zip(self.ys.tolist(), self.xs.tolist()))


def _axis_samples(n_in, n_out):
    coords = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    coords = np.clip(coords, 0.0, n_in - 1)
    lo = np.floor(coords).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, coords - lo


def bilinear_upsample(mask: ProbMask, target: ImageDims) -> ProbMask:
    """Resize ``mask`` to ``target`` with half-pixel-center bilinear sampling."""
    values = mask.values
    if values.size == 0:
        raise InvalidInputError('cannot upsample an empty mask')

    y0, y1, fy = _axis_samples(values.shape[0], target.height)
    x0, x1, fx = _axis_samples(values.shape[1], target.width)

    top_left = values[np.ix_(y0, x0)]
    top = top_left + (values[np.ix_(y0, x1)] - top_left) * fx
    bottom_left = values[np.ix_(y1, x0)]
    bottom = bottom_left + (values[np.ix_(y1, x1)] - bottom_left) * fx
    out = top + (bottom - top) * fy[:, None]

    # lerp rounding may step an ulp outside the input range
    np.clip(out, values.min(), values.max(), out=out)
    return ProbMask(out)


def binarize(mask: ProbMask, threshold: float) -> BinaryMask:
    if not (0.0 <= threshold <= 1.0):
        raise InvalidInputError(f'threshold must lie in [0, 1], got {threshold}')
    return BinaryMask(mask.values >= threshold)


def connected_components(mask: BinaryMask) -> List[Component]:
    """8-connected components ordered by the raster position of their first pixel."""
    labels, count = ndimage.label(mask.values, structure=EIGHT_CONNECTED)
    if count == 0:
        return []

    flat = labels.ravel()
    label_ids, first_index = np.unique(flat, return_index=True)
    foreground = label_ids != 0
    ordered = label_ids[foreground][np.argsort(first_index[foreground], kind='stable')]

    sizes = np.bincount(flat, minlength=count + 1)
    ends = np.cumsum(sizes)
    grouped = np.argsort(flat, kind='stable')
    width = mask.width

    components = []
    for rank, label_id in enumerate(ordered, start=1):
        pixels = grouped[ends[label_id - 1]:ends[label_id]]
        ys, xs = np.divmod(pixels, width)
        components.append(Component(label=rank, ys=ys, xs=xs))
    return components


def largest_component(mask: BinaryMask) -> Optional[Component]:
    components = connected_components(mask)
    if not components:
        return None
    # max() keeps the first of equal sizes, i.e. the earliest in raster order
    return max(components, key=lambda component: component.size)


def largest_component_bbox(mask: BinaryMask) -> Optional[BBox]:
    component = largest_component(mask)
    return component.bbox if component is not None else None
