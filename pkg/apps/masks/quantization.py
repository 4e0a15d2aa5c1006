"""
Box annotations to high- and low-resolution binary foreground masks.

A low-resolution cell ``(gy, gx)`` owns the integer pixels with
``gx * W / w <= x < (gx + 1) * W / w`` (same for y). It is foreground when at
least half of those pixels lie inside the union of the boxes.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, BinaryMask, ImageDims

logger = logging.getLogger(__name__)

MODE_DDT = 'ddt'
MODE_GT = 'gt'
MODES = (MODE_DDT, MODE_GT)


@dataclass(frozen=True)
class MaskGrid:
    height: int
    width: int
    image: ImageDims

    def __post_init__(self):
        if not (1 <= self.height <= self.image.height and 1 <= self.width <= self.image.width):
            raise InvalidInputError(
                f'grid {self.height}x{self.width} must be between 1x1 and the image '
                f'{self.image.height}x{self.image.width}'
            )


class MaskJob(NamedTuple):
    """One image's input to :func:`generate_training_masks`."""

    grid: Tuple[int, int]
    image: ImageDims
    boxes: Sequence[BBox]
    image_id: str = ''


def _check_boxes(boxes, image: ImageDims):
    for box in boxes:
        if not box.within(image):
            raise InvalidInputError(
                f'box {box.as_list()} exceeds image {image.width}x{image.height}'
            )


def boxes_to_hr_mask(boxes: Iterable[BBox], image: ImageDims) -> BinaryMask:
    """Pixel ``(x, y)`` is set iff ``x1 <= x < x2`` and ``y1 <= y < y2`` for some box."""
    boxes = list(boxes)
    _check_boxes(boxes, image)
    mask = np.zeros(image.shape, dtype=bool)
    for box in boxes:
        mask[math.ceil(box.y1):math.ceil(box.y2), math.ceil(box.x1):math.ceil(box.x2)] = True
    return BinaryMask(mask)


def _cell_index(pixels, cells):
    # floor(x * cells / pixels) in exact integer arithmetic
    return (np.arange(pixels) * cells) // pixels


def boxes_to_lr_mask(boxes: Iterable[BBox], grid: MaskGrid) -> BinaryMask:
    hr = boxes_to_hr_mask(boxes, grid.image).values

    rows = _cell_index(grid.image.height, grid.height)
    cols = _cell_index(grid.image.width, grid.width)
    row_pixels = np.bincount(rows, minlength=grid.height)
    col_pixels = np.bincount(cols, minlength=grid.width)

    cells = (rows[:, None] * grid.width + cols[None, :]).ravel()
    covered = np.bincount(cells[hr.ravel()], minlength=grid.height * grid.width)
    covered = covered.reshape(grid.height, grid.width)
    total = np.outer(row_pixels, col_pixels)
    return BinaryMask(2 * covered >= total)


def generate_training_masks(jobs, mode: str = MODE_DDT) -> List[BinaryMask]:
    """One low-resolution mask per image at that image's feature grid."""
    if mode not in MODES:
        raise InvalidInputError(f'unknown mask mode {mode!r}; expected one of {MODES}')
    masks = []
    for job in jobs:
        job = job if isinstance(job, MaskJob) else MaskJob(*job)
        if not job.boxes:
            raise InvalidInputError(f'image {job.image_id or "?"} has no boxes in {mode} mode')
        if mode == MODE_DDT and len(job.boxes) != 1:
            logger.warning('image %s has %d pseudo boxes; pseudo supervision expects one',
                           job.image_id, len(job.boxes))
        grid = MaskGrid(job.grid[0], job.grid[1], job.image)
        masks.append(boxes_to_lr_mask(job.boxes, grid))
    return masks
