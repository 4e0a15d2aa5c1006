"""
Records consumed by the evaluation protocol.
"""
import math
from dataclasses import dataclass
from typing import Tuple

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, ImageDims


@dataclass(frozen=True)
class GroundTruthRecord:
    image_id: str
    dims: ImageDims
    label: str
    boxes: Tuple[BBox, ...]

    def __post_init__(self):
        object.__setattr__(self, 'boxes', tuple(self.boxes))
        if not self.boxes:
            raise InvalidInputError(f'image {self.image_id} has no ground-truth boxes')
        for box in self.boxes:
            if not box.within(self.dims):
                raise InvalidInputError(
                    f'image {self.image_id}: box {box.as_list()} exceeds image '
                    f'{self.dims.width}x{self.dims.height}'
                )


@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    label: str
    score: float
    box: BBox

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise InvalidInputError(f'detection on {self.image_id} has a non-finite score')


@dataclass(frozen=True)
class ClsFlag:
    image_id: str
    top1_correct: bool
