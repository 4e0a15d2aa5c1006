"""
In-memory forms of the JSON-lines records.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, ImageDims
from apps.evaluation.records import ClsFlag, GroundTruthRecord


@dataclass(frozen=True)
class AnnotationRecord:
    """One image: dims, class label, optional GT boxes and top-1 flag.

    ``extra`` keeps fields this toolkit does not know about so that they
    survive a read/write cycle.
    """

    image_id: str
    dims: ImageDims
    label: str
    boxes: Tuple[BBox, ...] = ()
    top1_correct: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'boxes', tuple(self.boxes))

    def ground_truth(self) -> GroundTruthRecord:
        return GroundTruthRecord(self.image_id, self.dims, self.label, self.boxes)

    def cls_flag(self) -> ClsFlag:
        if self.top1_correct is None:
            raise InvalidInputError(f'image {self.image_id} has no top1_correct flag')
        return ClsFlag(self.image_id, self.top1_correct)

    def to_json(self) -> dict:
        payload = dict(self.extra)
        payload.update({
            'image_id': self.image_id,
            'width': self.dims.width,
            'height': self.dims.height,
            'label': self.label,
            'boxes': [box.as_list() for box in self.boxes],
        })
        if self.top1_correct is not None:
            payload['top1_correct'] = self.top1_correct
        return payload


@dataclass(frozen=True)
class Prediction:
    """A localization output line: one box per image."""

    image_id: str
    box: BBox
    mask_path: Optional[str] = None
    components: Tuple[BBox, ...] = ()
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        payload = dict(self.extra)
        payload.update({'image_id': self.image_id, 'box': self.box.as_list()})
        if self.mask_path is not None:
            payload['mask_path'] = self.mask_path
        if self.components:
            payload['components'] = [box.as_list() for box in self.components]
        return payload
