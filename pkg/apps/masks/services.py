"""
Training-mask generation for an annotated dataset.
"""
import logging
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, BinaryMask
from apps.datasets.records import AnnotationRecord, Prediction

from .quantization import MODE_DDT, MODE_GT, MaskJob, generate_training_masks

logger = logging.getLogger(__name__)


class MaskService:

    @staticmethod
    def box_source(records: Sequence[AnnotationRecord], mode: str,
                   pseudo_boxes: Optional[Sequence[Prediction]] = None) -> Dict[str, Tuple[BBox, ...]]:
        """Boxes per image: pseudo boxes in DDT mode, annotated boxes in GT mode."""
        if mode == MODE_GT:
            return {record.image_id: record.boxes for record in records}
        if mode != MODE_DDT:
            raise InvalidInputError(f'unknown mask mode {mode!r}')
        if pseudo_boxes is None:
            raise InvalidInputError('DDT mode needs a pseudo-box predictions file')
        by_id = {prediction.image_id: (prediction.box,) for prediction in pseudo_boxes}
        missing = [record.image_id for record in records if record.image_id not in by_id]
        if missing:
            raise InvalidInputError(f'{len(missing)} image(s) have no pseudo box: {", ".join(missing[:10])}')
        return by_id

    @staticmethod
    def build(records: Sequence[AnnotationRecord], grid_of: Callable[[str], Tuple[int, int]],
              mode: str = MODE_DDT, pseudo_boxes=None) -> List[Tuple[str, BinaryMask]]:
        """``(image_id, mask)`` pairs in annotation order; ``grid_of`` gives each image's feature grid."""
        boxes = MaskService.box_source(records, mode, pseudo_boxes)
        jobs = [MaskJob(grid_of(record.image_id), record.dims, boxes[record.image_id], record.image_id)
                for record in records]
        masks = generate_training_masks(jobs, mode)
        coverage = sum(mask.count() for mask in masks) / max(1, sum(mask.values.size for mask in masks))
        logger.info('Built %d %s-mode masks; foreground fraction %.3f', len(masks), mode, coverage)
        return [(record.image_id, mask) for record, mask in zip(records, masks)]

    @staticmethod
    def grids_from(features: Mapping) -> Callable[[str], Tuple[int, int]]:
        return lambda image_id: features[image_id].grid
