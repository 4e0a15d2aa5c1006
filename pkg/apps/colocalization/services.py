"""
Pseudo-box generation over a whole annotated dataset.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

from apps.core.parallel import ordered_map
from apps.core.tensors import FeatureMap
from apps.datasets.records import AnnotationRecord, Prediction
from apps.evaluation.metrics import corloc, mean_best_iou

from .ddt import DdtModel, ddt_pseudo_box, fit_ddt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PseudoBoxRun:
    models: Dict[str, DdtModel]
    predictions: List[Prediction]


class ColocalizationService:
    """Fits one DDT model per category and emits one pseudo box per image."""

    @staticmethod
    def group_by_label(records: Sequence[AnnotationRecord]) -> Dict[str, List[AnnotationRecord]]:
        groups = defaultdict(list)
        for record in records:
            groups[record.label].append(record)
        return dict(sorted(groups.items()))

    @staticmethod
    def fit_categories(records, features: Mapping[str, FeatureMap], seed: int = 0) -> Dict[str, DdtModel]:
        models = {}
        for label, group in ColocalizationService.group_by_label(records).items():
            models[label] = fit_ddt([features[record.image_id] for record in group], seed=seed, category=label)
        return models

    @staticmethod
    def pseudo_boxes(records, features: Mapping[str, FeatureMap], seed: int = 0, threads: int = 1) -> PseudoBoxRun:
        records = list(records)
        models = ColocalizationService.fit_categories(records, features, seed)

        def box_for(record):
            box = ddt_pseudo_box(models[record.label], features[record.image_id], record.dims)
            return Prediction(record.image_id, box)

        predictions = ordered_map(box_for, records, threads)
        logger.info('Generated %d pseudo box(es) for %d categor%s',
                    len(predictions), len(models), 'y' if len(models) == 1 else 'ies')
        return PseudoBoxRun(models, predictions)

    @staticmethod
    def quality(records, predictions) -> Dict[str, float]:
        """Mean IoU and CorLoc of pseudo boxes against the annotated boxes, if any."""
        gt = [record.ground_truth() for record in records if record.boxes]
        if not gt:
            return {}
        return {'mean_iou': mean_best_iou(predictions, gt), 'corloc': corloc(predictions, gt)}
