"""
Metrics reports: one JSON document per evaluation run.

Reports carry metric values and the resolved configuration only, so two runs
with the same inputs and settings produce byte-identical files.
"""
import logging
from typing import Optional, Sequence

from apps.datasets.records import AnnotationRecord

from .metrics import IOU_THRESHOLD, corloc, mean_best_iou, top1_loc, voc_map

logger = logging.getLogger(__name__)


class EvaluationService:

    @staticmethod
    def wsol_report(predictions, annotations: Sequence[AnnotationRecord], config: Optional[dict] = None) -> dict:
        gt = [record.ground_truth() for record in annotations]
        report = {
            'images': len(gt),
            'corloc': corloc(predictions, gt, IOU_THRESHOLD),
            'mean_iou': mean_best_iou(predictions, gt),
            'top1_loc': None,
            'config': dict(config or {}),
        }
        if all(record.top1_correct is not None for record in annotations):
            flags = [record.cls_flag() for record in annotations]
            report['top1_loc'] = top1_loc(predictions, gt, flags, IOU_THRESHOLD)
        else:
            logger.warning('Some annotations have no top1_correct flag; Top-1 Loc not reported')
        logger.info('CorLoc %.4f over %d image(s)', report['corloc'], report['images'])
        return report

    @staticmethod
    def map_report(detections, annotations: Sequence[AnnotationRecord], use_11_point: bool = True,
                   config: Optional[dict] = None) -> dict:
        gt = [record.ground_truth() for record in annotations if record.boxes]
        result = voc_map(detections, gt, IOU_THRESHOLD, use_11_point)
        report = result.as_dict()
        report['images'] = len(gt)
        report['config'] = dict(config or {})
        if result.warnings:
            report['warnings'] = list(result.warnings)
        logger.info('mAP %.4f over %d class(es)', result.mean_ap, len(result.per_class))
        return report
