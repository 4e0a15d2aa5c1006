"""
Localization and detection metrics: IoU, CorLoc, Top-1 Loc and VOC mAP.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox

from .records import ClsFlag, DetectionRecord, GroundTruthRecord

logger = logging.getLogger(__name__)

IOU_THRESHOLD = 0.5
ELEVEN_RECALL_POINTS = np.arange(11) / 10.0


def iou(a: BBox, b: BBox) -> float:
    inter_w = max(0.0, min(a.x2, b.x2) - max(a.x1, b.x1))
    inter_h = max(0.0, min(a.y2, b.y2) - max(a.y1, b.y1))
    inter = inter_w * inter_h
    if inter == 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def _prediction_map(predictions) -> Dict[str, BBox]:
    boxes = {}
    for item in predictions:
        if isinstance(item, tuple):
            image_id, box = item
        else:
            image_id, box = item.image_id, item.box
        boxes[image_id] = box
    return boxes


def localization_hits(predictions, gt: Sequence[GroundTruthRecord],
                      iou_threshold: float = IOU_THRESHOLD) -> Dict[str, bool]:
    """Per GT image: does the predicted box reach ``iou_threshold`` with any GT box?"""
    boxes = _prediction_map(predictions)
    missing = [record.image_id for record in gt if record.image_id not in boxes]
    if missing:
        shown = ', '.join(missing[:10]) + (' ...' if len(missing) > 10 else '')
        raise InvalidInputError(f'{len(missing)} image(s) have no prediction: {shown}')
    return {
        record.image_id: max(iou(boxes[record.image_id], box) for box in record.boxes) >= iou_threshold
        for record in gt
    }


def corloc(predictions, gt: Sequence[GroundTruthRecord], iou_threshold: float = IOU_THRESHOLD) -> float:
    gt = list(gt)
    if not gt:
        logger.warning('CorLoc over an empty ground-truth set is reported as 0')
        return 0.0
    hits = localization_hits(predictions, gt, iou_threshold)
    return sum(hits.values()) / len(gt)


def mean_best_iou(predictions, gt: Sequence[GroundTruthRecord]) -> float:
    gt = list(gt)
    if not gt:
        return 0.0
    boxes = _prediction_map(predictions)
    missing = [record.image_id for record in gt if record.image_id not in boxes]
    if missing:
        raise InvalidInputError(f'{len(missing)} image(s) have no prediction: {", ".join(missing[:10])}')
    total = 0.0
    for record in gt:
        total += max(iou(boxes[record.image_id], box) for box in record.boxes)
    return total / len(gt)


def top1_loc(predictions, gt: Sequence[GroundTruthRecord], cls_flags: Iterable[ClsFlag],
             iou_threshold: float = IOU_THRESHOLD) -> float:
    gt = list(gt)
    flags = {flag.image_id: flag.top1_correct for flag in cls_flags}
    missing = [record.image_id for record in gt if record.image_id not in flags]
    if missing:
        raise InvalidInputError(f'{len(missing)} image(s) have no top1_correct flag: {", ".join(missing[:10])}')
    if not gt:
        return 0.0
    hits = localization_hits(predictions, gt, iou_threshold)
    both = sum(1 for record in gt if flags[record.image_id] and hits[record.image_id])
    return both / len(gt)


def eleven_point_ap(recall: np.ndarray, precision: np.ndarray) -> float:
    total = 0.0
    for point in ELEVEN_RECALL_POINTS:
        reached = recall >= point
        total += precision[reached].max() if reached.any() else 0.0
    return total / 11.0


def all_point_ap(recall: np.ndarray, precision: np.ndarray) -> float:
    """Area under the monotone precision envelope."""
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.nonzero(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


def detection_order(detections: Iterable[DetectionRecord]) -> List[DetectionRecord]:
    """Descending score; ties by image id, then raster order of the box."""
    return sorted(detections, key=lambda det: (-det.score, det.image_id, det.box.raster_key()))


def match_detections(detections: Sequence[DetectionRecord], gt_boxes: Mapping[str, Sequence[BBox]],
                     iou_threshold: float = IOU_THRESHOLD) -> np.ndarray:
    """Greedy TP flags for already ordered single-class detections."""
    matched = {image_id: [False] * len(boxes) for image_id, boxes in gt_boxes.items()}
    true_positive = np.zeros(len(detections), dtype=bool)
    for rank, det in enumerate(detections):
        candidates = gt_boxes.get(det.image_id, ())
        best, best_iou = -1, -1.0
        for index, box in enumerate(candidates):
            if matched[det.image_id][index]:
                continue
            overlap = iou(det.box, box)
            if overlap > best_iou:
                best, best_iou = index, overlap
        if best >= 0 and best_iou >= iou_threshold:
            matched[det.image_id][best] = True
            true_positive[rank] = True
    return true_positive


@dataclass(frozen=True)
class ClassAP:
    label: str
    ap: float
    gt_count: int
    detection_count: int


@dataclass(frozen=True)
class MapResult:
    per_class: Tuple[ClassAP, ...]
    mean_ap: float
    use_11_point: bool = True
    warnings: Tuple[str, ...] = field(default=())

    def ap(self, label: str) -> float:
        for entry in self.per_class:
            if entry.label == label:
                return entry.ap
        raise KeyError(label)

    def as_dict(self) -> dict:
        return {
            'mAP': self.mean_ap,
            'ap_method': '11-point' if self.use_11_point else 'all-point',
            'per_class': {
                entry.label: {'ap': entry.ap, 'gt': entry.gt_count, 'detections': entry.detection_count}
                for entry in self.per_class
            },
        }


def voc_map(detections: Iterable[DetectionRecord], gt: Iterable[GroundTruthRecord],
            iou_thresh: float = IOU_THRESHOLD, use_11_point: bool = True) -> MapResult:
    gt_boxes: Dict[str, Dict[str, List[BBox]]] = defaultdict(lambda: defaultdict(list))
    for record in gt:
        gt_boxes[record.label][record.image_id].extend(record.boxes)

    by_class: Dict[str, List[DetectionRecord]] = defaultdict(list)
    for det in detections:
        by_class[det.label].append(det)

    per_class, warnings = [], []
    for label in sorted(set(gt_boxes) | set(by_class)):
        boxes = gt_boxes.get(label, {})
        positives = sum(len(items) for items in boxes.values())
        ordered = detection_order(by_class.get(label, ()))
        if positives == 0:
            message = f'class {label!r} has {len(ordered)} detection(s) but no ground truth; AP set to 0'
            logger.warning(message)
            warnings.append(message)
            per_class.append(ClassAP(label, 0.0, 0, len(ordered)))
            continue
        if not ordered:
            per_class.append(ClassAP(label, 0.0, positives, 0))
            continue

        true_positive = match_detections(ordered, boxes, iou_thresh)
        tp = np.cumsum(true_positive)
        fp = np.cumsum(~true_positive)
        recall = tp / positives
        precision = tp / (tp + fp)
        ap = eleven_point_ap(recall, precision) if use_11_point else all_point_ap(recall, precision)
        per_class.append(ClassAP(label, float(ap), positives, len(ordered)))

    scored = [entry.ap for entry in per_class if entry.gt_count > 0]
    mean_ap = float(np.mean(scored)) if scored else 0.0
    logger.debug('mAP %.4f over %d class(es)', mean_ap, len(scored))
    return MapResult(tuple(per_class), mean_ap, use_11_point, tuple(warnings))
