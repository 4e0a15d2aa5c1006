"""
Readers and writers for the JSON-lines record files and the metrics report.
"""
import json
import logging
from pathlib import Path

from apps.core.exceptions import FormatError, InvalidInputError
from apps.core.tensors import ImageDims
from apps.detection.objectness import Proposal, ScoredProposal
from apps.evaluation.records import DetectionRecord

from .records import AnnotationRecord, Prediction
from .serializers import (
    AnnotationSerializer,
    DetectionSerializer,
    PredictionSerializer,
    ProposalSerializer,
    ScoredProposalSerializer,
    flatten_errors,
)

logger = logging.getLogger(__name__)


def iter_json_lines(path):
    """Yield ``(line_number, object)`` for every non-blank line."""
    with open(path, 'rb') as handle:
        for number, raw in enumerate(handle, start=1):
            try:
                line = raw.decode('utf-8')
            except UnicodeDecodeError as exc:
                raise FormatError(f'invalid UTF-8 at column {exc.start + 1}', path=path, line=number) from exc
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f'malformed JSON ({exc.msg})', path=path, line=number) from exc
            if not isinstance(payload, dict):
                raise FormatError('expected one JSON object per line', path=path, line=number)
            yield number, payload


def _validate(serializer_class, payload, path, number):
    serializer = serializer_class(data=payload)
    if not serializer.is_valid():
        raise InvalidInputError(f'{path}, line {number}: {flatten_errors(serializer.errors)}')
    extra = {key: value for key, value in payload.items() if key not in serializer.fields}
    return serializer.validated_data, extra


def _write_lines(path, payloads):
    with open(path, 'w', encoding='utf-8') as handle:
        for payload in payloads:
            handle.write(json.dumps(payload) + '\n')


def _unique(records, path, what):
    seen = {}
    for number, record in records:
        if record.image_id in seen:
            raise InvalidInputError(
                f'{path}, line {number}: duplicate image id {record.image_id!r} '
                f'(first on line {seen[record.image_id]})'
            )
        seen[record.image_id] = number
    logger.debug('Read %d %s records from %s', len(seen), what, path)
    return [record for _, record in records]


def read_annotations(path):
    records = []
    for number, payload in iter_json_lines(path):
        data, extra = _validate(AnnotationSerializer, payload, path, number)
        records.append((number, AnnotationRecord(
            image_id=data['image_id'],
            dims=ImageDims(data['height'], data['width']),
            label=data['label'],
            boxes=tuple(data.get('boxes', ())),
            top1_correct=data.get('top1_correct'),
            extra=extra,
        )))
    return _unique(records, path, 'annotation')


def write_annotations(path, records):
    _write_lines(path, (record.to_json() for record in records))


def read_predictions(path):
    records = []
    for number, payload in iter_json_lines(path):
        data, extra = _validate(PredictionSerializer, payload, path, number)
        records.append((number, Prediction(
            image_id=data['image_id'],
            box=data['box'],
            mask_path=data.get('mask_path'),
            components=tuple(data.get('components', ())),
            extra=extra,
        )))
    return _unique(records, path, 'prediction')


def write_predictions(path, predictions):
    _write_lines(path, (prediction.to_json() for prediction in predictions))


def read_proposals(path):
    proposals = []
    for number, payload in iter_json_lines(path):
        data, _ = _validate(ProposalSerializer, payload, path, number)
        proposals.append(Proposal(data['image_id'], data['box'], data.get('class')))
    return proposals


def write_proposals(path, proposals):
    _write_lines(path, (
        {'image_id': proposal.image_id, 'box': proposal.box.as_list(), 'class': proposal.label}
        if proposal.label is not None else
        {'image_id': proposal.image_id, 'box': proposal.box.as_list()}
        for proposal in proposals
    ))


def scored_proposal_json(scored: ScoredProposal) -> dict:
    payload = {
        'image_id': scored.proposal.image_id,
        'box': scored.proposal.box.as_list(),
        'objectness': scored.objectness,
        'filtered': scored.filtered,
    }
    if scored.proposal.label is not None:
        payload['class'] = scored.proposal.label
    return payload


def write_scored_proposals(path, scored_proposals):
    _write_lines(path, (scored_proposal_json(scored) for scored in scored_proposals))


def read_scored_proposals(path):
    scored = []
    for number, payload in iter_json_lines(path):
        data, _ = _validate(ScoredProposalSerializer, payload, path, number)
        scored.append(ScoredProposal(
            proposal=Proposal(data['image_id'], data['box'], data.get('class')),
            objectness=data['objectness'],
            filtered=data['filtered'],
        ))
    return scored


def read_detections(path):
    """Detection records; scored-proposal lines are accepted with objectness as score."""
    detections = []
    skipped = 0
    for number, payload in iter_json_lines(path):
        if 'score' not in payload and 'objectness' in payload:
            if payload.get('class') is None:
                skipped += 1
                continue
            payload = dict(payload, score=payload['objectness'])
        data, _ = _validate(DetectionSerializer, payload, path, number)
        detections.append(DetectionRecord(data['image_id'], data['class'], data['score'], data['box']))
    if skipped:
        logger.warning('Skipped %d proposals without a class in %s', skipped, path)
    return detections


def write_detections(path, detections):
    _write_lines(path, ({
        'image_id': detection.image_id,
        'class': detection.label,
        'score': detection.score,
        'box': detection.box.as_list(),
    } for detection in detections))


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + '\n'


def write_metrics_report(target, report: dict):
    """Write the report to a path, or to an open text stream."""
    text = render_report(report)
    if hasattr(target, 'write'):
        target.write(text)
    else:
        Path(target).write_text(text, encoding='utf-8')
