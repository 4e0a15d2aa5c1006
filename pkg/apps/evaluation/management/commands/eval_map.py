"""
VOC mean average precision for detections or scored proposals.
Usage: wsfl eval-map --annotations test.jsonl --detections scored.jsonl [--all-point] [--output report.json]
"""
from apps.core.management.base import WsflCommand
from apps.datasets import jsonl
from apps.evaluation.metrics import IOU_THRESHOLD
from apps.evaluation.services import EvaluationService


class Command(WsflCommand):
    help = 'Evaluate detections with per-class AP and mAP at IoU 0.5'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True)
        parser.add_argument('--detections', required=True,
                            help='Detection records, or a scored proposal file (objectness as score)')
        parser.add_argument('--all-point', action='store_true', help='All-point AP instead of 11-point')
        parser.add_argument('--output', default=None, help='Report file (default: standard output)')

    def run(self, **options):
        annotations = jsonl.read_annotations(options['annotations'])
        detections = jsonl.read_detections(options['detections'])
        use_11_point = not options['all_point']
        self.resolved['iou_threshold'] = IOU_THRESHOLD
        self.resolved['ap_method'] = '11-point' if use_11_point else 'all-point'
        report = EvaluationService.map_report(detections, annotations, use_11_point, self.resolved)
        jsonl.write_metrics_report(options['output'] or self.stdout, report)
