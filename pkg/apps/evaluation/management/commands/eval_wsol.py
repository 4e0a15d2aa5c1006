"""
CorLoc / Top-1 Loc report for predicted boxes.
Usage: wsfl eval-wsol --annotations test.jsonl --predictions predictions.jsonl [--output report.json]
"""
from apps.core.management.base import WsflCommand
from apps.datasets import jsonl
from apps.evaluation.metrics import IOU_THRESHOLD
from apps.evaluation.services import EvaluationService


class Command(WsflCommand):
    help = 'Evaluate single-box localization against annotated boxes'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True)
        parser.add_argument('--predictions', required=True)
        parser.add_argument('--output', default=None, help='Report file (default: standard output)')

    def run(self, **options):
        annotations = jsonl.read_annotations(options['annotations'])
        predictions = jsonl.read_predictions(options['predictions'])
        self.resolved['iou_threshold'] = IOU_THRESHOLD
        report = EvaluationService.wsol_report(predictions, annotations, self.resolved)
        jsonl.write_metrics_report(options['output'] or self.stdout, report)
