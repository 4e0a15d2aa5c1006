"""
Pseudo bounding boxes by category-wise descriptor co-localization.
Usage: wsfl ddt-boxes --annotations train.jsonl --features DIR --out pseudo.jsonl
"""
import logging

from django.conf import settings

from apps.colocalization.services import ColocalizationService
from apps.core.management.base import WsflCommand
from apps.datasets import jsonl
from apps.datasets.services import FeatureStore

logger = logging.getLogger(__name__)


class Command(WsflCommand):
    help = 'Fit one DDT model per category and write one pseudo box per image'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True, help='Annotation JSON lines')
        parser.add_argument('--features', required=True, help='Feature directory')
        parser.add_argument('--out', required=True, help='Predictions file for the pseudo boxes')

    def run(self, **options):
        records = jsonl.read_annotations(options['annotations'])
        store = FeatureStore(options['features'], settings.WSFL['FEATURE_SUFFIX'])
        threads = self.threads
        features = store.load_many([record.image_id for record in records], threads)

        run = ColocalizationService.pseudo_boxes(records, features, seed=self.seed, threads=threads)
        jsonl.write_predictions(options['out'], run.predictions)

        quality = ColocalizationService.quality(records, run.predictions)
        if quality:
            logger.info('Pseudo boxes vs annotated boxes: mean IoU %.4f, CorLoc %.4f',
                        quality['mean_iou'], quality['corloc'])
        self.stderr.write(self.style.SUCCESS(f'✓ {len(run.predictions)} pseudo boxes written to {options["out"]}'))
