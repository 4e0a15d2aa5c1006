"""
One predicted box per image from a trained head.
Usage: wsfl predict --annotations test.jsonl --features DIR --head head.wsfh --out predictions.jsonl
"""
from functools import partial

from django.conf import settings
from django.core.management.base import CommandError

from apps.core.management.base import EXIT_VALIDATION, WsflCommand
from apps.datasets import jsonl
from apps.datasets.formats import read_head_file
from apps.datasets.services import FeatureStore
from apps.localization.services import THRESHOLD_ABSOLUTE, THRESHOLD_MODES, LocalizationJob, localize_dataset


class Command(WsflCommand):
    help = 'Predict foreground masks and extract one box per image'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True, help='Annotation JSON lines (ids and image sizes)')
        parser.add_argument('--features', required=True, help='Feature directory')
        parser.add_argument('--head', required=True, help='Head checkpoint')
        parser.add_argument('--out', required=True, help='Predictions file to write')
        parser.add_argument('--mask-threshold', type=float, default=None)
        parser.add_argument('--threshold-mode', choices=THRESHOLD_MODES, default=None)
        parser.add_argument('--mask-dir', default=None, help='Also write upsampled masks here')

    def run(self, **options):
        threshold = self.setting('mask_threshold', settings.WSFL['MASK_THRESHOLD'], float)
        mode = self.setting('threshold_mode', THRESHOLD_ABSOLUTE)
        head = read_head_file(options['head'])
        records = jsonl.read_annotations(options['annotations'])
        features = FeatureStore(options['features'], settings.WSFL['FEATURE_SUFFIX'])

        jobs = [LocalizationJob(record.image_id, partial(features.load, record.image_id), record.dims)
                for record in records]
        keep = options['mask_dir'] is not None
        run = localize_dataset(head, jobs, threshold, mode, self.threads, keep_upsampled=keep)

        mask_store = FeatureStore(options['mask_dir']) if keep else None
        predictions = []
        for result in run.results:
            mask_path = str(mask_store.save_mask(result.image_id, result.upsampled)) if keep else None
            predictions.append(result.to_prediction(mask_path))
        jsonl.write_predictions(options['out'], predictions)

        if run.failures:
            raise CommandError(
                f'{len(run.failures)} image(s) failed: {", ".join(sorted(run.failures))}',
                returncode=EXIT_VALIDATION,
            )
        self.stderr.write(self.style.SUCCESS(f'✓ {len(predictions)} predictions written to {options["out"]}'))
