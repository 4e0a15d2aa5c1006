"""
PNG overlays of predicted masks with the predicted (yellow) and annotated (green) boxes.
Usage: wsfl render-overlay --annotations test.jsonl --features DIR --head head.wsfh --out DIR [--image-id ID ...]
"""
from functools import partial
from pathlib import Path

from django.conf import settings

from apps.core.exceptions import InvalidInputError
from apps.core.management.base import WsflCommand
from apps.datasets import jsonl
from apps.datasets.formats import read_head_file
from apps.datasets.services import FeatureStore
from apps.localization.rendering import render_overlay
from apps.localization.services import THRESHOLD_ABSOLUTE, THRESHOLD_MODES, LocalizationJob, localize_dataset


class Command(WsflCommand):
    help = 'Render mask heat maps and boxes as PNG files'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True)
        parser.add_argument('--features', required=True)
        parser.add_argument('--head', required=True)
        parser.add_argument('--out', required=True, help='Directory for <image_id>.png files')
        parser.add_argument('--image-id', action='append', dest='image_ids', default=None,
                            help='Render only this image (repeatable)')
        parser.add_argument('--mask-threshold', type=float, default=None)
        parser.add_argument('--threshold-mode', choices=THRESHOLD_MODES, default=None)

    def run(self, **options):
        threshold = self.setting('mask_threshold', settings.WSFL['MASK_THRESHOLD'], float)
        mode = self.setting('threshold_mode', THRESHOLD_ABSOLUTE)
        head = read_head_file(options['head'])
        records = jsonl.read_annotations(options['annotations'])
        if options['image_ids']:
            wanted = set(options['image_ids'])
            unknown = wanted - {record.image_id for record in records}
            if unknown:
                raise InvalidInputError(f'unknown image id(s): {", ".join(sorted(unknown))}')
            records = [record for record in records if record.image_id in wanted]

        features = FeatureStore(options['features'], settings.WSFL['FEATURE_SUFFIX'])
        jobs = [LocalizationJob(record.image_id, partial(features.load, record.image_id), record.dims)
                for record in records]
        run = localize_dataset(head, jobs, threshold, mode, self.threads, keep_upsampled=True)

        boxes = {record.image_id: record.boxes for record in records}
        out = Path(options['out'])
        for result in run.results:
            render_overlay(out / f'{result.image_id}.png', result.upsampled, result.box, boxes[result.image_id])
        self.stderr.write(self.style.SUCCESS(f'✓ {len(run.results)} overlays written to {out}'))
