"""
Low-resolution training masks from pseudo boxes (default) or annotated boxes.
Usage: wsfl make-masks --annotations train.jsonl --features DIR (--pseudo-boxes P | --gt-boxes) --out DIR
"""
from django.conf import settings

from apps.core.exceptions import InvalidInputError
from apps.core.management.base import WsflCommand
from apps.datasets import jsonl
from apps.datasets.services import FeatureStore
from apps.masks.quantization import MODE_DDT, MODE_GT
from apps.masks.services import MaskService


class Command(WsflCommand):
    help = 'Quantize boxes to feature-grid foreground masks'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True, help='Annotation JSON lines')
        parser.add_argument('--features', required=True, help='Feature directory (for grid sizes)')
        parser.add_argument('--pseudo-boxes', default=None, help='Predictions file from ddt-boxes')
        parser.add_argument('--gt-boxes', action='store_true', help='Use the annotated boxes instead')
        parser.add_argument('--out', required=True, help='Mask output directory')

    def run(self, **options):
        mode = MODE_GT if options['gt_boxes'] else MODE_DDT
        self.resolved['mode'] = mode
        if mode == MODE_DDT and not options['pseudo_boxes']:
            raise InvalidInputError('make-masks needs --pseudo-boxes, or --gt-boxes for annotated boxes')

        records = jsonl.read_annotations(options['annotations'])
        pseudo = jsonl.read_predictions(options['pseudo_boxes']) if mode == MODE_DDT else None
        features = FeatureStore(options['features'], settings.WSFL['FEATURE_SUFFIX'])
        masks = MaskService.build(records, features.grid, mode, pseudo)

        out = FeatureStore(options['out'])
        for image_id, mask in masks:
            out.save_mask(image_id, mask)
        self.stderr.write(self.style.SUCCESS(f'✓ {len(masks)} {mode} masks written to {options["out"]}'))
