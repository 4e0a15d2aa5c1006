"""
Objectness scores and background-filter labels for external proposals.
Usage: wsfl score-proposals --annotations test.jsonl --proposals proposals.jsonl (--head head.wsfh --features DIR | --gt-masks) --out scored.jsonl
"""
import logging
from collections import defaultdict

from decouple import Csv
from django.conf import settings

from apps.core.exceptions import InvalidInputError
from apps.core.management.base import WsflCommand
from apps.core.parallel import ordered_map
from apps.core.tensors import ProbMask, bilinear_upsample
from apps.datasets import jsonl
from apps.datasets.formats import read_head_file
from apps.datasets.services import FeatureStore
from apps.detection.objectness import filter_proposals, score_proposals
from apps.masks.quantization import boxes_to_hr_mask
from apps.training.head import head_forward

logger = logging.getLogger(__name__)


class Command(WsflCommand):
    help = 'Score proposals by mean foreground probability and mark background proposals'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True, help='Annotation JSON lines (image sizes)')
        parser.add_argument('--proposals', required=True, help='Proposal JSON lines')
        parser.add_argument('--out', required=True, help='Scored proposal file to write')
        parser.add_argument('--head', default=None, help='Head checkpoint for predicted masks')
        parser.add_argument('--features', default=None, help='Feature directory for predicted masks')
        parser.add_argument('--gt-masks', action='store_true', help='Score against annotated-box masks')
        parser.add_argument('--threshold', type=float, default=None,
                            help='Filter threshold (0.2 for predicted masks, 0.5 for --gt-masks)')
        parser.add_argument('--exempt-classes', default=None,
                            help='Comma-separated classes never filtered (default person,pottedplant)')

    def mask_loader(self, options):
        if options['gt_masks']:
            return lambda record: ProbMask(boxes_to_hr_mask(record.boxes, record.dims).values.astype(float))
        if not (options['head'] and options['features']):
            raise InvalidInputError('score-proposals needs --head and --features, or --gt-masks')
        head = read_head_file(options['head'])
        store = FeatureStore(options['features'], settings.WSFL['FEATURE_SUFFIX'])
        return lambda record: bilinear_upsample(head_forward(head, store.load(record.image_id)), record.dims)

    def run(self, **options):
        gt_mode = options['gt_masks']
        self.resolved['mask_source'] = 'gt' if gt_mode else 'head'
        default = settings.WSFL['GT_PROPOSAL_THRESHOLD' if gt_mode else 'PROPOSAL_THRESHOLD']
        threshold = self.setting('threshold', default, float)
        exempt = self.setting('exempt_classes', ','.join(settings.WSFL['EXEMPT_CLASSES']))
        exempt_classes = sorted(Csv()(exempt))
        self.resolved['exempt_classes'] = exempt_classes

        records = {record.image_id: record for record in jsonl.read_annotations(options['annotations'])}
        by_image = defaultdict(list)
        for proposal in jsonl.read_proposals(options['proposals']):
            if proposal.image_id not in records:
                raise InvalidInputError(f'proposal for unknown image {proposal.image_id!r}')
            if not proposal.box.within(records[proposal.image_id].dims):
                raise InvalidInputError(f'proposal {proposal.box.as_list()} exceeds image {proposal.image_id}')
            by_image[proposal.image_id].append(proposal)

        load_mask = self.mask_loader(options)
        image_ids = [image_id for image_id in records if image_id in by_image]

        def score(image_id):
            return score_proposals(load_mask(records[image_id]), by_image[image_id])

        scored = [item for group in ordered_map(score, image_ids, self.threads) for item in group]
        labelled = filter_proposals(scored, threshold, exempt_classes)
        jsonl.write_scored_proposals(options['out'], labelled)
        logger.info('%d of %d proposals marked as background at threshold %.3f',
                    sum(item.filtered for item in labelled), len(labelled), threshold)
        self.stderr.write(self.style.SUCCESS(f'✓ {len(labelled)} scored proposals written to {options["out"]}'))
