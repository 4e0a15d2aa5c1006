"""
Train the pixel head on feature grids and low-resolution masks.
Usage: wsfl train-head --annotations train.jsonl --features DIR --masks DIR --out head.wsfh [--preset cub] [--lr 0.01]
"""
import json
from pathlib import Path

from django.conf import settings

from apps.core.exceptions import InvalidInputError
from apps.core.management.base import WsflCommand
from apps.core.parallel import ordered_map
from apps.datasets import jsonl
from apps.datasets.formats import read_head_file, write_head_file
from apps.datasets.services import FeatureStore
from apps.training.forms import TrainConfigForm
from apps.training.trainer import TrainingSample, train_head

TRACE_SUFFIX = '.trace.json'


def trace_path(checkpoint) -> Path:
    checkpoint = Path(checkpoint)
    return checkpoint.with_name(checkpoint.name + TRACE_SUFFIX)


class Command(WsflCommand):
    help = 'Train the per-position foreground classifier'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--annotations', required=True, help='Annotation JSON lines naming the images')
        parser.add_argument('--features', required=True, help='Feature directory')
        parser.add_argument('--masks', required=True, help='Directory of masks from make-masks')
        parser.add_argument('--out', required=True, help='Head checkpoint to write')
        parser.add_argument('--init-head', default=None, help='Start from this checkpoint')
        parser.add_argument('--preset', default=None, help='imagenet (default) or cub')
        parser.add_argument('--batch-size', type=int, default=None)
        parser.add_argument('--lr', '--learning-rate', dest='learning_rate', type=float, default=None)
        parser.add_argument('--momentum', type=float, default=None)
        parser.add_argument('--weight-decay', type=float, default=None)
        parser.add_argument('--epochs', type=int, default=None)
        parser.add_argument('--decay-period', type=int, default=None)
        parser.add_argument('--decay-factor', type=float, default=None)

    def train_config(self):
        data = {name: self.raw_setting(name) for name in TrainConfigForm.base_fields}
        if data['seed'] is None:
            data['seed'] = settings.WSFL['SEED']
        form = TrainConfigForm(data=data)
        if not form.is_valid():
            raise InvalidInputError(f'invalid training configuration: {form.error_text()}')
        config = form.to_config()
        self.resolved.update(config.as_dict())
        return config

    def run(self, **options):
        config = self.train_config()
        records = jsonl.read_annotations(options['annotations'])
        features = FeatureStore(options['features'], settings.WSFL['FEATURE_SUFFIX'])
        masks = FeatureStore(options['masks'])

        def sample(record):
            return TrainingSample(features.load(record.image_id), masks.load_mask(record.image_id), record.image_id)

        dataset = ordered_map(sample, records, self.threads)
        initial = read_head_file(options['init_head']) if options['init_head'] else None
        result = train_head(dataset, config, initial_head=initial)

        write_head_file(options['out'], result.head)
        trace = {'config': self.resolved, 'loss_trace': result.loss_trace}
        trace_path(options['out']).write_text(json.dumps(trace, indent=2, sort_keys=True) + '\n', encoding='utf-8')
        self.stderr.write(self.style.SUCCESS(
            f'✓ Head written to {options["out"]} (final loss {result.loss_trace[-1]:.6f})'
        ))
