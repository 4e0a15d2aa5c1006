"""
Write a seeded synthetic dataset.
Usage: wsfl synth-gen --out DIR [--train-images 200 --test-images 100 --separation 4 --seed 7]
"""
from apps.core.management.base import WsflCommand
from apps.datasets.services import write_synthetic_dataset
from apps.datasets.synth import SynthSpec, synth_generate

DEFAULTS = SynthSpec()


class Command(WsflCommand):
    help = 'Generate a synthetic feature dataset with known object boxes'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--out', required=True, help='Output dataset directory')
        parser.add_argument('--train-images', type=int, default=None)
        parser.add_argument('--test-images', type=int, default=None)
        parser.add_argument('--grid-height', type=int, default=None)
        parser.add_argument('--grid-width', type=int, default=None)
        parser.add_argument('--depth', type=int, default=None)
        parser.add_argument('--separation', type=float, default=None,
                            help='Distance between cluster means in noise sigmas')
        parser.add_argument('--noise', type=float, default=None, help='Noise sigma')
        parser.add_argument('--box-min', type=int, default=None, help='Smallest box side in grid cells')
        parser.add_argument('--box-max', type=int, default=None, help='Largest box side in grid cells')
        parser.add_argument('--num-classes', type=int, default=None)
        parser.add_argument('--top1-accuracy', type=float, default=None)
        parser.add_argument('--proposals-per-image', type=int, default=None)

    def run(self, **options):
        spec = SynthSpec(
            train_images=self.setting('train_images', DEFAULTS.train_images, int),
            test_images=self.setting('test_images', DEFAULTS.test_images, int),
            grid=(self.setting('grid_height', DEFAULTS.grid[0], int),
                  self.setting('grid_width', DEFAULTS.grid[1], int)),
            depth=self.setting('depth', DEFAULTS.depth, int),
            separation=self.setting('separation', DEFAULTS.separation, float),
            noise=self.setting('noise', DEFAULTS.noise, float),
            box_min=self.setting('box_min', DEFAULTS.box_min, int),
            box_max=self.setting('box_max', DEFAULTS.box_max, int),
            num_classes=self.setting('num_classes', DEFAULTS.num_classes, int),
            top1_accuracy=self.setting('top1_accuracy', DEFAULTS.top1_accuracy, float),
            proposals_per_image=self.setting('proposals_per_image', DEFAULTS.proposals_per_image, int),
            seed=self.seed,
        )
        write_synthetic_dataset(synth_generate(spec), options['out'])
        self.stderr.write(self.style.SUCCESS(f'✓ Synthetic dataset written to {options["out"]}'))
