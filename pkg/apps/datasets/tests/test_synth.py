import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from apps.colocalization.services import ColocalizationService
from apps.core.exceptions import InvalidInputError
from apps.datasets import jsonl
from apps.datasets.services import FeatureStore, write_synthetic_dataset
from apps.datasets.synth import STRIDE, SynthSpec, synth_generate


def small_spec(**overrides):
    options = dict(train_images=6, test_images=4, grid=(7, 9), depth=5, box_min=2, box_max=5,
                   proposals_per_image=4, seed=3)
    options.update(overrides)
    return SynthSpec(**options)


class SynthSpecTests(SimpleTestCase):

    def test_defaults(self):
        spec = SynthSpec()
        self.assertEqual((spec.train_images, spec.test_images, spec.grid, spec.depth), (200, 100, (14, 14), 16))
        self.assertEqual(spec.image_dims.shape, (224, 224))

    def test_invalid_specs(self):
        for overrides in ({'box_max': 10}, {'box_min': 0}, {'separation': -1.0}, {'noise': 0.0},
                          {'train_images': 0, 'test_images': 0}, {'num_classes': 0}, {'top1_accuracy': 1.5}):
            with self.assertRaises(InvalidInputError):
                small_spec(**overrides)

    def test_zero_separation_is_allowed(self):
        self.assertEqual(len(synth_generate(small_spec(separation=0.0)).train), 6)


class SynthGenerateTests(SimpleTestCase):

    def test_same_seed_same_bytes(self):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            write_synthetic_dataset(synth_generate(small_spec()), first)
            write_synthetic_dataset(synth_generate(small_spec()), second)
            files = sorted(path.relative_to(first) for path in Path(first).rglob('*') if path.is_file())
            self.assertEqual(len(files), 3 + 10)
            for relative in files:
                self.assertEqual((Path(first) / relative).read_bytes(), (Path(second) / relative).read_bytes())

    def test_other_seed_differs(self):
        first = synth_generate(small_spec())
        second = synth_generate(small_spec(seed=4))
        self.assertFalse(np.array_equal(first.train[0].features.values, second.train[0].features.values))

    def test_boxes_follow_the_planted_object(self):
        dataset = synth_generate(small_spec(num_classes=2))
        dims = dataset.spec.image_dims
        for image in dataset.images():
            left, top, box_w, box_h = image.grid_box
            self.assertTrue(2 <= box_w <= 5 and 2 <= box_h <= 5)
            box = image.record.boxes[0]
            self.assertTrue(box.within(dims))
            self.assertEqual(box.as_list(), [left * STRIDE, top * STRIDE,
                                             (left + box_w) * STRIDE, (top + box_h) * STRIDE])
            self.assertEqual(image.features.grid, (7, 9))
            self.assertIn(image.record.label, ('category_00', 'category_01'))
            self.assertIsNotNone(image.record.top1_correct)

    def test_clusters_are_separated(self):
        dataset = synth_generate(small_spec(separation=6.0, depth=8))
        image = dataset.train[0]
        left, top, box_w, box_h = image.grid_box
        inside = np.zeros(image.features.grid, dtype=bool)
        inside[top:top + box_h, left:left + box_w] = True
        values = image.features.values.astype(np.float64)
        gap = np.linalg.norm(values[inside].mean(axis=0) - values[~inside].mean(axis=0))
        self.assertGreater(gap, 3.0)

    def test_proposals_for_test_images_only(self):
        dataset = synth_generate(small_spec())
        self.assertEqual(len(dataset.proposals), 4 * 4)
        test_ids = {record.image_id for record in dataset.records('test')}
        for proposal in dataset.proposals:
            self.assertIn(proposal.image_id, test_ids)
            self.assertTrue(proposal.box.within(dataset.spec.image_dims))

    def test_written_layout(self):
        with tempfile.TemporaryDirectory() as tmp:
            dataset = synth_generate(small_spec())
            paths = write_synthetic_dataset(dataset, tmp)
            train = jsonl.read_annotations(paths['train'])
            self.assertEqual(train, dataset.records('train'))
            store = FeatureStore(paths['features'])
            image_id = train[0].image_id
            self.assertEqual(store.grid(image_id), (7, 9))
            np.testing.assert_array_equal(store.load(image_id).values, dataset.train[0].features.values)

    def test_store_rejects_path_like_ids(self):
        store = FeatureStore('/tmp')
        for image_id in ('', '..', 'a/b', 'a\\b'):
            with self.assertRaises(InvalidInputError):
                store.path_for(image_id)


def placement_baseline(spec, grid_boxes):
    """Expected IoU between each planted box and an independent box drawn the way the generator places them."""
    height, width = spec.grid
    sizes = range(spec.box_min, spec.box_max + 1)
    x1, y1, x2, y2, weights = [], [], [], [], []
    for box_h in sizes:
        for box_w in sizes:
            positions = (height - box_h + 1) * (width - box_w + 1)
            for top in range(height - box_h + 1):
                for left in range(width - box_w + 1):
                    x1.append(left)
                    y1.append(top)
                    x2.append(left + box_w)
                    y2.append(top + box_h)
                    weights.append(1.0 / (len(sizes) ** 2 * positions))
    x1, y1, x2, y2, weights = (np.array(values, dtype=float) for values in (x1, y1, x2, y2, weights))
    scores = []
    for left, top, box_w, box_h in grid_boxes:
        inter_w = np.clip(np.minimum(x2, left + box_w) - np.maximum(x1, left), 0, None)
        inter_h = np.clip(np.minimum(y2, top + box_h) - np.maximum(y1, top), 0, None)
        inter = inter_w * inter_h
        union = (x2 - x1) * (y2 - y1) + box_w * box_h - inter
        scores.append(float(np.sum(weights * inter / union)))
    return float(np.mean(scores))


class SeparationTests(SimpleTestCase):

    def pseudo_box_iou(self, separation):
        dataset = synth_generate(SynthSpec(train_images=60, test_images=0, proposals_per_image=0,
                                           separation=separation, seed=9))
        records = dataset.records('train')
        run = ColocalizationService.pseudo_boxes(records, dataset.features(), seed=0)
        return dataset, ColocalizationService.quality(records, run.predictions)['mean_iou']

    def test_zero_separation_gives_chance_level_pseudo_boxes(self):
        dataset, unseparated = self.pseudo_box_iou(0.0)
        baseline = placement_baseline(dataset.spec, [image.grid_box for image in dataset.train])
        self.assertLess(abs(unseparated - baseline), 0.15)

        _, separated = self.pseudo_box_iou(4.0)
        self.assertGreater(separated, unseparated + 0.2)
