import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, ImageDims
from apps.datasets.records import AnnotationRecord, Prediction
from apps.masks.quantization import (
    MODE_DDT,
    MODE_GT,
    MaskGrid,
    MaskJob,
    boxes_to_hr_mask,
    boxes_to_lr_mask,
    generate_training_masks,
)
from apps.masks.services import MaskService


def pixel_membership(boxes, image):
    """Per-pixel union test: x1 <= x < x2 and y1 <= y < y2."""
    ys = np.arange(image.height)[:, None]
    xs = np.arange(image.width)[None, :]
    mask = np.zeros(image.shape, dtype=bool)
    for box in boxes:
        mask |= (xs >= box.x1) & (xs < box.x2) & (ys >= box.y1) & (ys < box.y2)
    return mask


def coverage_oracle(boxes, grid_h, grid_w, image):
    """Cell is foreground when covered pixels are at least half of the cell's pixels."""
    covered_pixels = pixel_membership(boxes, image)
    rows = np.arange(image.height)
    cols = np.arange(image.width)
    result = np.zeros((grid_h, grid_w), dtype=bool)
    for gy in range(grid_h):
        in_row = (rows * grid_h >= gy * image.height) & (rows * grid_h < (gy + 1) * image.height)
        for gx in range(grid_w):
            in_col = (cols * grid_w >= gx * image.width) & (cols * grid_w < (gx + 1) * image.width)
            cell = covered_pixels[np.ix_(in_row, in_col)]
            result[gy, gx] = 2 * int(cell.sum()) >= cell.size
    return result


def random_boxes(rng, image, count):
    boxes = []
    for _ in range(count):
        x1, x2 = np.sort(rng.uniform(0, image.width, 2))
        y1, y2 = np.sort(rng.uniform(0, image.height, 2))
        if rng.random() < 0.5:
            x1, x2, y1, y2 = np.floor(x1), np.ceil(x2), np.floor(y1), np.ceil(y2)
        if x2 > x1 and y2 > y1:
            boxes.append(BBox(float(x1), float(y1), float(x2), float(y2)))
    return boxes


class HighResolutionMaskTests(SimpleTestCase):

    def test_full_box(self):
        image = ImageDims(20, 30)
        self.assertEqual(boxes_to_hr_mask([BBox.full(image)], image).count(), 600)

    def test_no_boxes(self):
        self.assertEqual(boxes_to_hr_mask([], ImageDims(5, 5)).count(), 0)

    def test_fractional_edges(self):
        mask = boxes_to_hr_mask([BBox(0.5, 1.0, 2.5, 2.0)], ImageDims(4, 4)).values
        expected = np.zeros((4, 4), dtype=bool)
        expected[1, 1:3] = True
        np.testing.assert_array_equal(mask, expected)

    def test_overlapping_boxes_match_membership(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            image = ImageDims(int(rng.integers(1, 60)), int(rng.integers(1, 60)))
            boxes = random_boxes(rng, image, 3)
            np.testing.assert_array_equal(boxes_to_hr_mask(boxes, image).values, pixel_membership(boxes, image))

    def test_out_of_bounds_box(self):
        with self.assertRaises(InvalidInputError):
            boxes_to_hr_mask([BBox(0, 0, 11, 5)], ImageDims(10, 10))


class LowResolutionMaskTests(SimpleTestCase):

    def test_quarter_box(self):
        grid = MaskGrid(14, 14, ImageDims(224, 224))
        mask = boxes_to_lr_mask([BBox(0, 0, 112, 112)], grid).values
        expected = np.zeros((14, 14), dtype=bool)
        expected[:7, :7] = True
        np.testing.assert_array_equal(mask, expected)

    def test_full_box_any_grid(self):
        image = ImageDims(50, 70)
        for height, width in [(1, 1), (7, 3), (50, 70), (13, 17)]:
            self.assertEqual(boxes_to_lr_mask([BBox.full(image)], MaskGrid(height, width, image)).count(),
                             height * width)

    def test_half_covered_cell_is_foreground(self):
        grid = MaskGrid(1, 1, ImageDims(2, 2))
        self.assertEqual(boxes_to_lr_mask([BBox(0, 0, 1, 2)], grid).count(), 1)
        self.assertEqual(boxes_to_lr_mask([BBox(0, 0, 1, 1)], grid).count(), 0)

    def test_matches_coverage_oracle(self):
        rng = np.random.default_rng(1000)
        for _ in range(1000):
            image = ImageDims(int(rng.integers(1, 225)), int(rng.integers(1, 225)))
            grid_h = int(rng.integers(1, min(14, image.height) + 1))
            grid_w = int(rng.integers(1, min(14, image.width) + 1))
            boxes = random_boxes(rng, image, int(rng.integers(0, 4)))
            mask = boxes_to_lr_mask(boxes, MaskGrid(grid_h, grid_w, image)).values
            np.testing.assert_array_equal(mask, coverage_oracle(boxes, grid_h, grid_w, image))

    def test_image_sized_grid_equals_hr_mask(self):
        rng = np.random.default_rng(21)
        image = ImageDims(17, 23)
        boxes = random_boxes(rng, image, 3)
        np.testing.assert_array_equal(
            boxes_to_lr_mask(boxes, MaskGrid(17, 23, image)).values,
            boxes_to_hr_mask(boxes, image).values,
        )

    def test_adding_a_box_never_clears_cells(self):
        rng = np.random.default_rng(22)
        image = ImageDims(96, 128)
        grid = MaskGrid(6, 8, image)
        for _ in range(30):
            boxes = random_boxes(rng, image, 3)
            before = boxes_to_lr_mask(boxes[:-1], grid).values
            after = boxes_to_lr_mask(boxes, grid).values
            self.assertFalse(np.any(before & ~after))

    def test_grid_bounds(self):
        with self.assertRaises(InvalidInputError):
            MaskGrid(0, 4, ImageDims(8, 8))
        with self.assertRaises(InvalidInputError):
            MaskGrid(9, 4, ImageDims(8, 8))


class TrainingMaskTests(SimpleTestCase):

    def test_modes_agree_on_equal_boxes(self):
        image = ImageDims(224, 224)
        jobs = [MaskJob((14, 14), image, (BBox(16, 32, 120, 200),), 'a')]
        ddt = generate_training_masks(jobs, MODE_DDT)
        gt = generate_training_masks(jobs, MODE_GT)
        np.testing.assert_array_equal(ddt[0].values, gt[0].values)

    def test_multi_box_is_union_of_single_boxes(self):
        image = ImageDims(160, 160)
        boxes = (BBox(0, 0, 60, 50), BBox(90, 100, 160, 160))
        union = generate_training_masks([((10, 10), image, boxes)], MODE_GT)[0].values
        singles = [generate_training_masks([((10, 10), image, (box,))], MODE_GT)[0].values for box in boxes]
        np.testing.assert_array_equal(union, singles[0] | singles[1])

    def test_grid_follows_feature_dims(self):
        image = ImageDims(64, 96)
        masks = generate_training_masks([((4, 6), image, (BBox(0, 0, 48, 32),))], MODE_DDT)
        self.assertEqual(masks[0].shape, (4, 6))
        self.assertEqual(masks[0].count(), 6)

    def test_image_without_boxes(self):
        with self.assertRaises(InvalidInputError):
            generate_training_masks([MaskJob((4, 4), ImageDims(16, 16), (), 'empty')], MODE_DDT)

    def test_unknown_mode(self):
        with self.assertRaises(InvalidInputError):
            generate_training_masks([], 'segmentation')


class MaskServiceTests(SimpleTestCase):

    def setUp(self):
        image = ImageDims(64, 64)
        self.records = [
            AnnotationRecord('a', image, 'cat', (BBox(0, 0, 32, 32),)),
            AnnotationRecord('b', image, 'cat', (BBox(32, 32, 64, 64), BBox(0, 0, 16, 16))),
        ]
        self.grids = {'a': (4, 4), 'b': (4, 4)}.__getitem__

    def test_gt_mode_uses_annotated_boxes(self):
        masks = dict(MaskService.build(self.records, self.grids, MODE_GT))
        self.assertEqual(masks['a'].count(), 4)
        self.assertEqual(masks['b'].count(), 5)

    def test_ddt_mode_uses_pseudo_boxes(self):
        pseudo = [Prediction('a', BBox(0, 0, 64, 64)), Prediction('b', BBox(0, 0, 16, 16))]
        masks = dict(MaskService.build(self.records, self.grids, MODE_DDT, pseudo))
        self.assertEqual(masks['a'].count(), 16)
        self.assertEqual(masks['b'].count(), 1)

    def test_missing_pseudo_box(self):
        with self.assertRaisesMessage(InvalidInputError, 'b'):
            MaskService.build(self.records, self.grids, MODE_DDT, [Prediction('a', BBox(0, 0, 8, 8))])
