import math

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, ProbMask
from apps.detection.objectness import (
    DEFAULT_EXEMPT_CLASSES,
    Proposal,
    ScoredProposal,
    filter_proposals,
    proposal_objectness,
    score_proposals,
)


def pixel_mean(values, box):
    """Average over every pixel with floor(x1) <= x < ceil(x2), same for y."""
    total, count = 0.0, 0
    for y in range(values.shape[0]):
        for x in range(values.shape[1]):
            if math.floor(box.x1) <= x < math.ceil(box.x2) and math.floor(box.y1) <= y < math.ceil(box.y2):
                total += values[y, x]
                count += 1
    return total / count


def scored(objectness, label=None):
    return ScoredProposal(Proposal('img', BBox(0, 0, 1, 1), label), objectness)


class ObjectnessTests(SimpleTestCase):

    def test_full_foreground(self):
        mask = ProbMask(np.ones((20, 20)))
        self.assertEqual(proposal_objectness(mask, Proposal('a', BBox(2, 3, 15, 9))), 1.0)

    def test_half_columns(self):
        values = np.zeros((10, 10))
        values[:, :5] = 1.0
        self.assertEqual(proposal_objectness(ProbMask(values), Proposal('a', BBox(0, 0, 10, 10))), 0.5)

    def test_fractional_box_covers_touched_pixels(self):
        values = np.arange(16, dtype=float).reshape(4, 4) / 15.0
        box = BBox(0.5, 1.2, 2.1, 2.9)
        expected = values[1:3, 0:3].mean()
        self.assertAlmostEqual(proposal_objectness(ProbMask(values), Proposal('a', box)), expected, places=12)

    def test_matches_pixel_oracle(self):
        rng = np.random.default_rng(500)
        for _ in range(500):
            height, width = (int(v) for v in rng.integers(1, 25, size=2))
            values = rng.random((height, width))
            x1, x2 = np.sort(rng.uniform(0, width, 2))
            y1, y2 = np.sort(rng.uniform(0, height, 2))
            if not (x2 > x1 and y2 > y1):
                continue
            box = BBox(float(x1), float(y1), float(x2), float(y2))
            score = proposal_objectness(ProbMask(values), Proposal('a', box))
            self.assertAlmostEqual(score, pixel_mean(values, box), delta=1e-9)
            self.assertTrue(0.0 <= score <= 1.0)

    def test_box_outside_mask_covers_nothing(self):
        with self.assertRaises(InvalidInputError):
            proposal_objectness(ProbMask(np.ones((4, 4))), Proposal('a', BBox(10, 10, 12, 12)))

    def test_score_keeps_order(self):
        values = np.zeros((4, 4))
        values[0, 0] = 1.0
        proposals = [Proposal('a', BBox(0, 0, 1, 1)), Proposal('a', BBox(2, 2, 4, 4))]
        self.assertEqual([item.objectness for item in score_proposals(ProbMask(values), proposals)], [1.0, 0.0])

    def test_objectness_range_is_checked(self):
        with self.assertRaises(InvalidInputError):
            scored(1.5)


class FilterTests(SimpleTestCase):

    def test_strictly_below_threshold_is_filtered(self):
        labelled = filter_proposals([scored(0.1), scored(0.25), scored(0.2)], threshold=0.2)
        self.assertEqual([item.filtered for item in labelled], [True, False, False])

    def test_exempt_class_is_never_filtered(self):
        labelled = filter_proposals([scored(0.01, 'person'), scored(0.01, 'car')], threshold=0.2)
        self.assertEqual([item.filtered for item in labelled], [False, True])
        self.assertEqual(labelled[0].exempt_class, 'person')
        self.assertIsNone(labelled[1].exempt_class)

    def test_default_exempt_classes(self):
        self.assertEqual(DEFAULT_EXEMPT_CLASSES, {'person', 'pottedplant'})
        labelled = filter_proposals([scored(0.0, 'pottedplant')])
        self.assertFalse(labelled[0].filtered)

    def test_custom_exempt_classes_replace_defaults(self):
        labelled = filter_proposals([scored(0.0, 'person'), scored(0.0, 'dog')], exempt_classes={'dog'})
        self.assertEqual([item.filtered for item in labelled], [True, False])

    def test_threshold_extremes(self):
        items = [scored(0.0), scored(0.5), scored(1.0)]
        self.assertEqual([item.filtered for item in filter_proposals(items, threshold=0.0)],
                         [False, False, False])
        self.assertEqual([item.filtered for item in filter_proposals(items, threshold=1.0)],
                         [True, True, False])

    def test_threshold_out_of_range(self):
        with self.assertRaises(InvalidInputError):
            filter_proposals([scored(0.5)], threshold=1.2)

    def test_scores_are_unchanged(self):
        labelled = filter_proposals([scored(0.3), scored(0.05)])
        self.assertEqual([item.objectness for item in labelled], [0.3, 0.05])
