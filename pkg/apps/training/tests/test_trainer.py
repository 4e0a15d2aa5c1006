import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BinaryMask, FeatureMap
from apps.training.forms import TrainConfigForm
from apps.training.head import PixelHead, init_head
from apps.training.optimizer import MomentumSGD, StepDecay
from apps.training.trainer import TrainConfig, TrainingSample, train_head


def separable_samples(seed=0, count=20, grid=4, depth=4):
    """Channel 0 is +3 on foreground cells and -3 elsewhere; other channels are noise."""
    rng = np.random.default_rng(seed)
    samples = []
    for index in range(count):
        target = rng.random((grid, grid)) < 0.4
        values = rng.standard_normal((grid, grid, depth)) * 0.5
        values[:, :, 0] = np.where(target, 3.0, -3.0)
        samples.append(TrainingSample(FeatureMap(values), BinaryMask(target), f'img{index:02d}'))
    return samples


class TrainHeadTests(SimpleTestCase):

    def test_separable_data_converges(self):
        config = TrainConfig(batch_size=4, learning_rate=0.1, epochs=15, decay_period=100)
        result = train_head(separable_samples(), config)
        self.assertEqual(len(result.loss_trace), 15)
        self.assertLess(result.loss_trace[-1], 0.1)
        self.assertLess(result.loss_trace[-1], result.loss_trace[0])
        self.assertGreater(result.head.weights[0], 0)

    def test_separable_loss_is_non_increasing_from_epoch_two(self):
        config = TrainConfig(batch_size=4, learning_rate=0.1, epochs=15, decay_period=100, weight_decay=0.0)
        trace = train_head(separable_samples(), config).loss_trace
        self.assertLess(trace[-1], 0.1)
        for epoch, (before, after) in enumerate(zip(trace[1:], trace[2:]), start=2):
            self.assertLessEqual(after, before, f'loss rose after epoch {epoch}')

    def test_full_batch_descent_is_monotone(self):
        config = TrainConfig(batch_size=20, learning_rate=0.5, momentum=0.0, epochs=10,
                             decay_period=100, decay_factor=1.0)
        trace = train_head(separable_samples(seed=1), config).loss_trace
        for before, after in zip(trace, trace[1:]):
            self.assertLessEqual(after, before + 1e-12)

    def test_zero_learning_rate_keeps_parameters(self):
        samples = separable_samples(seed=2)
        config = TrainConfig(batch_size=8, learning_rate=0.0, epochs=3, seed=6)
        result = train_head(samples, config)
        self.assertTrue(result.head.same_as(init_head(4, seed=6)))
        self.assertEqual(len(set(result.loss_trace)), 1)

    def test_same_seed_is_bit_identical(self):
        samples = separable_samples(seed=3)
        config = TrainConfig(batch_size=3, learning_rate=0.05, epochs=4, seed=11)
        first, second = train_head(samples, config), train_head(samples, config)
        self.assertTrue(first.head.same_as(second.head))
        self.assertEqual(first.loss_trace, second.loss_trace)

    def test_storage_order_does_not_matter(self):
        samples = separable_samples(seed=4)
        config = TrainConfig(batch_size=3, learning_rate=0.05, epochs=4, seed=2)
        forward = train_head(samples, config)
        backward = train_head(list(reversed(samples)), config)
        self.assertTrue(forward.head.same_as(backward.head))

    def test_initial_head_is_used(self):
        samples = separable_samples(seed=5)
        start = PixelHead(weights=np.array([1.0, 0.0, 0.0, 0.0]), bias=0.0)
        result = train_head(samples, TrainConfig(learning_rate=0.0, epochs=1), initial_head=start)
        self.assertTrue(result.head.same_as(start))

    def test_initial_head_depth_must_match(self):
        with self.assertRaises(InvalidInputError):
            train_head(separable_samples(), TrainConfig(epochs=1), initial_head=PixelHead(weights=np.zeros(3)))

    def test_empty_dataset(self):
        with self.assertRaises(InvalidInputError):
            train_head([], TrainConfig())


class TrainConfigTests(SimpleTestCase):

    def test_presets(self):
        self.assertEqual(TrainConfig.imagenet().batch_size, 256)
        cub = TrainConfig.cub()
        self.assertEqual((cub.batch_size, cub.epochs, cub.decay_period), (64, 30, 10))
        self.assertEqual(TrainConfig.cub(epochs=5).epochs, 5)

    def test_invalid_values(self):
        for overrides in ({'momentum': 1.0}, {'batch_size': 0}, {'decay_factor': 0.0},
                          {'learning_rate': -0.1}, {'epochs': 0}):
            with self.assertRaises(InvalidInputError):
                TrainConfig(**overrides)

    def test_form_applies_preset_and_overrides(self):
        form = TrainConfigForm(data={'preset': 'cub', 'learning_rate': '0.01'})
        self.assertTrue(form.is_valid(), form.errors)
        config = form.to_config()
        self.assertEqual(config.batch_size, 64)
        self.assertEqual(config.learning_rate, 0.01)

    def test_form_defaults_to_imagenet(self):
        form = TrainConfigForm(data={})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.to_config(), TrainConfig())

    def test_form_rejects_bad_momentum(self):
        form = TrainConfigForm(data={'momentum': '1.5'})
        self.assertFalse(form.is_valid())
        self.assertIn('momentum', form.error_text())

    def test_form_rejects_unknown_preset(self):
        form = TrainConfigForm(data={'preset': 'coco'})
        self.assertFalse(form.is_valid())
        self.assertIn('preset', form.error_text())


class OptimizerTests(SimpleTestCase):

    def test_momentum_accumulates(self):
        optimizer = MomentumSGD(learning_rate=0.1, momentum=0.9)
        parameters = optimizer.step(np.array([1.0]), np.array([2.0]))
        np.testing.assert_allclose(parameters, [0.8])
        parameters = optimizer.step(parameters, np.array([2.0]))
        np.testing.assert_allclose(parameters, [0.42])

    def test_step_decay(self):
        schedule = StepDecay(0.1, period=4, factor=0.1)
        self.assertEqual(schedule.rate_at(0), 0.1)
        self.assertEqual(schedule.rate_at(3), 0.1)
        self.assertAlmostEqual(schedule.rate_at(4), 0.01)
        self.assertAlmostEqual(schedule.rate_at(11), 0.001)
