"""
Minibatch training of the pixel head on low-resolution foreground masks.
"""
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import List, NamedTuple, Optional

import numpy as np

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BinaryMask, FeatureMap

from .head import PixelHead, bce_with_logits, gradient_from_arrays, init_head, stack_batch
from .optimizer import MomentumSGD, StepDecay

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 256
    learning_rate: float = 1e-3
    momentum: float = 0.9
    weight_decay: float = 1e-4
    epochs: int = 12
    decay_period: int = 4
    decay_factor: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidInputError('batch_size must be >= 1')
        if self.learning_rate < 0:
            raise InvalidInputError('learning_rate must be >= 0')
        if not (0.0 <= self.momentum < 1.0):
            raise InvalidInputError('momentum must lie in [0, 1)')
        if self.weight_decay < 0:
            raise InvalidInputError('weight_decay must be >= 0')
        if self.epochs < 1:
            raise InvalidInputError('epochs must be >= 1')
        if self.decay_period < 1:
            raise InvalidInputError('decay_period must be >= 1')
        if not (0.0 < self.decay_factor <= 1.0):
            raise InvalidInputError('decay_factor must lie in (0, 1]')
        if self.seed < 0:
            raise InvalidInputError('seed must be >= 0')

    @classmethod
    def imagenet(cls, **overrides) -> 'TrainConfig':
        return replace(cls(), **overrides)

    @classmethod
    def cub(cls, **overrides) -> 'TrainConfig':
        return replace(cls(batch_size=64, decay_period=10, epochs=30), **overrides)

    def as_dict(self) -> dict:
        return asdict(self)


PRESETS = {
    'imagenet': TrainConfig.imagenet,
    'cub': TrainConfig.cub,
}


class TrainingSample(NamedTuple):
    features: FeatureMap
    target: BinaryMask
    image_id: str = ''


@dataclass
class TrainingResult:
    head: PixelHead
    loss_trace: List[float] = field(default_factory=list)


def train_head(dataset, config: TrainConfig, initial_head: Optional[PixelHead] = None) -> TrainingResult:
    """Fit the head with momentum SGD; deterministic given the dataset and config.

    Samples are put in canonical image-id order before the seeded shuffle, so
    the storage order of ``dataset`` does not matter.
    """
    samples = [sample if isinstance(sample, TrainingSample) else TrainingSample(*sample)
               for sample in dataset]
    if not samples:
        raise InvalidInputError('training dataset is empty')
    samples.sort(key=lambda sample: sample.image_id)

    depth = samples[0].features.depth
    if initial_head is None:
        head = init_head(depth, config.seed)
    else:
        head = initial_head
        if head.depth != depth:
            raise InvalidInputError(f'initial head depth {head.depth} does not match features ({depth})')

    # per-image arrays, converted once
    arrays = [stack_batch([sample], depth=depth) for sample in samples]
    all_descriptors = np.concatenate([descriptors for descriptors, _ in arrays])
    all_targets = np.concatenate([targets for _, targets in arrays])

    schedule = StepDecay(config.learning_rate, config.decay_period, config.decay_factor)
    optimizer = MomentumSGD(config.learning_rate, config.momentum)
    rng = np.random.default_rng([config.seed, 1])
    parameters = head.parameters()
    trace = []

    logger.info(
        'Training pixel head: %d images, depth %d, %d epochs, batch %d',
        len(samples), depth, config.epochs, config.batch_size,
    )
    for epoch in range(config.epochs):
        optimizer.learning_rate = schedule.rate_at(epoch)
        order = rng.permutation(len(samples))
        for start in range(0, len(order), config.batch_size):
            chosen = order[start:start + config.batch_size]
            descriptors = np.concatenate([arrays[i][0] for i in chosen])
            targets = np.concatenate([arrays[i][1] for i in chosen])
            gradient = gradient_from_arrays(parameters, descriptors, targets, config.weight_decay)
            parameters = optimizer.step(parameters, gradient)

        loss = bce_with_logits(all_descriptors @ parameters[:-1] + parameters[-1], all_targets)
        trace.append(loss)
        logger.info('epoch %d/%d lr=%.6g loss=%.6f', epoch + 1, config.epochs,
                    optimizer.learning_rate, loss)

    return TrainingResult(head=PixelHead.from_parameters(parameters), loss_trace=trace)
