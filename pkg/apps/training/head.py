"""
The per-position foreground classifier.

A 1x1 convolution with one output channel over a frozen feature grid is the
affine map ``w . F(y, x) + b`` at every position, followed by a sigmoid.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BinaryMask, FeatureMap, ProbMask

# strictly-inside-(0, 1) bounds for saturated sigmoids
PROB_FLOOR = np.finfo(np.float64).tiny
PROB_CEIL = np.nextafter(1.0, 0.0)


@dataclass(frozen=True, eq=False)
class PixelHead:
    weights: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        if weights.size < 1:
            raise InvalidInputError('a pixel head needs at least one weight')
        if not np.all(np.isfinite(weights)) or not np.isfinite(self.bias):
            raise InvalidInputError('pixel head parameters must be finite')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'bias', float(self.bias))

    @property
    def depth(self) -> int:
        return self.weights.size

    def parameters(self) -> np.ndarray:
        """Flat ``(d + 1,)`` vector: weights then bias."""
        return np.append(self.weights, self.bias)

    @classmethod
    def from_parameters(cls, vector) -> 'PixelHead':
        vector = np.asarray(vector, dtype=np.float64)
        return cls(weights=vector[:-1], bias=float(vector[-1]))

    def same_as(self, other: 'PixelHead') -> bool:
        return self.bias == other.bias and np.array_equal(self.weights, other.weights)


def init_head(depth: int, seed: int) -> PixelHead:
    if depth < 1:
        raise InvalidInputError(f'head depth must be >= 1, got {depth}')
    bound = 1.0 / np.sqrt(depth)
    rng = np.random.default_rng(seed)
    return PixelHead(weights=rng.uniform(-bound, bound, size=depth), bias=0.0)


def _check_depth(head: PixelHead, features: FeatureMap):
    if features.depth != head.depth:
        raise InvalidInputError(
            f'feature depth {features.depth} does not match head depth {head.depth}'
        )


def head_logits(head: PixelHead, features: FeatureMap) -> np.ndarray:
    _check_depth(head, features)
    return (features.positions() @ head.weights + head.bias).reshape(features.grid)


def head_forward(head: PixelHead, features: FeatureMap) -> ProbMask:
    logits = head_logits(head, features)
    probabilities = np.clip(expit(logits), PROB_FLOOR, PROB_CEIL)
    return ProbMask(probabilities, logits=logits)


def bce_with_logits(logits, targets) -> float:
    """Mean binary cross entropy in the stable form ``softplus(z) - y z``."""
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    losses = np.logaddexp(0.0, logits) - targets * logits
    return max(float(losses.mean()), 0.0)


def bce_loss(pred: ProbMask, target: BinaryMask) -> float:
    if pred.shape != target.shape:
        raise InvalidInputError(f'prediction {pred.shape} and target {target.shape} differ in shape')
    if pred.logits is not None:
        logits = pred.logits
    else:
        logits = logit(np.clip(pred.values, PROB_FLOOR, PROB_CEIL))
    return bce_with_logits(logits, target.values)


def stack_batch(batch, depth=None):
    """Concatenate ``(features, target)`` pairs into ``(N, d)`` and ``(N,)`` arrays."""
    if not batch:
        raise InvalidInputError('batch is empty')
    descriptors, targets = [], []
    for item in batch:
        features, target = item[0], item[1]
        if depth is not None and features.depth != depth:
            raise InvalidInputError(
                f'feature depth {features.depth} does not match head depth {depth}'
            )
        if target.shape != features.grid:
            raise InvalidInputError(
                f'target mask {target.shape} does not match feature grid {features.grid}'
            )
        descriptors.append(features.positions())
        targets.append(target.values.reshape(-1).astype(np.float64))
    return np.concatenate(descriptors), np.concatenate(targets)


def gradient_from_arrays(parameters, descriptors, targets, weight_decay) -> np.ndarray:
    weights, bias = parameters[:-1], parameters[-1]
    residual = (expit(descriptors @ weights + bias) - targets) / targets.size
    grad_w = descriptors.T @ residual + weight_decay * weights
    return np.append(grad_w, residual.sum())


def bce_grad(head: PixelHead, batch, weight_decay: float) -> np.ndarray:
    """Gradient of mean BCE plus ``weight_decay / 2 * |w|^2``; the bias is not decayed."""
    descriptors, targets = stack_batch(batch, depth=head.depth)
    return gradient_from_arrays(head.parameters(), descriptors, targets, weight_decay)


def batch_objective(head: PixelHead, batch, weight_decay: float) -> float:
    descriptors, targets = stack_batch(batch, depth=head.depth)
    loss = bce_with_logits(descriptors @ head.weights + head.bias, targets)
    return loss + 0.5 * weight_decay * float(head.weights @ head.weights)
