"""
Deep descriptor transformation: category-wise co-localization.

All descriptors of one category are pooled; their dominant principal axis
separates the common object (positive projections) from the background.
"""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from apps.core.exceptions import DegenerateModelError, InvalidInputError
from apps.core.tensors import BBox, BinaryMask, FeatureMap, ImageDims, largest_component_bbox

logger = logging.getLogger(__name__)

POWER_TOLERANCE = 1e-8
POWER_MAX_ITERATIONS = 1000


@dataclass(frozen=True, eq=False)
class DdtModel:
    mean: np.ndarray
    axis: np.ndarray
    eigenvalue: float
    category: str = ''

    def __post_init__(self):
        for name in ('mean', 'axis'):
            vector = np.array(getattr(self, name), dtype=np.float64).reshape(-1)
            if not np.all(np.isfinite(vector)):
                raise InvalidInputError(f'DDT {name} must be finite')
            vector.setflags(write=False)
            object.__setattr__(self, name, vector)
        if self.mean.size != self.axis.size:
            raise InvalidInputError('DDT mean and axis differ in length')
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-9:
            raise InvalidInputError('DDT axis must have unit norm')
        if self.eigenvalue < 0:
            raise InvalidInputError('DDT eigenvalue must be >= 0')

    @property
    def depth(self) -> int:
        return self.mean.size


def power_iteration(matrix, seed, tolerance=POWER_TOLERANCE, max_iterations=POWER_MAX_ITERATIONS):
    """Dominant eigenvector of a symmetric PSD matrix from a seeded start.

    Stops when successive unit iterates differ by less than ``tolerance``.
    """
    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(matrix.shape[0])
    vector /= np.linalg.norm(vector)
    for iteration in range(max_iterations):
        product = matrix @ vector
        norm = np.linalg.norm(product)
        if norm == 0.0:
            # start fell in the null space
            vector = rng.standard_normal(matrix.shape[0])
            vector /= np.linalg.norm(vector)
            continue
        updated = product / norm
        step = np.linalg.norm(updated - vector)
        vector = updated
        if step < tolerance:
            logger.debug('power iteration converged after %d steps', iteration + 1)
            break
    else:
        logger.debug('power iteration hit the %d step cap', max_iterations)
    return vector


def _pool(features: Sequence[FeatureMap]):
    if not features:
        raise InvalidInputError('fit_ddt needs at least one feature map')
    depth = features[0].depth
    for fmap in features:
        if fmap.depth != depth:
            raise InvalidInputError(f'feature depths differ: {depth} vs {fmap.depth}')
    pooled = np.concatenate([fmap.positions() for fmap in features])
    if pooled.shape[0] < 2:
        raise InvalidInputError('fit_ddt needs at least two positions')
    return pooled


def fit_ddt(features: Sequence[FeatureMap], seed: int = 0, category: str = '') -> DdtModel:
    descriptors = _pool(list(features))
    if np.all(descriptors == descriptors[0]):
        raise DegenerateModelError('all descriptors are identical; covariance is zero')

    # accumulate in float64 whatever the storage precision
    mean = descriptors.mean(axis=0)
    centered = descriptors - mean
    covariance = centered.T @ centered / descriptors.shape[0]
    if not np.trace(covariance) > 0.0:
        raise DegenerateModelError('descriptor covariance is zero')

    axis = power_iteration(covariance, seed)
    eigenvalue = max(float(axis @ covariance @ axis), 0.0)

    projections = centered @ axis
    if projections[np.argmax(np.abs(projections))] < 0:
        axis = -axis

    logger.info('DDT %s: %d positions, depth %d, eigenvalue %.6g',
                category or '(all)', descriptors.shape[0], descriptors.shape[1], eigenvalue)
    return DdtModel(mean=mean, axis=axis / np.linalg.norm(axis), eigenvalue=eigenvalue, category=category)


def ddt_project(model: DdtModel, features: FeatureMap) -> np.ndarray:
    """Signed ``(h, w)`` projection map ``axis . (F(y, x) - mean)``."""
    if features.depth != model.depth:
        raise InvalidInputError(
            f'feature depth {features.depth} does not match DDT depth {model.depth}'
        )
    return ((features.positions() - model.mean) @ model.axis).reshape(features.grid)


def grid_box_to_pixels(box: BBox, grid, image: ImageDims) -> BBox:
    grid_height, grid_width = grid
    return BBox(
        box.x1 * image.width / grid_width,
        box.y1 * image.height / grid_height,
        box.x2 * image.width / grid_width,
        box.y2 * image.height / grid_height,
    )


def ddt_pseudo_box(model: DdtModel, features: FeatureMap, image: ImageDims) -> BBox:
    positive = BinaryMask(ddt_project(model, features) > 0)
    grid_box = largest_component_bbox(positive)
    if grid_box is None:
        return BBox.full(image)
    return grid_box_to_pixels(grid_box, features.grid, image)
