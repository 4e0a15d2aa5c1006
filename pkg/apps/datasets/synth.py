"""
Seeded synthetic datasets: one rectangular object per image whose descriptors
come from a foreground cluster, the rest from a background cluster.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, FeatureMap, ImageDims
from apps.detection.objectness import Proposal

from .records import AnnotationRecord

logger = logging.getLogger(__name__)

# pixel stride between feature positions (224 / 14)
STRIDE = 16
SPLITS = ('train', 'test')


@dataclass(frozen=True)
class SynthSpec:
    train_images: int = 200
    test_images: int = 100
    grid: Tuple[int, int] = (14, 14)
    depth: int = 16
    separation: float = 4.0
    noise: float = 1.0
    box_min: int = 5
    box_max: int = 11
    num_classes: int = 1
    top1_accuracy: float = 0.8
    proposals_per_image: int = 32
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'grid', tuple(int(v) for v in self.grid))
        height, width = self.grid
        if self.train_images < 0 or self.test_images < 0:
            raise InvalidInputError('image counts must be >= 0')
        if self.train_images + self.test_images < 1:
            raise InvalidInputError('a synthetic dataset needs at least one image')
        if height < 1 or width < 1 or self.depth < 1:
            raise InvalidInputError(f'grid and depth must be >= 1, got {self.grid} x {self.depth}')
        if not self.separation >= 0:
            raise InvalidInputError(f'separation must be >= 0, got {self.separation}')
        if not self.noise > 0:
            raise InvalidInputError(f'noise sigma must be > 0, got {self.noise}')
        if not (1 <= self.box_min <= self.box_max <= min(height, width)):
            raise InvalidInputError(
                f'box size range [{self.box_min}, {self.box_max}] does not fit grid {height}x{width}'
            )
        if self.num_classes < 1:
            raise InvalidInputError('num_classes must be >= 1')
        if not (0.0 <= self.top1_accuracy <= 1.0):
            raise InvalidInputError('top1_accuracy must lie in [0, 1]')
        if self.proposals_per_image < 0:
            raise InvalidInputError('proposals_per_image must be >= 0')

    @property
    def image_dims(self) -> ImageDims:
        return ImageDims(self.grid[0] * STRIDE, self.grid[1] * STRIDE)

    def count(self, split: str) -> int:
        return self.train_images if split == 'train' else self.test_images


@dataclass(frozen=True)
class SyntheticImage:
    record: AnnotationRecord
    features: FeatureMap
    split: str
    grid_box: Tuple[int, int, int, int]


@dataclass
class SyntheticDataset:
    spec: SynthSpec
    train: List[SyntheticImage] = field(default_factory=list)
    test: List[SyntheticImage] = field(default_factory=list)
    proposals: List[Proposal] = field(default_factory=list)

    def images(self) -> List[SyntheticImage]:
        return self.train + self.test

    def features(self) -> Dict[str, FeatureMap]:
        return {image.record.image_id: image.features for image in self.images()}

    def records(self, split: str) -> List[AnnotationRecord]:
        return [image.record for image in getattr(self, split)]


def class_name(index: int) -> str:
    return f'category_{index:02d}'


def _cluster_means(rng, spec: SynthSpec):
    means = []
    for _ in range(spec.num_classes):
        direction = rng.standard_normal(spec.depth)
        direction /= np.linalg.norm(direction)
        offset = 0.5 * spec.separation * spec.noise * direction
        means.append((offset, -offset))
    return means


def _jittered(rng, box: BBox, dims: ImageDims) -> BBox:
    scale = 0.15 * np.array([box.width, box.height, box.width, box.height])
    corners = np.array(box.as_list()) + rng.normal(0.0, 1.0, 4) * scale
    x1, x2 = np.clip(corners[[0, 2]], 0.0, dims.width)
    y1, y2 = np.clip(corners[[1, 3]], 0.0, dims.height)
    if x2 - x1 < 1.0 or y2 - y1 < 1.0:
        return box
    return BBox(float(x1), float(y1), float(x2), float(y2))


def _uniform(rng, dims: ImageDims) -> BBox:
    x1 = rng.uniform(0.0, dims.width - STRIDE / 2)
    y1 = rng.uniform(0.0, dims.height - STRIDE / 2)
    x2 = rng.uniform(x1 + STRIDE / 2, dims.width)
    y2 = rng.uniform(y1 + STRIDE / 2, dims.height)
    return BBox(float(x1), float(y1), float(x2), float(y2))


def _proposals(rng, spec: SynthSpec, record: AnnotationRecord) -> List[Proposal]:
    proposals = []
    for index in range(spec.proposals_per_image):
        if index % 2 == 0:
            box = _jittered(rng, record.boxes[0], record.dims)
        else:
            box = _uniform(rng, record.dims)
        proposals.append(Proposal(record.image_id, box, record.label))
    return proposals


def synth_generate(spec: SynthSpec) -> SyntheticDataset:
    """Build the dataset in memory; identical specs give identical datasets."""
    rng = np.random.default_rng(spec.seed)
    means = _cluster_means(rng, spec)
    height, width = spec.grid
    dims = spec.image_dims
    dataset = SyntheticDataset(spec)

    for split in SPLITS:
        images = getattr(dataset, split)
        for index in range(spec.count(split)):
            category = int(rng.integers(spec.num_classes))
            foreground, background = means[category]
            box_h = int(rng.integers(spec.box_min, spec.box_max + 1))
            box_w = int(rng.integers(spec.box_min, spec.box_max + 1))
            top = int(rng.integers(0, height - box_h + 1))
            left = int(rng.integers(0, width - box_w + 1))

            inside = np.zeros((height, width, 1), dtype=bool)
            inside[top:top + box_h, left:left + box_w] = True
            noise = rng.standard_normal((height, width, spec.depth)) * spec.noise
            values = np.where(inside, foreground, background) + noise

            record = AnnotationRecord(
                image_id=f'synth_{split}_{index:05d}',
                dims=dims,
                label=class_name(category),
                boxes=(BBox(left * STRIDE, top * STRIDE, (left + box_w) * STRIDE, (top + box_h) * STRIDE),),
                top1_correct=bool(rng.random() < spec.top1_accuracy),
            )
            images.append(SyntheticImage(record, FeatureMap(values), split, (left, top, box_w, box_h)))
            if split == 'test':
                dataset.proposals.extend(_proposals(rng, spec, record))

    logger.info('Synthesized %d train / %d test images, grid %dx%d, depth %d, separation %.3g',
                len(dataset.train), len(dataset.test), height, width, spec.depth, spec.separation)
    return dataset
