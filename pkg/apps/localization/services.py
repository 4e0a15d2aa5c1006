"""
Box extraction from predicted foreground masks.

head_forward -> bilinear upsample to image size -> binarize -> largest
8-connected component -> tight box. An empty binarized mask falls back to
the 1x1 box around the highest-probability pixel.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from apps.core.exceptions import InvalidInputError, WsflError
from apps.core.parallel import ordered_map
from apps.core.tensors import (
    BBox,
    FeatureMap,
    ImageDims,
    ProbMask,
    bilinear_upsample,
    binarize,
    connected_components,
)
from apps.datasets.records import Prediction
from apps.training.head import PixelHead, head_forward

logger = logging.getLogger(__name__)

THRESHOLD_ABSOLUTE = 'absolute'
THRESHOLD_RELATIVE = 'relative'
THRESHOLD_MODES = (THRESHOLD_ABSOLUTE, THRESHOLD_RELATIVE)


@dataclass(frozen=True, eq=False)
class LocalizationResult:
    image_id: str
    box: BBox
    mask: ProbMask
    image: ImageDims
    components: Tuple[BBox, ...] = ()
    fallback: bool = False
    upsampled: Optional[ProbMask] = field(default=None, repr=False)

    def to_prediction(self, mask_path: Optional[str] = None) -> Prediction:
        return Prediction(self.image_id, self.box, mask_path=mask_path, components=self.components)


def cut_value(mask_hr: ProbMask, threshold: float, mode: str = THRESHOLD_ABSOLUTE) -> float:
    if not (0.0 <= threshold <= 1.0):
        raise InvalidInputError(f'mask threshold must lie in [0, 1], got {threshold}')
    if mode == THRESHOLD_ABSOLUTE:
        return threshold
    if mode == THRESHOLD_RELATIVE:
        return threshold * float(mask_hr.values.max())
    raise InvalidInputError(f'unknown threshold mode {mode!r}; expected one of {THRESHOLD_MODES}')


def localize_image(head: PixelHead, features: FeatureMap, image: ImageDims, mask_threshold: float = 0.5,
                   mode: str = THRESHOLD_ABSOLUTE, image_id: str = '',
                   keep_upsampled: bool = False) -> LocalizationResult:
    mask = head_forward(head, features)
    upsampled = bilinear_upsample(mask, image)
    foreground = binarize(upsampled, cut_value(upsampled, mask_threshold, mode))

    # largest first; equal sizes keep raster order of their first pixel
    components = sorted(connected_components(foreground), key=lambda component: -component.size)
    if components:
        box, fallback = components[0].bbox, False
    else:
        y, x = np.unravel_index(int(np.argmax(upsampled.values)), upsampled.shape)
        box, fallback = BBox(float(x), float(y), float(x + 1), float(y + 1)), True
        logger.debug('%s: empty mask at threshold %.3f, using argmax pixel (%d, %d)',
                     image_id or 'image', mask_threshold, x, y)

    return LocalizationResult(
        image_id=image_id,
        box=box,
        mask=mask,
        image=image,
        components=tuple(component.bbox for component in components),
        fallback=fallback,
        upsampled=upsampled if keep_upsampled else None,
    )


class LocalizationJob(NamedTuple):
    """One image to localize; ``features`` may be a loader called inside the worker."""

    image_id: str
    features: Union[FeatureMap, Callable[[], FeatureMap]]
    image: ImageDims


@dataclass
class LocalizationRun:
    results: List[LocalizationResult] = field(default_factory=list)
    failures: Dict[str, str] = field(default_factory=dict)


def localize_dataset(head: PixelHead, jobs, mask_threshold: float = 0.5, mode: str = THRESHOLD_ABSOLUTE,
                     threads: int = 1, keep_upsampled: bool = False) -> LocalizationRun:
    """Localize every job in input order; per-image failures are collected, not raised."""
    jobs = [job if isinstance(job, LocalizationJob) else LocalizationJob(*job) for job in jobs]
    # settings are checked before any image is touched
    cut_value(ProbMask(np.ones((1, 1))), mask_threshold, mode)

    def work(job):
        try:
            features = job.features() if callable(job.features) else job.features
            return localize_image(head, features, job.image, mask_threshold, mode, job.image_id, keep_upsampled)
        except (WsflError, OSError) as exc:
            return exc

    run = LocalizationRun()
    for job, outcome in zip(jobs, ordered_map(work, jobs, threads)):
        if isinstance(outcome, Exception):
            logger.error('%s: %s', job.image_id, outcome)
            run.failures[job.image_id] = str(outcome)
        else:
            run.results.append(outcome)
    if run.failures:
        logger.warning('%d of %d image(s) failed to localize', len(run.failures), len(jobs))
    logger.info('Localized %d image(s)', len(run.results))
    return run
