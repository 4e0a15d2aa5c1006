"""
Proposal objectness from foreground masks, and the background-filter labels
a WSOD refinement stage consumes.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, ProbMask

logger = logging.getLogger(__name__)

# labels a refinement stage should never push to background
DEFAULT_EXEMPT_CLASSES = frozenset({'person', 'pottedplant'})


@dataclass(frozen=True)
class Proposal:
    image_id: str
    box: BBox
    label: Optional[str] = None


@dataclass(frozen=True)
class ScoredProposal:
    proposal: Proposal
    objectness: float
    filtered: bool = False
    exempt_class: Optional[str] = None

    def __post_init__(self):
        if not (0.0 <= self.objectness <= 1.0):
            raise InvalidInputError(f'objectness must lie in [0, 1], got {self.objectness}')


def rasterize(box: BBox, height: int, width: int):
    """Pixel index ranges touched by ``box``: ``floor(x1) <= x < ceil(x2)``, clipped."""
    x_start = min(max(math.floor(box.x1), 0), width)
    x_stop = min(max(math.ceil(box.x2), 0), width)
    y_start = min(max(math.floor(box.y1), 0), height)
    y_stop = min(max(math.ceil(box.y2), 0), height)
    return slice(y_start, y_stop), slice(x_start, x_stop)


def proposal_objectness(mask_hr: ProbMask, proposal: Proposal) -> float:
    """Mean mask value over the pixels the proposal covers."""
    rows, cols = rasterize(proposal.box, mask_hr.height, mask_hr.width)
    window = mask_hr.values[rows, cols]
    if window.size == 0:
        raise InvalidInputError(
            f'proposal {proposal.box.as_list()} on {proposal.image_id} covers no pixels'
        )
    return float(np.clip(window.mean(), window.min(), window.max()))


def score_proposals(mask_hr: ProbMask, proposals: Iterable[Proposal]) -> List[ScoredProposal]:
    return [ScoredProposal(proposal, proposal_objectness(mask_hr, proposal))
            for proposal in proposals]


def filter_proposals(scored, threshold: float = 0.2,
                     exempt_classes=DEFAULT_EXEMPT_CLASSES) -> List[ScoredProposal]:
    """Mark proposals strictly below ``threshold`` as background unless their class is exempt."""
    if not (0.0 <= threshold <= 1.0):
        raise InvalidInputError(f'threshold must lie in [0, 1], got {threshold}')
    exempt_classes = frozenset(exempt_classes or ())

    labelled = []
    for item in scored:
        label = item.proposal.label
        exempt = label is not None and label in exempt_classes
        labelled.append(ScoredProposal(
            proposal=item.proposal,
            objectness=item.objectness,
            filtered=item.objectness < threshold and not exempt,
            exempt_class=label if exempt else None,
        ))
    logger.debug('%d of %d proposals filtered at %.3f',
                 sum(item.filtered for item in labelled), len(labelled), threshold)
    return labelled
