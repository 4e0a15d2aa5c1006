"""
Heat-map overlays of upsampled foreground masks, drawn with Pillow.
"""
from pathlib import Path
from typing import Iterable

import numpy as np
from PIL import Image, ImageDraw

from apps.core.tensors import BBox, ProbMask

BACKGROUND = (32, 32, 48)
HOT = (255, 64, 0)
PREDICTED_OUTLINE = (255, 255, 0)
GT_OUTLINE = (0, 255, 0)


def heat_image(mask_hr: ProbMask) -> Image.Image:
    """Blend from a dark background to a hot colour by mask value."""
    alpha = mask_hr.values[:, :, None]
    colours = (1.0 - alpha) * np.array(BACKGROUND) + alpha * np.array(HOT)
    return Image.fromarray(np.rint(colours).astype(np.uint8))


def _outline(draw, box: BBox, colour, width):
    # Pillow rectangles include the end pixel; boxes are half-open
    draw.rectangle(
        [int(box.x1), int(box.y1), max(int(box.x1), int(np.ceil(box.x2)) - 1),
         max(int(box.y1), int(np.ceil(box.y2)) - 1)],
        outline=colour, width=width,
    )


def overlay_image(mask_hr: ProbMask, box: BBox, gt_boxes: Iterable[BBox] = (), width: int = 2) -> Image.Image:
    image = heat_image(mask_hr)
    draw = ImageDraw.Draw(image)
    for gt_box in gt_boxes:
        _outline(draw, gt_box, GT_OUTLINE, width)
    _outline(draw, box, PREDICTED_OUTLINE, width)
    return image


def render_overlay(path, mask_hr: ProbMask, box: BBox, gt_boxes: Iterable[BBox] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    overlay_image(mask_hr, box, gt_boxes).save(path, format='PNG')
    return path
