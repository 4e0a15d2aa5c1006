"""
Directory-level access to feature grids, masks and synthetic datasets.
"""
import logging
from pathlib import Path
from typing import Dict, Iterable

from apps.core.exceptions import InvalidInputError
from apps.core.parallel import ordered_map
from apps.core.tensors import BinaryMask, FeatureMap

from . import formats, jsonl
from .synth import SyntheticDataset

logger = logging.getLogger(__name__)

DEFAULT_SUFFIX = '.wsft'
FEATURES_DIR = 'features'
TRAIN_FILE = 'train.jsonl'
TEST_FILE = 'test.jsonl'
PROPOSALS_FILE = 'proposals.jsonl'


class FeatureStore:
    """A directory of ``<image_id><suffix>`` WSFT files."""

    def __init__(self, directory, suffix=DEFAULT_SUFFIX):
        self.directory = Path(directory)
        self.suffix = suffix

    def __repr__(self):
        return f'FeatureStore({str(self.directory)!r})'

    def path_for(self, image_id: str) -> Path:
        if not image_id or image_id in ('.', '..') or '/' in image_id or '\\' in image_id:
            raise InvalidInputError(f'image id {image_id!r} cannot be used as a file name')
        return self.directory / f'{image_id}{self.suffix}'

    def load(self, image_id: str) -> FeatureMap:
        return formats.read_feature_file(self.path_for(image_id))

    def grid(self, image_id: str):
        height, width, _ = formats.read_feature_dims(self.path_for(image_id))
        return height, width

    def save(self, image_id: str, features: FeatureMap):
        self.directory.mkdir(parents=True, exist_ok=True)
        formats.write_feature_file(self.path_for(image_id), features)

    def load_many(self, image_ids: Iterable[str], threads: int = 1) -> Dict[str, FeatureMap]:
        image_ids = list(image_ids)
        loaded = ordered_map(self.load, image_ids, threads)
        logger.debug('Loaded %d feature maps from %s', len(loaded), self.directory)
        return dict(zip(image_ids, loaded))

    def load_mask(self, image_id: str) -> BinaryMask:
        return formats.read_binary_mask(self.path_for(image_id))

    def save_mask(self, image_id: str, mask):
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(image_id)
        formats.write_mask_file(path, mask)
        return path


def write_synthetic_dataset(dataset: SyntheticDataset, directory) -> Dict[str, Path]:
    """Lay the dataset out as ``features/``, ``train.jsonl``, ``test.jsonl`` and ``proposals.jsonl``."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    store = FeatureStore(root / FEATURES_DIR)
    for image in dataset.images():
        store.save(image.record.image_id, image.features)

    paths = {
        'features': store.directory,
        'train': root / TRAIN_FILE,
        'test': root / TEST_FILE,
        'proposals': root / PROPOSALS_FILE,
    }
    jsonl.write_annotations(paths['train'], dataset.records('train'))
    jsonl.write_annotations(paths['test'], dataset.records('test'))
    jsonl.write_proposals(paths['proposals'], dataset.proposals)
    logger.info('Wrote %d feature files and %d proposals under %s',
                len(dataset.images()), len(dataset.proposals), root)
    return paths
