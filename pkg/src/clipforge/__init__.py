"""clipforge: short-video corpus curation for action-recognition pre-training.

Turns raw short-form videos plus hashtag metadata into a filtered, trimmed,
statistically characterized clip corpus, and orchestrates dataset-size
scaling experiments. See README.md for the pipeline walkthrough.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    ClipRecord,
    DatasetManifest,
    DetectionBox,
    DetectionFrame,
    PipelineConfig,
    RejectReason,
    SceneSpan,
    VideoAsset,
)
from .manifest import merge_manifests, read_manifest, write_manifest  # noqa: F401
