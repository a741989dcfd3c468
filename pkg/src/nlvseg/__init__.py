"""Unsupervised video object segmentation with long-range nonlocal superpixel appearance."""

from .params import FlowParams, PipelineParams, load_config
from .pipeline import NoMotionEvidence, VideoSegmentation, segment_video

__all__ = ["FlowParams", "PipelineParams", "load_config", "NoMotionEvidence", "VideoSegmentation", "segment_video"]
__version__ = "0.1.0"
