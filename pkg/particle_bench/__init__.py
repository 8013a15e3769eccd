"""Dense particle scene synthesis and segmentation evaluation."""

__version__ = "0.1.0"
