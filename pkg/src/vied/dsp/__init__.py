"""Frequency tracking and fundamental-phasor estimation."""

from .fll import FrequencyTracker
from .phasor import CHANNELS, ChannelBank, PhasorEstimator, PhasorSet

__all__ = [
    "CHANNELS",
    "ChannelBank",
    "FrequencyTracker",
    "PhasorEstimator",
    "PhasorSet",
]
