# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Optional
from typing import Tuple

from roadaware.base.config import as_penalty
from roadaware.base.config import get_setting
from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import SegmentationError


@dataclass(frozen=True)
class SegmentationConfig:
    # Gradient change threshold in dB/m.
    tau: float = 1.0
    min_segment_len: int = 5
    # Tolerated cost increase per merge; None calibrates it from the sequence.
    penalty: Optional[float] = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigurationError("tau must be positive")
        if self.min_segment_len < 2:
            raise ConfigurationError("min_segment_len must be at least 2")
        if self.penalty is not None and self.penalty < 0:
            raise ConfigurationError("penalty must be nonnegative")

    @classmethod
    def from_settings(cls, overrides=None):
        return cls(tau=get_setting("SEGMENTATION_TAU", float, overrides),
                   min_segment_len=get_setting("SEGMENTATION_MIN_SEGMENT_LEN", int,
                                               overrides),
                   penalty=get_setting("SEGMENTATION_PENALTY", as_penalty, overrides))


@dataclass(frozen=True)
class SegmentPartition:
    """Singular point indices splitting positions 0..length-1 into segments.

    A boundary b closes the segment ending at position b; the next segment
    starts at b + 1.
    """
    road_id: int
    length: int
    sp_indices: Tuple[int, ...] = ()
    penalty: Optional[float] = None

    def __post_init__(self):
        sp_indices = tuple(int(b) for b in self.sp_indices)
        if any(b1 >= b2 for b1, b2 in zip(sp_indices, sp_indices[1:])):
            raise SegmentationError("SP indices must be strictly increasing")
        if sp_indices and (sp_indices[0] < 0 or sp_indices[-1] > self.length - 2):
            raise SegmentationError("SP indices must lie in [0, %d]" % (self.length - 2))
        object.__setattr__(self, "sp_indices", sp_indices)

    @property
    def num_segments(self):
        return len(self.sp_indices) + 1

    @property
    def segment_bounds(self):
        """(start, end) position pairs, both inclusive."""

        starts = (0,) + tuple(b + 1 for b in self.sp_indices)
        ends = self.sp_indices + (self.length - 1,)
        return list(zip(starts, ends))

    def segment_lengths(self):
        return [end - start + 1 for start, end in self.segment_bounds]
