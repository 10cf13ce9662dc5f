# models/drive.py
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field

SequenceLabel = Literal['microwave_gate', 'laser_gate', 'carrier_only', 'analysis', 'custom']


class DriveSnapshot(BaseModel):
    """
    Which drives are on during a segment and how they are scaled.

    Together with GateParams and the absolute time t this fixes H(t).
    raman_carrier marks a carrier produced by the Raman beams, so spontaneous
    emission is active while it is on even without the sideband.
    """
    model_config = ConfigDict(frozen=True)

    carrier_on: bool = True
    carrier_phase: float = 0.0
    carrier_scale: float = Field(default=1.0, ge=0)
    sideband_on: bool = True
    sideband_phase_offsets: tuple[float, float] = (0.0, 0.0)
    sideband_scale: float = Field(default=1.0, ge=0)
    raman_carrier: bool = False

    @property
    def carrier_amplitude(self) -> float:
        return self.carrier_scale if self.carrier_on else 0.0

    @property
    def sideband_amplitude(self) -> float:
        return self.sideband_scale if self.sideband_on else 0.0

    @property
    def raman_active(self) -> bool:
        return self.sideband_on or (self.carrier_on and self.raman_carrier)

    def scaled(self, carrier: float = 1.0, sideband: float = 1.0) -> DriveSnapshot:
        return self.model_copy(update={
            'carrier_scale': self.carrier_scale * carrier,
            'sideband_scale': self.sideband_scale * sideband,
        })


class PulseSegment(BaseModel):
    """
    One drive configuration held for `duration`.

    frame_shift is a virtual phase update applied when the segment ends:
    both qubit frames rotate about z so that |uu> gains frame_shift
    relative to |dd>. It takes no time and leaves populations untouched.
    """
    model_config = ConfigDict(frozen=True)

    duration: float = Field(ge=0)
    drive: DriveSnapshot = Field(default_factory=DriveSnapshot)
    frame_shift: float = 0.0


class PulseSequence(BaseModel):
    """Ordered drive segments, played back to back on one absolute clock."""
    model_config = ConfigDict(frozen=True)

    segments: tuple[PulseSegment, ...] = ()
    label: SequenceLabel = 'custom'

    @property
    def total_duration(self) -> float:
        return math.fsum(seg.duration for seg in self.segments)

    @property
    def sideband_time(self) -> float:
        return math.fsum(seg.duration for seg in self.segments if seg.drive.sideband_on)

    def boundaries(self, t0: float = 0.0) -> list[tuple[float, float]]:
        """Absolute (start, end) of every segment when playback starts at t0."""
        spans = []
        start = t0
        for seg in self.segments:
            spans.append((start, start + seg.duration))
            start += seg.duration
        return spans

    def then(self, other: PulseSequence, label: SequenceLabel | None = None) -> PulseSequence:
        return PulseSequence(segments=self.segments + other.segments, label=label or self.label)
