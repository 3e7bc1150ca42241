"""Desk-scale reproductions: CHSH under unsharpness, frequency operators,
premeasurement entanglement and phase-space tracks."""

from .chsh import ChshSetting, chsh_unsharpness_scan, chsh_value, optimize_chsh, singlet
from .frequency import frequency_operator_stats
from .phasespace import FockSpace, HusimiPOM, TrackRecord, husimi_pom, track_simulate
from .premeasurement import premeasurement_demo

__all__ = [
    "ChshSetting",
    "FockSpace",
    "HusimiPOM",
    "TrackRecord",
    "chsh_unsharpness_scan",
    "chsh_value",
    "frequency_operator_stats",
    "husimi_pom",
    "optimize_chsh",
    "premeasurement_demo",
    "singlet",
    "track_simulate",
]
