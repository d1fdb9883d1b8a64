"""Local energy concentration: covers, stopping times and restarts."""

from .cover import BallCover, WindowKernel, ball_energy_sup, build_cover, periodic_distance
from .monitor import (
    BlowupEvent,
    BoundVerdict,
    BubbleObserver,
    WindowEnergyObserver,
    bound_check,
    count_events,
    detect_stop,
    restart,
    run_with_restarts,
)

__all__ = [
    "BallCover",
    "WindowKernel",
    "build_cover",
    "ball_energy_sup",
    "periodic_distance",
    "BlowupEvent",
    "BoundVerdict",
    "BubbleObserver",
    "WindowEnergyObserver",
    "detect_stop",
    "restart",
    "run_with_restarts",
    "count_events",
    "bound_check",
]
