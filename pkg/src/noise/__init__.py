"""Trace-class Wiener noise synthesis."""

from .model import NoiseIncrement, NoiseModel, build_noise_model, trajectory_rng

__all__ = ["NoiseModel", "NoiseIncrement", "build_noise_model", "trajectory_rng"]
