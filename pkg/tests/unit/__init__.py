"""Unit tests for ExperimentKit."""

