"""Integration tests for ExperimentKit."""

