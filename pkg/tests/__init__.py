"""Tests for ExperimentKit."""

