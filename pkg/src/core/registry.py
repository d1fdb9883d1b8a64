"""Experiment registry: subcommands, the verify pilot and ensemble, and ``check.*`` steps."""

from collections.abc import Mapping
from typing import Any

from src.core.exceptions import ExperimentError
from src.core.experiment import BaseExperiment


class ExperimentRegistry:
    """Name → experiment class, with one cached instance per name.

    Experiments keep no per-run state, so a cached instance serves every run
    of its subcommand or workflow step.
    """

    def __init__(self):
        self._classes: dict[str, type[BaseExperiment]] = {}
        self._instances: dict[str, BaseExperiment] = {}

    def register(self, name: str, experiment_class: type[BaseExperiment], overwrite: bool = False):
        """Register ``experiment_class`` under ``name``.

        Raises:
            ExperimentError: If ``name`` is taken and ``overwrite`` is false
        """
        if name in self._classes and not overwrite:
            raise ExperimentError(f"Experiment '{name}' is already registered")
        self._classes[name] = experiment_class
        self._instances.pop(name, None)

    def register_missing(self, experiments: Mapping[str, type[BaseExperiment]]) -> list[str]:
        """Register the entries whose names are free; returns the names added."""
        added = [name for name in experiments if name not in self._classes]
        for name in added:
            self._classes[name] = experiments[name]
        return added

    def get_class(self, name: str) -> type[BaseExperiment]:
        try:
            return self._classes[name]
        except KeyError:
            raise ExperimentError(f"Experiment '{name}' is not registered") from None

    def get_instance(self, name: str, **kwargs: Any) -> BaseExperiment:
        """Cached instance of the experiment registered as ``name``."""
        if name not in self._instances:
            self._instances[name] = self.get_class(name)(**kwargs)
        return self._instances[name]

    def names(self, prefix: str = "") -> list[str]:
        """Sorted registered names starting with ``prefix``."""
        return sorted(name for name in self._classes if name.startswith(prefix))

    def is_registered(self, name: str) -> bool:
        return name in self._classes

    def unregister(self, name: str):
        self._classes.pop(name, None)
        self._instances.pop(name, None)


_registry: ExperimentRegistry | None = None


def get_registry() -> ExperimentRegistry:
    """Get the global experiment registry instance."""
    global _registry
    if _registry is None:
        _registry = ExperimentRegistry()
    return _registry
