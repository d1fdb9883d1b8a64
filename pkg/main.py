"""Main entry point for a quick SLLG demonstration run."""

from src.config.loader import load_config
from src.core.logging import setup_logging
from src.services import RunService


def main():
    """Simulate one small trajectory and print its energy balance."""
    # Setup logging
    setup_logging()

    # --- Step 1: Configuration ---
    config = load_config(
        overrides=["grid.n=32", "noise.cutoff=4", "scheme.dt=1e-3", "sim.T=0.05", "sim.record_stride=10"]
    )

    # --- Step 2: Run ---
    outcome = RunService().run("simulate", config, write=False)

    if outcome.result is None:
        print("\n=== RUN FAILED ===")
        print(outcome.error or "Unknown error")
        return

    record = outcome.result.records[0]
    print("\n=== ENERGY ===")
    for t, value in zip(record.times, record.series["energy"]):
        print(f"t={t:.4f}  E={value:.6f}")

    print("\n=== SUMMARY ===")
    for key, value in outcome.result.extras.items():
        print(f"{key}: {value}")


if __name__ == "__main__":
    main()
