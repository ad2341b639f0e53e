from driftbench.harness.bench import run_benchmark, run_sweep
from driftbench.harness.config import ExperimentConfig, SweepSpec, parse_config

__all__ = ["ExperimentConfig", "SweepSpec", "parse_config", "run_benchmark", "run_sweep"]
