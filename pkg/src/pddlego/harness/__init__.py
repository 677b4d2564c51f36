from .cli import build_parser, main
from .config import DEV_SEEDS, TEST_SEEDS, ConfigError, SuiteConfig, load_config, parse_seeds
from .suite import (
    CSV_FIELDS,
    IncomparableSuites,
    Metrics,
    Report,
    SeedStats,
    SuiteRun,
    aggregate,
    compare,
    rows_to_csv,
    run_one,
    run_suite,
    sample_std,
)

__all__ = [
    "CSV_FIELDS",
    "ConfigError",
    "DEV_SEEDS",
    "IncomparableSuites",
    "Metrics",
    "Report",
    "SeedStats",
    "SuiteConfig",
    "SuiteRun",
    "TEST_SEEDS",
    "aggregate",
    "build_parser",
    "compare",
    "load_config",
    "main",
    "parse_seeds",
    "rows_to_csv",
    "run_one",
    "run_suite",
    "sample_std",
]
