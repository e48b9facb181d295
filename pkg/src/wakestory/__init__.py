"""Windowed causal-effect estimation on spatio-temporal event data, with an
automatic four-scene interactive story generator.

The usual flow: parse the two CSVs, validate against a window grid, then
either sweep the grid for effect estimates or generate the full story bundle.
"""

from .dataset import (Dataset, ScenarioConfig, parse_dependent,
                      parse_interventions, parse_scenario, validate_dataset)
from .estimation import ResultGrid, results_to_csv, results_to_json, sweep_grid
from .storygen import generate_story, parse_bundle, serialize_bundle, verify_bundle
from .wake import WindowGrid, WindowSpec, make_grid

__version__ = "0.1.0"

__all__ = [
    "Dataset", "ScenarioConfig", "parse_dependent", "parse_interventions",
    "parse_scenario", "validate_dataset",
    "ResultGrid", "results_to_csv", "results_to_json", "sweep_grid",
    "generate_story", "parse_bundle", "serialize_bundle", "verify_bundle",
    "WindowGrid", "WindowSpec", "make_grid",
    "__version__",
]
