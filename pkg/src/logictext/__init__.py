"""Toolkit for linearized table logical forms: parsing, attention masks, counterfactual data and metrics."""

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "analysis",
    "cli",
    "config",
    "counterfactual",
    "dataset_io",
    "diff",
    "exceptions",
    "logic_form",
    "logic_graph",
    "metrics",
    "reporters",
]
