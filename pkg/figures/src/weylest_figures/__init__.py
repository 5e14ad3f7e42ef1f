"""Figure rendering for weylest results CSVs."""

__version__ = "0.1.0"

from .plots import PlotSpec, render, spec_from_dict, load_plot_spec
from .records import SchemaError, apply_filters, load_rows
