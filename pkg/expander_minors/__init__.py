"""
expander_minors
Finds large complete minors in expander graphs: exact and spectral expansion
metrics, lazy random walks, the partition-based minor engine and a seeded
experiment harness.
"""
from .config import Config
from .errors import MinorsError
from .graph_core import Graph, build_graph
from .minor_engine import compute_params, find_minor, verify_witness
from .walks import RngStream

__version__ = '1.0.0'

__all__ = ['Config', 'MinorsError', 'Graph', 'build_graph', 'compute_params', 'find_minor',
           'verify_witness', 'RngStream', '__version__']
