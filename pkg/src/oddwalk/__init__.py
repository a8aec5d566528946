"""Discrete homotopy of graph walks, 4-cycle closure invariants, the
bounded constructive coloring pipeline, sphere-sample experiments, and the
neighbor-complex bridge to fundamental groups."""

__version__ = "0.1.0"
