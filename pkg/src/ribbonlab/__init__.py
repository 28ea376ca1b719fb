"""Exact-arithmetic workbench for graph complexes, cyclic A-infinity
structures, matrix cochain maps and the identities tying them together."""

__version__ = "0.1.0"
