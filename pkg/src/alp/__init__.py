"""Catalog engine for artists' personal libraries.

Stores qualified-Dublin-Core records per artist collection, answers
single- and cross-library queries, matches records against externally
digitized editions, exposes the store over OAI-PMH, and gates
in-copyright reading-mark images.
"""

__version__ = "0.1.0"
