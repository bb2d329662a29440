"""Relative rank in the monoid of self-maps of N: constructions and finite-prefix verifiers."""

from .natfn import NatFn, Prefix, compose, identity, prefix
from .sets import SetRep

__version__ = "0.1.0"

__all__ = ["NatFn", "Prefix", "SetRep", "compose", "identity", "prefix", "__version__"]
