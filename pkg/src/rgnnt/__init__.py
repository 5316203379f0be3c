"""Relational graph networks over pair-lifted planning states."""

from .relcore import Atom, Predicate, RelationalState, atom, make_state
from .net import RgnnConfig, ValueModel

__version__ = "0.1.0"
