"""Relational planning states: objects, ground atoms and goals.

Objects are identified by their names (strings).  A state is immutable and
always stored in canonical form: objects sorted, atoms deduplicated and
sorted by ``(predicate, args)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple

GOAL_SUFFIX = "_g"
OBJ = "Obj"
TRIANGLE = "Tri"

ORIGINS = ("domain", "goal-copy", "static-obj", "triangle", "pair-lift", "baseline-aux")


@dataclass(frozen=True, order=True)
class Predicate:
    name: str
    arity: int
    origin: str = "domain"

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for predicate {self.name!r}")
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown predicate origin {self.origin!r}")

    def goal_copy(self) -> "Predicate":
        return Predicate(goal_name(self.name), self.arity, "goal-copy")


class Atom(NamedTuple):
    """A ground atom ``predicate(args...)``.

    ``args`` are object names for plain states and pairs of object names
    for pair-lifted states.
    """

    predicate: str
    args: tuple[Hashable, ...] = ()

    def __str__(self):
        return f"{self.predicate}({','.join(_fmt_arg(a) for a in self.args)})"


def _fmt_arg(arg) -> str:
    if isinstance(arg, tuple):
        return "<" + ",".join(map(str, arg)) + ">"
    return str(arg)


def atom(predicate: str, *args) -> Atom:
    return Atom(predicate, tuple(args))


def goal_name(name: str) -> str:
    return name + GOAL_SUFFIX


def _sorted_atoms(atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    return tuple(sorted({Atom(a[0], tuple(a[1])) for a in atoms}))


@dataclass(frozen=True)
class RelationalState:
    """Objects ``O``, true atoms ``S`` and goal atoms ``G`` of an instance."""

    objects: tuple[str, ...]
    atoms: tuple[Atom, ...]
    goal: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(set(self.objects))))
        object.__setattr__(self, "atoms", _sorted_atoms(self.atoms))
        object.__setattr__(self, "goal", _sorted_atoms(self.goal))

    @cached_property
    def atom_set(self) -> frozenset:
        return frozenset(self.atoms)

    def key(self) -> tuple:
        """Hashable, totally ordered serialization of the state."""
        return (self.objects, self.atoms, self.goal)

    def is_goal(self) -> bool:
        return self.atom_set.issuperset(self.goal)

    def with_atoms(self, atoms: Iterable[Atom]) -> "RelationalState":
        return RelationalState(self.objects, tuple(atoms), self.goal)

    def predicates(self) -> dict[str, int]:
        """Arity of every predicate used by an atom of ``S`` or ``G``."""
        return atom_arities(self.atoms + self.goal)

    def rename(self, mapping: dict) -> "RelationalState":
        """Apply an object bijection to objects, atoms and goal."""
        def ren(atoms):
            return tuple(Atom(a.predicate, tuple(mapping[o] for o in a.args)) for a in atoms)
        return RelationalState(tuple(mapping[o] for o in self.objects), ren(self.atoms), ren(self.goal))

    def __str__(self):
        return "{" + ", ".join(map(str, self.atoms)) + "}"


def canonicalize(state: RelationalState) -> RelationalState:
    """Return the canonical form of ``state``.

    States are canonical on construction, so this rebuilds from the set
    content; two states with equal sets yield equal (and identically
    ordered) results.
    """
    return RelationalState(state.objects, state.atoms, state.goal)


def make_state(objects: Iterable[str], atoms: Iterable, goal: Iterable = ()) -> RelationalState:
    return RelationalState(tuple(objects), tuple(atoms), tuple(goal))


def augment_goal(state: RelationalState) -> RelationalState:
    """Add ``p_g(o...)`` to ``S`` for every goal atom ``p(o...)``."""
    extra = [Atom(goal_name(a.predicate), a.args) for a in state.goal]
    return RelationalState(state.objects, state.atoms + tuple(extra), state.goal)


def add_obj_atoms(state: RelationalState) -> RelationalState:
    """Add the static marker ``Obj(o)`` for every object ``o``."""
    extra = [Atom(OBJ, (o,)) for o in state.objects]
    return RelationalState(state.objects, state.atoms + tuple(extra), state.goal)


def atom_arities(atoms: Iterable[Atom]) -> dict[str, int]:
    out: dict[str, int] = {}
    for a in atoms:
        if out.setdefault(a.predicate, len(a.args)) != len(a.args):
            raise ValueError(f"predicate {a.predicate!r} used with two arities")
    return out
