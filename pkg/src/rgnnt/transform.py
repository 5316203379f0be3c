"""Pair lifting of relational states and composition (triangle) atoms.

A state over objects ``O`` becomes a state over pairs ``O x O``:

* every atom ``p(o_1..o_m)`` becomes ``p(<o_i,o_j> for i, j row-major)``,
  an atom of arity ``m*m`` (``a0_transform``);
* for ``t >= 1`` a ternary atom ``Tri(<o,o'>, <o',o''>, <o,o''>)`` is added
  for every composable pair of pairs in the relation ``R_t``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .relcore import TRIANGLE, Atom, RelationalState, add_obj_atoms, augment_goal


class EmptyTuple(ValueError):
    """Raised for arity-0 atoms, which carry no object to send messages to."""


Pair = tuple


@dataclass(frozen=True)
class TransformedState:
    """Atoms over pair-objects plus the node universe used for message passing."""

    nodes: tuple[Pair, ...]
    atoms: tuple[Atom, ...]
    t: int | None = None


def square_tuple(w) -> tuple[Pair, ...]:
    """``<o_1..o_m>`` -> ``((o_1,o_1), .., (o_1,o_m), .., (o_m,o_m))``."""
    if len(w) == 0:
        raise EmptyTuple("cannot lift an arity-0 atom to pairs")
    return tuple((a, b) for a in w for b in w)


def a0_transform(state: RelationalState) -> tuple[Atom, ...]:
    """Lift every atom of ``S`` to pair arguments; ``|A_0(S)| = |S|``."""
    return tuple(Atom(a.predicate, square_tuple(a.args)) for a in state.atoms)


def _compose(rel: set) -> set:
    by_first: dict = {}
    for a, b in rel:
        by_first.setdefault(a, []).append(b)
    return {(a, c) for a, b in rel for c in by_first.get(b, ())}


def compute_rt(state: RelationalState, t: int, cumulative: bool = False) -> set[Pair]:
    """The co-occurrence relation ``R_1`` and its compositions ``R_t``.

    ``R_1`` holds every ordered pair (reflexive ones included) of objects
    appearing together in some atom of ``state``.  For ``t > 1``,
    ``R_t = R_{t-1} o R_{t-1}``; ``cumulative`` also keeps lower levels.
    """
    if t < 1:
        raise ValueError("t must be a positive integer")
    rel = {(a, b) for at in state.atoms for a in at.args for b in at.args}
    for _ in range(t - 1):
        nxt = _compose(rel)
        rel = nxt | rel if cumulative else nxt
    return rel


def delta_atoms(rel) -> tuple[Atom, ...]:
    """``Tri(<o,o'>, <o',o''>, <o,o''>)`` for every ``(o,o'), (o',o'')`` in ``rel``."""
    by_first: dict = {}
    for a, b in rel:
        by_first.setdefault(a, []).append(b)
    out = [
        Atom(TRIANGLE, ((a, b), (b, c), (a, c)))
        for a, b in rel
        for c in by_first.get(b, ())
    ]
    return tuple(sorted(out))


def _universe(objects, atoms) -> tuple[Pair, ...]:
    nodes = {(o, o) for o in objects}
    for a in atoms:
        nodes.update(a.args)
    return tuple(sorted(nodes))


def at_transform(state: RelationalState, t: int, cumulative: bool = False) -> TransformedState:
    """``A_t(S)`` over the pairs it mentions plus every diagonal pair.

    ``state`` should already carry goal copies and ``Obj`` markers; see
    :func:`prepare`.
    """
    atoms = a0_transform(state)
    if t >= 1:
        atoms = atoms + delta_atoms(compute_rt(state, t, cumulative))
    atoms = tuple(sorted(atoms))
    return TransformedState(_universe(state.objects, atoms), atoms, t)


def prepare(state: RelationalState, obj_atoms: bool = True) -> RelationalState:
    """Goal-augment a state and (optionally) mark objects with ``Obj``."""
    state = augment_goal(state)
    return add_obj_atoms(state) if obj_atoms else state


def full_triangles(objects) -> tuple[Atom, ...]:
    """All ``n^3`` triangle atoms over ``objects``."""
    return tuple(
        Atom(TRIANGLE, ((a, b), (b, c), (a, c))) for a in objects for b in objects for c in objects
    )


def is_triangle_shaped(a: Atom) -> bool:
    if a.predicate != TRIANGLE or len(a.args) != 3:
        return False
    (o1, o2), (o3, o4), (o5, o6) = a.args
    return o2 == o3 and o1 == o5 and o4 == o6

