"""Binary relational-join formulas over a state, and the Navig-xy distance family.

A formula denotes a binary relation on the objects of a state.  Atoms name
binary relations of the state (unary ones are read as ``P(x,x)``, goal atoms
as ``P_g``); ``Exists(phi, psi)`` is the composition
``{(u,v) : exists w. phi(u,w) and psi(w,v)}``; ``Converse`` swaps the
arguments of an atom, which the distance formulas need for ``Succ(x',x)``.

:func:`evaluate_join` works bottom-up on boolean matrices.
:func:`holds` is the independent reference: it expands the quantifier over
witnesses for a single pair.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .relcore import RelationalState, augment_goal


class UnknownRelation(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class Rel:
    name: str


def _literal(body, what):
    if not (isinstance(body, Rel) or (isinstance(body, Converse) and isinstance(body.body, Rel))):
        raise TypeError(f"{what} applies to relation atoms only, got {body!r}")


@dataclass(frozen=True, eq=False)
class Neg:
    """Negated atom; negation of compound formulas is outside the join class."""

    body: object

    def __post_init__(self):
        _literal(self.body, "negation")


@dataclass(frozen=True, eq=False)
class And:
    left: object
    right: object


@dataclass(frozen=True, eq=False)
class Or:
    left: object
    right: object


@dataclass(frozen=True, eq=False)
class Exists:
    """``exists z. left(x,z) and right(z,y)``."""

    left: object
    right: object


@dataclass(frozen=True, eq=False)
class Converse:
    """``R(y,x)`` for an atom ``R``."""

    body: object

    def __post_init__(self):
        if not isinstance(self.body, Rel):
            raise TypeError(f"converse applies to relation atoms only, got {self.body!r}")


def children(f) -> tuple:
    if isinstance(f, Rel):
        return ()
    if isinstance(f, (Neg, Converse)):
        return (f.body,)
    return (f.left, f.right)


def _relations(state: RelationalState, vocabulary=None):
    """Pair sets of every binary-readable relation, goal copies included."""
    s = augment_goal(state)
    rels: dict[str, set] = {}
    if vocabulary is not None:
        for p in vocabulary:
            rels.setdefault(p, set())
    for a in s.atoms:
        if len(a.args) == 1:
            rels.setdefault(a.predicate, set()).add((a.args[0], a.args[0]))
        elif len(a.args) == 2:
            rels.setdefault(a.predicate, set()).add(tuple(a.args))
    return rels


def _vocab_with_goals(vocabulary):
    if vocabulary is None:
        return None
    return set(vocabulary) | {f"{p}_g" for p in vocabulary}


def evaluate_join(formula, state: RelationalState, vocabulary=None) -> set:
    """The pairs ``(u,v)`` of objects satisfying ``formula``.

    ``vocabulary`` lists relation names that exist even when the state has no
    atom of them; otherwise only relations present in the state are known.
    """
    objects = list(state.objects)
    index = {o: i for i, o in enumerate(objects)}
    n = len(objects)
    rels = _relations(state, _vocab_with_goals(vocabulary))
    memo: dict[int, np.ndarray] = {}

    def ev(f) -> np.ndarray:
        got = memo.get(id(f))
        if got is not None:
            return got
        if isinstance(f, Rel):
            if f.name not in rels:
                raise UnknownRelation(f.name)
            out = np.zeros((n, n), dtype=bool)
            for u, v in rels[f.name]:
                out[index[u], index[v]] = True
        elif isinstance(f, Neg):
            out = ~ev(f.body)
        elif isinstance(f, Converse):
            out = ev(f.body).T.copy()
        elif isinstance(f, And):
            out = ev(f.left) & ev(f.right)
        elif isinstance(f, Or):
            out = ev(f.left) | ev(f.right)
        elif isinstance(f, Exists):
            out = (ev(f.left).astype(np.int64) @ ev(f.right).astype(np.int64)) > 0
        else:
            raise TypeError(f"not a join formula: {f!r}")
        memo[id(f)] = out
        return out

    m = ev(formula)
    return {(objects[i], objects[j]) for i, j in zip(*np.nonzero(m))}


def holds(formula, state: RelationalState, u, v, vocabulary=None) -> bool:
    """Truth of ``formula(u, v)`` by direct quantifier expansion."""
    rels = _relations(state, _vocab_with_goals(vocabulary))

    def sat(f, a, b) -> bool:
        if isinstance(f, Rel):
            if f.name not in rels:
                raise UnknownRelation(f.name)
            return (a, b) in rels[f.name]
        if isinstance(f, Neg):
            return not sat(f.body, a, b)
        if isinstance(f, Converse):
            return sat(f.body, b, a)
        if isinstance(f, And):
            return sat(f.left, a, b) and sat(f.right, a, b)
        if isinstance(f, Or):
            return sat(f.left, a, b) or sat(f.right, a, b)
        if isinstance(f, Exists):
            return any(sat(f.left, a, w) and sat(f.right, w, b) for w in state.objects)
        raise TypeError(f"not a join formula: {f!r}")

    return sat(formula, u, v)


def brute_force_join(formula, state: RelationalState, vocabulary=None) -> set:
    return {(u, v) for u in state.objects for v in state.objects if holds(formula, state, u, v, vocabulary)}


def random_formula(rng: random.Random, names, depth: int = 3):
    """A random formula of nesting depth at most ``depth`` over relation ``names``."""
    names = sorted(names)
    if depth == 0 or rng.random() < 0.25:
        lit = Rel(rng.choice(names))
        if rng.random() < 0.3:
            lit = Converse(lit)
        return Neg(lit) if rng.random() < 0.3 else lit
    left = random_formula(rng, names, depth - 1)
    right = random_formula(rng, names, depth - 1)
    return rng.choice([And, Or, Exists, Exists])(left, right)


def depth(formula) -> int:
    kids = children(formula)
    return 0 if not kids else 1 + max(depth(c) for c in kids)


# ---------------------------------------------------------------- examples


def key_opens_lock():
    """``exists s. Key(k,s) and Lock(l,s)``: key ``k`` fits lock ``l``."""
    return Exists(Rel("key"), Converse(Rel("lock")))


NAVIG_VOCABULARY = ("succ-x", "succ-y", "at", "blocked", "cell")


def navig_phi(k: int):
    """``phi_k(x,y)``: a walk of exactly ``k`` moves over free cells reaches the goal.

    ``phi_0 = At_g`` and ``phi_{k+1} = not Blocked and (step_x or step_y)``,
    where ``step_x = exists x'. Adj-x(x,x') and phi_k(x',y)`` and
    ``step_y = exists y'. phi_k(x,y') and Adj-y(y',y)``.
    """
    adj_x = Or(Rel("succ-x"), Converse(Rel("succ-x")))
    adj_y = Or(Rel("succ-y"), Converse(Rel("succ-y")))
    free = Neg(Rel("blocked"))
    phi = Rel("at_g")
    for _ in range(k):
        phi = And(free, Or(Exists(adj_x, phi), Exists(phi, adj_y)))
    return phi


def dist_k(state: RelationalState, k: int) -> bool:
    """``Dist_k(S) = exists x y. At(x,y) and phi_k(x,y)``."""
    return bool(evaluate_join(And(Rel("at"), navig_phi(k)), state, NAVIG_VOCABULARY))


def min_dist(state: RelationalState, k_max: int | None = None) -> int | None:
    """Smallest ``k`` with ``Dist_k(S)``, or None if there is none up to ``k_max``."""
    if k_max is None:
        # a shortest walk visits each of the at most |O|^2 / 4 cells once
        k_max = len(state.objects) ** 2
    for k in range(k_max + 1):
        if dist_k(state, k):
            return k
    return None


def subformulas(formula) -> list:
    seen: dict[int, object] = {}
    stack = [formula]
    while stack:
        f = stack.pop()
        if id(f) not in seen:
            seen[id(f)] = f
            stack.extend(children(f))
    return list(seen.values())


def quantifier_depth(formula) -> int:
    memo: dict[int, int] = {}

    def qd(f):
        if id(f) not in memo:
            inner = max((qd(c) for c in children(f)), default=0)
            memo[id(f)] = inner + (1 if isinstance(f, Exists) else 0)
        return memo[id(f)]

    return qd(formula)


def suggest_parameters(formulas) -> dict:
    """Reporting heuristic for a set of joins: ``t`` from quantifier depth,
    ``k`` and ``L`` from the sum and maximum of subformula counts.  No
    guarantee is attached to these numbers."""
    formulas = list(formulas)
    counts = [len(subformulas(f)) for f in formulas]
    return {
        "t": max((quantifier_depth(f) for f in formulas), default=0),
        "k": sum(counts),
        "L": max(counts, default=0),
    }
