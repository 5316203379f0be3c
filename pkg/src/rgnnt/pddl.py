"""STRIPS subset of PDDL: parsing, naive grounding and successor generation.

Supported: ``:strips``, ``:typing`` (with type hierarchies), domain
constants, positive conjunctive preconditions, add/delete effects.
Anything else is rejected with :class:`UnsupportedFeature`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

from .relcore import Atom, Predicate, RelationalState


class PDDLError(Exception):
    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)
        self.line = line
        self.col = col


class PDDLSyntaxError(PDDLError):
    pass


class UnsupportedFeature(PDDLError):
    pass


class ArityMismatch(PDDLError):
    pass


class UnknownPredicate(PDDLError):
    pass


class UnknownObject(PDDLError):
    pass


SUPPORTED_REQUIREMENTS = {":strips", ":typing"}
UNSUPPORTED_SECTIONS = {
    ":functions", ":derived", ":axiom", ":durative-action", ":process", ":event", ":constraints",
}

# ---------------------------------------------------------------- s-expressions


class Token(str):
    """A string carrying the position it was read from."""

    line: int
    col: int

    def __new__(cls, text, line, col):
        tok = super().__new__(cls, text)
        tok.line, tok.col = line, col
        return tok


class SList(list):
    line: int = 0
    col: int = 0


_TOKEN_RE = re.compile(r";[^\n]*|\(|\)|[^\s()]+|\s+")


def tokenize(text: str):
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        s = m.group()
        if not s[0].isspace() and s[0] != ";":
            yield Token(s if s in "()" else s.lower(), line, col)
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)


def parse_sexpr(text: str) -> SList:
    stack: list[SList] = []
    result = None
    for tok in tokenize(text):
        if tok == "(":
            lst = SList()
            lst.line, lst.col = tok.line, tok.col
            stack.append(lst)
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", tok.line, tok.col)
            lst = stack.pop()
            if stack:
                stack[-1].append(lst)
            elif result is None:
                result = lst
            else:
                raise PDDLSyntaxError("more than one top-level expression", lst.line, lst.col)
        else:
            if not stack:
                raise PDDLSyntaxError(f"unexpected token {tok!r} at top level", tok.line, tok.col)
            stack[-1].append(tok)
    if stack:
        raise PDDLSyntaxError("unterminated '('", stack[-1].line, stack[-1].col)
    if result is None:
        raise PDDLSyntaxError("empty input", 1, 1)
    return result


def _pos(x):
    return getattr(x, "line", None), getattr(x, "col", None)


def _expect_list(x, what):
    if not isinstance(x, list):
        raise PDDLSyntaxError(f"expected {what}, found {x!r}", *_pos(x))
    return x


def _typed_list(items) -> list[tuple[str, str]]:
    """Parse ``a b - t c`` into ``[(a, t), (b, t), (c, 'object')]``."""
    out, pending = [], []
    it = iter(items)
    for tok in it:
        if isinstance(tok, list):
            raise PDDLSyntaxError("unexpected list in typed list", *_pos(tok))
        if tok == "-":
            typ = next(it, None)
            if typ is None or isinstance(typ, list):
                if isinstance(typ, list) and typ and typ[0] == "either":
                    raise UnsupportedFeature("'either' types are not supported", *_pos(typ))
                raise PDDLSyntaxError("missing type after '-'", *_pos(tok))
            out.extend((name, str(typ)) for name in pending)
            pending = []
        else:
            pending.append(str(tok))
    out.extend((name, "object") for name in pending)
    return out


# ---------------------------------------------------------------- domain model


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    precond: tuple[Atom, ...]
    add: tuple[Atom, ...]
    delete: tuple[Atom, ...]


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    precond: frozenset
    add: frozenset
    delete: frozenset

    def applicable(self, state: RelationalState) -> bool:
        return self.precond <= state.atom_set

    def apply(self, state: RelationalState) -> RelationalState:
        return state.with_atoms((state.atom_set - self.delete) | self.add)

    def __str__(self):
        return f"({self.name}{''.join(' ' + a for a in self.args)})"


@dataclass
class DomainModel:
    name: str
    predicates: dict[str, Predicate] = field(default_factory=dict)
    predicate_types: dict[str, tuple[str, ...]] = field(default_factory=dict)
    schemas: list[ActionSchema] = field(default_factory=list)
    types: dict[str, str] = field(default_factory=dict)  # type -> parent
    constants: dict[str, str] = field(default_factory=dict)

    def supertypes(self, typ: str) -> set[str]:
        out = {typ, "object"}
        seen = 0
        while typ in self.types and typ != "object":
            typ = self.types[typ]
            out.add(typ)
            seen += 1
            if seen > len(self.types):
                raise PDDLError("cyclic type hierarchy")
        return out


def _check_atom(expr, domain: DomainModel, variables: set | None, where: str) -> Atom:
    lst = _expect_list(expr, "atom")
    if not lst or isinstance(lst[0], list):
        raise PDDLSyntaxError(f"malformed atom in {where}", *_pos(lst))
    head = str(lst[0])
    if head in ("not", "or", "imply", "forall", "exists", "when", "=", "increase", "decrease"):
        raise UnsupportedFeature(f"'{head}' in {where} is not supported", *_pos(lst))
    if head not in domain.predicates:
        raise UnknownPredicate(f"unknown predicate {head!r} in {where}", *_pos(lst))
    args = lst[1:]
    for a in args:
        if isinstance(a, list):
            raise PDDLSyntaxError(f"nested term in {where}", *_pos(a))
    if len(args) != domain.predicates[head].arity:
        raise ArityMismatch(
            f"{head} expects {domain.predicates[head].arity} arguments, got {len(args)} in {where}",
            *_pos(lst),
        )
    if variables is not None:
        for a in args:
            if a.startswith("?") and a not in variables:
                raise PDDLSyntaxError(f"variable {a} not among parameters of {where}", *_pos(a))
            if not a.startswith("?") and a not in domain.constants:
                raise UnknownObject(f"unknown constant {a!r} in {where}", *_pos(a))
    return Atom(head, tuple(str(a) for a in args))


def _conjunction(expr) -> list:
    if isinstance(expr, list) and expr and expr[0] == "and":
        return list(expr[1:])
    if isinstance(expr, list) and not expr:
        return []
    return [expr]


def _parse_action(lst, domain: DomainModel) -> ActionSchema:
    if len(lst) < 2 or isinstance(lst[1], list):
        raise PDDLSyntaxError("action without name", *_pos(lst))
    name = str(lst[1])
    params, pre, eff = [], [], []
    i = 2
    while i < len(lst):
        key = lst[i]
        if i + 1 >= len(lst):
            raise PDDLSyntaxError(f"missing value for {key}", *_pos(key))
        val = lst[i + 1]
        if key == ":parameters":
            params = _typed_list(_expect_list(val, "parameter list"))
        elif key == ":precondition":
            pre = _conjunction(val)
        elif key == ":effect":
            eff = _conjunction(val)
        else:
            raise UnsupportedFeature(f"action field {key} is not supported", *_pos(key))
        i += 2
    variables = {p for p, _ in params}
    for p, typ in params:
        if not p.startswith("?"):
            raise PDDLSyntaxError(f"parameter {p!r} must start with '?'", *_pos(lst))
        if typ != "object" and typ not in domain.types:
            raise PDDLError(f"unknown type {typ!r} in action {name}", *_pos(lst))
    where = f"action {name}"
    precond = tuple(_check_atom(e, domain, variables, where) for e in pre)
    add, delete = [], []
    for e in eff:
        if isinstance(e, list) and e and e[0] == "not":
            if len(e) != 2:
                raise PDDLSyntaxError("malformed negative effect", *_pos(e))
            delete.append(_check_atom(e[1], domain, variables, where))
        else:
            add.append(_check_atom(e, domain, variables, where))
    return ActionSchema(name, tuple(params), precond, tuple(add), tuple(delete))


def parse_domain(text: str) -> DomainModel:
    """Parse a domain definition into a :class:`DomainModel`."""
    expr = parse_sexpr(text)
    if len(expr) < 2 or expr[0] != "define" or not isinstance(expr[1], list) or expr[1][:1] != ["domain"]:
        raise PDDLSyntaxError("expected (define (domain <name>) ...)", *_pos(expr))
    domain = DomainModel(name=str(expr[1][1]) if len(expr[1]) > 1 else "")
    actions = []
    for section in expr[2:]:
        section = _expect_list(section, "domain section")
        if not section:
            raise PDDLSyntaxError("empty section", *_pos(section))
        head = section[0]
        if head == ":requirements":
            for req in section[1:]:
                if req not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(f"requirement {req} is not supported", *_pos(req))
        elif head == ":types":
            for name, parent in _typed_list(section[1:]):
                domain.types[name] = parent
        elif head == ":constants":
            for name, typ in _typed_list(section[1:]):
                domain.constants[name] = typ
        elif head == ":predicates":
            for p in section[1:]:
                p = _expect_list(p, "predicate declaration")
                if not p or isinstance(p[0], list):
                    raise PDDLSyntaxError("malformed predicate declaration", *_pos(p))
                name = str(p[0])
                args = _typed_list(p[1:])
                if name in domain.predicates:
                    raise PDDLError(f"predicate {name!r} declared twice", *_pos(p))
                domain.predicates[name] = Predicate(name, len(args))
                domain.predicate_types[name] = tuple(t for _, t in args)
        elif head == ":action":
            actions.append(section)
        elif head in UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(f"section {head} is not supported", *_pos(head))
        else:
            raise PDDLSyntaxError(f"unknown domain section {head!r}", *_pos(head))
    domain.schemas = [_parse_action(a, domain) for a in actions]
    return domain


@dataclass
class Problem:
    name: str
    domain: DomainModel
    state: RelationalState
    object_types: dict[str, str]


def parse_problem(text: str, domain: DomainModel) -> Problem:
    """Parse a problem; the initial state (with goal) is ``problem.state``."""
    expr = parse_sexpr(text)
    if len(expr) < 2 or expr[0] != "define" or not isinstance(expr[1], list) or expr[1][:1] != ["problem"]:
        raise PDDLSyntaxError("expected (define (problem <name>) ...)", *_pos(expr))
    name = str(expr[1][1]) if len(expr[1]) > 1 else ""
    objects = dict(domain.constants)
    init_exprs, goal_exprs = [], []
    for section in expr[2:]:
        section = _expect_list(section, "problem section")
        head = section[0] if section else None
        if head == ":domain":
            if len(section) > 1 and domain.name and section[1] != domain.name:
                raise PDDLError(f"problem is for domain {section[1]!r}, not {domain.name!r}", *_pos(section))
        elif head == ":objects":
            for obj, typ in _typed_list(section[1:]):
                if typ != "object" and typ not in domain.types:
                    raise PDDLError(f"unknown type {typ!r} for object {obj!r}", *_pos(section))
                objects[obj] = typ
        elif head == ":init":
            init_exprs = list(section[1:])
        elif head == ":goal":
            if len(section) != 2:
                raise PDDLSyntaxError("goal must be a single formula", *_pos(section))
            goal_exprs = _conjunction(section[1])
        elif head in (":requirements",):
            continue
        elif head in (":metric", ":constraints"):
            raise UnsupportedFeature(f"section {head} is not supported", *_pos(section))
        else:
            raise PDDLSyntaxError(f"unknown problem section {head!r}", *_pos(section))

    def ground_atom(e, where):
        a = _check_atom(e, domain, None, where)
        for o, pos in zip(a.args, _expect_list(e, "atom")[1:]):
            if o not in objects:
                raise UnknownObject(f"unknown object {o!r} in {where}", *_pos(pos))
        return a

    init = [ground_atom(e, "init") for e in init_exprs]
    goal = [ground_atom(e, "goal") for e in goal_exprs]
    state = RelationalState(tuple(objects), tuple(init), tuple(goal))
    return Problem(name, domain, state, objects)


# ---------------------------------------------------------------- grounding


def ground(domain: DomainModel, problem: Problem) -> list[GroundAction]:
    """All type-respecting bindings of every schema, in deterministic order."""
    objects = sorted(problem.object_types)
    by_type: dict[str, list[str]] = {}
    for o in objects:
        for t in domain.supertypes(problem.object_types[o]):
            by_type.setdefault(t, []).append(o)
    out = []
    for schema in domain.schemas:
        domains = [by_type.get(t, []) for _, t in schema.params]
        names = [p for p, _ in schema.params]
        for binding in itertools.product(*domains):
            sub = dict(zip(names, binding))

            def inst(atoms):
                return frozenset(Atom(a.predicate, tuple(sub.get(x, x) for x in a.args)) for a in atoms)

            out.append(GroundAction(schema.name, binding, inst(schema.precond), inst(schema.add), inst(schema.delete)))
    return out


def successors(state: RelationalState, actions) -> list[tuple[GroundAction, RelationalState]]:
    """Applicable actions with their canonical successor states, deduplicated."""
    out, seen = [], set()
    atoms = state.atom_set
    for a in actions:
        if a.precond <= atoms:
            nxt = a.apply(state)
            k = nxt.atoms
            if k not in seen:
                seen.add(k)
                out.append((a, nxt))
    return out


def static_predicates(domain: DomainModel) -> set[str]:
    fluent = {a.predicate for s in domain.schemas for a in s.add + s.delete}
    return set(domain.predicates) - fluent


@dataclass
class Instance:
    """A parsed planning instance ready for search."""

    name: str
    domain: DomainModel
    problem: Problem
    actions: list[GroundAction]

    @property
    def initial(self) -> RelationalState:
        return self.problem.state

    def successors(self, state: RelationalState):
        return successors(state, self.actions)

    @classmethod
    def from_text(cls, domain_text: str, problem_text: str, name: str | None = None) -> "Instance":
        domain = parse_domain(domain_text)
        return cls.from_problem(domain, parse_problem(problem_text, domain), name)

    @classmethod
    def from_problem(cls, domain: DomainModel, problem: Problem, name: str | None = None) -> "Instance":
        # Actions whose static preconditions are false in init can never fire.
        statics = static_predicates(domain)
        init = problem.state.atom_set
        actions = [
            a for a in ground(domain, problem)
            if all(p in init for p in a.precond if p.predicate in statics)
        ]
        return cls(name or problem.name, domain, problem, actions)

    @classmethod
    def load(cls, domain_path, problem_path) -> "Instance":
        return cls.from_text(Path(domain_path).read_text(), Path(problem_path).read_text(), Path(problem_path).stem)


def load_directory(path) -> list[Instance]:
    """Load ``domain.pddl`` plus every other ``*.pddl`` problem in a directory."""
    path = Path(path)
    domain = parse_domain((path / "domain.pddl").read_text())
    out = []
    for p in sorted(path.glob("*.pddl")):
        if p.name == "domain.pddl":
            continue
        out.append(Instance.from_problem(domain, parse_problem(p.read_text(), domain), p.stem))
    return out
