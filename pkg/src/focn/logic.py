"""First-order logic with counting terms and numerical predicates.

Formulas are built from relation atoms and variable equalities with the
connectives `!`, `&`, `|`, structure quantifiers `exists x` / `forall x`,
number quantifiers `existsN k` (ranging over 0..|universe|), and predicate
applications over counting terms.  A counting term is an integer literal, a
number variable, a sum or product of counting terms, or `#(z1,..,zs).(phi)`,
the number of s-tuples over the universe satisfying phi.  The names z1..zs
must be distinct but the counted tuples range over all combinations.  All
arithmetic is exact.

Concrete syntax summary (precedence `!` > `&` > `|`; quantifiers bind the
next unary unit, so compound bodies need parentheses):

    C(c) & (L(c,p) | exists x (L(c,x) & #(y).(L(x,y) & L(p,y)) >= 2))

`a = b` between two bare identifiers is structure-variable equality; every
other comparison (`>= <= = < > !=`) is a numerical predicate over counting
terms.  Structure variables and number variables live in disjoint
namespaces, inferred from use and enforced at parse time.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Union

from .errors import FocnError, ParseError
from .structure import Signature, Structure

_KEYWORDS = frozenset({"exists", "forall", "existsN"})


# ---------------------------------------------------------------------------
# numerical predicates


class PredicateCollection:
    """Named integer predicates applicable to tuples of counting terms.

    The built-ins are the six comparisons (arity 2) and P_exists (arity 1,
    true iff its argument is at least 1).  Further predicates can be
    registered as pure decision functions.
    """

    _BUILTINS: dict[str, tuple[int, Callable]] = {
        ">=": (2, lambda a, b: a >= b),
        "<=": (2, lambda a, b: a <= b),
        "=": (2, lambda a, b: a == b),
        "<": (2, lambda a, b: a < b),
        ">": (2, lambda a, b: a > b),
        "!=": (2, lambda a, b: a != b),
        "P_exists": (1, lambda a: a >= 1),
    }

    def __init__(self):
        self._entries = dict(self._BUILTINS)

    def register(self, name: str, arity: int, fn: Callable) -> None:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in _KEYWORDS:
            raise FocnError(f"bad predicate name {name!r}")
        if name in self._entries:
            raise FocnError(f"predicate {name!r} already registered")
        if arity < 1:
            raise FocnError("predicate arity must be >= 1")
        self._entries[name] = (arity, fn)

    def has(self, name: str) -> bool:
        return name in self._entries

    def arity(self, name: str) -> int:
        try:
            return self._entries[name][0]
        except KeyError:
            raise FocnError(f"unknown predicate {name!r}") from None

    def decide(self, name: str, args: tuple[int, ...]) -> bool:
        arity, fn = self._entries[name]
        if len(args) != arity:
            raise FocnError(f"predicate {name!r} expects {arity} arguments")
        return bool(fn(*args))


_DEFAULT_PREDICATES = PredicateCollection()


def default_predicates() -> PredicateCollection:
    return _DEFAULT_PREDICATES


# ---------------------------------------------------------------------------
# abstract syntax

_INFIX_PREDICATES = frozenset({">=", "<=", "=", "<", ">", "!="})


class Formula:
    __slots__ = ()


class CountingTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Equality(Formula):
    left: str
    right: str

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Atom(Formula):
    relation: str
    args: tuple[str, ...]

    def __str__(self):
        return f"{self.relation}({','.join(self.args)})"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __str__(self):
        return f"!{_wrap(self.body)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        # The parser is left-associative, so a right child that is itself a
        # conjunction must keep its parentheses to reparse with this shape.
        left = f"({self.left})" if isinstance(self.left, Or) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, (Or, And)) \
            else str(self.right)
        return f"{left} & {right}"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        right = f"({self.right})" if isinstance(self.right, Or) \
            else str(self.right)
        return f"{self.left} | {right}"


@dataclass(frozen=True)
class ExistsStruct(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"exists {self.var} {_wrap(self.body)}"


@dataclass(frozen=True)
class ForallStruct(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"forall {self.var} {_wrap(self.body)}"


@dataclass(frozen=True)
class ExistsNum(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"existsN {self.var} {_wrap(self.body)}"


@dataclass(frozen=True)
class PredApp(Formula):
    predicate: str
    args: tuple[CountingTerm, ...]

    def __str__(self):
        if self.predicate in _INFIX_PREDICATES and len(self.args) == 2:
            return f"{self.args[0]} {self.predicate} {self.args[1]}"
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


def _wrap(body: Formula) -> str:
    # Quantifier and negation bodies reparse as a single unary unit.
    if isinstance(body, (Atom, Equality, Not, ExistsStruct, ForallStruct, ExistsNum)):
        return str(body)
    return f"({body})"


@dataclass(frozen=True)
class IntLiteral(CountingTerm):
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class NumVar(CountingTerm):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Sum(CountingTerm):
    left: CountingTerm
    right: CountingTerm

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Product(CountingTerm):
    left: CountingTerm
    right: CountingTerm

    def __str__(self):
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class Count(CountingTerm):
    vars: tuple[str, ...]
    body: Formula

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise FocnError(f"count variables must be distinct: {self.vars}")

    def __str__(self):
        return f"#({','.join(self.vars)}).({self.body})"


Node = Union[Formula, CountingTerm]


# ---------------------------------------------------------------------------
# structural measures

def free_variables(node: Node) -> tuple[frozenset, frozenset]:
    """Free (structure, number) variables of a formula or counting term."""
    struct: set = set()
    num: set = set()

    def walk(n: Node, bound_s: frozenset, bound_n: frozenset):
        if isinstance(n, Equality):
            struct.update({n.left, n.right} - bound_s)
        elif isinstance(n, Atom):
            struct.update(set(n.args) - bound_s)
        elif isinstance(n, Not):
            walk(n.body, bound_s, bound_n)
        elif isinstance(n, (And, Or, Sum, Product)):
            walk(n.left, bound_s, bound_n)
            walk(n.right, bound_s, bound_n)
        elif isinstance(n, (ExistsStruct, ForallStruct)):
            walk(n.body, bound_s | {n.var}, bound_n)
        elif isinstance(n, ExistsNum):
            walk(n.body, bound_s, bound_n | {n.var})
        elif isinstance(n, PredApp):
            for t in n.args:
                walk(t, bound_s, bound_n)
        elif isinstance(n, Count):
            walk(n.body, bound_s | set(n.vars), bound_n)
        elif isinstance(n, NumVar):
            if n.name not in bound_n:
                num.add(n.name)
        elif isinstance(n, IntLiteral):
            pass
        else:
            raise FocnError(f"not a formula or counting term: {n!r}")

    walk(node, frozenset(), frozenset())
    return frozenset(struct), frozenset(num)


def binding_rank(node: Node) -> int:
    """Maximum nesting depth of element binders (exists/forall/#).

    Number quantifiers do not count: they range over an integer interval and
    do not touch the structure.
    """
    if isinstance(node, (Atom, Equality, IntLiteral, NumVar)):
        return 0
    if isinstance(node, (Not, ExistsNum)):
        return binding_rank(node.body)
    if isinstance(node, (And, Or, Sum, Product)):
        return max(binding_rank(node.left), binding_rank(node.right))
    if isinstance(node, (ExistsStruct, ForallStruct)):
        return 1 + binding_rank(node.body)
    if isinstance(node, PredApp):
        return max((binding_rank(t) for t in node.args), default=0)
    if isinstance(node, Count):
        return 1 + binding_rank(node.body)
    raise FocnError(f"not a formula or counting term: {node!r}")


def binding_width(node: Node) -> int:
    """Maximum arity of a counting binder; falls back to 1 if plain
    quantifiers occur and 0 for quantifier-free formulas."""
    widths: list[int] = []
    quantified = False

    def walk(n: Node):
        nonlocal quantified
        if isinstance(n, (Atom, Equality, IntLiteral, NumVar)):
            return
        if isinstance(n, (Not, ExistsNum)):
            walk(n.body)
        elif isinstance(n, (And, Or, Sum, Product)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (ExistsStruct, ForallStruct)):
            quantified = True
            walk(n.body)
        elif isinstance(n, PredApp):
            for t in n.args:
                walk(t)
        elif isinstance(n, Count):
            widths.append(len(n.vars))
            walk(n.body)
        else:
            raise FocnError(f"not a formula or counting term: {n!r}")

    walk(node)
    if widths:
        return max(widths)
    return 1 if quantified else 0


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>>=|<=|!=|[()=<>!&|#.,+*-]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r} at offset {pos}")
        if m.group("int") is not None:
            toks.append(("int", m.group("int"), m.start("int")))
        elif m.group("ident") is not None:
            toks.append(("ident", m.group("ident"), m.start("ident")))
        else:
            toks.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return toks


class _KindTable:
    """Tracks which names are used as structure vs number variables."""

    def __init__(self):
        self.struct: set = set()
        self.num: set = set()

    def mark_struct(self, name: str):
        if name in self.num:
            raise ParseError(
                f"variable {name!r} used as both structure and number variable")
        self.struct.add(name)

    def mark_num(self, name: str):
        if name in self.struct:
            raise ParseError(
                f"variable {name!r} used as both structure and number variable")
        self.num.add(name)


class _Parser:
    def __init__(self, text: str, signature: Optional[Signature],
                 predicates: PredicateCollection):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0
        self.signature = signature
        self.predicates = predicates
        self.kinds = _KindTable()
        self.struct_scope: list[str] = []
        self.num_scope: list[str] = []

    # -- token helpers --

    def _peek(self, ahead=0):
        i = self.pos + ahead
        return self.toks[i] if i < len(self.toks) else (None, None, len(self.text))

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def _expect_op(self, op):
        kind, val, off = self._next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} at offset {off}, got {val!r}")

    def _fail(self, message):
        _, val, off = self._peek()
        raise ParseError(f"{message} at offset {off} (near {val!r})")

    # -- formula grammar --

    def parse_formula(self) -> Formula:
        f = self._or()
        if self.pos != len(self.toks):
            self._fail("trailing input")
        return f

    def parse_term(self) -> CountingTerm:
        t, pending = self._term_expr()
        if self.pos != len(self.toks):
            self._fail("trailing input")
        self._commit_numeric(pending)
        return t

    def _or(self) -> Formula:
        f = self._and()
        while self._peek() == self._op_tok("|"):
            self._next()
            f = Or(f, self._and())
        return f

    def _and(self) -> Formula:
        f = self._unary()
        while self._peek() == self._op_tok("&"):
            self._next()
            f = And(f, self._unary())
        return f

    def _op_tok(self, op):
        kind, val, _ = self._peek()
        if kind == "op" and val == op:
            return self._peek()
        return (None, None, None)

    def _unary(self) -> Formula:
        kind, val, off = self._peek()
        if kind == "op" and val == "!":
            self._next()
            return Not(self._unary())
        if kind == "ident" and val in ("exists", "forall"):
            self._next()
            var = self._ident("quantified variable")
            if var in self.num_scope:
                raise ParseError(f"number variable {var!r} quantified over elements")
            self.kinds.mark_struct(var)
            self.struct_scope.append(var)
            body = self._unary()
            self.struct_scope.pop()
            return ExistsStruct(var, body) if val == "exists" else ForallStruct(var, body)
        if kind == "ident" and val == "existsN":
            self._next()
            var = self._ident("number variable")
            self.kinds.mark_num(var)
            self.num_scope.append(var)
            body = self._unary()
            self.num_scope.pop()
            return ExistsNum(var, body)
        return self._primary()

    def _ident(self, what) -> str:
        kind, val, off = self._next()
        if kind != "ident" or val in _KEYWORDS:
            raise ParseError(f"expected {what} at offset {off}")
        return val

    def _primary(self) -> Formula:
        cmp_form = self._try_comparison()
        if cmp_form is not None:
            return cmp_form
        kind, val, off = self._peek()
        if kind == "op" and val == "(":
            self._next()
            f = self._or()
            self._expect_op(")")
            return f
        if kind == "ident":
            return self._atom_or_predapp()
        self._fail("expected a formula")

    def _try_comparison(self) -> Optional[Formula]:
        """Attempt `term CMP term`; backtrack completely on failure."""
        saved = self.pos
        try:
            left, pend_l = self._term_expr()
        except ParseError:
            self.pos = saved
            return None
        kind, val, _ = self._peek()
        if kind != "op" or val not in _INFIX_PREDICATES:
            self.pos = saved
            return None
        self._next()
        right, pend_r = self._term_expr()
        if (val == "=" and isinstance(left, NumVar) and isinstance(right, NumVar)
                and not (left.name in self.num_scope or right.name in self.num_scope
                         or left.name in self.kinds.num or right.name in self.kinds.num)):
            # Two bare identifiers under `=` with no numeric commitment:
            # structure-variable equality.
            self.kinds.mark_struct(left.name)
            self.kinds.mark_struct(right.name)
            return Equality(left.name, right.name)
        self._commit_numeric(pend_l)
        self._commit_numeric(pend_r)
        return PredApp(val, (left, right))

    def _commit_numeric(self, pending: list[str]):
        for name in pending:
            if name in self.struct_scope:
                raise ParseError(f"structure variable {name!r} used as a number")
            self.kinds.mark_num(name)

    def _atom_or_predapp(self) -> Formula:
        kind, name, off = self._next()
        nk, nv, _ = self._peek()
        if not (nk == "op" and nv == "("):
            self._fail(f"expected a formula")
        if self.signature is not None and self.signature.has_relation(name):
            self._next()
            args = [self._ident("element variable")]
            while self._peek() == self._op_tok(","):
                self._next()
                args.append(self._ident("element variable"))
            self._expect_op(")")
            arity = self.signature.arity(name)
            if len(args) != arity:
                raise ParseError(
                    f"relation {name!r} expects {arity} arguments, got {len(args)}")
            for a in args:
                if a in self.num_scope:
                    raise ParseError(f"number variable {a!r} used as an element")
                self.kinds.mark_struct(a)
            return Atom(name, tuple(args))
        if self.predicates.has(name):
            self._next()
            terms = []
            pending: list[str] = []
            t, p = self._term_expr()
            terms.append(t)
            pending.extend(p)
            while self._peek() == self._op_tok(","):
                self._next()
                t, p = self._term_expr()
                terms.append(t)
                pending.extend(p)
            self._expect_op(")")
            if len(terms) != self.predicates.arity(name):
                raise ParseError(
                    f"predicate {name!r} expects {self.predicates.arity(name)} "
                    f"arguments, got {len(terms)}")
            self._commit_numeric(pending)
            return PredApp(name, tuple(terms))
        raise ParseError(f"unknown relation or predicate {name!r} at offset {off}")

    # -- counting terms --
    # Returns (term, pending): pending lists bare identifiers whose numeric
    # kind is only committed once we know the construct is numeric.

    def _term_expr(self):
        t, pending = self._term_prod()
        while self._peek() == self._op_tok("+"):
            self._next()
            r, p = self._term_prod()
            t = Sum(t, r)
            pending = pending + p
        return t, pending

    def _term_prod(self):
        t, pending = self._term_atom()
        while self._peek() == self._op_tok("*"):
            self._next()
            r, p = self._term_atom()
            t = Product(t, r)
            pending = pending + p
        return t, pending

    def _term_atom(self):
        kind, val, off = self._peek()
        if kind == "int":
            self._next()
            return IntLiteral(int(val)), []
        if kind == "op" and val == "-":
            self._next()
            k2, v2, o2 = self._next()
            if k2 != "int":
                raise ParseError(f"expected integer after '-' at offset {o2}")
            return IntLiteral(-int(v2)), []
        if kind == "op" and val == "#":
            self._next()
            self._expect_op("(")
            cvars = []
            if not (self._peek()[0] == "op" and self._peek()[1] == ")"):
                cvars.append(self._ident("count variable"))
                while self._peek() == self._op_tok(","):
                    self._next()
                    cvars.append(self._ident("count variable"))
            self._expect_op(")")
            if len(set(cvars)) != len(cvars):
                raise ParseError(f"count variables must be distinct: {cvars}")
            self._expect_op(".")
            self._expect_op("(")
            for v in cvars:
                if v in self.num_scope:
                    raise ParseError(f"number variable {v!r} used as count variable")
                self.kinds.mark_struct(v)
                self.struct_scope.append(v)
            body = self._or()
            for _ in cvars:
                self.struct_scope.pop()
            self._expect_op(")")
            return Count(tuple(cvars), body), []
        if kind == "op" and val == "(":
            self._next()
            t, pending = self._term_expr()
            self._expect_op(")")
            return t, pending
        if kind == "ident" and val not in _KEYWORDS:
            self._next()
            return NumVar(val), [val]
        raise ParseError(f"expected a counting term at offset {off}")


def parse_formula(text: str, signature: Optional[Signature] = None,
                  predicates: Optional[PredicateCollection] = None) -> Formula:
    p = _Parser(text, signature, predicates or default_predicates())
    return p.parse_formula()


def parse_term(text: str, signature: Optional[Signature] = None,
               predicates: Optional[PredicateCollection] = None) -> CountingTerm:
    p = _Parser(text, signature, predicates or default_predicates())
    return p.parse_term()


def format_formula(node: Node) -> str:
    return str(node)


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class Interpretation:
    """A structure together with assignments for free variables."""

    structure: Structure
    struct_assign: Mapping[str, int] = None
    num_assign: Mapping[str, int] = None


class _Compiler:
    """Compiles a formula or term to nested closures over slot lists.

    Each binding site and each free variable gets its own slot, so shadowed
    names never collide.  Relation atoms read the full tuple sets directly:
    evaluation is a global-access operation by nature (quantifiers and
    counting terms range over the whole universe).
    """

    def __init__(self, structure: Structure, predicates: PredicateCollection):
        self.structure = structure
        self.predicates = predicates
        self.nslots = 0
        self.universe = range(structure.n)

    def fresh_slot(self) -> int:
        s = self.nslots
        self.nslots += 1
        return s

    def compile(self, node: Node, scope: dict) -> Callable:
        if isinstance(node, Equality):
            a, b = self._slot(node.left, scope), self._slot(node.right, scope)
            return lambda env: 1 if env[a] == env[b] else 0
        if isinstance(node, Atom):
            if not self.structure.signature.has_relation(node.relation):
                raise FocnError(f"unknown relation {node.relation!r}")
            if self.structure.signature.arity(node.relation) != len(node.args):
                raise FocnError(f"arity mismatch for relation {node.relation!r}")
            rel = self.structure.relation(node.relation)
            slots = tuple(self._slot(a, scope) for a in node.args)
            if len(slots) == 1:
                s0, = slots
                return lambda env: 1 if (env[s0],) in rel else 0
            if len(slots) == 2:
                s0, s1 = slots
                return lambda env: 1 if (env[s0], env[s1]) in rel else 0
            return lambda env: 1 if tuple(env[s] for s in slots) in rel else 0
        if isinstance(node, Not):
            sub = self.compile(node.body, scope)
            return lambda env: 0 if sub(env) else 1
        if isinstance(node, (And, Or)):
            kind = type(node)
            parts = []
            stack = [node]
            while stack:
                n = stack.pop()
                if isinstance(n, kind):
                    stack.append(n.right)
                    stack.append(n.left)
                else:
                    parts.append(self.compile(n, scope))
            if isinstance(node, And):
                def conj(env, _parts=tuple(parts)):
                    for p in _parts:
                        if not p(env):
                            return 0
                    return 1
                return conj

            def disj(env, _parts=tuple(parts)):
                for p in _parts:
                    if p(env):
                        return 1
                return 0
            return disj
        if isinstance(node, (ExistsStruct, ForallStruct)):
            slot = self.fresh_slot()
            sub = self.compile(node.body, {**scope, node.var: slot})
            universe = self.universe
            if isinstance(node, ExistsStruct):
                def ex(env):
                    for a in universe:
                        env[slot] = a
                        if sub(env):
                            return 1
                    return 0
                return ex

            def fa(env):
                for a in universe:
                    env[slot] = a
                    if not sub(env):
                        return 0
                return 1
            return fa
        if isinstance(node, ExistsNum):
            slot = self.fresh_slot()
            sub = self.compile(node.body, {**scope, node.var: slot})
            top = self.structure.n

            def exn(env):
                for v in range(top + 1):
                    env[slot] = v
                    if sub(env):
                        return 1
                return 0
            return exn
        if isinstance(node, PredApp):
            if not self.predicates.has(node.predicate):
                raise FocnError(f"unknown predicate {node.predicate!r}")
            if self.predicates.arity(node.predicate) != len(node.args):
                raise FocnError(f"arity mismatch for predicate {node.predicate!r}")
            terms = tuple(self.compile(t, scope) for t in node.args)
            decide = self.predicates.decide
            name = node.predicate
            return lambda env: 1 if decide(name, tuple(t(env) for t in terms)) else 0
        if isinstance(node, IntLiteral):
            v = node.value
            return lambda env: v
        if isinstance(node, NumVar):
            s = self._slot(node.name, scope)
            return lambda env: env[s]
        if isinstance(node, Sum):
            a, b = self.compile(node.left, scope), self.compile(node.right, scope)
            return lambda env: a(env) + b(env)
        if isinstance(node, Product):
            a, b = self.compile(node.left, scope), self.compile(node.right, scope)
            return lambda env: a(env) * b(env)
        if isinstance(node, Count):
            slots = []
            inner = dict(scope)
            for v in node.vars:
                s = self.fresh_slot()
                inner[v] = s
                slots.append(s)
            sub = self.compile(node.body, inner)
            universe = self.universe
            if len(slots) == 0:
                return lambda env: 1 if sub(env) else 0
            if len(slots) == 1:
                s0, = slots

                def count1(env):
                    c = 0
                    for a in universe:
                        env[s0] = a
                        c += sub(env)
                    return c
                return count1

            def countk(env, _slots=tuple(slots)):
                c = 0
                for tup in itertools.product(universe, repeat=len(_slots)):
                    for s, a in zip(_slots, tup):
                        env[s] = a
                    c += sub(env)
                return c
            return countk
        raise FocnError(f"not a formula or counting term: {node!r}")

    def _slot(self, name: str, scope: dict) -> int:
        try:
            return scope[name]
        except KeyError:
            raise FocnError(f"unassigned free variable {name!r}") from None


class CompiledFormula:
    """A formula (or counting term) fixed to one structure, ready to run
    against many variable assignments."""

    def __init__(self, structure: Structure, node: Node,
                 predicates: Optional[PredicateCollection] = None):
        self.structure = structure
        self.node = node
        fs, fn = free_variables(node)
        clash = fs & fn
        if clash:
            raise FocnError(f"variables used with both kinds: {sorted(clash)}")
        compiler = _Compiler(structure, predicates or default_predicates())
        scope = {}
        self._free_struct = tuple(sorted(fs))
        self._free_num = tuple(sorted(fn))
        for name in self._free_struct + self._free_num:
            scope[name] = compiler.fresh_slot()
        self._scope = dict(scope)
        self._fn = compiler.compile(node, scope)
        self._nslots = compiler.nslots

    @property
    def free_struct(self) -> tuple[str, ...]:
        return self._free_struct

    @property
    def free_num(self) -> tuple[str, ...]:
        return self._free_num

    def __call__(self, struct_assign: Optional[Mapping[str, int]] = None,
                 num_assign: Optional[Mapping[str, int]] = None) -> int:
        env = [None] * self._nslots
        sa = struct_assign or {}
        na = num_assign or {}
        n = self.structure.n
        for name in self._free_struct:
            if name not in sa:
                raise FocnError(f"unassigned free variable {name!r}")
            v = sa[name]
            if not isinstance(v, int) or not 0 <= v < n:
                raise FocnError(f"bad element id {v!r} for variable {name!r}")
            env[self._scope[name]] = v
        for name in self._free_num:
            if name not in na:
                raise FocnError(f"unassigned free number variable {name!r}")
            env[self._scope[name]] = int(na[name])
        return int(self._fn(env))


def evaluate_formula(interp: Interpretation, formula: Formula,
                     predicates: Optional[PredicateCollection] = None) -> int:
    """Exact 0/1 evaluation under the rules for connectives, quantifiers,
    counting and number quantification (number variables range over
    0..|universe|)."""
    if not isinstance(formula, Formula):
        raise FocnError("evaluate_formula expects a formula")
    return CompiledFormula(interp.structure, formula, predicates)(
        interp.struct_assign, interp.num_assign)


def evaluate_term(interp: Interpretation, term: CountingTerm,
                  predicates: Optional[PredicateCollection] = None) -> int:
    """Exact integer value of a counting term; never overflows."""
    if not isinstance(term, CountingTerm):
        raise FocnError("evaluate_term expects a counting term")
    return CompiledFormula(interp.structure, term, predicates)(
        interp.struct_assign, interp.num_assign)
