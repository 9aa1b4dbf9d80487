"""HyperLTL syntax: AST, parser, printer, desugaring and variable substitution.

Concrete syntax::

    forall p1. forall p2. G (a[p1] <-> a[p2])

Atoms are written ``ap[var]``.  A leading comment of the form
``#aps: a b c`` declares the proposition set explicitly; otherwise it is
the set of propositions mentioned in the body.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Mapping


class FormulaError(Exception):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class UnboundVariable(FormulaError):
    def __init__(self, name: str):
        super().__init__(f"trace variable {name!r} is not bound by the quantifier prefix")
        self.name = name


class DuplicateVariable(FormulaError):
    def __init__(self, name: str):
        super().__init__(f"trace variable {name!r} is quantified twice")
        self.name = name


class UnmappedVariable(FormulaError):
    def __init__(self, name: str):
        super().__init__(f"no substitution given for trace variable {name!r}")
        self.name = name


# --------------------------------------------------------------------------- AST


class Expr:
    """Base class of LTL bodies over indexed atoms."""

    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class TrueF(Expr):
    pass


@dataclass(frozen=True, slots=True)
class FalseF(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Expr):
    """The indexed atom ``ap[var]``."""

    ap: str
    var: str


@dataclass(frozen=True, slots=True)
class Not(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Next(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Globally(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Finally(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class BoundedGlobally(Expr):
    """``G[<k] arg``: arg holds at each of the first k positions."""

    k: int
    arg: Expr

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("bound of G[<k] must be non-negative")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class And(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Or(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Implies(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Iff(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Until(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class WeakUntil(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


TRUE = TrueF()
FALSE = FalseF()

CORE_TYPES = (TrueF, Atom, Not, Or, Next, Until)
UNARY_TYPES = (Not, Next, Globally, Finally)
BINARY_TYPES = (And, Or, Implies, Iff, Until, WeakUntil)


class Quantifier(Enum):
    FORALL = "forall"
    EXISTS = "exists"


@dataclass(frozen=True)
class Shape:
    """Quantifier-prefix classification.

    ``kind`` is one of ForallOnly, ExistsOnly, ForallExists, ExistsForall,
    Other; ``counts`` holds the block sizes in prefix order.
    """

    kind: str
    counts: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(map(str, self.counts))})"


@dataclass(frozen=True)
class QuantifiedFormula:
    prefix: tuple[tuple[Quantifier, str], ...]
    body: Expr
    aps: tuple[str, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for _, var in self.prefix:
            if var in seen:
                raise DuplicateVariable(var)
            seen.add(var)
        for atom in atoms(self.body):
            if atom.var not in seen:
                raise UnboundVariable(atom.var)

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    @property
    def quantifiers(self) -> tuple[Quantifier, ...]:
        return tuple(q for q, _ in self.prefix)

    @property
    def arity(self) -> int:
        return len(self.prefix)

    @property
    def alternation_free(self) -> bool:
        return len(set(self.quantifiers)) <= 1

    @property
    def universal(self) -> bool:
        return all(q is Quantifier.FORALL for q in self.quantifiers)

    @property
    def existential(self) -> bool:
        return all(q is Quantifier.EXISTS for q in self.quantifiers)

    @property
    def shape(self) -> Shape:
        blocks: list[tuple[Quantifier, int]] = []
        for q in self.quantifiers:
            if blocks and blocks[-1][0] is q:
                blocks[-1] = (q, blocks[-1][1] + 1)
            else:
                blocks.append((q, 1))
        counts = tuple(c for _, c in blocks)
        kinds = tuple(q for q, _ in blocks)
        if kinds == (Quantifier.FORALL,):
            return Shape("ForallOnly", counts)
        if kinds == (Quantifier.EXISTS,):
            return Shape("ExistsOnly", counts)
        if kinds == (Quantifier.FORALL, Quantifier.EXISTS):
            return Shape("ForallExists", counts)
        if kinds == (Quantifier.EXISTS, Quantifier.FORALL):
            return Shape("ExistsForall", counts)
        return Shape("Other", counts)

    def __str__(self) -> str:
        return format_formula(self)


# ------------------------------------------------------------------ traversal


def walk(e: Expr) -> Iterator[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def atoms(e: Expr) -> list[Atom]:
    """Distinct atoms of ``e`` in order of first occurrence."""
    seen: dict[Atom, None] = {}
    for node in walk(e):
        if isinstance(node, Atom):
            seen.setdefault(node)
    return list(seen)


def size(e: Expr) -> int:
    return sum(1 for _ in walk(e))


def depth(e: Expr) -> int:
    kids = e.children()
    return 1 + max((depth(c) for c in kids), default=0)


def is_core(e: Expr) -> bool:
    return all(isinstance(n, CORE_TYPES) for n in walk(e))


def rebuild(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    if isinstance(e, BoundedGlobally):
        return BoundedGlobally(e.k, kids[0])
    if isinstance(e, UNARY_TYPES):
        return type(e)(kids[0])
    if isinstance(e, BINARY_TYPES):
        return type(e)(kids[0], kids[1])
    return e


def transform(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Bottom-up rewrite: children first, then ``fn`` on the rebuilt node."""
    kids = e.children()
    if kids:
        e = rebuild(e, tuple(transform(c, fn) for c in kids))
    return fn(e)


# ------------------------------------------------------------------- desugar


def _desugar_node(e: Expr) -> Expr:
    if isinstance(e, FalseF):
        return Not(TRUE)
    if isinstance(e, And):
        return Not(Or(Not(e.left), Not(e.right)))
    if isinstance(e, Implies):
        return Or(Not(e.left), e.right)
    if isinstance(e, Iff):
        return _desugar_node(And(_desugar_node(Implies(e.left, e.right)),
                                 _desugar_node(Implies(e.right, e.left))))
    if isinstance(e, Finally):
        return Until(TRUE, e.arg)
    if isinstance(e, Globally):
        return Not(Until(TRUE, Not(e.arg)))
    if isinstance(e, WeakUntil):
        return Or(Until(e.left, e.right), Not(Until(TRUE, Not(e.left))))
    if isinstance(e, BoundedGlobally):
        result: Expr = TRUE
        for _ in range(e.k):
            result = _desugar_node(And(e.arg, Next(result)))
        return result
    return e


def desugar(e: Expr) -> Expr:
    """Rewrite into the core connectives True, Atom, Not, Or, Next, Until."""
    return transform(e, _desugar_node)


# --------------------------------------------------------------- substitution


def substitute_variables(body: Expr, mapping: Mapping[str, str]) -> Expr:
    def rename(e: Expr) -> Expr:
        if isinstance(e, Atom):
            if e.var not in mapping:
                raise UnmappedVariable(e.var)
            return Atom(e.ap, mapping[e.var])
        return e

    return transform(body, rename)


# ------------------------------------------------------------------- printing

_BINARY_OPS = {And: "&", Or: "|", Implies: "->", Iff: "<->", Until: "U", WeakUntil: "W"}
_UNARY_OPS = {Not: "!", Next: "X ", Globally: "G ", Finally: "F "}


def to_text(e: Expr) -> str:
    if isinstance(e, TrueF):
        return "true"
    if isinstance(e, FalseF):
        return "false"
    if isinstance(e, Atom):
        return f"{e.ap}[{e.var}]"
    if isinstance(e, BoundedGlobally):
        return f"G[<{e.k}] {to_text(e.arg)}"
    if isinstance(e, UNARY_TYPES):
        return _UNARY_OPS[type(e)] + to_text(e.arg)
    op = _BINARY_OPS[type(e)]
    return f"({to_text(e.left)} {op} {to_text(e.right)})"


def format_formula(f: QuantifiedFormula, declare_aps: bool = False) -> str:
    head = "".join(f"{q.value} {v}. " for q, v in f.prefix)
    text = head + to_text(f.body)
    if declare_aps:
        text = f"#aps: {' '.join(f.aps)}\n" + text
    return text


# -------------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<op><->|->|[&|!()\[\].<])
  | (?P<nat>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)
_APS_PRAGMA = re.compile(r"^\s*#aps:(.*)$", re.MULTILINE)


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise FormulaSyntaxError(f"{msg}, found {found!r}", tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        if self.peek().text != text:
            self.error(f"expected {text!r}")
        return self.take()

    def ident(self) -> str:
        if self.peek().kind != "ident":
            self.error("expected identifier")
        return self.take().text

    def is_keyword(self, word: str, k: int = 0) -> bool:
        # a keyword immediately followed by '[' is an atom name, except G[<
        tok = self.peek(k)
        if tok.kind != "ident" or tok.text != word:
            return False
        nxt = self.peek(k + 1)
        if nxt.text == "[":
            return word == "G" and self.peek(k + 2).text == "<"
        return True

    # formula := {quantifier IDENT "."} expr
    def formula(self):
        prefix = []
        while self.is_keyword("forall") or self.is_keyword("exists"):
            q = Quantifier(self.take().text)
            prefix.append((q, self.ident()))
            self.expect(".")
        body = self.iff()
        if self.peek().kind != "eof":
            self.error("unexpected trailing input")
        return prefix, body

    def iff(self) -> Expr:
        left = self.implies()
        while self.peek().text == "<->":
            self.take()
            left = Iff(left, self.implies())
        return left

    def implies(self) -> Expr:
        left = self.disj()
        if self.peek().text == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Expr:
        left = self.conj()
        while self.peek().text == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Expr:
        left = self.until()
        while self.peek().text == "&":
            self.take()
            left = And(left, self.until())
        return left

    def until(self) -> Expr:
        left = self.unary()
        if self.is_keyword("U"):
            self.take()
            return Until(left, self.until())
        if self.is_keyword("W"):
            self.take()
            return WeakUntil(left, self.until())
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.text == "!":
            self.take()
            return Not(self.unary())
        if self.is_keyword("G") and self.peek(1).text == "[":
            self.take()
            self.expect("[")
            self.expect("<")
            if self.peek().kind != "nat":
                self.error("expected step bound")
            k = int(self.take().text)
            self.expect("]")
            return BoundedGlobally(k, self.unary())
        for word, cls in (("X", Next), ("G", Globally), ("F", Finally)):
            if self.is_keyword(word):
                self.take()
                return cls(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.text == "(":
            self.take()
            e = self.iff()
            self.expect(")")
            return e
        if self.is_keyword("true"):
            self.take()
            return TRUE
        if self.is_keyword("false"):
            self.take()
            return FALSE
        if tok.kind == "ident" and self.peek(1).text == "[":
            ap = self.take().text
            self.expect("[")
            var = self.ident()
            self.expect("]")
            return Atom(ap, var)
        self.error("expected expression")


def parse_expr(text: str) -> Expr:
    """Parse a quantifier-free body."""
    p = _Parser(text)
    e = p.iff()
    if p.peek().kind != "eof":
        p.error("unexpected trailing input")
    return e


def parse_formula(text: str) -> QuantifiedFormula:
    declared = None
    m = _APS_PRAGMA.search(text)
    if m:
        declared = tuple(dict.fromkeys(m.group(1).replace(",", " ").split()))
    prefix, body = _Parser(text).formula()
    mentioned = tuple(dict.fromkeys(a.ap for a in atoms(body)))
    aps = declared if declared is not None else tuple(sorted(mentioned))
    missing = set(mentioned) - set(aps)
    if missing:
        raise FormulaError(f"propositions {sorted(missing)} not in declared set")
    return QuantifiedFormula(tuple(prefix), body, aps)


def make_formula(quantifiers: str, vars_: list[str], body: Expr,
                 aps: tuple[str, ...] | None = None) -> QuantifiedFormula:
    """Build a formula from a quantifier string such as ``"AE"``."""
    qs = {"A": Quantifier.FORALL, "E": Quantifier.EXISTS}
    prefix = tuple((qs[q], v) for q, v in zip(quantifiers, vars_, strict=True))
    if aps is None:
        aps = tuple(sorted({a.ap for a in atoms(body)}))
    return QuantifiedFormula(prefix, body, aps)
