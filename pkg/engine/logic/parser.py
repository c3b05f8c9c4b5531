"""
Formula Parser
==============
Recursive-descent parser for the concrete syntax:

    formula  := disj
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "!" unary | ("exists"|"forall") var "." formula | primary
    primary  := "(" formula ")" | "true" | "false"
              | "count" "{" var ":" formula "}" "=" numterm
              | "lfp" "[" ID "," vars "]" "(" formula ")" "(" terms ")"
              | "lrec" "[" vars ";" vars ";" numvars "]"
                       "(" formula ";" formula ";" formula ")" "(" terms ";" numterms ")"
              | ID "(" terms ")" | term "=" term

Element variables are bare identifiers, number variables carry a '%'
prefix, and number literals are decimal. A free identifier that names a
vocabulary constant is that constant; bound variables shadow constants.
"""
import re
from dataclasses import dataclass

from engine.errors import FormulaParseError, SortError
from engine.logic.formulas import (
    And, Atom, Const, Count, Eq, Exists, Forall, Formula, Lfp, Lrec, Not, NumLit, Or, Sort, Truth,
    Var, Vocabulary, term_sort,
)

KEYWORDS = {"exists", "forall", "count", "lfp", "lrec", "true", "false"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<numvar>%[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<sym>[()\[\]{},;.:&|!=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise FormulaParseError(f"unexpected character {text[position]!r}", position)
        kind = match.lastgroup
        if kind != "ws":
            value = match.group(kind)
            if kind == "ident" and value in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, value, position))
        position = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


@dataclass(frozen=True)
class _RelVar:
    sorts: tuple
    negations: int
    nonmonotone: int


class FormulaParser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.text = text
        self.vocab = vocab
        self.tokens = tokenize(text)
        self.index = 0
        self.scopes: list[dict] = []
        self.relvars: dict[str, _RelVar] = {}
        # polarity bookkeeping for the positivity check on lfp bodies
        self.negations = 0
        self.nonmonotone = 0

    # ==========================================
    # TOKEN HELPERS
    # ==========================================
    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def at(self, text: str) -> bool:
        return self.current.kind in ("sym", "keyword") and self.current.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.current.text or "end of input"
            raise FormulaParseError(f"expected {text!r}, found {found!r}", self.current.position)
        return self.advance()

    def error(self, message: str, token: Token | None = None):
        token = token or self.current
        return FormulaParseError(message, token.position)

    # ==========================================
    # ENTRY
    # ==========================================
    def parse(self) -> Formula:
        phi = self.formula()
        if self.current.kind != "eof":
            raise self.error(f"unexpected {self.current.text!r}")
        return phi

    def formula(self) -> Formula:
        left = self.conj()
        while self.at("|"):
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            self.negations += 1
            try:
                return Not(self.unary())
            finally:
                self.negations -= 1
        if self.at("exists") or self.at("forall"):
            quantifier = self.advance().text
            var = self.binder()
            self.expect(".")
            body = self.with_scope({var.name_key: var.var}, self.formula)
            return Exists(var.var, body) if quantifier == "exists" else Forall(var.var, body)
        return self.primary()

    # ==========================================
    # PRIMARY FORMULAS
    # ==========================================
    def primary(self) -> Formula:
        token = self.current
        if self.at("("):
            self.advance()
            phi = self.formula()
            self.expect(")")
            return phi
        if self.at("true") or self.at("false"):
            self.advance()
            return Truth(token.text == "true")
        if self.at("count"):
            return self.count()
        if self.at("lfp"):
            return self.lfp()
        if self.at("lrec"):
            return self.lrec()
        if token.kind == "ident" and self.peek().kind == "sym" and self.peek().text == "(":
            return self.atom()
        if token.kind in ("ident", "numvar", "int"):
            left = self.term()
            eq_token = self.expect("=")
            right = self.term()
            if term_sort(left) is not term_sort(right):
                raise SortError(f"sort mismatch in equality at position {eq_token.position}")
            return Eq(left, right)
        raise self.error(f"unexpected {token.text or 'end of input'!r}")

    def atom(self) -> Formula:
        name_token = self.advance()
        name = name_token.text
        self.expect("(")
        args = self.term_list(")")
        self.expect(")")

        if name in self.relvars:
            relvar = self.relvars[name]
            if len(args) != len(relvar.sorts):
                raise SortError(f"arity mismatch for {name} at position {name_token.position}")
            for arg, sort in zip(args, relvar.sorts):
                if term_sort(arg) is not sort:
                    raise SortError(f"sort mismatch in argument of {name} at position {name_token.position}")
            if (self.negations - relvar.negations) % 2 or self.nonmonotone != relvar.nonmonotone:
                raise self.error(f"relation variable {name} occurs negatively", name_token)
            return Atom(name, args)

        if name not in self.vocab.relations:
            raise self.error(f"unknown relation {name}", name_token)
        if len(args) != self.vocab.relations[name]:
            raise SortError(
                f"arity mismatch for {name} at position {name_token.position}: "
                f"expected {self.vocab.relations[name]}, got {len(args)}")
        for arg in args:
            if term_sort(arg) is not Sort.ELEMENT:
                raise SortError(f"number term passed to relation {name} at position {name_token.position}")
        return Atom(name, args)

    def count(self) -> Formula:
        self.expect("count")
        self.expect("{")
        var = self.binder()
        self.expect(":")
        self.nonmonotone += 1
        try:
            body = self.with_scope({var.name_key: var.var}, self.formula)
        finally:
            self.nonmonotone -= 1
        self.expect("}")
        self.expect("=")
        number_token = self.current
        number = self.term()
        if term_sort(number) is not Sort.NUMBER:
            raise SortError(f"count compares against a number term at position {number_token.position}")
        return Count(var.var, body, number)

    def lfp(self) -> Formula:
        self.expect("lfp")
        self.expect("[")
        name_token = self.current
        if name_token.kind != "ident":
            raise self.error("expected relation variable name")
        name = self.advance().text
        if name in self.vocab.relations or name in self.vocab.constants:
            raise self.error(f"relation variable {name} clashes with the vocabulary", name_token)
        self.expect(",")
        binders = self.binder_list("]")
        self.expect("]")
        xs = tuple(b.var for b in binders)

        self.expect("(")
        saved = self.relvars.get(name)
        self.relvars[name] = _RelVar(tuple(x.sort for x in xs), self.negations, self.nonmonotone)
        try:
            body = self.with_scope({b.name_key: b.var for b in binders}, self.formula)
        finally:
            if saved is None:
                del self.relvars[name]
            else:
                self.relvars[name] = saved
        self.expect(")")

        self.expect("(")
        args_token = self.current
        args = self.term_list(")")
        self.expect(")")
        if len(args) != len(xs):
            raise SortError(f"lfp expects {len(xs)} arguments at position {args_token.position}")
        for arg, x in zip(args, xs):
            if term_sort(arg) is not x.sort:
                raise SortError(f"sort mismatch in lfp arguments at position {args_token.position}")
        return Lfp(name, xs, body, args)

    def lrec(self) -> Formula:
        start = self.expect("lrec")
        self.expect("[")
        us = self.binder_list(";")
        self.expect(";")
        vs = self.binder_list(";")
        self.expect(";")
        ps = self.binder_list("]")
        self.expect("]")

        if len(us) != len(vs):
            raise SortError(f"lrec needs |u| = |v| at position {start.position}")
        for u, v in zip(us, vs):
            if u.var.sort is not v.var.sort:
                raise SortError(f"lrec position sorts of u and v differ at position {start.position}")
        for p in ps:
            if p.var.sort is not Sort.NUMBER:
                raise SortError(f"lrec label variables must be number variables at position {start.position}")
        if len(ps) > len(us):
            raise SortError(f"lrec needs |p| <= |u| at position {start.position}")
        for group in (us + vs, us + ps):
            keys = [b.name_key for b in group]
            if len(set(keys)) != len(keys):
                raise self.error("lrec binds the same variable twice", start)

        pair_scope = {b.name_key: b.var for b in us + vs}
        label_scope = {b.name_key: b.var for b in us + ps}
        self.expect("(")
        self.nonmonotone += 1
        try:
            edge = self.with_scope(pair_scope, self.formula)
            self.expect(";")
            sim = self.with_scope(pair_scope, self.formula)
            self.expect(";")
            label = self.with_scope(label_scope, self.formula)
        finally:
            self.nonmonotone -= 1
        self.expect(")")

        self.expect("(")
        args_token = self.current
        ws = self.term_list(";")
        self.expect(";")
        rs = self.term_list(")")
        self.expect(")")
        if len(ws) != len(us):
            raise SortError(f"lrec expects {len(us)} node terms at position {args_token.position}")
        for w, u in zip(ws, us):
            if term_sort(w) is not u.var.sort:
                raise SortError(f"sort mismatch in lrec node terms at position {args_token.position}")
        for r in rs:
            if term_sort(r) is not Sort.NUMBER:
                raise SortError(f"lrec counter terms must be numbers at position {args_token.position}")
        return Lrec(tuple(b.var for b in us), tuple(b.var for b in vs), tuple(b.var for b in ps),
                    edge, sim, label, ws, rs)

    # ==========================================
    # VARIABLES AND TERMS
    # ==========================================
    def binder(self) -> "_Binder":
        token = self.current
        if token.kind == "ident":
            self.advance()
            return _Binder(token.text, Var(token.text, Sort.ELEMENT))
        if token.kind == "numvar":
            self.advance()
            return _Binder(token.text, Var(token.text[1:], Sort.NUMBER))
        raise self.error(f"expected a variable, found {token.text or 'end of input'!r}")

    def binder_list(self, closer: str) -> list:
        binders = []
        if self.at(closer):
            return binders
        binders.append(self.binder())
        while self.at(","):
            self.advance()
            binders.append(self.binder())
        names = [b.name_key for b in binders]
        if len(set(names)) != len(names):
            raise self.error("repeated variable in binder list")
        return binders

    def term(self):
        token = self.current
        if token.kind == "int":
            self.advance()
            return NumLit(int(token.text))
        if token.kind == "numvar":
            self.advance()
            return self.lookup(token.text) or Var(token.text[1:], Sort.NUMBER)
        if token.kind == "ident":
            self.advance()
            bound = self.lookup(token.text)
            if bound is not None:
                return bound
            if token.text in self.vocab.constants:
                return Const(token.text)
            return Var(token.text, Sort.ELEMENT)
        raise self.error(f"expected a term, found {token.text or 'end of input'!r}")

    def term_list(self, closer: str) -> tuple:
        terms = []
        if self.at(closer):
            return tuple(terms)
        terms.append(self.term())
        while self.at(","):
            self.advance()
            terms.append(self.term())
        return tuple(terms)

    def lookup(self, key: str):
        for scope in reversed(self.scopes):
            if key in scope:
                return scope[key]
        return None

    def with_scope(self, bindings: dict, parse):
        self.scopes.append(bindings)
        try:
            return parse()
        finally:
            self.scopes.pop()


@dataclass(frozen=True)
class _Binder:
    name_key: str
    var: Var


def parse_formula(text: str, vocab: Vocabulary) -> Formula:
    """
    Parse formula text against a vocabulary.

    Raises:
        FormulaParseError: syntax errors, unknown relations, negative relation variables
        SortError: sort or arity mismatches
    """
    return FormulaParser(text, vocab).parse()
