"""Relational signatures, positive formulas-in-context, sequents and theories.

Formulas are positive existential: atoms, equality, top, bottom, n-ary
conjunction/disjunction and existential quantification.  Variables are
positional indices 1..n within an explicit context size; ``Exists`` binds
index n+1 of its body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache


class SyntaxError_(Exception):
    """Raised on malformed formulas, sequents or theory source text."""

    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# formula trees


@dataclass(frozen=True)
class Atom:
    sym: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class Eq:
    i: int
    j: int


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    parts: tuple

    def __hash__(self):
        # cached: deep trees are hashed millions of times during enumeration
        try:
            return self._hash
        except AttributeError:
            h = hash((And, self.parts))
            object.__setattr__(self, "_hash", h)
            return h


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((Or, self.parts))
            object.__setattr__(self, "_hash", h)
            return h


@dataclass(frozen=True)
class Exists:
    body: "Formula"

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((Exists, self.body))
            object.__setattr__(self, "_hash", h)
            return h


Formula = Atom | Eq | Top | Bot | And | Or | Exists

TOP = Top()
BOT = Bot()

_RANK = {Top: 0, Bot: 1, Atom: 2, Eq: 3, And: 4, Or: 5, Exists: 6}


@lru_cache(maxsize=None)
def formula_key(phi):
    """Total order key on formula trees (used for canonical sorting)."""
    r = _RANK[type(phi)]
    if isinstance(phi, Atom):
        return (r, phi.sym, phi.args)
    if isinstance(phi, Eq):
        return (r, "", (phi.i, phi.j))
    if isinstance(phi, (And, Or)):
        return (r, "", tuple(formula_key(p) for p in phi.parts))
    if isinstance(phi, Exists):
        return (r, "", formula_key(phi.body))
    return (r, "", ())


def formula_size(phi):
    if isinstance(phi, (And, Or)):
        return 1 + sum(formula_size(p) for p in phi.parts)
    if isinstance(phi, Exists):
        return 1 + formula_size(phi.body)
    return 1


def formula_depth(phi):
    """Connective-nesting depth; atoms, equality, top, bottom have depth 0."""
    if isinstance(phi, (And, Or)):
        return 1 + max((formula_depth(p) for p in phi.parts), default=0)
    if isinstance(phi, Exists):
        return 1 + formula_depth(phi.body)
    return 0


# ---------------------------------------------------------------------------
# signatures, sequents, theories


@dataclass(frozen=True)
class Signature:
    name: str
    relations: tuple[tuple[str, int], ...]  # (symbol, arity), symbols unique

    def __post_init__(self):
        seen = set()
        for sym, ar in self.relations:
            if sym in seen:
                raise SyntaxError_(f"duplicate relation symbol {sym!r}")
            if ar < 0:
                raise SyntaxError_(f"negative arity for {sym!r}")
            if sym == "=":
                raise SyntaxError_("equality is built in and cannot be declared")
            seen.add(sym)

    def arity(self, sym):
        for s, ar in self.relations:
            if s == sym:
                return ar
        raise SyntaxError_(f"unknown relation symbol {sym!r}")

    def symbols(self):
        return [s for s, _ in self.relations]


EMPTY_SIGNATURE = Signature("empty", ())


@dataclass(frozen=True)
class Sequent:
    ctx: int
    lhs: Formula
    rhs: Formula


@dataclass
class Theory:
    name: str
    signature: Signature
    axioms: tuple[Sequent, ...]

    def __post_init__(self):
        self.axioms = tuple(self.axioms)
        for seq in self.axioms:
            check_formula(self.signature, seq.lhs, seq.ctx)
            check_formula(self.signature, seq.rhs, seq.ctx)


def check_formula(sig, phi, ctx):
    """Raise SyntaxError_ unless phi is well-formed over sig in context ctx."""
    if isinstance(phi, Atom):
        if sig.arity(phi.sym) != len(phi.args):
            raise SyntaxError_(
                f"{phi.sym} expects {sig.arity(phi.sym)} arguments, got {len(phi.args)}"
            )
        for a in phi.args:
            if not 1 <= a <= ctx:
                raise SyntaxError_(f"variable index {a} outside context 1..{ctx}")
    elif isinstance(phi, Eq):
        for a in (phi.i, phi.j):
            if not 1 <= a <= ctx:
                raise SyntaxError_(f"variable index {a} outside context 1..{ctx}")
    elif isinstance(phi, (And, Or)):
        for p in phi.parts:
            check_formula(sig, p, ctx)
    elif isinstance(phi, Exists):
        check_formula(sig, phi.body, ctx + 1)
    elif not isinstance(phi, (Top, Bot)):
        raise SyntaxError_(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# substitution and normalization


def substitute(phi, f, m):
    """phi(x_f(1), ..., x_f(n)) in context m, for an index map f: n -> m.

    f is a tuple with f[i-1] the image of variable i.  Bound variables are
    re-indexed: under Exists the map extends with n+1 -> m+1.
    """
    for v in f:
        if not 1 <= v <= m:
            raise SyntaxError_(f"substitution image {v} outside context 1..{m}")
    return _subst(phi, f, m)


def _subst(phi, f, m):
    if isinstance(phi, Atom):
        return Atom(phi.sym, tuple(f[a - 1] for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(f[phi.i - 1], f[phi.j - 1])
    if isinstance(phi, And):
        return And(tuple(_subst(p, f, m) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(_subst(p, f, m) for p in phi.parts))
    if isinstance(phi, Exists):
        return Exists(_subst(phi.body, f + (m + 1,), m + 1))
    return phi


def shift(phi, n):
    """Embed a formula from context n into context n+1 (inclusion map)."""
    return substitute(phi, tuple(range(1, n + 1)), n + 1)


def identity_map(n):
    return tuple(range(1, n + 1))


@lru_cache(maxsize=None)
def normalize(phi):
    """Canonical form: flatten and/or, dedupe, sort, unit and absorption laws."""
    if isinstance(phi, Eq):
        if phi.i == phi.j:
            return TOP
        return Eq(min(phi.i, phi.j), max(phi.i, phi.j))
    if isinstance(phi, And):
        parts = []
        for p in phi.parts:
            q = normalize(p)
            if isinstance(q, Bot):
                return BOT
            if isinstance(q, Top):
                continue
            if isinstance(q, And):
                parts.extend(q.parts)
            else:
                parts.append(q)
        parts = sorted(set(parts), key=formula_key)
        if not parts:
            return TOP
        if len(parts) == 1:
            return parts[0]
        return And(tuple(parts))
    if isinstance(phi, Or):
        parts = []
        for p in phi.parts:
            q = normalize(p)
            if isinstance(q, Top):
                return TOP
            if isinstance(q, Bot):
                continue
            if isinstance(q, Or):
                parts.extend(q.parts)
            else:
                parts.append(q)
        parts = sorted(set(parts), key=formula_key)
        if not parts:
            return BOT
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))
    if isinstance(phi, Exists):
        body = normalize(phi.body)
        if isinstance(body, Bot):
            return BOT
        return Exists(body)
    return phi


def normalize_sequent(s):
    return Sequent(s.ctx, normalize(s.lhs), normalize(s.rhs))


def conj(parts):
    return normalize(And(tuple(parts)))


def disj(parts):
    return normalize(Or(tuple(parts)))


def pad_context(phi, ctx):
    """phi /\\ x1=x1 /\\ ... so that every context variable occurs."""
    return conj([phi] + [Eq(i, i) for i in range(1, ctx + 1)])


# ---------------------------------------------------------------------------
# printing


def print_formula(phi, names=None):
    def name(i):
        return names[i - 1] if names and i <= len(names) else f"x{i}"

    def go(phi, names, prec):
        # prec: 0 = or-level, 1 = and-level, 2 = atom-level
        if isinstance(phi, Top):
            return "true"
        if isinstance(phi, Bot):
            return "false"
        if isinstance(phi, Atom):
            if not phi.args:
                return phi.sym
            return f"{phi.sym}({', '.join(nm(a, names) for a in phi.args)})"
        if isinstance(phi, Eq):
            return f"{nm(phi.i, names)} = {nm(phi.j, names)}"
        if isinstance(phi, And):
            s = " & ".join(go(p, names, 2) for p in phi.parts)
            return f"({s})" if prec > 1 else s
        if isinstance(phi, Or):
            s = " | ".join(go(p, names, 1) for p in phi.parts)
            return f"({s})" if prec > 0 else s
        if isinstance(phi, Exists):
            v = fresh(names)
            s = go(phi.body, names + [v], 0)
            out = f"exists {v}. {s}"
            return f"({out})" if prec > 0 else out
        raise SyntaxError_(f"not a formula: {phi!r}")

    def nm(i, names):
        return names[i - 1] if i <= len(names) else f"x{i}"

    def fresh(names):
        k = len(names) + 1
        while f"x{k}" in names:
            k += 1
        return f"x{k}"

    base = list(names) if names else []
    return go(phi, base, 0)


def print_sequent(s):
    names = [f"x{i}" for i in range(1, s.ctx + 1)]
    ctx = ",".join(names)
    return f"[{ctx}] {print_formula(s.lhs, names)} |- {print_formula(s.rhs, names)}"


def print_theory(t):
    lines = [f"theory {t.name}"]
    decls = ", ".join(f"{s}/{a}" for s, a in t.signature.relations)
    lines.append(f"sig {{ {decls} }}" if decls else "sig { }")
    for ax in t.axioms:
        lines.append(f"axiom {print_sequent(ax)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<comment>#[^\n]*)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>\|-|[()\[\]{},.&|=/])|(?P<num>[0-9]+))"
)

_KEYWORDS = {"theory", "sig", "axiom", "true", "false", "exists"}


class _Tokens:
    def __init__(self, text):
        self.toks = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            pos = 0
            while pos < len(line):
                m = _TOKEN.match(line, pos)
                if not m or m.end() == pos:
                    stripped = line[pos:].lstrip()
                    if not stripped:
                        break
                    raise SyntaxError_(
                        f"unexpected character {stripped[0]!r}", lineno, pos + 1
                    )
                if m.lastgroup != "comment":
                    self.toks.append((m.group(m.lastgroup), lineno, m.start() + 1))
                pos = m.end()
            self.toks.append(("\n", lineno, len(line) + 1))
        self.pos = 0

    def peek(self):
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def loc(self):
        if self.pos < len(self.toks):
            _, line, col = self.toks[self.pos]
            return line, col
        return self.toks[-1][1] if self.toks else 1, 1

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, tok):
        line, col = self.loc()
        got = self.next()
        if got != tok:
            raise SyntaxError_(f"expected {tok!r}, got {got!r}", line, col)

    def skip_newlines(self):
        while self.peek() == "\n":
            self.next()


def parse_formula(text, ctx_names, sig):
    """Parse a single formula over the given context variable names."""
    toks = _Tokens(text)
    toks.skip_newlines()
    phi = _parse_or(toks, list(ctx_names), sig)
    toks.skip_newlines()
    if toks.peek() is not None:
        line, col = toks.loc()
        raise SyntaxError_(f"trailing input {toks.peek()!r}", line, col)
    return phi


def _parse_or(toks, names, sig):
    parts = [_parse_and(toks, names, sig)]
    while toks.peek() == "|":
        toks.next()
        parts.append(_parse_and(toks, names, sig))
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _parse_and(toks, names, sig):
    parts = [_parse_atomic(toks, names, sig)]
    while toks.peek() == "&":
        toks.next()
        parts.append(_parse_atomic(toks, names, sig))
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def _var(name, names, loc):
    try:
        return names.index(name) + 1
    except ValueError:
        raise SyntaxError_(f"variable {name!r} not in context", *loc) from None


def _parse_atomic(toks, names, sig):
    line, col = toks.loc()
    tok = toks.next()
    if tok == "(":
        phi = _parse_or(toks, names, sig)
        toks.expect(")")
        return phi
    if tok == "true":
        return TOP
    if tok == "false":
        return BOT
    if tok == "exists":
        vline, vcol = toks.loc()
        v = toks.next()
        if v is None or not v[0].isalpha() and v[0] != "_":
            raise SyntaxError_("expected variable name after 'exists'", vline, vcol)
        if v in names:
            raise SyntaxError_(f"variable {v!r} shadows the context", vline, vcol)
        toks.expect(".")
        body = _parse_or(toks, names + [v], sig)
        return Exists(body)
    if tok is None or tok == "\n":
        raise SyntaxError_("unexpected end of formula", line, col)
    if not (tok[0].isalpha() or tok[0] == "_"):
        raise SyntaxError_(f"unexpected token {tok!r}", line, col)
    # either an atom R(...), a 0-ary atom, or a variable in an equation
    if toks.peek() == "(":
        toks.next()
        args = []
        if toks.peek() != ")":
            while True:
                aline, acol = toks.loc()
                a = toks.next()
                args.append(_var(a, names, (aline, acol)))
                if toks.peek() == ",":
                    toks.next()
                    continue
                break
        toks.expect(")")
        arity = sig.arity(tok)  # raises on unknown symbol
        if arity != len(args):
            raise SyntaxError_(
                f"{tok} expects {arity} arguments, got {len(args)}", line, col
            )
        return Atom(tok, tuple(args))
    if toks.peek() == "=":
        toks.next()
        i = _var(tok, names, (line, col))
        jline, jcol = toks.loc()
        j = _var(toks.next(), names, (jline, jcol))
        return Eq(i, j)
    if any(s == tok for s, _ in sig.relations):
        if sig.arity(tok) != 0:
            raise SyntaxError_(f"{tok} expects {sig.arity(tok)} arguments", line, col)
        return Atom(tok, ())
    raise SyntaxError_(f"unknown symbol or lone variable {tok!r}", line, col)


def parse_sequent(text, sig):
    """Parse a standalone sequent of the form ``[x,y] lhs |- rhs``."""
    toks = _Tokens(text)
    toks.skip_newlines()
    toks.expect("[")
    names = []
    if toks.peek() != "]":
        while True:
            vline, vcol = toks.loc()
            v = toks.next()
            if v is None or not (v[0].isalpha() or v[0] == "_"):
                raise SyntaxError_("expected context variable", vline, vcol)
            if v in names:
                raise SyntaxError_(f"duplicate context variable {v!r}", vline, vcol)
            names.append(v)
            if toks.peek() == ",":
                toks.next()
                continue
            break
    toks.expect("]")
    lhs = _parse_or(toks, names, sig)
    toks.expect("|-")
    rhs = _parse_or(toks, names, sig)
    toks.skip_newlines()
    if toks.peek() is not None:
        line, col = toks.loc()
        raise SyntaxError_(f"trailing input {toks.peek()!r}", line, col)
    return Sequent(len(names), lhs, rhs)


def parse_theory(text):
    """Parse theory source text; see the grammar in the README."""
    toks = _Tokens(text)
    toks.skip_newlines()
    toks.expect("theory")
    line, col = toks.loc()
    name = toks.next()
    if name is None or name in ("\n",) or not (name[0].isalpha() or name[0] == "_"):
        raise SyntaxError_("expected theory name", line, col)
    toks.skip_newlines()
    rels = []
    if toks.peek() == "sig":
        toks.next()
        toks.expect("{")
        toks.skip_newlines()
        if toks.peek() != "}":
            while True:
                sline, scol = toks.loc()
                sym = toks.next()
                if sym is None or not (sym[0].isalpha() or sym[0] == "_"):
                    raise SyntaxError_("expected relation symbol", sline, scol)
                toks.expect("/")
                aline, acol = toks.loc()
                ar = toks.next()
                if ar is None or not ar.isdigit():
                    raise SyntaxError_("expected arity", aline, acol)
                rels.append((sym, int(ar)))
                toks.skip_newlines()
                if toks.peek() == ",":
                    toks.next()
                    toks.skip_newlines()
                    continue
                break
        toks.expect("}")
    sig = Signature(name, tuple(rels))
    axioms = []
    toks.skip_newlines()
    while toks.peek() == "axiom":
        toks.next()
        toks.expect("[")
        names = []
        if toks.peek() != "]":
            while True:
                vline, vcol = toks.loc()
                v = toks.next()
                if v is None or not (v[0].isalpha() or v[0] == "_"):
                    raise SyntaxError_("expected context variable", vline, vcol)
                if v in names:
                    raise SyntaxError_(f"duplicate context variable {v!r}", vline, vcol)
                names.append(v)
                if toks.peek() == ",":
                    toks.next()
                    continue
                break
        toks.expect("]")
        lhs = _parse_or(toks, names, sig)
        toks.expect("|-")
        rhs = _parse_or(toks, names, sig)
        axioms.append(Sequent(len(names), lhs, rhs))
        toks.skip_newlines()
    toks.skip_newlines()
    if toks.peek() is not None:
        line, col = toks.loc()
        raise SyntaxError_(f"unexpected token {toks.peek()!r}", line, col)
    return Theory(name, sig, tuple(axioms))


# ---------------------------------------------------------------------------
# fixture builders


def build_lattice_theory(lattice, name="TL"):
    """Propositional theory of a finite distributive lattice.

    One 0-ary symbol per lattice element; axioms force the empty domain and
    one implication per covering pair of the lattice order.
    """
    syms = tuple((f"R{a}", 0) for a in range(lattice.n))
    sig = Signature(name, syms)
    axioms = [Sequent(0, Exists(Eq(1, 1)), BOT)]
    for a, b in lattice.covers():
        axioms.append(Sequent(0, Atom(f"R{a}", ()), Atom(f"R{b}", ())))
    return Theory(name, sig, tuple(axioms))


# ---------------------------------------------------------------------------
# canonical formula enumeration


def enum_formulas(sig, n, depth, cap=2000):
    """Canonically ordered normalized formulas in context n up to the given
    generation depth.

    Level 0 holds top, bottom, atoms and equalities; each further level adds
    normalized binary meets/joins of earlier formulas and existentials over
    the context-(n+1) enumeration one level down.  The list is sorted by
    (size, structural key) and truncated at ``cap`` entries, simplest first.
    """
    return list(_enum(sig, n, depth, cap))


@lru_cache(maxsize=None)
def _enum(sig, n, depth, cap):
    level = {TOP, BOT}
    for sym, ar in sig.relations:
        for args in _tuples(n, ar):
            level.add(Atom(sym, args))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            level.add(Eq(i, j))
    seen = set(level)
    keys = {}

    def key(p):
        k = keys.get(p)
        if k is None:
            k = (formula_size(p), formula_key(p))
            keys[p] = k
        return k

    prev = set()  # pairs drawn entirely from here were combined already
    for _ in range(depth):
        ordered = sorted(seen, key=key)
        if len(ordered) > cap:
            ordered = ordered[:cap]
        new = set()
        for a in range(len(ordered)):
            pa = ordered[a]
            a_old = pa in prev
            for b in range(a + 1, len(ordered)):
                pb = ordered[b]
                if a_old and pb in prev:
                    continue
                for cons in (And, Or):
                    q = normalize(cons((pa, pb)))
                    if q not in seen:
                        new.add(q)
        for body in _enum(sig, n + 1, depth - 1, cap):
            q = normalize(Exists(body))
            if q not in seen:
                new.add(q)
        prev = set(ordered)
        seen |= new
    final = [p for p in seen if formula_depth(p) <= depth]
    final.sort(key=key)
    return tuple(final[:cap])


def _tuples(n, arity):
    if arity == 0:
        return [()]
    out = [()]
    for _ in range(arity):
        out = [t + (i,) for t in out for i in range(1, n + 1)]
    return out
