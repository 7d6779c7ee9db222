"""Proof objects and bounded proof search for the coherent sequent calculus.

Rules: identity, substitution, cut, the two equality rules, n-ary
conjunction and disjunction introduction/elimination, the existential double
rule, distributivity and Frobenius axioms, and theory axioms.  Conclusions
are compared up to `syntax.normalize`, which is semantics-preserving; the
prover only ever builds sequents with normalized sides.

Verdicts are three-valued: Proved carries a checked derivation, Refuted a
finite model with a falsifying assignment, Unknown means budget exhaustion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .semantics import enumerate_models, eval_formula
from .syntax import (
    BOT,
    TOP,
    And,
    Bot,
    Eq,
    Exists,
    Or,
    Sequent,
    Top,
    check_formula,
    conj,
    disj,
    formula_key,
    normalize,
    normalize_sequent,
    shift,
    substitute,
)


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Derivation:
    rule: str
    concl: Sequent
    params: tuple = ()
    children: tuple = ()


@dataclass(frozen=True)
class Budgets:
    depth: int = 8
    size: int = 5000
    model_size: int = 3
    # optional pre-supplied list of models of the theory to use for
    # refutation instead of exhaustive enumeration
    model_pool: tuple | None = None

    def scaled(self, factor):
        return Budgets(self.depth * factor, self.size * factor,
                       self.model_size, self.model_pool)


@dataclass(frozen=True)
class Proved:
    derivation: Derivation


@dataclass(frozen=True)
class Refuted:
    model: object
    assignment: tuple


@dataclass(frozen=True)
class Unknown:
    reason: str = "budget exhausted"


# ---------------------------------------------------------------------------
# helpers shared by checker and prover


def parts_of(phi):
    """Conjunct set of a normalized formula; TOP contributes nothing."""
    if isinstance(phi, Top):
        return frozenset()
    if isinstance(phi, And):
        return frozenset(phi.parts)
    return frozenset((phi,))


def make_pattern(phi, j, n):
    """phi with every free occurrence of variable j replaced by a hole,
    represented as index n+1 of a context-(n+1) formula."""
    f = tuple(n + 1 if t == j else t for t in range(1, n + 1))
    return substitute(phi, f, n + 1)


def plug(pattern, v, n):
    """Fill the hole (index n+1) of a context-(n+1) pattern with variable v."""
    return substitute(pattern, tuple(range(1, n + 1)) + (v,), n)


# ---------------------------------------------------------------------------
# derivation checking


def check_derivation(t, d):
    return check_derivation_reason(t, d) is None


def check_derivation_reason(t, d):
    """None if valid, else a string describing the first bad node."""
    try:
        _check_node(t, d)
    except _BadNode as e:
        return str(e)
    return None


class _BadNode(Exception):
    pass


def _bad(msg, d):
    raise _BadNode(f"{d.rule}: {msg}")


def _check_node(t, d):
    for c in d.children:
        _check_node(t, c)
        if not isinstance(c, Derivation):
            _bad("child is not a derivation", d)
    s = d.concl
    check_formula(t.signature, s.lhs, s.ctx)
    check_formula(t.signature, s.rhs, s.ctx)
    for c in d.children:
        if d.rule not in ("subst", "exists_up", "exists_down") and c.concl.ctx != s.ctx:
            _bad("child context mismatch", d)
    n = s.ctx
    lhs, rhs = normalize(s.lhs), normalize(s.rhs)
    kids = [normalize_sequent(c.concl) for c in d.children]
    rule = d.rule

    def need(k):
        if len(kids) != k:
            _bad(f"expected {k} children, got {len(kids)}", d)

    if rule == "identity":
        need(0)
        if lhs != rhs:
            _bad("sides differ", d)
    elif rule == "top_intro":
        need(0)
        if rhs != TOP:
            _bad("rhs is not top", d)
    elif rule == "bot_elim":
        need(0)
        if lhs != BOT:
            _bad("lhs is not bottom", d)
    elif rule == "eq_refl":
        need(0)
        (i,) = d.params
        if not 1 <= i <= n or lhs != TOP or rhs != normalize(Eq(i, i)):
            _bad("not an equality-reflexivity instance", d)
    elif rule == "eq_subst":
        need(0)
        i, j, pattern = d.params
        if not (1 <= i <= n and 1 <= j <= n):
            _bad("indices out of context", d)
        check_formula(t.signature, pattern, n + 1)
        want_l = conj([Eq(i, j), plug(pattern, i, n)])
        want_r = normalize(plug(pattern, j, n))
        if lhs != want_l or rhs != want_r:
            _bad("conclusion does not match the pattern instance", d)
    elif rule == "axiom":
        need(0)
        (i,) = d.params
        if not 0 <= i < len(t.axioms):
            _bad("axiom index out of range", d)
        ax = t.axioms[i]
        if s.ctx != ax.ctx or lhs != normalize(ax.lhs) or rhs != normalize(ax.rhs):
            _bad("conclusion is not that axiom", d)
    elif rule == "subst":
        need(1)
        (f,) = d.params
        child = kids[0]
        if len(f) != child.ctx:
            _bad("substitution length mismatch", d)
        if any(not 1 <= v <= n for v in f):
            _bad("substitution image out of context", d)
        if lhs != normalize(substitute(child.lhs, f, n)) or rhs != normalize(
            substitute(child.rhs, f, n)
        ):
            _bad("conclusion is not the substituted child", d)
    elif rule == "cut":
        need(2)
        a, b = kids
        if a.rhs != b.lhs or lhs != a.lhs or rhs != b.rhs:
            _bad("cut formula mismatch", d)
    elif rule == "conj_proj":
        need(0)
        if lhs != rhs and not (isinstance(lhs, And) and rhs in lhs.parts):
            _bad("rhs is not a conjunct of lhs", d)
    elif rule == "conj_rule":
        need(len(kids))
        if not kids:
            _bad("needs at least one child", d)
        if any(k.lhs != lhs for k in kids):
            _bad("children lhs differ from conclusion lhs", d)
        if rhs != conj([k.rhs for k in kids]):
            _bad("rhs is not the conjunction of children rhs", d)
    elif rule == "disj_inj":
        need(0)
        if lhs != rhs and not (isinstance(rhs, Or) and lhs in rhs.parts):
            _bad("lhs is not a disjunct of rhs", d)
    elif rule == "disj_rule":
        if not kids:
            _bad("needs at least one child", d)
        if any(k.rhs != rhs for k in kids):
            _bad("children rhs differ from conclusion rhs", d)
        if lhs != disj([k.lhs for k in kids]):
            _bad("lhs is not the disjunction of children lhs", d)
    elif rule == "exists_up":
        need(1)
        child = kids[0]
        if child.ctx != n + 1:
            _bad("child context must extend conclusion context", d)
        if lhs != normalize(Exists(child.lhs)):
            _bad("lhs is not the existential of the child lhs", d)
        if child.rhs != normalize(shift(rhs, n)):
            _bad("child rhs is not the shifted conclusion rhs", d)
    elif rule == "exists_down":
        need(1)
        child = kids[0]
        if n != child.ctx + 1:
            _bad("conclusion context must extend child context", d)
        if not isinstance(child.lhs, Exists):
            _bad("child lhs is not existential", d)
        if lhs != normalize(child.lhs.body):
            _bad("lhs is not the child existential body", d)
        if rhs != normalize(shift(child.rhs, child.ctx)):
            _bad("rhs is not the shifted child rhs", d)
    elif rule == "distributivity":
        need(0)
        phi, dparts = d.params
        want_l = conj([phi, Or(dparts)])
        want_r = disj([conj([phi, p]) for p in dparts])
        if lhs != want_l or rhs != want_r:
            _bad("not a distributivity instance", d)
    elif rule == "frobenius":
        need(0)
        phi, psi = d.params
        want_l = conj([phi, Exists(psi)])
        want_r = normalize(Exists(conj([shift(phi, n), psi])))
        if lhs != want_l or rhs != want_r:
            _bad("not a Frobenius instance", d)
    else:
        _bad("unknown rule", d)


# ---------------------------------------------------------------------------
# derivation builders (always produce normalized conclusions)


def _d(rule, n, lhs, rhs, params=(), children=()):
    return Derivation(rule, Sequent(n, lhs, rhs), params, tuple(children))


def d_identity(n, phi):
    return _d("identity", n, phi, phi)


def d_cut(a, b):
    n = a.concl.ctx
    return _d("cut", n, a.concl.lhs, b.concl.rhs, children=(a, b))


def d_proj(n, lhs, part):
    return _d("conj_proj", n, lhs, part)


def d_to_conjunction(n, lhs, target):
    """lhs |- target where every conjunct of target is a conjunct of lhs."""
    if target == lhs:
        return d_identity(n, lhs)
    if target == TOP:
        return _d("top_intro", n, lhs, TOP)
    tparts = sorted(parts_of(target), key=formula_key)
    lparts = parts_of(lhs)
    if not isinstance(target, And):
        if target not in lparts:
            raise ValueError("target is not a conjunct of lhs")
        return d_proj(n, lhs, target)
    kids = []
    for p in tparts:
        if p == lhs:
            kids.append(d_identity(n, lhs))
        else:
            kids.append(d_proj(n, lhs, p))
    return _d("conj_rule", n, lhs, target, children=tuple(kids))


def d_exists_intro(n, body, witness):
    """body[hole := witness] |- Exists(body), via the double rule + subst."""
    ex = normalize(Exists(body))
    ident = d_identity(n, ex)
    down = _d(
        "exists_down",
        n + 1,
        normalize(body),
        normalize(shift(ex, n)),
        children=(ident,),
    )
    f = tuple(range(1, n + 1)) + (witness,)
    inst_l = normalize(substitute(body, f, n))
    return _d("subst", n, inst_l, ex, params=(f,), children=(down,))


# ---------------------------------------------------------------------------
# the prover


def _axiom_instances(t, n):
    """All normalized axiom instances of t in context n, with builders."""
    cache = getattr(t, "_instance_cache", None)
    if cache is None:
        cache = t._instance_cache = {}
    if n in cache:
        return cache[n]
    out = []
    for ai, ax in enumerate(t.axioms):
        k = ax.ctx
        maps = [()]
        for _ in range(k):
            maps = [m + (v,) for m in maps for v in range(1, n + 1)]
        if k > 0 and n == 0:
            maps = []
        for f in maps:
            al = normalize(substitute(ax.lhs, f, n))
            ar = normalize(substitute(ax.rhs, f, n))
            if al == ar or ar == TOP:
                continue
            out.append((parts_of(al), al, ar, ai, f))
    cache[n] = out
    return out


def _d_axiom_instance(t, n, ai, f, al, ar):
    ax = t.axioms[ai]
    leaf = _d("axiom", ax.ctx, normalize(ax.lhs), normalize(ax.rhs), params=(ai,))
    if f == tuple(range(1, ax.ctx + 1)) and ax.ctx == n:
        return leaf
    return _d("subst", n, al, ar, params=(f,), children=(leaf,))


class _Prover:
    def __init__(self, t, budgets):
        self.t = t
        self.budgets = budgets
        self.memo = {}
        self.fail_depth = {}
        self.in_progress = set()
        self.calls = 0

    def derive(self, n, lhs, rhs, depth):
        key = (n, lhs, rhs)
        if key in self.memo:
            return self.memo[key]
        if depth <= 0 or key in self.in_progress:
            return None
        if key in self.fail_depth and self.fail_depth[key] >= depth:
            return None
        self.calls += 1
        if self.calls > self.budgets.size:
            raise BudgetExceeded()
        self.in_progress.add(key)
        try:
            d = self._derive(n, lhs, rhs, depth)
        finally:
            self.in_progress.discard(key)
        if d is not None:
            self.memo[key] = d
        else:
            prev = self.fail_depth.get(key, -1)
            if depth > prev:
                self.fail_depth[key] = depth
        return d

    def _derive(self, n, lhs, rhs, depth):
        if lhs == rhs:
            return d_identity(n, lhs)
        if rhs == TOP:
            return _d("top_intro", n, lhs, TOP)
        if lhs == BOT:
            return _d("bot_elim", n, BOT, rhs)

        # collapse variables identified by an equality on the left
        eqs = sorted(
            (p for p in parts_of(lhs) if isinstance(p, Eq)), key=formula_key
        )
        if eqs:
            d = self._by_eq_collapse(n, lhs, rhs, eqs[0], depth)
            if d is not None:
                return d

        if isinstance(lhs, Or):
            kids = []
            for p in lhs.parts:
                d = self.derive(n, p, rhs, depth - 1)
                if d is None:
                    kids = None
                    break
                kids.append(d)
            if kids is not None:
                return _d("disj_rule", n, lhs, rhs, children=tuple(kids))
            return None

        if isinstance(lhs, Exists):
            body = normalize(lhs.body)
            d = self.derive(n + 1, body, normalize(shift(rhs, n)), depth - 1)
            if d is not None:
                return _d("exists_up", n, lhs, rhs, children=(d,))
            return None

        if isinstance(rhs, And):
            kids = []
            for p in rhs.parts:
                d = self.derive(n, lhs, p, depth - 1)
                if d is None:
                    kids = None
                    break
                kids.append(d)
            if kids is not None:
                return _d("conj_rule", n, lhs, rhs, children=tuple(kids))
            return None

        if isinstance(lhs, And):
            for p in lhs.parts:
                if isinstance(p, Or):
                    d = self._by_distributivity(n, lhs, rhs, p, depth)
                    if d is not None:
                        return d
                if isinstance(p, Exists):
                    d = self._by_frobenius(n, lhs, rhs, p, depth)
                    if d is not None:
                        return d

        d = self._by_axiom_forward(n, lhs, rhs, depth)
        if d is not None:
            return d

        if isinstance(rhs, Or):
            for p in rhs.parts:
                d = self.derive(n, lhs, p, depth - 1)
                if d is not None:
                    inj = _d("disj_inj", n, p, rhs)
                    return d_cut(d, inj)

        if isinstance(rhs, Exists):
            body = normalize(rhs.body)
            for w in range(1, n + 1):
                target = normalize(substitute(body, tuple(range(1, n + 1)) + (w,), n))
                d = self.derive(n, lhs, target, depth - 1)
                if d is not None:
                    return d_cut(d, d_exists_intro(n, body, w))

        d = self._by_axiom_backward(n, lhs, rhs, depth)
        if d is not None:
            return d

        if isinstance(lhs, And):
            for p in lhs.parts:
                d = self.derive(n, p, rhs, depth - 1)
                if d is not None:
                    return d_cut(d_proj(n, lhs, p), d)
        return None

    def _by_eq_collapse(self, n, lhs, rhs, eq, depth):
        i, j = eq.i, eq.j
        c = tuple(i if v == j else v for v in range(1, n + 1))
        lhs_c = normalize(substitute(lhs, c, n))
        rhs_c = normalize(substitute(rhs, c, n))
        if lhs_c == lhs and rhs_c == rhs:
            return None
        d_c = self.derive(n, lhs_c, rhs_c, depth - 1)
        if d_c is None:
            return None
        # lhs |- lhs_c by rewriting j to i (the equality is a conjunct of lhs)
        p_l = make_pattern(lhs, j, n)
        d1 = _d("eq_subst", n, lhs, lhs_c, params=(j, i, p_l))
        d2 = d_cut(d1, d_c)
        # carry the equality along so the goal can be rewritten back
        with_eq = conj([rhs_c, eq])
        if with_eq == rhs_c:
            d3 = d2
        elif with_eq == eq:
            d3 = d_proj(n, lhs, eq) if lhs != eq else d_identity(n, eq)
        else:
            kids = []
            for p in sorted(parts_of(with_eq), key=formula_key):
                if p == eq:
                    kids.append(d_proj(n, lhs, eq) if lhs != eq else d_identity(n, eq))
                elif p == rhs_c:
                    kids.append(d2)
                else:
                    kids.append(d_cut(d2, d_proj(n, rhs_c, p)))
            d3 = _d("conj_rule", n, lhs, with_eq, children=tuple(kids))
        p_r = make_pattern(rhs, j, n)
        d4 = _d("eq_subst", n, with_eq, rhs, params=(i, j, p_r))
        return d_cut(d3, d4)

    def _by_distributivity(self, n, lhs, rhs, orpart, depth):
        others = [p for p in lhs.parts if p != orpart]
        phi = conj(others)
        dist_rhs = disj([conj([phi, p]) for p in orpart.parts])
        dist = _d(
            "distributivity", n, lhs, dist_rhs, params=(phi, orpart.parts)
        )
        d = self.derive(n, dist_rhs, rhs, depth - 1)
        if d is None:
            return None
        return d_cut(dist, d)

    def _by_frobenius(self, n, lhs, rhs, expart, depth):
        others = [p for p in lhs.parts if p != expart]
        phi = conj(others)
        psi = normalize(expart.body)
        frob_rhs = normalize(Exists(conj([shift(phi, n), psi])))
        frob = _d("frobenius", n, lhs, frob_rhs, params=(phi, psi))
        d = self.derive(n, frob_rhs, rhs, depth - 1)
        if d is None:
            return None
        return d_cut(frob, d)

    def _by_axiom_forward(self, n, lhs, rhs, depth):
        lparts = parts_of(lhs)
        for alp, al, ar, ai, f in _axiom_instances(self.t, n):
            if not alp <= lparts:
                continue
            arparts = parts_of(ar)
            if arparts <= lparts:
                continue  # nothing new
            newlhs = conj([lhs, ar])
            d_rest = self.derive(n, newlhs, rhs, depth - 1)
            if d_rest is None:
                continue
            d_axi = _d_axiom_instance(self.t, n, ai, f, al, ar)
            d_to_al = d_to_conjunction(n, lhs, al)
            d_ar = d_cut(d_to_al, d_axi)  # lhs |- ar
            kids = []
            for p in sorted(parts_of(newlhs), key=formula_key):
                if p in lparts or p == lhs:
                    kids.append(
                        d_identity(n, lhs) if p == lhs else d_proj(n, lhs, p)
                    )
                elif p == ar:
                    kids.append(d_ar)
                else:
                    kids.append(d_cut(d_ar, d_proj(n, ar, p)))
            if not isinstance(newlhs, And):
                d_new = d_ar if newlhs == ar else kids[0]
            else:
                d_new = _d("conj_rule", n, lhs, newlhs, children=tuple(kids))
            return d_cut(d_new, d_rest)
        return None

    def _by_axiom_backward(self, n, lhs, rhs, depth):
        for alp, al, ar, ai, f in _axiom_instances(self.t, n):
            if ar != rhs:
                continue
            d = self.derive(n, lhs, al, depth - 1)
            if d is not None:
                d_axi = _d_axiom_instance(self.t, n, ai, f, al, ar)
                return d_cut(d, d_axi)
        return None


def prove(t, s, budgets=Budgets()):
    """A checked derivation of s from t within budget, or None."""
    s = normalize_sequent(s)
    prover = _Prover(t, budgets)
    try:
        d = prover.derive(s.ctx, s.lhs, s.rhs, budgets.depth)
    except BudgetExceeded:
        return None
    if d is None:
        return None
    reason = check_derivation_reason(t, d)
    if reason is not None:
        raise AssertionError(f"prover produced an invalid derivation: {reason}")
    return d


def find_countermodel(t, s, max_size=3, pool=None):
    """A model of t (carrier <= max_size) and assignment satisfying lhs but
    not rhs, or None.  An explicit pool of models of t may be supplied."""
    if pool is None:
        pool = enumerate_models(t, max_size)
    for m in pool:
        bad = m.ext(s.lhs, s.ctx) - m.ext(s.rhs, s.ctx)
        if bad:
            return m, min(bad)
    return None


def entails(t, s, budgets=Budgets()):
    s = normalize_sequent(s)
    cm = find_countermodel(t, s, budgets.model_size, budgets.model_pool)
    if cm is not None:
        return Refuted(cm[0], cm[1])
    d = prove(t, s, budgets)
    if d is not None:
        return Proved(d)
    return Unknown()


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: str  # "Equivalent" | "Inequivalent" | "Unknown"
    forward: object
    backward: object

    @property
    def equivalent(self):
        return self.status == "Equivalent"


def equivalent(t, phi, psi, ctx, budgets=Budgets()):
    fwd = entails(t, Sequent(ctx, phi, psi), budgets)
    if isinstance(fwd, Refuted):
        return EquivalenceVerdict("Inequivalent", fwd, None)
    bwd = entails(t, Sequent(ctx, psi, phi), budgets)
    if isinstance(bwd, Refuted):
        return EquivalenceVerdict("Inequivalent", fwd, bwd)
    if isinstance(fwd, Proved) and isinstance(bwd, Proved):
        return EquivalenceVerdict("Equivalent", fwd, bwd)
    return EquivalenceVerdict("Unknown", fwd, bwd)


# ---------------------------------------------------------------------------
# JSON


def derivation_to_json(d):
    from .syntax import print_sequent

    return {
        "rule": d.rule,
        "conclusion": print_sequent(d.concl),
        "parameters": _params_json(d.params),
        "children": [derivation_to_json(c) for c in d.children],
    }


def _params_json(params):
    from .syntax import print_formula

    out = []
    for p in params:
        if isinstance(p, (int, str)):
            out.append(p)
        elif isinstance(p, tuple) and all(isinstance(v, int) for v in p):
            out.append(list(p))
        elif isinstance(p, tuple):
            out.append([print_formula(q) for q in p])
        else:
            out.append(print_formula(p))
    return out
