"""Finite approximations of the type space functor, interpretations as
1-cells, morphisms of interpretations as 2-cells, and the Beck-Chevalley
checkers on approximations.

An approximation collects the depth-d truth profiles of all tuples in all
models up to a size bound B, per arity n <= N.  Index maps f: n -> m are
tuples of length n with 1-based values in 1..m, acting by restriction."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from . import calculus, lattice
from .semantics import FiniteModel, enumerate_models, eval_formula, gamma_star
from .syntax import (
    BOT,
    TOP,
    And,
    Atom,
    Eq,
    Exists,
    Or,
    Sequent,
    Theory,
    check_formula,
    conj,
    enum_formulas,
    normalize,
    substitute,
)


class TypeSpaceError(Exception):
    pass


def all_maps(n, m):
    """All index maps n -> m, deterministic order."""
    if n == 0:
        return [()]
    return sorted(product(range(1, m + 1), repeat=n))


def identity_index_map(n):
    return tuple(range(1, n + 1))


def compose_maps(g, f):
    """g after f, for f: n -> m and g: m -> l."""
    return tuple(g[v - 1] for v in f)


def times_k(f, k):
    """f applied blockwise to k-blocks: nk -> mk."""
    out = []
    for v in f:
        out.extend((v - 1) * k + t for t in range(1, k + 1))
    return tuple(out)


def direct_image_formula(phi, f, n, m):
    """Formula for the image along f: n -> m of [phi], phi in context m:
    exists y1..ym (phi(y) /\\ /\\_i xi = y_f(i)), in context n."""
    inner = [substitute(phi, tuple(range(n + 1, n + m + 1)), n + m)]
    for i in range(1, n + 1):
        inner.append(Eq(i, n + f[i - 1]))
    out = conj(inner)
    for _ in range(m):
        out = normalize(Exists(out))
    return out


def preimage_formula(psi, f, n, m):
    """Formula for the preimage along f: n -> m of [psi], psi in context n."""
    return normalize(substitute(psi, f, m))


# ---------------------------------------------------------------------------
# interpretations


@dataclass
class Interpretation:
    source: Theory
    target: Theory
    k: int
    mapping: dict  # relation symbol (and "=") -> target formula on k-blocks

    def __post_init__(self):
        if self.k < 1:
            raise TypeSpaceError("arity k must be at least 1")
        if "=" not in self.mapping:
            raise TypeSpaceError("interpretation must map equality")
        check_formula(self.target.signature, self.mapping["="], 2 * self.k)
        for sym, ar in self.source.signature.relations:
            if sym not in self.mapping:
                raise TypeSpaceError(f"interpretation misses symbol {sym}")
            check_formula(self.target.signature, self.mapping[sym], ar * self.k)

    @property
    def strong(self):
        return self.k == 1 and normalize(self.mapping["="]) == Eq(1, 2)

    def equality_formula(self):
        return normalize(self.mapping["="])

    def domain_formula(self):
        """Gamma(x = x), one k-block, in context k."""
        f = identity_index_map(self.k) * 2
        return normalize(substitute(self.mapping["="], f, self.k))

    def domain_at_blocks(self, blocks, ctx):
        """Conjunction of the domain formula over the given 1-based block
        starts, in the given context."""
        out = []
        for b in blocks:
            f = tuple(range(b, b + self.k))
            out.append(substitute(self.domain_formula(), f, ctx))
        return conj(out)


def identity_interpretation(t):
    mapping = {"=": Eq(1, 2)}
    for sym, ar in t.signature.relations:
        mapping[sym] = Atom(sym, tuple(range(1, ar + 1)))
    return Interpretation(t, t, 1, mapping)


def apply_interpretation(g, phi, ctx):
    """Translate a source formula in the given context to a target formula in
    context ctx*k.  Existentials are relativized to the domain formula."""
    k = g.k

    def block_map(args, n):
        f = []
        for a in args:
            f.extend(range((a - 1) * k + 1, a * k + 1))
        return tuple(f)

    def go(phi, n):
        if isinstance(phi, Atom):
            return normalize(
                substitute(g.mapping[phi.sym], block_map(phi.args, n), n * k)
            )
        if isinstance(phi, Eq):
            return normalize(
                substitute(g.mapping["="], block_map((phi.i, phi.j), n), n * k)
            )
        if isinstance(phi, And):
            return conj([go(p, n) for p in phi.parts])
        if isinstance(phi, Or):
            from .syntax import disj

            return disj([go(p, n) for p in phi.parts])
        if isinstance(phi, Exists):
            body = go(phi.body, n + 1)
            dom = g.domain_at_blocks([n * k + 1], (n + 1) * k)
            out = conj([dom, body])
            for _ in range(k):
                out = normalize(Exists(out))
            return out
        return phi

    return go(normalize(phi), ctx)


def compose_interpretations(g2, g1):
    """Composite interpretation: first g1: T -> T', then g2: T' -> T''."""
    if g1.target is not g2.source and g1.target != g2.source:
        raise TypeSpaceError("endpoint mismatch")
    mapping = {"=": apply_interpretation(g2, g1.mapping["="], 2 * g1.k)}
    for sym, ar in g1.source.signature.relations:
        mapping[sym] = apply_interpretation(g2, g1.mapping[sym], ar * g1.k)
    return Interpretation(g1.source, g2.target, g1.k * g2.k, mapping)


@dataclass(frozen=True)
class CheckReport:
    proved: int
    refuted: int
    unknown: int
    first_failure: object = None

    @property
    def ok(self):
        return self.refuted == 0 and self.unknown == 0


def requirement_sequents(g):
    """Target-theory proof obligations: the translated equality must be a
    partial equivalence and a congruence for every translated relation."""
    k = g.k
    eqf = g.equality_formula()  # context 2k
    dom = g.domain_formula()  # context k

    def eq_at(b1, b2, m):
        idx = tuple((b1 - 1) * k + t for t in range(1, k + 1)) + tuple(
            (b2 - 1) * k + t for t in range(1, k + 1)
        )
        return substitute(eqf, idx, m * k)

    def dom_at(b, m):
        idx = tuple((b - 1) * k + t for t in range(1, k + 1))
        return substitute(dom, idx, m * k)

    out = [
        ("eq_refl", Sequent(k, dom_at(1, 1), eq_at(1, 1, 1))),
        (
            "eq_sym",
            Sequent(
                2 * k,
                conj([eq_at(1, 2, 2), dom_at(1, 2), dom_at(2, 2)]),
                eq_at(2, 1, 2),
            ),
        ),
        (
            "eq_trans",
            Sequent(3 * k, conj([eq_at(1, 2, 3), eq_at(2, 3, 3)]), eq_at(1, 3, 3)),
        ),
    ]
    for sym, r in g.source.signature.relations:
        gr = g.mapping[sym]  # context r*k
        for i in range(1, r + 1):
            m = r + 1
            base = tuple(range(1, r * k + 1))
            moved = list(base)
            for t in range(k):
                moved[(i - 1) * k + t] = r * k + t + 1
            lhs = conj(
                [
                    substitute(gr, base, m * k),
                    eq_at(i, r + 1, m),
                    dom_at(r + 1, m),
                ]
            )
            rhs = substitute(gr, tuple(moved), m * k)
            out.append((f"congruence_{sym}_{i}", Sequent(m * k, lhs, rhs)))
    return out


def check_interpretation(g, budgets=calculus.Budgets(), depth=2, ctxs=(0, 1, 2),
                         cap=16):
    """Check the congruence obligations on the translated equality, then for
    source-provable sequents phi |- psi over small formula pairs check that
    the target proves Gamma(phi /\\ x=x) |- Gamma(psi)."""
    proved = refuted = unknown = 0
    first = None
    src_pool = tuple(enumerate_models(g.source, budgets.model_size))
    tgt_pool = tuple(enumerate_models(g.target, budgets.model_size))
    src_b = calculus.Budgets(budgets.depth, budgets.size, budgets.model_size, src_pool)
    tgt_b = calculus.Budgets(budgets.depth, budgets.size, budgets.model_size, tgt_pool)
    for tag, s in requirement_sequents(g):
        w = calculus.entails(g.target, s, tgt_b)
        if isinstance(w, calculus.Proved):
            proved += 1
        elif isinstance(w, calculus.Refuted):
            refuted += 1
            if first is None:
                first = (tag, s.lhs, s.rhs, w)
        else:
            unknown += 1
            if first is None:
                first = (tag, s.lhs, s.rhs, w)
    for n in ctxs:
        formulas = enum_formulas(g.source.signature, n, depth)[:cap]
        for phi in formulas:
            for psi in formulas:
                v = calculus.entails(g.source, Sequent(n, phi, psi), src_b)
                if not isinstance(v, calculus.Proved):
                    continue
                lhs = conj(
                    [apply_interpretation(g, phi, n),
                     g.domain_at_blocks(range(1, n * g.k + 1, g.k), n * g.k)]
                )
                rhs = apply_interpretation(g, psi, n)
                w = calculus.entails(g.target, Sequent(n * g.k, lhs, rhs), tgt_b)
                if isinstance(w, calculus.Proved):
                    proved += 1
                elif isinstance(w, calculus.Refuted):
                    refuted += 1
                    if first is None:
                        first = (n, phi, psi, w)
                else:
                    unknown += 1
                    if first is None:
                        first = (n, phi, psi, w)
    return CheckReport(proved, refuted, unknown, first)


# ---------------------------------------------------------------------------
# 2-cells


@dataclass
class Morphism2Cell:
    source: Interpretation
    target: Interpretation
    formula: object  # in context source.k + target.k over the shared target theory

    def __post_init__(self):
        if self.source.source != self.target.source or (
            self.source.target != self.target.target
        ):
            raise TypeSpaceError("2-cell endpoints mismatch")
        check_formula(
            self.source.target.signature,
            self.formula,
            self.source.k + self.target.k,
        )


def identity_2cell(g):
    return Morphism2Cell(g, g, g.equality_formula())


def _shift_formula(phi, ctx, offset, new_ctx):
    return substitute(phi, tuple(range(offset + 1, offset + ctx + 1)), new_ctx)


def morphism_condition_sequents(theta, depth=1, cap=10, ctxs=(1, 2)):
    """The condition (1)-(5) proof obligations as target-theory sequents."""
    g, g2 = theta.source, theta.target
    k, k2 = g.k, g2.k
    th = normalize(theta.formula)
    seqs = []
    # (1) domain(x) |- exists y. theta(x, y)
    rhs = th
    for _ in range(k2):
        rhs = normalize(Exists(rhs))
    seqs.append(("(1)", Sequent(k, g.domain_formula(), rhs)))
    # (2) theta |- dom(x) /\ dom'(y)
    ctx = k + k2
    dom_x = g.domain_at_blocks([1], ctx)
    dom_y = g2.domain_at_blocks([k + 1], ctx)
    seqs.append(("(2)", Sequent(ctx, th, conj([dom_x, dom_y]))))
    # (3) theta(x,y) /\ Gamma(x=x')(x,x') |- theta(x',y)
    ctx = 2 * k + k2
    th_xy = substitute(th, tuple(range(1, k + 1)) + tuple(range(2 * k + 1, ctx + 1)), ctx)
    eq_xx = _shift_formula(g.equality_formula(), 2 * k, 0, ctx)
    th_x2y = substitute(th, tuple(range(k + 1, 2 * k + 1)) + tuple(range(2 * k + 1, ctx + 1)), ctx)
    seqs.append(("(3)", Sequent(ctx, conj([th_xy, eq_xx]), normalize(th_x2y))))
    # (4) theta(x,y) /\ Gamma'(y=y')(y,y') |- theta(x,y')
    ctx = k + 2 * k2
    th_xy = substitute(th, tuple(range(1, k + k2 + 1)), ctx)
    eq_yy = _shift_formula(g2.equality_formula(), 2 * k2, k, ctx)
    th_xy2 = substitute(
        th, tuple(range(1, k + 1)) + tuple(range(k + k2 + 1, ctx + 1)), ctx
    )
    seqs.append(("(4)", Sequent(ctx, conj([th_xy, eq_yy]), normalize(th_xy2))))
    # (5) Gamma(phi)(xs) /\ /\ theta(xi,yi) |- Gamma'(phi)(ys)
    for n in ctxs:
        formulas = enum_formulas(g.source.signature, n, depth)[:cap]
        ctx = n * (k + k2)
        xpos = tuple(range(1, n * k + 1))
        ypos = tuple(range(n * k + 1, ctx + 1))
        for phi in formulas:
            gl = substitute(apply_interpretation(g, phi, n), xpos, ctx)
            gr = substitute(apply_interpretation(g2, phi, n), ypos, ctx)
            thetas = []
            for i in range(n):
                f = tuple(range(i * k + 1, (i + 1) * k + 1)) + tuple(
                    range(n * k + i * k2 + 1, n * k + (i + 1) * k2 + 1)
                )
                thetas.append(substitute(th, f, ctx))
            seqs.append(
                (f"(5) n={n}", Sequent(ctx, conj([gl] + thetas), normalize(gr)))
            )
    return seqs


def check_morphism_of_interpretations(theta, budgets=calculus.Budgets(), depth=1,
                                      cap=10, ctxs=(1, 2)):
    t = theta.source.target
    pool = tuple(enumerate_models(t, budgets.model_size))
    b = calculus.Budgets(budgets.depth, budgets.size, budgets.model_size, pool)
    proved = refuted = unknown = 0
    first = None
    for tag, s in morphism_condition_sequents(theta, depth, cap, ctxs):
        v = calculus.entails(t, s, b)
        if isinstance(v, calculus.Proved):
            proved += 1
        elif isinstance(v, calculus.Refuted):
            refuted += 1
            if first is None:
                first = (tag, s, v)
        else:
            unknown += 1
            if first is None:
                first = (tag, s, v)
    return CheckReport(proved, refuted, unknown, first)


def compose_2cells_vertical(eta, theta):
    """eta after theta: theta: (G,k) -> (G',k'), eta: (G',k') -> (G'',k'')."""
    if theta.target is not eta.source and theta.target != eta.source:
        raise TypeSpaceError("2-cell composition mismatch")
    g, gm, g2 = theta.source, theta.target, eta.target
    k, km, k2 = g.k, gm.k, g2.k
    ctx = k + k2 + km  # x, z, then bound y
    th = substitute(
        normalize(theta.formula),
        tuple(range(1, k + 1)) + tuple(range(k + k2 + 1, ctx + 1)),
        ctx,
    )
    et = substitute(
        normalize(eta.formula),
        tuple(range(k + k2 + 1, ctx + 1)) + tuple(range(k + 1, k + k2 + 1)),
        ctx,
    )
    out = conj([th, et])
    for _ in range(km):
        out = normalize(Exists(out))
    return Morphism2Cell(g, g2, out)


def compose_2cells_horizontal(eta, theta):
    """eta * theta for theta: (G,k) -> (G',k') over T -> T' and
    eta: (D,l) -> (D',l') over T' -> T''."""
    gk, gk2 = theta.source, theta.target
    dl, dl2 = eta.source, eta.target
    k, k2 = gk.k, gk2.k
    l, l2 = dl.k, dl2.k
    src = compose_interpretations(dl, gk)
    tgt = compose_interpretations(dl2, gk2)
    ctx = k * l + k2 * l2 + k2 * l  # x blocks, z blocks, bound y blocks
    d_theta = apply_interpretation(dl, theta.formula, k + k2)  # ctx (k+k2)*l
    xpos = tuple(range(1, k * l + 1))
    ypos = tuple(range(k * l + k2 * l2 + 1, ctx + 1))
    parts = [substitute(d_theta, xpos + ypos, ctx)]
    et = normalize(eta.formula)  # ctx l + l2
    for i in range(k2):
        yi = tuple(range(k * l + k2 * l2 + i * l + 1, k * l + k2 * l2 + (i + 1) * l + 1))
        zi = tuple(range(k * l + i * l2 + 1, k * l + (i + 1) * l2 + 1))
        parts.append(substitute(et, yi + zi, ctx))
    out = conj(parts)
    for _ in range(k2 * l):
        out = normalize(Exists(out))
    return Morphism2Cell(src, tgt, out)


def equal_2cells(a, b, budgets=calculus.Budgets()):
    """Equality of 2-cells = equivalence of formulas modulo the target theory."""
    if a.source.k != b.source.k or a.target.k != b.target.k:
        return calculus.EquivalenceVerdict("Inequivalent", None, None)
    t = a.source.target
    return calculus.equivalent(
        t, normalize(a.formula), normalize(b.formula), a.source.k + a.target.k, budgets
    )


# ---------------------------------------------------------------------------
# type space approximations


@dataclass
class TypeSpaceApprox:
    theory: Theory
    N: int
    B: int
    d: int
    cap: int
    models: list
    formulas: dict  # n -> list of formulas
    points: dict  # n -> list of profiles (frozensets of formula indices)
    realizations: dict  # n -> list of (model index, tuple)
    opens: dict  # n -> list of frozensets of point indices, per formula
    stable: bool = False
    stable_arities: tuple = ()  # per-arity stability diagnostic, n = 0..N

    def point_index(self, n):
        return {p: i for i, p in enumerate(self.points[n])}

    def poset(self, n):
        pts = self.points[n]
        leq = [[pts[i] <= pts[j] for j in range(len(pts))] for i in range(len(pts))]
        return lattice.FinPoset(len(pts), leq)

    def open_of(self, phi, n):
        """Point set of [phi]; stored formulas by profile lookup, others by
        evaluating at the realizations."""
        phi = normalize(phi)
        try:
            i = self.formulas[n].index(phi)
        except ValueError:
            out = []
            for j, (mi, a) in enumerate(self.realizations[n]):
                if eval_formula(self.models[mi], phi, a):
                    out.append(j)
            return frozenset(out)
        return self.opens[n][i]

    def s_map(self, f, n, m):
        """Restriction map S_f: points of arity m -> points of arity n, for
        f: n -> m, computed semantically at the realizations."""
        out = []
        index = self.point_index(n)
        for mi, a in self.realizations[m]:
            b = tuple(a[v - 1] for v in f)
            prof = _profile(self.models[mi], b, self.formulas[n])
            out.append(index[prof])
        return tuple(out)

    def s_monotone(self, f, n, m):
        return lattice.MonotoneMap(self.poset(m), self.poset(n), self.s_map(f, n, m))


def _profile(m, a, formulas):
    return frozenset(i for i, phi in enumerate(formulas) if eval_formula(m, phi, a))


def _extension(m, phi, n, memo):
    """Set of n-tuples of m satisfying phi, computed bottom-up with sharing
    of subformula extensions (much faster than per-tuple evaluation when
    many formulas are profiled over the same model)."""
    key = (phi, n)
    out = memo.get(key)
    if out is not None:
        return out
    if isinstance(phi, Atom):
        table = m.tables[phi.sym]
        out = frozenset(
            a for a in product(range(m.size), repeat=n)
            if tuple(a[i - 1] for i in phi.args) in table
        )
    elif isinstance(phi, Eq):
        out = frozenset(
            a for a in product(range(m.size), repeat=n)
            if a[phi.i - 1] == a[phi.j - 1]
        )
    elif isinstance(phi, And):
        parts = [_extension(m, p, n, memo) for p in phi.parts]
        out = frozenset(product(range(m.size), repeat=n))
        for p in parts:
            out &= p
    elif isinstance(phi, Or):
        out = frozenset()
        for p in phi.parts:
            out |= _extension(m, p, n, memo)
    elif isinstance(phi, Exists):
        out = frozenset(a[:-1] for a in _extension(m, phi.body, n + 1, memo))
    elif phi == BOT:
        out = frozenset()
    else:  # TOP
        out = frozenset(product(range(m.size), repeat=n))
    memo[key] = out
    return out


def _collect_points(models, formulas, n):
    seen = {}
    for mi, m in enumerate(models):
        memo = {}
        exts = [_extension(m, phi, n, memo) for phi in formulas]
        for a in product(range(m.size), repeat=n):
            prof = frozenset(i for i, e in enumerate(exts) if a in e)
            if prof not in seen:
                seen[prof] = (mi, a)
    pts = sorted(seen, key=lambda p: sorted(p))
    return pts, [seen[p] for p in pts]


def compute_typespace(t, N=2, B=3, d=2, cap=600, check_stability=True,
                      models=None):
    """Approximate type spaces from all tuples in all models up to size B.

    An explicit model pool can replace the exhaustive enumeration (useful
    when the signature is too large to enumerate); the model-bound half of
    the stability diagnostic does not apply then, so it is skipped."""
    if models is None:
        models = enumerate_models(t, B)
    else:
        models = list(models)
        check_stability = False
    formulas = {}
    points = {}
    realizations = {}
    opens = {}
    for n in range(N + 1):
        formulas[n] = enum_formulas(t.signature, n, d, cap)
        pts, reals = _collect_points(models, formulas[n], n)
        points[n] = pts
        realizations[n] = reals
        opens[n] = [
            frozenset(j for j, p in enumerate(pts) if i in p)
            for i in range(len(formulas[n]))
        ]
    approx = TypeSpaceApprox(t, N, B, d, cap, models, formulas, points,
                             realizations, opens)
    if check_stability:
        approx.stable_arities = _stability(t, approx)
        approx.stable = all(approx.stable_arities)
    return approx


def _stability(t, approx):
    """Per-arity diagnostic: does the point set survive growing the model
    bound or the formula depth by one step each?"""
    bigger = enumerate_models(t, approx.B + 1)
    out = []
    for n in range(approx.N + 1):
        pts, _ = _collect_points(bigger, approx.formulas[n], n)
        if set(pts) != set(approx.points[n]):
            out.append(False)
            continue
        deeper = enum_formulas(t.signature, n, approx.d + 1, approx.cap)
        pts2, _ = _collect_points(approx.models, deeper, n)
        out.append(len(pts2) == len(approx.points[n]))
    return tuple(out)


# ---------------------------------------------------------------------------
# S on interpretations: partial map data


@dataclass
class PartialMapData:
    interp: Interpretation
    source_approx: TypeSpaceApprox  # approximation of S(source theory)
    target_approx: TypeSpaceApprox  # approximation of S(target theory)
    N: int
    domains: dict  # n -> frozenset of target-approx point indices at arity nk
    maps: dict  # n -> dict target point index -> source point index at arity n

    @property
    def k(self):
        return self.interp.k


def s_of_interpretation(g, source_approx, target_approx, N=2):
    """The partial maps S(Gamma,k)_n: S_nk(T') -> S_n(T) on approximations,
    with domains [Gamma(x=x)], computed via the quotient model semantics."""
    k = g.k
    if target_approx.N < N * k:
        raise TypeSpaceError("target approximation arity bound too small")
    domains = {}
    maps = {}
    for n in range(N + 1):
        dom_phi = g.domain_at_blocks(range(1, n * k + 1, k), n * k)
        dom = target_approx.open_of(dom_phi, n * k)
        domains[n] = dom
        index = source_approx.point_index(n)
        quotients = {}
        out = {}
        for pi in sorted(dom):
            mi, a = target_approx.realizations[n * k][pi]
            m = target_approx.models[mi]
            if mi not in quotients:
                quotients[mi] = gamma_star(g, m)
            q = quotients[mi]
            blocks = tuple(
                q.class_of[tuple(a[i * k : (i + 1) * k])] for i in range(n)
            )
            prof = _profile(q, blocks, source_approx.formulas[n])
            if prof not in index:
                raise TypeSpaceError(
                    f"quotient type at arity {n} missing from the source "
                    f"approximation; increase its model bound"
                )
            out[pi] = index[prof]
        maps[n] = out
    return PartialMapData(g, source_approx, target_approx, N, domains, maps)


def check_cartesian_family(pnt):
    """domains[n] == intersection of preimages of domains[1] along the k-block
    point inclusions, for every n <= N; n = 0 must be everything."""
    ta = pnt.target_approx
    k = pnt.k
    if pnt.domains[0] != frozenset(range(len(ta.points[0]))):
        return False
    for n in range(1, pnt.N + 1):
        expected = frozenset(range(len(ta.points[n * k])))
        for i in range(1, n + 1):
            f = times_k((i,), k)  # j_{i,n}^{x k}: k -> nk
            smap = ta.s_map(f, k, n * k)
            expected &= frozenset(
                p for p in range(len(ta.points[n * k])) if smap[p] in pnt.domains[1]
            )
        if pnt.domains[n] != expected:
            return False
    return True


def check_naturality(pnt):
    """beta_n(F_{f x k}(p)) == F'_f(beta_m(p)) for p in dom(beta_m)."""
    ta, sa = pnt.target_approx, pnt.source_approx
    k = pnt.k
    for n in range(pnt.N + 1):
        for m in range(pnt.N + 1):
            for f in all_maps(n, m):
                down = ta.s_map(times_k(f, k), n * k, m * k)
                over = sa.s_map(f, n, m)
                for p in sorted(pnt.domains[m]):
                    q = down[p]
                    if q not in pnt.domains[n]:
                        return False, (n, m, f, p)
                    if pnt.maps[n][q] != over[pnt.maps[m][p]]:
                        return False, (n, m, f, p)
    return True, None


def _image(smap, pts):
    return frozenset(smap[p] for p in pts)


def _beta_preimage(pnt, n, v):
    return frozenset(p for p in pnt.domains[n] if pnt.maps[n][p] in v)


def check_weak_bc(pnt, f, n, m, strict=False):
    """Weak Beck-Chevalley at f: n -> m over all stored basic opens U of the
    source approximation at arity m.  Returns (ok, witness)."""
    ta, sa = pnt.target_approx, pnt.source_approx
    k = pnt.k
    down = ta.s_map(times_k(f, k), n * k, m * k)
    over = sa.s_map(f, n, m)
    img_all = _image(down, range(len(ta.points[m * k])))
    for ui, u in enumerate(sa.opens[m]):
        lhs = _beta_preimage(pnt, n, _image(over, u))
        if not strict:
            lhs &= img_all
        rhs = _image(down, _beta_preimage(pnt, m, u))
        if lhs != rhs:
            return False, (sa.formulas[m][ui], lhs, rhs)
    return True, None


def check_strict_bc(pnt, f, n, m):
    return check_weak_bc(pnt, f, n, m, strict=True)


# ---------------------------------------------------------------------------
# pushouts in FinSet and the functor-level Beck-Chevalley check


def is_pushout(h, f, dn, bn, cn, an, u, v):
    """Is (u: b -> a, v: c -> a) the pushout of b <-h- d -f-> c?

    Maps are index tuples; dn, bn, cn, an are the set sizes."""
    if len(h) != dn or len(f) != dn or len(u) != bn or len(v) != cn:
        return False
    for x in range(1, dn + 1):
        if u[h[x - 1] - 1] != v[f[x - 1] - 1]:
            return False
    # classes of b (+) c under h(x) ~ f(x)
    parent = list(range(bn + cn))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for x in range(1, dn + 1):
        a, b = find(h[x - 1] - 1), find(bn + f[x - 1] - 1)
        parent[a] = b
    classes = sorted({find(i) for i in range(bn + cn)})
    if len(classes) != an:
        return False
    label = {}
    for i in range(bn):
        r = find(i)
        if r in label and label[r] != u[i]:
            return False
        label[r] = u[i]
    for i in range(cn):
        r = find(bn + i)
        if r in label and label[r] != v[i]:
            return False
        label[r] = v[i]
    return len(set(label.values())) == an


def check_functor_bc(approx, h, f, dn, bn, cn, an, u, v):
    """Beck-Chevalley for the induced square of approximation restriction
    maps of a FinSet pushout, plus the universal-map surjectivity verdict."""
    if not is_pushout(h, f, dn, bn, cn, an, u, v):
        raise TypeSpaceError("the given square is not a pushout")
    s_u = approx.s_monotone(u, bn, an)
    s_v = approx.s_monotone(v, cn, an)
    s_h = approx.s_monotone(h, dn, bn)
    s_f = approx.s_monotone(f, dn, cn)
    bc, bc_witness = lattice.check_bc_square(s_u, s_v, s_h, s_f)
    surj, surj_witness = lattice.universal_map_surjective(s_u, s_v, s_h, s_f)
    return {
        "bc": bc,
        "bc_witness": bc_witness,
        "universal_map_surjective": surj,
        "missed_pair": surj_witness,
    }
