"""Finite distributive lattices, finite posets as spectral spaces, and the
exact Stone duality between them.

A finite poset stands for a finite spectral space: points, specialization
order x <= y meaning x is in the closure of {y}, opens = up-sets.  A finite
distributive lattice is given by its order relation; meets and joins are
derived and validated on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product


class LatticeError(Exception):
    pass


# ---------------------------------------------------------------------------
# posets


class FinPoset:
    """Finite poset on points 0..n-1 with a reflexive-transitive-antisymmetric
    leq matrix.  Opens are up-sets."""

    def __init__(self, n, leq):
        self.n = n
        self.leq = tuple(tuple(bool(v) for v in row) for row in leq)
        if len(self.leq) != n or any(len(r) != n for r in self.leq):
            raise LatticeError("leq matrix shape mismatch")
        for i in range(n):
            if not self.leq[i][i]:
                raise LatticeError(f"not reflexive at {i}")
            for j in range(n):
                if i != j and self.leq[i][j] and self.leq[j][i]:
                    raise LatticeError(f"not antisymmetric at ({i},{j})")
                for k in range(n):
                    if self.leq[i][j] and self.leq[j][k] and not self.leq[i][k]:
                        raise LatticeError(f"not transitive at ({i},{j},{k})")

    def __eq__(self, other):
        return isinstance(other, FinPoset) and self.leq == other.leq

    def __hash__(self):
        return hash(self.leq)

    def __repr__(self):
        return f"FinPoset(n={self.n})"

    def up(self, i):
        return frozenset(j for j in range(self.n) if self.leq[i][j])

    def is_up_set(self, s):
        return all(self.leq[i][j] <= (j in s) for i in s for j in range(self.n))

    def up_sets(self):
        """All up-sets in a fixed deterministic order (by size then bitmask)."""
        out = []
        for bits in range(1 << self.n):
            s = frozenset(i for i in range(self.n) if bits >> i & 1)
            if self.is_up_set(s):
                out.append(s)
        out.sort(key=lambda s: (len(s), sorted(s)))
        return out

    def canonical(self):
        """Lexicographically minimal leq encoding over all relabelings."""
        best = None
        for perm in permutations(range(self.n)):
            enc = tuple(
                self.leq[perm[i]][perm[j]] for i in range(self.n) for j in range(self.n)
            )
            if best is None or enc < best:
                best = enc
        return (self.n, best)


def poset_from_pairs(n, pairs):
    """Poset from a list of generating i <= j pairs (transitively closed)."""
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i, j in pairs:
        leq[i][j] = True
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if leq[i][k] and leq[k][j]:
                    leq[i][j] = True
    return FinPoset(n, leq)


def discrete_poset(n):
    return FinPoset(n, [[i == j for j in range(n)] for i in range(n)])


class MonotoneMap:
    def __init__(self, source, target, values):
        self.source = source
        self.target = target
        self.values = tuple(values)
        if len(self.values) != source.n:
            raise LatticeError("map length mismatch")
        for i in range(source.n):
            for j in range(source.n):
                if source.leq[i][j] and not target.leq[self.values[i]][self.values[j]]:
                    raise LatticeError(f"not monotone at ({i},{j})")

    def __eq__(self, other):
        return (
            isinstance(other, MonotoneMap)
            and self.source == other.source
            and self.target == other.target
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.source, self.target, self.values))

    def __call__(self, i):
        return self.values[i]

    def image(self, s):
        return frozenset(self.values[i] for i in s)

    def preimage(self, s):
        return frozenset(i for i in range(self.source.n) if self.values[i] in s)

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise LatticeError("composition mismatch")
        return MonotoneMap(other.source, self.target, [self.values[v] for v in other.values])


def monotone_maps(x, y):
    """All monotone maps x -> y, deterministic order."""
    out = []
    for values in product(range(y.n), repeat=x.n):
        ok = all(
            not x.leq[i][j] or y.leq[values[i]][values[j]]
            for i in range(x.n)
            for j in range(x.n)
        )
        if ok:
            out.append(MonotoneMap(x, y, values))
    return out


def is_open_map(g):
    """True iff the image of every up-set is an up-set.

    Every up-set is a union of principal ones and images commute with
    unions, so it is enough that the image of each up(p) is an up-set:
    whenever f(p) <= y there must be some p' >= p with f(p') = y."""
    for p in range(g.source.n):
        for y in range(g.target.n):
            if g.values[p] != y and g.target.leq[g.values[p]][y]:
                if not any(
                    g.source.leq[p][q] and g.values[q] == y
                    for q in range(g.source.n)
                ):
                    return False
    return True


def all_posets(max_n):
    """All posets with at most max_n points, one per isomorphism class."""
    out = [FinPoset(0, [])]
    current = {FinPoset(0, []).canonical(): FinPoset(0, [])}
    for n in range(1, max_n + 1):
        nxt = {}
        for p in current.values():
            # add a new point n-1 with an arbitrary down-set of relations;
            # every poset on n points arises from deleting a maximal point
            for bits in range(1 << p.n):
                below = [i for i in range(p.n) if bits >> i & 1]
                leq = [list(row) + [False] for row in p.leq]
                leq.append([False] * p.n + [True])
                for i in below:
                    for j in range(p.n):
                        if p.leq[j][i]:
                            leq[j][p.n] = True
                try:
                    q = FinPoset(p.n + 1, leq)
                except LatticeError:
                    continue
                key = q.canonical()
                if key not in nxt:
                    nxt[key] = q
        out.extend(sorted(nxt.values(), key=lambda p: p.canonical()))
        current = nxt
    return out


# ---------------------------------------------------------------------------
# lattices


class FinDistLattice:
    """Finite distributive lattice on elements 0..n-1 given by its order."""

    def __init__(self, n, leq):
        if n == 0:
            raise LatticeError("lattice must be non-empty")
        self.poset = FinPoset(n, leq)
        self.n = n
        self.leq = self.poset.leq
        self._meet = [[None] * n for _ in range(n)]
        self._join = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                self._meet[a][b] = self._bound(a, b, lower=True)
                self._join[a][b] = self._bound(a, b, lower=False)
        self.bot = 0
        self.top = 0
        for a in range(n):
            self.bot = self.meet(self.bot, a)
            self.top = self.join(self.top, a)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    lhs = self.meet(a, self.join(b, c))
                    rhs = self.join(self.meet(a, b), self.meet(a, c))
                    if lhs != rhs:
                        raise LatticeError(f"not distributive at ({a},{b},{c})")

    def _bound(self, a, b, lower):
        if lower:
            cands = [c for c in range(self.n) if self.leq[c][a] and self.leq[c][b]]
            best = [c for c in cands if all(self.leq[d][c] for d in cands)]
        else:
            cands = [c for c in range(self.n) if self.leq[a][c] and self.leq[b][c]]
            best = [c for c in cands if all(self.leq[c][d] for d in cands)]
        if len(best) != 1:
            raise LatticeError(f"no {'meet' if lower else 'join'} for ({a},{b})")
        return best[0]

    @staticmethod
    def _fold(op, items, none):
        items = list(items)
        if not items:
            return none
        acc = items[0]
        for x in items[1:]:
            acc = op(acc, x)
        return acc

    def __eq__(self, other):
        return isinstance(other, FinDistLattice) and self.leq == other.leq

    def __hash__(self):
        return hash(self.leq)

    def __repr__(self):
        return f"FinDistLattice(n={self.n})"

    def meet(self, a, b):
        return self._meet[a][b]

    def join(self, a, b):
        return self._join[a][b]

    def le(self, a, b):
        return self.leq[a][b]

    def meet_all(self, items):
        return self._fold(self.meet, items, self.top)

    def join_all(self, items):
        return self._fold(self.join, items, self.bot)

    def covers(self):
        """All covering pairs (a, b) with a < b and nothing in between."""
        out = []
        for a in range(self.n):
            for b in range(self.n):
                if a == b or not self.leq[a][b]:
                    continue
                if any(
                    c not in (a, b) and self.leq[a][c] and self.leq[c][b]
                    for c in range(self.n)
                ):
                    continue
                out.append((a, b))
        return out

    def canonical(self):
        return self.poset.canonical()


def chain(n):
    return FinDistLattice(n, [[i <= j for j in range(n)] for i in range(n)])


def lattice_iso(l1, l2):
    """An order isomorphism l1 -> l2 as a tuple, or None."""
    if l1.n != l2.n:
        return None
    for perm in permutations(range(l1.n)):
        if all(
            l1.leq[a][b] == l2.leq[perm[a]][perm[b]]
            for a in range(l1.n)
            for b in range(l1.n)
        ):
            return perm
    return None


def poset_iso(p1, p2):
    if p1.n != p2.n:
        return None
    for perm in permutations(range(p1.n)):
        if all(
            p1.leq[a][b] == p2.leq[perm[a]][perm[b]]
            for a in range(p1.n)
            for b in range(p1.n)
        ):
            return perm
    return None


class LatticeHom:
    def __init__(self, source, target, values):
        self.source = source
        self.target = target
        self.values = tuple(values)
        if len(self.values) != source.n:
            raise LatticeError("hom length mismatch")
        if self.values[source.bot] != target.bot:
            raise LatticeError("does not preserve bottom")
        if self.values[source.top] != target.top:
            raise LatticeError("does not preserve top")
        for a in range(source.n):
            for b in range(source.n):
                if self.values[source.meet(a, b)] != target.meet(
                    self.values[a], self.values[b]
                ):
                    raise LatticeError(f"does not preserve meet at ({a},{b})")
                if self.values[source.join(a, b)] != target.join(
                    self.values[a], self.values[b]
                ):
                    raise LatticeError(f"does not preserve join at ({a},{b})")

    def __eq__(self, other):
        return (
            isinstance(other, LatticeHom)
            and self.source == other.source
            and self.target == other.target
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.source, self.target, self.values))

    def __call__(self, a):
        return self.values[a]

    def compose(self, other):
        if other.target != self.source:
            raise LatticeError("composition mismatch")
        return LatticeHom(other.source, self.target, [self.values[v] for v in other.values])


def identity_hom(l):
    return LatticeHom(l, l, range(l.n))


# ---------------------------------------------------------------------------
# duality


def join_irreducibles(l):
    """Elements other than bottom that are not a join of strictly smaller
    ones."""
    out = []
    for j in range(l.n):
        if j == l.bot:
            continue
        if all(
            l.join(a, b) != j or a == j or b == j
            for a in range(l.n)
            for b in range(l.n)
        ):
            out.append(j)
    return out


def prime_filters(l):
    """All prime filters of l, deterministic order (by size then contents).

    In a finite distributive lattice every prime filter is the principal
    filter of its minimum, which is join-irreducible, and conversely."""
    out = [
        frozenset(a for a in range(l.n) if l.leq[j][a]) for j in join_irreducibles(l)
    ]
    out.sort(key=lambda f: (len(f), sorted(f)))
    return out


def _prime_filters_brute(l):
    """Reference implementation by exhaustive subset search (test oracle)."""
    out = []
    for bits in range(1, 1 << l.n):
        f = frozenset(a for a in range(l.n) if bits >> a & 1)
        if l.bot in f:
            continue
        if not all(l.leq[a][b] <= (b in f) for a in f for b in range(l.n)):
            continue
        if not all(l.meet(a, b) in f for a in f for b in f):
            continue
        prime = True
        for a in range(l.n):
            for b in range(l.n):
                if l.join(a, b) in f and a not in f and b not in f:
                    prime = False
        if prime:
            out.append(f)
    out.sort(key=lambda f: (len(f), sorted(f)))
    return out


def spec(l):
    """Prime-filter spectrum as a poset: F <= G iff F is a subset of G."""
    filters = prime_filters(l)
    n = len(filters)
    leq = [[filters[i] <= filters[j] for j in range(n)] for i in range(n)]
    return FinPoset(n, leq), filters


def k_o(x):
    """Lattice of up-sets (= compact opens) of a poset, with the up-set list."""
    ups = x.up_sets()
    n = len(ups)
    leq = [[ups[i] <= ups[j] for j in range(n)] for i in range(n)]
    return FinDistLattice(n, leq), ups


def duality_roundtrip_lattice(l):
    """Check that a |-> {F : a in F} is an isomorphism l -> k_o(spec(l))."""
    x, filters = spec(l)
    l2, ups = k_o(x)
    if l2.n != l.n:
        return False
    index = {u: i for i, u in enumerate(ups)}
    mapped = []
    for a in range(l.n):
        u = frozenset(i for i, f in enumerate(filters) if a in f)
        if u not in index:
            return False
        mapped.append(index[u])
    if len(set(mapped)) != l.n:
        return False
    return all(
        l.leq[a][b] == l2.leq[mapped[a]][mapped[b]]
        for a in range(l.n)
        for b in range(l.n)
    )


def duality_roundtrip_poset(x):
    """Check that p |-> {U : p in U} is an isomorphism x -> spec(k_o(x))."""
    l, ups = k_o(x)
    y, filters = spec(l)
    if y.n != x.n:
        return False
    index = {f: i for i, f in enumerate(filters)}
    mapped = []
    for p in range(x.n):
        f = frozenset(i for i, u in enumerate(ups) if p in u)
        if f not in index:
            return False
        mapped.append(index[f])
    if len(set(mapped)) != x.n:
        return False
    return all(
        x.leq[p][q] == y.leq[mapped[p]][mapped[q]]
        for p in range(x.n)
        for q in range(x.n)
    )


def dual_hom(f):
    """Spectral map spec(target) -> spec(source), F' |-> f^{-1}(F')."""
    xt, filters_t = spec(f.target)
    xs, filters_s = spec(f.source)
    index = {fl: i for i, fl in enumerate(filters_s)}
    values = []
    for fl in filters_t:
        pre = frozenset(a for a in range(f.source.n) if f(a) in fl)
        values.append(index[pre])
    return MonotoneMap(xt, xs, values)


def dual_lattice_hom(g, source_ups=None, target_ups=None):
    """Lattice hom k_o(target) -> k_o(source) of a monotone map g, U |-> g^{-1}(U)."""
    lt, ups_t = k_o(g.target)
    ls, ups_s = k_o(g.source)
    index = {u: i for i, u in enumerate(ups_s)}
    return LatticeHom(lt, ls, [index[g.preimage(u)] for u in ups_t]), lt, ls, ups_t, ups_s


# ---------------------------------------------------------------------------
# adjoints, Frobenius, Beck-Chevalley


def left_adjoint(f):
    """Left adjoint h of a lattice hom f: h(b) = meet {a : b <= f(a)}.

    Verifies h(b) <= a iff b <= f(a) for all pairs; raises on failure (can
    only happen for inputs that are not actual homs)."""
    src, tgt = f.source, f.target
    values = []
    for b in range(tgt.n):
        cands = [a for a in range(src.n) if tgt.leq[b][f(a)]]
        values.append(src.meet_all(cands))
    for b in range(tgt.n):
        for a in range(src.n):
            if src.leq[values[b]][a] != tgt.leq[b][f(a)]:
                raise LatticeError(f"adjunction fails at (b={b}, a={a})")
    return values


def check_frobenius(h, f):
    """h a left adjoint of the hom f (as a value list).  True iff
    h(a /\\ f(b)) = h(a) /\\ b for all a, b; else first (a, b) witness.

    The <= direction always holds for adjoints; it is asserted here."""
    src, tgt = f.source, f.target
    for a in range(tgt.n):
        for b in range(src.n):
            lhs = h[tgt.meet(a, f(b))]
            rhs = src.meet(h[a], b)
            if not src.leq[lhs][rhs]:
                raise LatticeError(f"automatic inequality fails at ({a},{b})")
            if lhs != rhs:
                return False, (a, b)
    return True, None


def check_bc_square(f, g, h, k):
    """Beck-Chevalley for a commuting square of open monotone maps

        A --f--> B
        |        |
        g        h
        v        v
        C --k--> D

    True iff k^{-1}(h(U)) is contained in g(f^{-1}(U)) for every up-set U of
    B; the reverse inclusion holds automatically and is asserted.  Both
    sides commute with unions, so checking the principal up-sets up(p)
    decides the general case without enumerating all up-sets."""
    if h.compose(f) != k.compose(g):
        raise LatticeError("square does not commute")
    for m in (f, g, h, k):
        if not is_open_map(m):
            raise LatticeError("map in square is not open")
    for u in (f.target.up(p) for p in range(f.target.n)):
        lhs = k.preimage(h.image(u))
        rhs = g.image(f.preimage(u))
        if not rhs <= lhs:
            raise LatticeError(f"automatic inclusion fails at U={sorted(u)}")
        if not lhs <= rhs:
            return False, u
    return True, None


def universal_map_surjective(f, g, h, k):
    """For the same square: is A -> B x_D C, a |-> (f(a), g(a)), surjective?"""
    if h.compose(f) != k.compose(g):
        raise LatticeError("square does not commute")
    fiber = {
        (b, c)
        for b in range(f.target.n)
        for c in range(g.target.n)
        if h(b) == k(c)
    }
    hit = {(f(a), g(a)) for a in range(f.source.n)}
    missing = sorted(fiber - hit)
    return not missing, (missing[0] if missing else None)


# ---------------------------------------------------------------------------
# enumeration of all small distributive lattices

def all_dist_lattices(max_n):
    """All distributive lattices with at most max_n elements, one per iso
    class, via Birkhoff: down-set lattices of posets of join-irreducibles.

    Adding a point to a poset never shrinks its down-set count, so posets are
    grown one maximal point at a time and pruned once the count exceeds
    max_n."""
    out = []
    frontier = [FinPoset(0, [])]
    seen = {FinPoset(0, []).canonical()}
    while frontier:
        nxt = []
        for p in frontier:
            out.append(_downset_lattice(p))
            for bits in range(1 << p.n):
                below = [i for i in range(p.n) if bits >> i & 1]
                leq = [list(row) + [False] for row in p.leq]
                leq.append([False] * p.n + [True])
                for i in below:
                    for j in range(p.n):
                        if p.leq[j][i]:
                            leq[j][p.n] = True
                try:
                    q = FinPoset(p.n + 1, leq)
                except LatticeError:
                    continue
                key = q.canonical()
                if key in seen:
                    continue
                seen.add(key)
                if _count_downsets(q) <= max_n:
                    nxt.append(q)
        frontier = nxt
    out.sort(key=lambda l: l.canonical())
    return out


def _count_downsets(p):
    n = 0
    for bits in range(1 << p.n):
        s = {i for i in range(p.n) if bits >> i & 1}
        if all(p.leq[j][i] <= (j in s) for i in s for j in range(p.n)):
            n += 1
    return n


def _downset_lattice(p):
    downs = []
    for bits in range(1 << p.n):
        s = frozenset(i for i in range(p.n) if bits >> i & 1)
        if all(p.leq[j][i] <= (j in s) for i in s for j in range(p.n)):
            downs.append(s)
    downs.sort(key=lambda s: (len(s), sorted(s)))
    n = len(downs)
    leq = [[downs[i] <= downs[j] for j in range(n)] for i in range(n)]
    return FinDistLattice(n, leq)


# ---------------------------------------------------------------------------
# JSON serialization


def poset_to_json(p):
    return {
        "elements": p.n,
        "leq": [[i, j] for i in range(p.n) for j in range(p.n) if p.leq[i][j]],
    }


def poset_from_json(obj):
    n = obj["elements"]
    leq = [[False] * n for _ in range(n)]
    for i, j in obj["leq"]:
        leq[i][j] = True
    return FinPoset(n, leq)


def lattice_to_json(l):
    return poset_to_json(l.poset)


def lattice_from_json(obj):
    p = poset_from_json(obj)
    return FinDistLattice(p.n, p.leq)
