"""Finite categorical models: structure checking and term interpretation.

A finite category is given by explicit tables (objects, arrows, identities,
composition). A logically distributive structure on top of it names the
interpretation of formulas as objects together with the structural witnesses
(terminal and initial objects, binary products, coproducts, exponentials,
quantifier cones and co-cones). Mediating arrows - pairings, copairings,
transposes, the distributivity and Frobenius inverses, and the quantifier
mediators - are not stored: they are found by exhaustive search over the
finite hom-sets and required to be unique, so a failure report names the
instance that broke.

check_ld verifies the seven defining conditions on a declared fragment of
formulas; interpret maps a term-in-context to an arrow from the interpreted
context product, by structural recursion with one clause per constructor.
Quantifier clauses work pointwise over a finite term universe that carries
one designated generic variable per sort.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Optional

from .syntax import (
    Absurd,
    AllE,
    AllI,
    Ap,
    Arrow,
    Atom,
    AxApp,
    EqualityInContext,
    ExE,
    ExI,
    Exists,
    Forall,
    Formula,
    Fst,
    Inl,
    Inr,
    Lam,
    LambdaTerm,
    LanguageError,
    LogicalTerm,
    LVar,
    One,
    ONE,
    Pair,
    Prod,
    Signature,
    Snd,
    Star,
    Sum,
    TermInContext,
    Var,
    When,
    Zero,
    alpha_key_formula,
    check_term_in_context,
    fresh,
    fv_formula,
    fv_lambda,
    infer_type,
    sort_of,
    subst_formula,
    subst_logical_in_lambda,
)
from .equational import Theory, check_theory

ObjectId = Hashable
ArrowId = Hashable


class SemanticsError(LanguageError):
    """A structure is missing a witness or breaks a table invariant."""


class BudgetError(SemanticsError):
    """The structure or universe exceeds the configured size budget."""


# ---------------------------------------------------------------------------
# finite categories

@dataclass(frozen=True)
class FinCategory:
    """A category as explicit finite tables.

    arrows lists (id, dom, cod) triples; identity maps each object to its
    identity arrow; compose maps (g, f) to g after f for composable pairs.
    """

    objects: tuple[ObjectId, ...]
    arrows: tuple[tuple[ArrowId, ObjectId, ObjectId], ...]
    identity: Mapping[ObjectId, ArrowId]
    compose: Mapping[tuple[ArrowId, ArrowId], ArrowId]

    def __post_init__(self):
        dom, cod, hom = {}, {}, {}
        for aid, d, c in self.arrows:
            dom[aid], cod[aid] = d, c
            hom.setdefault((d, c), []).append(aid)
        object.__setattr__(self, "_dom", dom)
        object.__setattr__(self, "_cod", cod)
        object.__setattr__(self, "_hom", {k: tuple(v) for k, v in hom.items()})

    def dom(self, f: ArrowId) -> ObjectId:
        return self._dom[f]

    def cod(self, f: ArrowId) -> ObjectId:
        return self._cod[f]

    def hom(self, a: ObjectId, b: ObjectId) -> tuple[ArrowId, ...]:
        return self._hom.get((a, b), ())

    def comp(self, g: ArrowId, f: ArrowId) -> ArrowId:
        try:
            return self.compose[(g, f)]
        except KeyError:
            raise SemanticsError(f"no composite for {g!r} after {f!r}") from None


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    failures: tuple[str, ...] = ()


def check_category(c: FinCategory) -> CheckReport:
    """Exhaustively verify identity and associativity laws on the tables."""
    bad: list[str] = []
    known = {aid for aid, _, _ in c.arrows}
    for x in c.objects:
        i = c.identity.get(x)
        if i is None or i not in known:
            bad.append(f"missing identity on {x!r}")
            continue
        if c.dom(i) != x or c.cod(i) != x:
            bad.append(f"identity on {x!r} has wrong endpoints")
    for aid, d, cd in c.arrows:
        if d not in c.objects or cd not in c.objects:
            bad.append(f"arrow {aid!r} has unknown endpoints")
    for f, g in itertools.product(known, known):
        if c.cod(f) != c.dom(g):
            if (g, f) in c.compose:
                bad.append(f"composite listed for non-composable {g!r} after {f!r}")
            continue
        gf = c.compose.get((g, f))
        if gf is None:
            bad.append(f"missing composite {g!r} after {f!r}")
        elif c.dom(gf) != c.dom(f) or c.cod(gf) != c.cod(g):
            bad.append(f"composite {g!r} after {f!r} has wrong endpoints")
    if not bad:
        for x in c.objects:
            i = c.identity[x]
            for f in known:
                if c.dom(f) == x and c.compose[(f, i)] != f:
                    bad.append(f"right unit fails for {f!r}")
                if c.cod(f) == x and c.compose[(i, f)] != f:
                    bad.append(f"left unit fails for {f!r}")
        for f in known:
            for g in known:
                if c.cod(f) != c.dom(g):
                    continue
                for h in known:
                    if c.cod(g) != c.dom(h):
                        continue
                    if c.comp(h, c.comp(g, f)) != c.comp(c.comp(h, g), f):
                        bad.append(f"associativity fails on {h!r}, {g!r}, {f!r}")
                        break
    return CheckReport(not bad, tuple(bad[:20]))


# ---------------------------------------------------------------------------
# term universes and fragments

@dataclass(frozen=True)
class TermUniverse:
    """A finite supply of logical terms per sort, plus one generic variable.

    The generic variable stands in for an arbitrary fresh term of its sort;
    quantifier cones are indexed by the listed terms and the generic one.
    """

    terms: Mapping[str, tuple[LogicalTerm, ...]]
    generic: Mapping[str, str]

    def all_terms(self, sort: str) -> tuple[LogicalTerm, ...]:
        listed = tuple(self.terms.get(sort, ()))
        g = self.generic.get(sort)
        if g is None:
            raise SemanticsError(f"universe has no generic variable for sort {sort}")
        return listed + (Var(g, sort),)


def check_universe(sig: Signature, u: TermUniverse) -> CheckReport:
    bad = []
    for sort, terms in u.terms.items():
        if sort not in sig.sorts:
            bad.append(f"unknown sort {sort}")
            continue
        for t in terms:
            try:
                got = sort_of(sig, t)
            except LanguageError:
                bad.append(f"ill-formed universe term {t!r}")
                continue
            if got != sort:
                bad.append(f"universe term {t!r} listed at wrong sort")
            g = u.generic.get(sort)
            if g is not None and isinstance(t, Var) and t.name == g:
                bad.append(f"generic variable {g} also listed as a term")
    for sort in sig.sorts:
        if sort not in u.generic:
            bad.append(f"no generic variable for sort {sort}")
    return CheckReport(not bad, tuple(bad))


@dataclass(frozen=True)
class Fragment:
    """A finite, closure-checked set of formulas."""

    formulas: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "_keys", {alpha_key_formula(f) for f in self.formulas}
        )

    def __contains__(self, f: Formula) -> bool:
        return alpha_key_formula(f) in self._keys

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)


def _subformulas(f: Formula) -> Iterable[Formula]:
    yield f
    match f:
        case Prod(a, b) | Sum(a, b) | Arrow(a, b):
            yield from _subformulas(a)
            yield from _subformulas(b)
        case Forall(_, _, body) | Exists(_, _, body):
            yield from _subformulas(body)


def close_fragment(seeds: Iterable[Formula], u: TermUniverse) -> Fragment:
    """Close under subformulas and universe instances of quantified members."""
    done: dict = {}
    todo = list(seeds)
    while todo:
        f = todo.pop()
        for g in _subformulas(f):
            k = alpha_key_formula(g)
            if k in done:
                continue
            done[k] = g
            match g:
                case Forall(x, s, body) | Exists(x, s, body):
                    for t in u.all_terms(s):
                        todo.append(subst_formula(body, {(x, s): t}))
    return Fragment(tuple(done.values()))


# ---------------------------------------------------------------------------
# logically distributive structures

class Valuation:
    """Formula-to-object assignment, optionally computed on demand."""

    def __init__(
        self,
        table: Optional[Mapping] = None,
        compute: Optional[Callable[[Formula], ObjectId]] = None,
    ):
        self._table = dict(table or {})
        self._compute = compute

    @staticmethod
    def of_formulas(pairs: Iterable[tuple[Formula, ObjectId]]) -> "Valuation":
        return Valuation({alpha_key_formula(f): o for f, o in pairs})

    def of(self, f: Formula) -> ObjectId:
        k = alpha_key_formula(f)
        if k in self._table:
            return self._table[k]
        if self._compute is None:
            raise SemanticsError(f"no object assigned to {f!r}")
        o = self._table[k] = self._compute(f)
        return o


@dataclass(frozen=True)
class LDStructure:
    """A finite category with named logical structure.

    products/coproducts/exponentials map object pairs to (object, arrows):
    (p, p1, p2), (s, i1, i2) and (e, ev) respectively, where ev is an arrow
    from the product of e and the argument object. forall_cones and
    exists_cocones map a quantified formula's key to a term-indexed family;
    when a family or an inverse is absent it is searched for in the hom-sets
    (unique-arrow resolution), which suffices whenever homs are small.
    """

    sig: Signature
    cat: FinCategory
    m: Valuation
    m_ax: Mapping[str, ArrowId]
    terminal: ObjectId
    bang: Mapping[ObjectId, ArrowId]
    initial: ObjectId
    from_initial: Mapping[ObjectId, ArrowId]
    products: Mapping[tuple[ObjectId, ObjectId], tuple[ObjectId, ArrowId, ArrowId]]
    coproducts: Mapping[tuple[ObjectId, ObjectId], tuple[ObjectId, ArrowId, ArrowId]]
    exponentials: Mapping[tuple[ObjectId, ObjectId], tuple[ObjectId, ArrowId]]
    fragment: Fragment
    delta_inv: Mapping[tuple[ObjectId, ObjectId, ObjectId], ArrowId] = field(
        default_factory=dict
    )
    forall_cones: Mapping = field(default_factory=dict)
    exists_cocones: Mapping = field(default_factory=dict)
    frobenius_inv: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_memo", {})


def _obj(s: LDStructure, f: Formula) -> ObjectId:
    match f:
        case One():
            return s.terminal
        case Zero():
            return s.initial
    return s.m.of(f)


def _product(s, a, b):
    try:
        return s.products[(a, b)]
    except KeyError:
        raise SemanticsError(f"no product witness for {a!r} x {b!r}") from None


def _coproduct(s, a, b):
    try:
        return s.coproducts[(a, b)]
    except KeyError:
        raise SemanticsError(f"no coproduct witness for {a!r} + {b!r}") from None


def _exponential(s, a, b):
    try:
        return s.exponentials[(a, b)]
    except KeyError:
        raise SemanticsError(f"no exponential witness for {b!r} ^ {a!r}") from None


def _unique(s, kind, candidates, ok) -> ArrowId:
    found = [h for h in candidates if ok(h)]
    if len(found) != 1:
        raise SemanticsError(f"{kind}: {len(found)} mediating arrows, need exactly 1")
    return found[0]


def _pairing(s: LDStructure, a, b, x, f, g) -> ArrowId:
    """The unique arrow x -> a*b projecting to f and g."""
    key = ("pair", a, b, x, f, g)
    if key not in s._memo:
        p, p1, p2 = _product(s, a, b)
        c = s.cat
        s._memo[key] = _unique(
            s, "pairing", c.hom(x, p),
            lambda h: c.comp(p1, h) == f and c.comp(p2, h) == g,
        )
    return s._memo[key]


def _copairing(s: LDStructure, a, b, x, f, g) -> ArrowId:
    """The unique arrow a+b -> x restricting to f and g on the injections."""
    key = ("copair", a, b, x, f, g)
    if key not in s._memo:
        sm, i1, i2 = _coproduct(s, a, b)
        c = s.cat
        s._memo[key] = _unique(
            s, "copairing", c.hom(sm, x),
            lambda h: c.comp(h, i1) == f and c.comp(h, i2) == g,
        )
    return s._memo[key]


def _transpose(s: LDStructure, a, b, x, f) -> ArrowId:
    """The unique arrow x -> b^a whose uncurrying is f : x*a -> b."""
    key = ("curry", a, b, x, f)
    if key not in s._memo:
        e, ev = _exponential(s, a, b)
        c = s.cat
        xa, xp1, xp2 = _product(s, x, a)

        def ok(h):
            hx1 = _pairing(s, e, a, xa, c.comp(h, xp1), xp2)
            return c.comp(ev, hx1) == f

        s._memo[key] = _unique(s, "transpose", c.hom(x, e), ok)
    return s._memo[key]


def _cone_arrow(s: LDStructure, f: Formula, t: LogicalTerm) -> ArrowId:
    """The projection p_t : M(forall x. A) -> M(A[t/x])."""
    assert isinstance(f, Forall)
    fam = s.forall_cones.get(alpha_key_formula(f))
    if fam is not None and t in fam:
        return fam[t]
    inst = subst_formula(f.body, {(f.var, f.sort): t})
    hom = s.cat.hom(_obj(s, f), _obj(s, inst))
    if len(hom) == 1:
        return hom[0]
    raise SemanticsError(f"no cone arrow for {f!r} at {t!r}")


def _cocone_arrow(s: LDStructure, f: Formula, t: LogicalTerm) -> ArrowId:
    """The injection j_t : M(A[t/x]) -> M(exists x. A)."""
    assert isinstance(f, Exists)
    fam = s.exists_cocones.get(alpha_key_formula(f))
    if fam is not None and t in fam:
        return fam[t]
    inst = subst_formula(f.body, {(f.var, f.sort): t})
    hom = s.cat.hom(_obj(s, inst), _obj(s, f))
    if len(hom) == 1:
        return hom[0]
    raise SemanticsError(f"no co-cone arrow for {f!r} at {t!r}")


def _delta(s: LDStructure, a, b, c) -> tuple[ArrowId, ObjectId, ObjectId]:
    """The canonical arrow (a*b)+(a*c) -> a*(b+c), with the endpoint objects."""
    cat = s.cat
    ab, ab1, ab2 = _product(s, a, b)
    ac, ac1, ac2 = _product(s, a, c)
    bc, bi1, bi2 = _coproduct(s, b, c)
    abc, _, _ = _product(s, a, bc)
    left = _pairing(s, a, bc, ab, ab1, cat.comp(bi1, ab2))
    right = _pairing(s, a, bc, ac, ac1, cat.comp(bi2, ac2))
    src, _, _ = _coproduct(s, ab, ac)
    return _copairing(s, ab, ac, abc, left, right), src, abc


def _delta_inverse(s: LDStructure, a, b, c) -> ArrowId:
    key = ("dinv", a, b, c)
    if key not in s._memo:
        d, src, tgt = _delta(s, a, b, c)
        cat = s.cat
        stored = s.delta_inv.get((a, b, c))
        cands = (stored,) if stored is not None else cat.hom(tgt, src)
        s._memo[key] = _unique(
            s, f"distributivity inverse at ({a!r},{b!r},{c!r})", cands,
            lambda g: cat.comp(d, g) == cat.identity[tgt]
            and cat.comp(g, d) == cat.identity[src],
        )
    return s._memo[key]


# ---------------------------------------------------------------------------
# the substitution diagram and the quantifier mediators

def sigma(
    a: Formula, x: str, sort: str, m: LDStructure, u: TermUniverse
) -> dict[LogicalTerm, ObjectId]:
    """The discrete diagram t |-> M(A[t/x]) over the universe."""
    return {
        t: _obj(m, subst_formula(a, {(x, sort): t})) for t in u.all_terms(sort)
    }


def _forall_mediator(s, u, f: Forall, vertex, family) -> ArrowId:
    """The unique arrow into M(forall x.A) commuting with every projection."""
    cat = s.cat
    key = ("allmed", alpha_key_formula(f), vertex, tuple(sorted(family.items(), key=repr)))
    if key not in s._memo:
        s._memo[key] = _unique(
            s, f"universal mediator into {f!r}", cat.hom(vertex, _obj(s, f)),
            lambda h: all(
                cat.comp(_cone_arrow(s, f, t), h) == g for t, g in family.items()
            ),
        )
    return s._memo[key]


def _exists_mediator(s, u, f: Exists, vertex, family) -> ArrowId:
    """The unique arrow out of M(exists x.A) commuting with every injection."""
    cat = s.cat
    key = ("exmed", alpha_key_formula(f), vertex, tuple(sorted(family.items(), key=repr)))
    if key not in s._memo:
        s._memo[key] = _unique(
            s, f"couniversal mediator out of {f!r}", cat.hom(_obj(s, f), vertex),
            lambda h: all(
                cat.comp(h, _cocone_arrow(s, f, t)) == g for t, g in family.items()
            ),
        )
    return s._memo[key]


def frobenius_formula(ex: Exists, g: Formula) -> Exists:
    """The existential over the paired body, renaming to avoid capture in g."""
    z, sort = ex.var, ex.sort
    body = ex.body
    if (z, sort) in fv_formula(g):
        z2 = fresh(z)
        body = subst_formula(body, {(z, sort): Var(z2, sort)})
        z = z2
    return Exists(z, sort, Prod(body, g))


def _frobenius_inverse(s, u, ex: Exists, g: Formula) -> ArrowId:
    """The inverse of the canonical M(ex x.(A*G)) -> M((ex x.A)*G)."""
    cat = s.cat
    exg = frobenius_formula(ex, g)
    key = ("frob", alpha_key_formula(ex), alpha_key_formula(g))
    if key in s._memo:
        return s._memo[key]
    eo, go = _obj(s, ex), _obj(s, g)
    po, _, _ = _product(s, eo, go)
    family = {}
    for t in u.all_terms(ex.sort):
        inst = subst_formula(ex.body, {(ex.var, ex.sort): t})
        io = _obj(s, inst)
        pio, q1, q2 = _product(s, io, go)
        family[t] = _pairing(
            s, eo, go, pio, cat.comp(_cocone_arrow(s, ex, t), q1), q2
        )
    bang_arrow = _exists_mediator(s, u, exg, po, family)
    stored = s.frobenius_inv.get((alpha_key_formula(ex), alpha_key_formula(g)))
    cands = (stored,) if stored is not None else cat.hom(po, _obj(s, exg))
    inv = _unique(
        s, f"Frobenius inverse at {ex!r} with {g!r}", cands,
        lambda h: cat.comp(bang_arrow, h) == cat.identity[po]
        and cat.comp(h, bang_arrow) == cat.identity[_obj(s, exg)],
    )
    s._memo[key] = inv
    return inv


# ---------------------------------------------------------------------------
# context packing and interpretation

Context = tuple[tuple[str, Formula], ...]


def pack_formula(ctx: Context) -> Formula:
    """The context as one right-nested product type; empty packs to 1."""
    if not ctx:
        return ONE
    if len(ctx) == 1:
        return ctx[0][1]
    return Prod(ctx[0][1], pack_formula(ctx[1:]))


def _ctx_obj(s: LDStructure, ctx: Context) -> ObjectId:
    return _obj(s, pack_formula(ctx))


def _proj(s: LDStructure, ctx: Context, name: str) -> ArrowId:
    """The projection from the packed context onto one variable."""
    cat = s.cat
    if len(ctx) == 1:
        if ctx[0][0] != name:
            raise SemanticsError(f"variable {name} not in context")
        return cat.identity[_obj(s, ctx[0][1])]
    head, rest = ctx[0], ctx[1:]
    _, p1, p2 = _product(s, _obj(s, head[1]), _ctx_obj(s, rest))
    if head[0] == name:
        return p1
    return cat.comp(_proj(s, rest, name), p2)


def _assemble(s: LDStructure, x: ObjectId, target: Context, arrows) -> ArrowId:
    """The arrow x -> M(packed target) built from per-variable arrows."""
    if not target:
        return s.bang[x]
    if len(target) == 1:
        return arrows[target[0][0]]
    head, rest = target[0], target[1:]
    rest_arrow = _assemble(s, x, rest, arrows)
    return _pairing(
        s, _obj(s, head[1]), _ctx_obj(s, rest), x, arrows[head[0]], rest_arrow
    )


def _subcontext(ctx: Context, names) -> Context:
    return tuple((n, f) for n, f in ctx if n in names)


def interpret(tic: TermInContext, m: LDStructure, u: TermUniverse) -> ArrowId:
    """The arrow M(packed context) -> M(type) denoted by the term."""
    if not check_term_in_context(m.sig, tic):
        raise SemanticsError("term-in-context does not typecheck")
    return _interp(m, u, tuple(tic.ctx), tic.term)


def _interp(s: LDStructure, u: TermUniverse, ctx: Context, t: LambdaTerm) -> ArrowId:
    cat = s.cat
    gamma = _ctx_obj(s, ctx)

    def go(term, in_ctx=ctx):
        return _interp(s, u, in_ctx, term)

    def ty(term, in_ctx=ctx):
        return infer_type(s.sig, in_ctx, term)

    match t:
        case LVar(x, _):
            if not ctx:
                raise SemanticsError(f"variable {x} not in context")
            return _proj(s, ctx, x)
        case Star():
            return s.bang[gamma]
        case AxApp(name, a):
            try:
                ax = s.m_ax[name]
            except KeyError:
                raise SemanticsError(f"no interpretation for axiom {name}") from None
            return cat.comp(ax, go(a))
        case Pair(a, b):
            return _pairing(
                s, _obj(s, ty(a)), _obj(s, ty(b)), gamma, go(a), go(b)
            )
        case Fst(p):
            pt = ty(p)
            _, p1, _ = _product(s, _obj(s, pt.left), _obj(s, pt.right))
            return cat.comp(p1, go(p))
        case Snd(p):
            pt = ty(p)
            _, _, p2 = _product(s, _obj(s, pt.left), _obj(s, pt.right))
            return cat.comp(p2, go(p))
        case Inl(other, a):
            _, i1, _ = _coproduct(s, _obj(s, ty(a)), _obj(s, other))
            return cat.comp(i1, go(a))
        case Inr(other, b):
            _, _, i2 = _coproduct(s, _obj(s, other), _obj(s, ty(b)))
            return cat.comp(i2, go(b))
        case Absurd(b):
            bo = _obj(s, b)
            zo = s.initial
            _, _, pz = _product(s, gamma, zo)
            f = cat.comp(s.from_initial[bo], pz)
            return _transpose(s, zo, bo, gamma, f)
        case Lam(x, a, body):
            inner = ctx + ((x, a),)
            ao = _obj(s, a)
            bo = _obj(s, ty(body, inner))
            ga, gp1, gp2 = _product(s, gamma, ao)
            arrows = {n: cat.comp(_proj(s, ctx, n), gp1) for n, _ in ctx}
            arrows[x] = gp2
            reassoc = _assemble(s, ga, inner, arrows)
            f = cat.comp(go(body, inner), reassoc)
            return _transpose(s, ao, bo, gamma, f)
        case Ap(fn, a):
            ft = ty(fn)
            ao, bo = _obj(s, ft.dom), _obj(s, ft.cod)
            e, ev = _exponential(s, ao, bo)
            fa = _pairing(s, e, ao, gamma, go(fn), go(a))
            return cat.comp(ev, fa)
        case When(sc, l, r):
            st = ty(sc)
            ao, bo = _obj(s, st.left), _obj(s, st.right)
            co = _obj(s, ty(l).cod)
            paired = _pairing(
                s, gamma, _obj(s, st), gamma, cat.identity[gamma], go(sc)
            )
            dinv = _delta_inverse(s, gamma, ao, bo)
            ga, ga1, ga2 = _product(s, gamma, ao)
            gb, gb1, gb2 = _product(s, gamma, bo)
            ea, eva = _exponential(s, ao, co)
            eb, evb = _exponential(s, bo, co)
            on_l = cat.comp(eva, _pairing(s, ea, ao, ga, cat.comp(go(l), ga1), ga2))
            on_r = cat.comp(evb, _pairing(s, eb, bo, gb, cat.comp(go(r), gb1), gb2))
            cop = _copairing(s, ga, gb, co, on_l, on_r)
            return cat.comp(cop, cat.comp(dinv, paired))
        case AllI(x, sort, body):
            free = {n for n, _ in fv_lambda(t)}
            sub = _subcontext(ctx, free)
            alpha = _assemble(
                s, gamma, sub, {n: _proj(s, ctx, n) for n, _ in sub}
            )
            f = Forall(x, sort, ty(body, sub))
            family = {}
            for tm in u.all_terms(sort):
                inst = subst_logical_in_lambda(body, {(x, sort): tm})
                family[tm] = go(inst, sub)
            h = _forall_mediator(s, u, f, _ctx_obj(s, sub), family)
            return cat.comp(h, alpha)
        case AllE(a, r):
            at = ty(a)
            return cat.comp(_cone_arrow(s, at, r), go(a))
        case ExI(x, sort, w, body_ty, a):
            f = Exists(x, sort, body_ty)
            return cat.comp(_cocone_arrow(s, f, w), go(a))
        case ExE(sc, x, sort, body):
            sct = ty(sc)
            free = {n for n, _ in fv_lambda(body)}
            sub = _subcontext(ctx, free)
            g = pack_formula(sub)
            alpha = _assemble(
                s, gamma, sub, {n: _proj(s, ctx, n) for n, _ in sub}
            )
            eo, go_ = _obj(s, sct), _obj(s, g)
            paired = _pairing(s, eo, go_, gamma, go(sc), alpha)
            frob = _frobenius_inverse(s, u, sct, g)
            bo = _obj(s, ty(body).cod)
            exg = frobenius_formula(sct, g)
            family = {}
            for tm in u.all_terms(sort):
                inst_a = subst_formula(sct.body, {(sct.var, sort): tm})
                io = _obj(s, inst_a)
                pio, q1, q2 = _product(s, io, go_)
                v_t = subst_logical_in_lambda(body, {(x, sort): tm})
                vt_arrow = go(v_t, sub)
                ao = _obj(s, ty(v_t, sub).dom)
                e, ev = _exponential(s, ao, bo)
                family[tm] = cat.comp(
                    ev, _pairing(s, e, ao, pio, cat.comp(vt_arrow, q2), q1)
                )
            gamma_arrow = _exists_mediator(s, u, exg, bo, family)
            return cat.comp(gamma_arrow, cat.comp(frob, paired))
    raise SemanticsError(f"no interpretation clause for {t!r}")


def required_fragment(
    sig: Signature, tics: Iterable[TermInContext], u: TermUniverse
) -> Fragment:
    """Every formula whose object interpretation of the given terms will need.

    Mirrors the interpreter's recursion: context packs, subterm types, the
    products and coproducts it pairs through, quantifier instances, and the
    Frobenius auxiliaries, closed under subformulas and universe instances.
    """
    acc: dict = {}

    def add(f: Formula):
        acc.setdefault(alpha_key_formula(f), f)

    def walk(ctx: Context, t: LambdaTerm):
        gamma_f = pack_formula(ctx)
        add(gamma_f)
        ty = infer_type(sig, ctx, t)
        add(ty)
        match t:
            case LVar(_, _) | Star():
                pass
            case AxApp(_, a):
                walk(ctx, a)
            case Pair(a, b):
                walk(ctx, a)
                walk(ctx, b)
            case Fst(p) | Snd(p):
                walk(ctx, p)
            case Inl(_, a) | Inr(_, a):
                walk(ctx, a)
            case Absurd(_):
                add(Prod(gamma_f, Zero()))
            case Lam(x, a, body):
                add(Prod(gamma_f, a))
                walk(ctx + ((x, a),), body)
            case Ap(fn, a):
                walk(ctx, fn)
                walk(ctx, a)
                add(Prod(infer_type(sig, ctx, fn), infer_type(sig, ctx, a)))
            case When(sc, l, r):
                walk(ctx, sc)
                walk(ctx, l)
                walk(ctx, r)
                st = infer_type(sig, ctx, sc)
                add(Prod(gamma_f, st))
                ga, gb = Prod(gamma_f, st.left), Prod(gamma_f, st.right)
                add(ga)
                add(gb)
                add(Sum(ga, gb))
            case AllI(x, sort, body):
                free = {n for n, _ in fv_lambda(t)}
                sub = _subcontext(ctx, free)
                for tm in u.all_terms(sort):
                    walk(sub, subst_logical_in_lambda(body, {(x, sort): tm}))
            case AllE(a, _):
                walk(ctx, a)
            case ExI(_, _, _, _, a):
                walk(ctx, a)
            case ExE(sc, x, sort, body):
                walk(ctx, sc)
                sct = infer_type(sig, ctx, sc)
                free = {n for n, _ in fv_lambda(body)}
                sub = _subcontext(ctx, free)
                g = pack_formula(sub)
                add(Prod(sct, g))
                add(frobenius_formula(sct, g))
                for tm in u.all_terms(sort):
                    walk(sub, subst_logical_in_lambda(body, {(x, sort): tm}))

    for tic in tics:
        walk(tuple(tic.ctx), tic.term)
        add(tic.type)
    return close_fragment(acc.values(), u)


# ---------------------------------------------------------------------------
# equality evaluation, models, consequence

def eval_eq(eq: EqualityInContext, m: LDStructure, u: TermUniverse) -> int:
    """1 iff both sides denote the same arrow in the table."""
    lhs = interpret(TermInContext(eq.ctx, eq.lhs, eq.type), m, u)
    rhs = interpret(TermInContext(eq.ctx, eq.rhs, eq.type), m, u)
    return 1 if lhs == rhs else 0


def is_model(m: LDStructure, u: TermUniverse, th: Theory) -> bool:
    """Every axiom symbol interpreted and every theory equality evaluating to 1."""
    if not check_theory(th):
        raise SemanticsError("theory does not typecheck")
    for name in th.sig.axioms:
        if name not in m.m_ax:
            return False
    return all(eval_eq(ax, m, u) == 1 for ax in th.axioms)


def logical_consequence(
    m: LDStructure, a: Formula, bs: Iterable[Formula]
) -> bool:
    """Nonempty hom from the interpreted hypotheses product to M(A)."""
    ctx = tuple((fresh("h"), b) for b in bs)
    return bool(m.cat.hom(_ctx_obj(m, ctx), _obj(m, a)))


# ---------------------------------------------------------------------------
# the seven-condition checker

@dataclass(frozen=True)
class LDReport:
    ok: bool
    conditions: Mapping[int, CheckReport]

    def failing(self) -> tuple[int, ...]:
        return tuple(k for k, r in sorted(self.conditions.items()) if not r.ok)


def check_ld(
    s: LDStructure,
    u: TermUniverse,
    max_objects: int = 12,
    max_arrows: int = 200,
    max_universe: int = 6,
    family_budget: int = 512,
) -> LDReport:
    """Verify the seven structure conditions on the declared fragment.

    Refuses structures beyond the size budget rather than sampling. Each
    condition gets an independent report with counterexamples.
    """
    cat = s.cat
    if len(cat.objects) > max_objects or len(cat.arrows) > max_arrows:
        raise BudgetError("category exceeds the size budget")
    if any(len(ts) + 1 > max_universe for ts in u.terms.values()):
        raise BudgetError("universe exceeds the size budget")
    base = check_category(cat)
    if not base.ok:
        raise SemanticsError(f"not a category: {base.failures[0]}")

    conditions: dict[int, CheckReport] = {}

    def run(idx: int, fn: Callable[[], list[str]]) -> None:
        try:
            bad = fn()
        except BudgetError:
            raise
        except SemanticsError as e:
            bad = [str(e)]
        conditions[idx] = CheckReport(not bad, tuple(bad[:10]))

    def cond1() -> list[str]:
        bad = []
        for x in cat.objects:
            b = s.bang.get(x)
            if b is None or cat.dom(b) != x or cat.cod(b) != s.terminal:
                bad.append(f"bad terminal arrow from {x!r}")
            elif tuple(cat.hom(x, s.terminal)) != (b,):
                bad.append(f"arrow into the terminal not unique from {x!r}")
        for (a, b), (p, p1, p2) in s.products.items():
            if cat.dom(p1) != p or cat.cod(p1) != a or cat.dom(p2) != p or cat.cod(p2) != b:
                bad.append(f"projections of {a!r} x {b!r} ill-typed")
                continue
            for x in cat.objects:
                for f in cat.hom(x, a):
                    for g in cat.hom(x, b):
                        n = sum(
                            1 for h in cat.hom(x, p)
                            if cat.comp(p1, h) == f and cat.comp(p2, h) == g
                        )
                        if n != 1:
                            bad.append(
                                f"product {a!r} x {b!r}: {n} pairings of"
                                f" ({f!r}, {g!r}) from {x!r}"
                            )
        return bad

    def cond2() -> list[str]:
        bad = []
        for x in cat.objects:
            b = s.from_initial.get(x)
            if b is None or cat.dom(b) != s.initial or cat.cod(b) != x:
                bad.append(f"bad initial arrow into {x!r}")
            elif tuple(cat.hom(s.initial, x)) != (b,):
                bad.append(f"arrow from the initial not unique into {x!r}")
        for (a, b), (c, i1, i2) in s.coproducts.items():
            if cat.dom(i1) != a or cat.cod(i1) != c or cat.dom(i2) != b or cat.cod(i2) != c:
                bad.append(f"injections of {a!r} + {b!r} ill-typed")
                continue
            for x in cat.objects:
                for f in cat.hom(a, x):
                    for g in cat.hom(b, x):
                        n = sum(
                            1 for h in cat.hom(c, x)
                            if cat.comp(h, i1) == f and cat.comp(h, i2) == g
                        )
                        if n != 1:
                            bad.append(
                                f"coproduct {a!r} + {b!r}: {n} copairings of"
                                f" ({f!r}, {g!r}) into {x!r}"
                            )
        return bad

    def cond3() -> list[str]:
        bad = []
        for (a, b), (e, ev) in s.exponentials.items():
            if (e, a) not in s.products:
                bad.append(f"exponential {b!r}^{a!r} lacks its domain product")
                continue
            pe = s.products[(e, a)][0]
            if cat.dom(ev) != pe or cat.cod(ev) != b:
                bad.append(f"evaluation of {b!r}^{a!r} ill-typed")
                continue
            for x in cat.objects:
                if (x, a) not in s.products:
                    continue
                xa, xp1, xp2 = s.products[(x, a)]
                for f in cat.hom(xa, b):
                    n = 0
                    for h in cat.hom(x, e):
                        hx = _pairing(s, e, a, xa, cat.comp(h, xp1), xp2)
                        if cat.comp(ev, hx) == f:
                            n += 1
                    if n != 1:
                        bad.append(
                            f"exponential {b!r}^{a!r}: {n} transposes of {f!r}"
                            f" from {x!r}"
                        )
        return bad

    def cond4() -> list[str]:
        bad = []
        for a, b, c in itertools.product(cat.objects, repeat=3):
            needed = (
                (b, c) in s.coproducts
                and (a, b) in s.products and (a, c) in s.products
                and (a, s.coproducts[(b, c)][0]) in s.products
                and (s.products[(a, b)][0], s.products[(a, c)][0]) in s.coproducts
            )
            if not needed:
                continue
            try:
                _delta_inverse(s, a, b, c)
            except SemanticsError:
                bad.append(f"no distributivity inverse at ({a!r}, {b!r}, {c!r})")
        return bad

    def _eligible(bound: tuple[str, str]):
        for g in s.fragment:
            if bound not in fv_formula(g):
                yield g

    def cond5() -> list[str]:
        bad = []
        for f in s.fragment:
            match f:
                case Forall(x, sort, body):
                    insts = []
                    for tm in u.all_terms(sort):
                        inst = subst_formula(body, {(x, sort): tm})
                        if inst not in s.fragment:
                            bad.append(f"fragment not closed at {f!r} with {tm!r}")
                            break
                        insts.append((tm, _obj(s, inst)))
                    else:
                        try:
                            arrows = {tm: _cone_arrow(s, f, tm) for tm, _ in insts}
                        except SemanticsError as e:
                            bad.append(str(e))
                            continue
                        for g in _eligible((x, sort)):
                            v = _obj(s, g)
                            fams = [cat.hom(v, io) for _, io in insts]
                            total = 1
                            for fam in fams:
                                total *= len(fam)
                            if total > family_budget:
                                raise BudgetError(
                                    f"cone-family budget exceeded at {f!r}"
                                )
                            for combo in itertools.product(*fams):
                                family = dict(zip((tm for tm, _ in insts), combo))
                                n = sum(
                                    1 for h in cat.hom(v, _obj(s, f))
                                    if all(
                                        cat.comp(arrows[tm], h) == family[tm]
                                        for tm in family
                                    )
                                )
                                if n != 1:
                                    bad.append(
                                        f"{f!r} not terminal over {g!r}: {n} mediators"
                                    )
                case Exists(x, sort, body):
                    insts = []
                    for tm in u.all_terms(sort):
                        inst = subst_formula(body, {(x, sort): tm})
                        if inst not in s.fragment:
                            bad.append(f"fragment not closed at {f!r} with {tm!r}")
                            break
                        insts.append((tm, _obj(s, inst)))
                    else:
                        try:
                            arrows = {tm: _cocone_arrow(s, f, tm) for tm, _ in insts}
                        except SemanticsError as e:
                            bad.append(str(e))
                            continue
                        for g in _eligible((x, sort)):
                            v = _obj(s, g)
                            fams = [cat.hom(io, v) for _, io in insts]
                            total = 1
                            for fam in fams:
                                total *= len(fam)
                            if total > family_budget:
                                raise BudgetError(
                                    f"co-cone-family budget exceeded at {f!r}"
                                )
                            for combo in itertools.product(*fams):
                                family = dict(zip((tm for tm, _ in insts), combo))
                                n = sum(
                                    1 for h in cat.hom(_obj(s, f), v)
                                    if all(
                                        cat.comp(h, arrows[tm]) == family[tm]
                                        for tm in family
                                    )
                                )
                                if n != 1:
                                    bad.append(
                                        f"{f!r} not initial over {g!r}: {n} mediators"
                                    )
        return bad

    def cond6() -> list[str]:
        bad = []
        for f in s.fragment:
            match f:
                case One():
                    if s.m.of(f) != s.terminal:
                        bad.append("M(1) is not the terminal object")
                case Zero():
                    if s.m.of(f) != s.initial:
                        bad.append("M(0) is not the initial object")
                case Prod(a, b):
                    pa, pb = _obj(s, a), _obj(s, b)
                    if (pa, pb) not in s.products:
                        bad.append(f"no product witness for {f!r}")
                    elif s.products[(pa, pb)][0] != _obj(s, f):
                        bad.append(f"M does not send {f!r} to the product object")
                case Sum(a, b):
                    pa, pb = _obj(s, a), _obj(s, b)
                    if (pa, pb) not in s.coproducts:
                        bad.append(f"no coproduct witness for {f!r}")
                    elif s.coproducts[(pa, pb)][0] != _obj(s, f):
                        bad.append(f"M does not send {f!r} to the coproduct object")
                case Arrow(a, b):
                    pa, pb = _obj(s, a), _obj(s, b)
                    if (pa, pb) not in s.exponentials:
                        bad.append(f"no exponential witness for {f!r}")
                    elif s.exponentials[(pa, pb)][0] != _obj(s, f):
                        bad.append(f"M does not send {f!r} to the exponential object")
        return bad

    def cond7() -> list[str]:
        bad = []
        for f in s.fragment:
            if not isinstance(f, Exists):
                continue
            x, sort = f.var, f.sort
            for g in _eligible((x, sort)):
                if Exists(x, sort, Prod(f.body, g)) not in s.fragment:
                    continue
                try:
                    _frobenius_inverse(s, u, f, g)
                except SemanticsError as e:
                    bad.append(str(e))
        return bad

    run(1, cond1)
    run(2, cond2)
    run(3, cond3)
    run(4, cond4)
    run(5, cond5)
    run(6, cond6)
    run(7, cond7)
    return LDReport(all(r.ok for r in conditions.values()), conditions)
