"""Finite Kripke models and their induced categorical structures.

A model lives on a finite poset of worlds. Each world carries finite sorted
domains, function and relation interpretations; order-related worlds are
connected by transition maps. Forcing follows the standard monotone clauses:
implication and universal quantification range over all future worlds with
the environment transported along the transitions.

ld_of_kripke turns a model and a formula fragment into a thin category:
objects are fragment formulas identified when each implies the other at
every world under every environment, and there is one arrow from N(A) to
N(B) exactly when A entails B that way. Conjunction, disjunction,
implication, and the quantifiers then furnish the structure witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .syntax import (
    App,
    Arrow,
    Atom,
    Exists,
    Forall,
    Formula,
    LanguageError,
    LogicalTerm,
    One,
    ONE,
    Prod,
    Signature,
    Sum,
    Var,
    Zero,
    ZERO,
    alpha_key_formula,
    fv_formula,
    subst_formula,
)
from .semantics import (
    CheckReport,
    FinCategory,
    Fragment,
    LDStructure,
    SemanticsError,
    TermUniverse,
    Valuation,
    close_fragment,
)

Env = Mapping[tuple[str, str], object]


class KripkeError(LanguageError):
    """A model violates a frame, coherence, or stability condition."""


@dataclass(frozen=True)
class FinPoset:
    """A finite partial order given by its element list and relation pairs."""

    elements: tuple
    order: frozenset

    def leq(self, a, b) -> bool:
        return (a, b) in self.order

    def up(self, a) -> tuple:
        return tuple(b for b in self.elements if self.leq(a, b))


def check_poset(p: FinPoset) -> CheckReport:
    bad = []
    for a, b in p.order:
        if a not in p.elements or b not in p.elements:
            bad.append(f"order mentions unknown element in ({a!r}, {b!r})")
    for a in p.elements:
        if not p.leq(a, a):
            bad.append(f"not reflexive at {a!r}")
    for a, b in itertools.product(p.elements, repeat=2):
        if p.leq(a, b) and p.leq(b, a) and a != b:
            bad.append(f"not antisymmetric on {a!r}, {b!r}")
    for a, b, c in itertools.product(p.elements, repeat=3):
        if p.leq(a, b) and p.leq(b, c) and not p.leq(a, c):
            bad.append(f"not transitive on {a!r}, {b!r}, {c!r}")
    return CheckReport(not bad, tuple(bad[:10]))


@dataclass(frozen=True)
class FinKripkeModel:
    """Worlds, sorted carriers, transitions, and per-world interpretations.

    stability selects how relation interpretations interact with the
    transitions: "forward" keeps truths when moving up (the usual monotone
    requirement), "strict" additionally reflects them back down (the related
    tuple holds above exactly when it holds below).
    """

    sig: Signature
    poset: FinPoset
    carriers: Mapping[tuple[object, str], tuple]
    transitions: Mapping[tuple[object, object, str], Mapping]
    funs: Mapping[tuple[object, str], Mapping]
    rels: Mapping[tuple[object, str], frozenset]
    stability: str = "forward"

    def __post_init__(self):
        object.__setattr__(self, "_force_memo", {})

    def carrier(self, world, sort: str) -> tuple:
        try:
            return self.carriers[(world, sort)]
        except KeyError:
            raise KripkeError(f"no carrier for sort {sort} at {world!r}") from None

    def transition(self, p, q, sort: str) -> Mapping:
        if p == q:
            return {a: a for a in self.carrier(p, sort)}
        try:
            return self.transitions[(p, q, sort)]
        except KeyError:
            raise KripkeError(
                f"no transition for sort {sort} from {p!r} to {q!r}"
            ) from None


def transport_env(k: FinKripkeModel, p, q, env: Env) -> dict:
    return {
        (x, s): k.transition(p, q, s)[v] for (x, s), v in env.items()
    }


def eval_term(k: FinKripkeModel, p, env: Env, t: LogicalTerm):
    match t:
        case Var(x, s):
            try:
                return env[(x, s)]
            except KeyError:
                raise KripkeError(f"unbound variable {x}:{s}") from None
        case App(f, args):
            vals = tuple(eval_term(k, p, env, a) for a in args)
            try:
                return k.funs[(p, f)][vals]
            except KeyError:
                raise KripkeError(
                    f"function {f} undefined at {p!r} on {vals!r}"
                ) from None
    raise KripkeError(f"cannot evaluate {t!r}")


def forces(k: FinKripkeModel, p, env: Env, f: Formula) -> bool:
    """The monotone forcing relation at a world under an environment."""
    key = (p, tuple(sorted(env.items())), alpha_key_formula(f))
    memo = k._force_memo
    if key in memo:
        return memo[key]
    match f:
        case One():
            out = True
        case Zero():
            out = False
        case Atom(r, args):
            vals = tuple(eval_term(k, p, env, a) for a in args)
            out = vals in k.rels.get((p, r), frozenset())
        case Prod(a, b):
            out = forces(k, p, env, a) and forces(k, p, env, b)
        case Sum(a, b):
            out = forces(k, p, env, a) or forces(k, p, env, b)
        case Arrow(a, b):
            out = all(
                not forces(k, q, transport_env(k, p, q, env), a)
                or forces(k, q, transport_env(k, p, q, env), b)
                for q in k.poset.up(p)
            )
        case Forall(x, s, body):
            out = all(
                forces(k, q, {**transport_env(k, p, q, env), (x, s): d}, body)
                for q in k.poset.up(p)
                for d in k.carrier(q, s)
            )
        case Exists(x, s, body):
            out = any(
                forces(k, p, {**env, (x, s): d}, body)
                for d in k.carrier(p, s)
            )
        case _:
            raise KripkeError(f"no forcing clause for {f!r}")
    memo[key] = out
    return out


def envs_over(k: FinKripkeModel, p, fvs: Iterable[tuple[str, str]]):
    """All environments at a world covering the given free variables."""
    fvs = tuple(sorted(fvs))
    pools = [k.carrier(p, s) for _, s in fvs]
    for combo in itertools.product(*pools):
        yield dict(zip(fvs, combo))


def valid(k: FinKripkeModel, f: Formula) -> bool:
    """Forced at every world under every environment for the free variables."""
    fvs = fv_formula(f)
    return all(
        forces(k, p, env, f)
        for p in k.poset.elements
        for env in envs_over(k, p, fvs)
    )


def validate_kripke(k: FinKripkeModel) -> CheckReport:
    """Frame laws, transition functoriality, and interpretation coherence."""
    bad = list(check_poset(k.poset).failures)
    if k.stability not in ("forward", "strict"):
        bad.append(f"unknown stability mode {k.stability!r}")
        return CheckReport(False, tuple(bad))
    po = k.poset
    for p in po.elements:
        for s in k.sig.sorts:
            if (p, s) not in k.carriers:
                bad.append(f"no carrier for sort {s} at {p!r}")
    if bad:
        return CheckReport(False, tuple(bad[:10]))
    for p, q in po.order:
        for s in k.sig.sorts:
            tr = k.transitions.get((p, q, s))
            if tr is None:
                if p != q:
                    bad.append(f"missing transition for {s} from {p!r} to {q!r}")
                continue
            dom, cod = k.carrier(p, s), k.carrier(q, s)
            if set(tr.keys()) != set(dom) or any(tr[a] not in cod for a in dom):
                bad.append(f"transition for {s} from {p!r} to {q!r} ill-formed")
            elif p == q and any(tr[a] != a for a in dom):
                bad.append(f"transition at {p!r} for {s} is not the identity")
    for p, q in po.order:
        for q2, r in po.order:
            if q2 != q:
                continue
            for s in k.sig.sorts:
                try:
                    pq = k.transition(p, q, s)
                    qr = k.transition(q, r, s)
                    pr = k.transition(p, r, s)
                except KripkeError as e:
                    bad.append(str(e))
                    continue
                if any(pr[a] != qr[pq[a]] for a in k.carrier(p, s)):
                    bad.append(
                        f"transitions for {s} do not compose over"
                        f" {p!r} <= {q!r} <= {r!r}"
                    )
    for p in po.elements:
        for fname, (argsorts, res) in k.sig.funs.items():
            interp = k.funs.get((p, fname))
            if interp is None:
                bad.append(f"function {fname} uninterpreted at {p!r}")
                continue
            pools = [k.carrier(p, s) for s in argsorts]
            for combo in itertools.product(*pools):
                if combo not in interp:
                    bad.append(f"function {fname} partial at {p!r}")
                    break
                if interp[combo] not in k.carrier(p, res):
                    bad.append(f"function {fname} escapes its sort at {p!r}")
                    break
    if bad:
        return CheckReport(False, tuple(bad[:10]))
    for p, q in po.order:
        if p == q:
            continue
        for fname, (argsorts, res) in k.sig.funs.items():
            tr = {s: k.transition(p, q, s) for s in set(argsorts) | {res}}
            fp, fq = k.funs[(p, fname)], k.funs[(q, fname)]
            pools = [k.carrier(p, s) for s in argsorts]
            for combo in itertools.product(*pools):
                moved = tuple(tr[s][a] for s, a in zip(argsorts, combo))
                if tr[res][fp[combo]] != fq[moved]:
                    bad.append(
                        f"function {fname} does not commute with the"
                        f" transition {p!r} to {q!r}"
                    )
                    break
        for rname, argsorts in k.sig.rels.items():
            rp = k.rels.get((p, rname), frozenset())
            rq = k.rels.get((q, rname), frozenset())
            pools = [k.carrier(p, s) for s in argsorts]
            for combo in itertools.product(*pools):
                moved = tuple(
                    k.transition(p, q, s)[a] for s, a in zip(argsorts, combo)
                )
                holds, holds_up = combo in rp, moved in rq
                if holds and not holds_up:
                    bad.append(
                        f"relation {rname} not preserved from {p!r} to {q!r}"
                    )
                    break
                if k.stability == "strict" and holds_up and not holds:
                    bad.append(
                        f"relation {rname} not reflected from {q!r} to {p!r}"
                    )
                    break
    return CheckReport(not bad, tuple(bad[:10]))


# ---------------------------------------------------------------------------
# the induced thin structure

def _class_key(k: FinKripkeModel, f: Formula):
    """Semantic identity of a formula: its forcing table, with variables the
    table does not depend on projected away."""
    fvs = tuple(sorted(fv_formula(f)))
    worlds = tuple(k.poset.elements)
    table = {
        p: frozenset(
            tuple(sorted(env.items()))
            for env in envs_over(k, p, fvs)
            if forces(k, p, env, f)
        )
        for p in worlds
    }
    changed = True
    while changed:
        changed = False
        for v in fvs:
            dependent = False
            for p in worlds:
                for env in envs_over(k, p, fvs):
                    base = {x: y for x, y in env.items() if x != v}
                    outs = {
                        tuple(sorted({**base, v: d}.items())) in table[p]
                        for d in k.carrier(p, v[1])
                    }
                    if len(outs) > 1:
                        dependent = True
                        break
                if dependent:
                    break
            if not dependent:
                fvs = tuple(x for x in fvs if x != v)
                table = {
                    p: frozenset(
                        tuple(it for it in env if it[0] != v)
                        for env in table[p]
                    )
                    for p in worlds
                }
                changed = True
                break
    return (fvs, tuple((p, table[p]) for p in worlds))


def _key_leq(k: FinKripkeModel, k1, k2) -> bool:
    """Pointwise entailment of two class keys at every world and environment."""
    fvs = tuple(sorted(set(k1[0]) | set(k2[0])))
    t1, t2 = dict(k1[1]), dict(k2[1])
    for p in k.poset.elements:
        for env in envs_over(k, p, fvs):
            items = tuple(sorted(env.items()))
            in1 = tuple(it for it in items if it[0] in k1[0]) in t1[p]
            in2 = tuple(it for it in items if it[0] in k2[0]) in t2[p]
            if in1 and not in2:
                return False
    return True


def ld_of_kripke(
    k: FinKripkeModel, fragment: Fragment, u: TermUniverse
) -> LDStructure:
    """The thin category of entailment classes of the fragment.

    The fragment is enriched with the unit, the empty type, and the product
    of each member implication with its antecedent (the domain the
    evaluation arrow needs), then closed. Structure witnesses come from the
    logical connectives; quantifier cones resolve through the single arrow
    between related classes.
    """
    extra: list[Formula] = [ONE, ZERO]
    for f in fragment:
        if isinstance(f, Arrow):
            extra.append(Prod(f, f.dom))
    frag = close_fragment(tuple(fragment) + tuple(extra), u)

    keys: dict = {}
    for f in frag:
        keys[alpha_key_formula(f)] = _class_key(k, f)
    objects = []
    seen = set()
    for f in frag:
        ck = keys[alpha_key_formula(f)]
        if ck not in seen:
            seen.add(ck)
            objects.append(ck)
    arrows = tuple(
        (("le", a, b), a, b)
        for a in objects
        for b in objects
        if _key_leq(k, a, b)
    )
    identity = {a: ("le", a, a) for a in objects}
    compose = {}
    for (g, gb, gc) in arrows:
        for (f2, fa, fb) in arrows:
            if fb == gb:
                compose[(g, f2)] = ("le", fa, gc)
    cat = FinCategory(tuple(objects), arrows, identity, compose)

    known = set(objects)

    def classify(f: Formula):
        ck = _class_key(k, f)
        if ck not in known:
            raise SemanticsError(f"formula outside the covered fragment: {f!r}")
        return ck

    m = Valuation(compute=classify)
    le = lambda a, b: ("le", a, b)  # noqa: E731
    top, bot = m.of(ONE), m.of(ZERO)
    products = {}
    coproducts = {}
    exponentials = {}
    for f in frag:
        match f:
            case Prod(a, b):
                pa, pb, pf = m.of(a), m.of(b), m.of(f)
                products[(pa, pb)] = (pf, le(pf, pa), le(pf, pb))
            case Sum(a, b):
                pa, pb, pf = m.of(a), m.of(b), m.of(f)
                coproducts[(pa, pb)] = (pf, le(pa, pf), le(pb, pf))
    for f in frag:
        match f:
            case Arrow(a, b):
                pa, pb, pf = m.of(a), m.of(b), m.of(f)
                dom = products[(pf, pa)][0]
                exponentials[(pa, pb)] = (pf, le(dom, pb))
    m_ax = {}
    for name, decl in k.sig.axioms.items():
        if valid(k, Arrow(decl.dom, decl.cod)):
            m_ax[name] = le(m.of(decl.dom), m.of(decl.cod))
    return LDStructure(
        sig=k.sig,
        cat=cat,
        m=m,
        m_ax=m_ax,
        terminal=top,
        bang={a: le(a, top) for a in objects},
        initial=bot,
        from_initial={a: le(bot, a) for a in objects},
        products=products,
        coproducts=coproducts,
        exponentials=exponentials,
        fragment=frag,
    )
