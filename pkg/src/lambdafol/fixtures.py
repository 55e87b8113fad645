"""Ready-made finite models for tests, demos, and the command line.

Three families: the one-object structure (everything collapses), lattice
structures over finite posets (Heyting algebras give full logical structure,
the five-element non-distributive lattice deliberately breaks it), and small
categories of finite sets (proof-relevant homs, so mediator uniqueness is a
real constraint rather than a poset triviality).
"""

from __future__ import annotations

import itertools
import zlib
from typing import Callable, Iterable, Mapping, Optional

from .syntax import (
    Arrow,
    Atom,
    Exists,
    Forall,
    Formula,
    One,
    Prod,
    Signature,
    Sum,
    Var,
    Zero,
    alpha_key_formula,
    subst_formula,
)
from .semantics import (
    FinCategory,
    Fragment,
    LDStructure,
    SemanticsError,
    TermUniverse,
    Valuation,
    close_fragment,
)
from .kripke import FinKripkeModel, FinPoset

Leq = Callable[[object, object], bool]


# ---------------------------------------------------------------------------
# poset and lattice machinery

def poset_category(elements: Iterable, leq: Leq) -> FinCategory:
    """The thin category of a finite poset: one arrow per related pair."""
    elems = tuple(elements)
    arrows = tuple(
        (("le", a, b), a, b) for a in elems for b in elems if leq(a, b)
    )
    identity = {a: ("le", a, a) for a in elems}
    compose = {}
    for (g, gb, gc) in arrows:
        for (f, fa, fb) in arrows:
            if fb == gb:
                compose[(g, f)] = ("le", fa, gc)
    return FinCategory(elems, arrows, identity, compose)


def _lattice_ops(elems: tuple, leq: Leq):
    def bound(pair, below: bool):
        a, b = pair
        if below:
            cands = [c for c in elems if leq(c, a) and leq(c, b)]
            best = [c for c in cands if all(leq(d, c) for d in cands)]
        else:
            cands = [c for c in elems if leq(a, c) and leq(b, c)]
            best = [c for c in cands if all(leq(c, d) for d in cands)]
        if len(best) != 1:
            raise SemanticsError(f"no lattice bound for {a!r}, {b!r}")
        return best[0]

    meet = {(a, b): bound((a, b), True) for a in elems for b in elems}
    join = {(a, b): bound((a, b), False) for a in elems for b in elems}
    tops = [c for c in elems if all(leq(d, c) for d in elems)]
    bots = [c for c in elems if all(leq(c, d) for d in elems)]
    if len(tops) != 1 or len(bots) != 1:
        raise SemanticsError("lattice lacks a top or a bottom")
    return meet, join, tops[0], bots[0]


def _heyting_imp(elems, leq, meet):
    imp = {}
    for a, b in itertools.product(elems, repeat=2):
        cands = [c for c in elems if leq(meet[(c, a)], b)]
        best = [c for c in cands if all(leq(d, c) for d in cands)]
        if len(best) != 1:
            raise SemanticsError(f"no relative pseudocomplement for {a!r}, {b!r}")
        imp[(a, b)] = best[0]
    return imp


def hashed_valuation(elements: Iterable, overrides: Mapping[str, object] = ()):
    """A deterministic atom valuation: stable hash of name and arguments.

    Overrides are keyed by relation name and apply regardless of arguments.
    """
    elems = tuple(elements)
    fixed = dict(overrides or {})

    def val(name: str, args: tuple) -> object:
        if name in fixed:
            return fixed[name]
        text = name + "|" + "|".join(repr(a) for a in args)
        return elems[zlib.crc32(text.encode()) % len(elems)]

    return val


def lattice_model(
    sig: Signature,
    elements: Iterable,
    leq: Leq,
    valuation: Callable[[str, tuple], object],
    seeds: Iterable[Formula],
    universe: TermUniverse,
    with_exponentials: bool = True,
    interpret_axioms: bool = True,
) -> LDStructure:
    """A structure over a finite lattice, with logical operations computed.

    Meets interpret products, joins coproducts, and (when requested and the
    lattice is a Heyting algebra) relative pseudocomplements interpret
    exponentials. Quantifiers are meets and joins over universe instances.
    """
    elems = tuple(elements)
    cat = poset_category(elems, leq)
    meet, join, top, bot = _lattice_ops(elems, leq)
    imp = _heyting_imp(elems, leq, meet) if with_exponentials else None

    def compute(f: Formula):
        match f:
            case One():
                return top
            case Zero():
                return bot
            case Atom(name, args):
                v = valuation(name, tuple(args))
                if v not in elems:
                    raise SemanticsError(f"valuation of {f!r} is not an element")
                return v
            case Prod(a, b):
                return meet[(m.of(a), m.of(b))]
            case Sum(a, b):
                return join[(m.of(a), m.of(b))]
            case Arrow(a, b):
                if imp is None:
                    raise SemanticsError("lattice has no exponentials")
                return imp[(m.of(a), m.of(b))]
            case Forall(x, s, body):
                out = top
                for t in universe.all_terms(s):
                    out = meet[(out, m.of(subst_formula(body, {(x, s): t})))]
                return out
            case Exists(x, s, body):
                out = bot
                for t in universe.all_terms(s):
                    out = join[(out, m.of(subst_formula(body, {(x, s): t})))]
                return out
        raise SemanticsError(f"no valuation clause for {f!r}")

    m = Valuation(compute=compute)
    le = lambda a, b: ("le", a, b)  # noqa: E731
    products = {
        (a, b): (meet[(a, b)], le(meet[(a, b)], a), le(meet[(a, b)], b))
        for a, b in itertools.product(elems, repeat=2)
    }
    coproducts = {
        (a, b): (join[(a, b)], le(a, join[(a, b)]), le(b, join[(a, b)]))
        for a, b in itertools.product(elems, repeat=2)
    }
    exponentials = {}
    if imp is not None:
        for a, b in itertools.product(elems, repeat=2):
            e = imp[(a, b)]
            exponentials[(a, b)] = (e, le(meet[(e, a)], b))
    m_ax = {}
    if interpret_axioms:
        for name, decl in sig.axioms.items():
            da, db = m.of(decl.dom), m.of(decl.cod)
            if not leq(da, db):
                raise SemanticsError(
                    f"axiom {name} not satisfied: {da!r} is not below {db!r}"
                )
            m_ax[name] = le(da, db)
    return LDStructure(
        sig=sig,
        cat=cat,
        m=m,
        m_ax=m_ax,
        terminal=top,
        bang={a: le(a, top) for a in elems},
        initial=bot,
        from_initial={a: le(bot, a) for a in elems},
        products=products,
        coproducts=coproducts,
        exponentials=exponentials,
        fragment=close_fragment(seeds, universe),
    )


# ---------------------------------------------------------------------------
# named lattices

DIAMOND = ("bot", "a", "b", "top")
_DIAMOND_LE = {
    (x, y)
    for x in DIAMOND
    for y in DIAMOND
    if x == y or x == "bot" or y == "top"
}

M3 = ("bot", "a", "b", "c", "top")
_M3_LE = {
    (x, y) for x in M3 for y in M3 if x == y or x == "bot" or y == "top"
}


def diamond_leq(a, b) -> bool:
    return (a, b) in _DIAMOND_LE


def m3_leq(a, b) -> bool:
    return (a, b) in _M3_LE


def diamond_model(
    sig: Signature,
    seeds: Iterable[Formula],
    universe: TermUniverse,
    overrides: Mapping[str, object] = (),
) -> LDStructure:
    """The four-element Heyting algebra with two incomparable middles."""
    val = hashed_valuation(DIAMOND, overrides)
    return lattice_model(sig, DIAMOND, diamond_leq, val, seeds, universe)


def m3_model(
    sig: Signature,
    seeds: Iterable[Formula],
    universe: TermUniverse,
    overrides: Mapping[str, object] = (),
) -> LDStructure:
    """The five-element non-distributive lattice; no exponentials, and the
    distributivity condition fails on the three middle elements."""
    val = hashed_valuation(("a", "b", "c"), overrides)
    return lattice_model(
        sig, M3, m3_leq, val, seeds, universe,
        with_exponentials=False, interpret_axioms=False,
    )


# ---------------------------------------------------------------------------
# the one-object structure

def trivial_model(sig: Signature, seeds: Iterable[Formula], universe: TermUniverse) -> LDStructure:
    """Everything interprets to the one object and its identity arrow."""
    o = "pt"
    i = ("id", o)
    cat = FinCategory((o,), ((i, o, o),), {o: i}, {(i, i): i})
    return LDStructure(
        sig=sig,
        cat=cat,
        m=Valuation(compute=lambda f: o),
        m_ax={name: i for name in sig.axioms},
        terminal=o,
        bang={o: i},
        initial=o,
        from_initial={o: i},
        products={(o, o): (o, i, i)},
        coproducts={(o, o): (o, i, i)},
        exponentials={(o, o): (o, i)},
        fragment=close_fragment(seeds, universe),
    )


# ---------------------------------------------------------------------------
# finite sets

def _functions(n: int, m: int) -> Iterable[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    yield from itertools.product(range(m), repeat=n)


def finset_category(sizes: Iterable[int]) -> FinCategory:
    """All functions between finite sets of the given sizes.

    Objects are sizes; an arrow records its image tuple, so distinct
    functions are distinct arrows and mediator uniqueness has teeth.
    """
    objs = tuple(sizes)
    arrows = []
    for d, c in itertools.product(objs, repeat=2):
        for images in _functions(d, c):
            arrows.append((("fn", d, c, images), d, c))
    identity = {n: ("fn", n, n, tuple(range(n))) for n in objs}
    compose = {}
    for gid, gd, gc in arrows:
        for fid, fd, fc in arrows:
            if fc != gd:
                continue
            images = tuple(gid[3][i] for i in fid[3])
            compose[(gid, fid)] = ("fn", fd, gc, images)
    return FinCategory(objs, tuple(arrows), identity, compose)


def finset_model(
    sig: Signature,
    seeds: Iterable[Formula],
    universe: TermUniverse,
    sizes: tuple[int, ...] = (0, 1, 2),
    atom_sizes: Mapping[str, int] = (),
) -> LDStructure:
    """Sets and functions over the given sizes; atoms map to declared sizes.

    Products, coproducts, and exponentials are present exactly where the
    resulting size is again in the list, so pick seed formulas accordingly.
    """
    cat = finset_category(sizes)
    objs = set(sizes)
    atom_of = dict(atom_sizes or {})

    def compute(f: Formula):
        match f:
            case One():
                return 1
            case Zero():
                return 0
            case Atom(name, _):
                n = atom_of.get(name, 1)
                if n not in objs:
                    raise SemanticsError(f"atom {name} assigned a missing size")
                return n
            case Prod(a, b):
                n = m.of(a) * m.of(b)
            case Sum(a, b):
                n = m.of(a) + m.of(b)
            case Arrow(a, b):
                n = m.of(b) ** m.of(a)
            case _:
                raise SemanticsError(f"no finite-set clause for {f!r}")
        if n not in objs:
            raise SemanticsError(f"size {n} of {f!r} is not an object")
        return n

    m = Valuation(compute=compute)
    products = {}
    for a, b in itertools.product(sorted(objs), repeat=2):
        if a * b in objs:
            p1 = tuple(i // b for i in range(a * b)) if b else ()
            p2 = tuple(i % b for i in range(a * b)) if b else ()
            products[(a, b)] = (
                a * b,
                ("fn", a * b, a, p1),
                ("fn", a * b, b, p2),
            )
    coproducts = {}
    for a, b in itertools.product(sorted(objs), repeat=2):
        if a + b in objs:
            coproducts[(a, b)] = (
                a + b,
                ("fn", a, a + b, tuple(range(a))),
                ("fn", b, a + b, tuple(a + k for k in range(b))),
            )
    exponentials = {}
    for a, b in itertools.product(sorted(objs), repeat=2):
        e = b ** a
        if e in objs and e * a in objs:
            funcs = list(_functions(a, b))
            ev = tuple(funcs[i // a][i % a] for i in range(e * a)) if a else ()
            exponentials[(a, b)] = (e, ("fn", e * a, b, ev))
    if 1 not in objs or 0 not in objs:
        raise SemanticsError("finite-set structure needs sizes 0 and 1")
    m_ax = {}
    for name, decl in sig.axioms.items():
        da, db = m.of(decl.dom), m.of(decl.cod)
        if db == 0 and da > 0:
            raise SemanticsError(f"axiom {name} has no finite-set interpretation")
        m_ax[name] = ("fn", da, db, tuple(0 for _ in range(da)))
    return LDStructure(
        sig=sig,
        cat=cat,
        m=m,
        m_ax=m_ax,
        terminal=1,
        bang={n: ("fn", n, 1, tuple(0 for _ in range(n))) for n in objs},
        initial=0,
        from_initial={n: ("fn", 0, n, ()) for n in objs},
        products=products,
        coproducts=coproducts,
        exponentials=exponentials,
        fragment=close_fragment(seeds, universe),
    )


# ---------------------------------------------------------------------------
# Kripke models

def _nullary(*names):
    return {n: frozenset({()}) for n in names}


def _chain_interps(sig: Signature):
    """Shared interpretation pieces for the chain models: individuals 0 and 1,
    constants naming them, and the unary function swapping them."""
    funs = {}
    for name, (argsorts, _) in sig.funs.items():
        if not argsorts:
            funs[name] = {(): 0 if name == "c" else 1}
        elif len(argsorts) == 1:
            funs[name] = {(0,): 1, (1,): 0}
        else:
            funs[name] = {
                combo: 0 for combo in itertools.product((0, 1), repeat=len(argsorts))
            }
    return funs


def kripke_two_chain(sig: Signature) -> FinKripkeModel:
    """Two worlds, identity transitions, forward stability.

    p holds of 0 only at the upper world and q2 becomes true only there, so
    excluded middle and double-negation elimination fail at the root; q1 is
    true everywhere, keeping the q0-to-q1 axiom valid.
    """
    poset = FinPoset(("w0", "w1"), frozenset({("w0", "w0"), ("w0", "w1"), ("w1", "w1")}))
    carriers = {(w, s): (0, 1) for w in poset.elements for s in sig.sorts}
    transitions = {
        (p, q, s): {0: 0, 1: 1}
        for (p, q) in poset.order
        for s in sig.sorts
    }
    funs = {
        (w, name): interp
        for w in poset.elements
        for name, interp in _chain_interps(sig).items()
    }
    rels: dict = {}
    for w in poset.elements:
        for rname, argsorts in sig.rels.items():
            if rname == "q1":
                rels[(w, rname)] = frozenset({()})
            elif rname == "q2" and w == "w1":
                rels[(w, rname)] = frozenset({()})
            elif rname == "p" and w == "w1":
                rels[(w, rname)] = frozenset({(0,)})
            elif rname == "r2" and w == "w1":
                rels[(w, rname)] = frozenset({(0, 1)})
            else:
                rels[(w, rname)] = frozenset()
    return FinKripkeModel(sig, poset, carriers, transitions, funs, rels)


def kripke_single_world(sig: Signature, total: bool = True) -> FinKripkeModel:
    """One world over individuals 0 and 1; with total relations the logic
    collapses to the classical one on the interpreted atoms."""
    poset = FinPoset(("w",), frozenset({("w", "w")}))
    carriers = {("w", s): (0, 1) for s in sig.sorts}
    transitions = {("w", "w", s): {0: 0, 1: 1} for s in sig.sorts}
    funs = {("w", name): interp for name, interp in _chain_interps(sig).items()}
    rels = {}
    for rname, argsorts in sig.rels.items():
        if total:
            rels[("w", rname)] = frozenset(
                itertools.product((0, 1), repeat=len(argsorts))
            )
        else:
            rels[("w", rname)] = frozenset()
    return FinKripkeModel(sig, poset, carriers, transitions, funs, rels)


def kripke_strict_chain(sig: Signature) -> FinKripkeModel:
    """Two worlds with identical relation interpretations, so the strict
    stability mode (truth above exactly when truth below) holds."""
    poset = FinPoset(("w0", "w1"), frozenset({("w0", "w0"), ("w0", "w1"), ("w1", "w1")}))
    carriers = {(w, s): (0, 1) for w in poset.elements for s in sig.sorts}
    transitions = {
        (p, q, s): {0: 0, 1: 1}
        for (p, q) in poset.order
        for s in sig.sorts
    }
    funs = {
        (w, name): interp
        for w in poset.elements
        for name, interp in _chain_interps(sig).items()
    }
    rels = {}
    for w in poset.elements:
        for rname, argsorts in sig.rels.items():
            if rname == "q1":
                rels[(w, rname)] = frozenset({()})
            elif rname == "p":
                rels[(w, rname)] = frozenset({(0,)})
            else:
                rels[(w, rname)] = frozenset()
    return FinKripkeModel(
        sig, poset, carriers, transitions, funs, rels, stability="strict"
    )
