"""Core syntax for a multi-sorted first-order intuitionistic language.

Formulas double as lambda types: 1, 0, relational atoms, products (conjunction),
sums (disjunction), arrows (implication) and the two quantifiers.  Lambda terms
carry enough annotations (variable types, injection complements, existential
witnesses) that type inference is syntax-directed.

Terms are named; substitution is capture-avoiding by renaming on clash with a
module-level fresh counter, and alpha equality goes through canonical nameless
keys (separate index spaces for lambda binders and logical binders).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union


class LanguageError(Exception):
    """Base class for malformed syntax."""


class SignatureError(LanguageError):
    pass


class SortError(LanguageError):
    """A logical term or atom does not respect the signature's sorts."""


class TypingError(LanguageError):
    """A lambda term has no type in the given context."""


# ---------------------------------------------------------------------------
# signatures

@dataclass(frozen=True)
class AxiomDecl:
    """A named axiom constant with arrow type dom -> cod (both closed)."""

    name: str
    dom: "Formula"
    cod: "Formula"


class Signature:
    """Sorts, sorted function symbols, sorted relation symbols, axiom constants.

    Treated as immutable after construction.
    """

    def __init__(
        self,
        sorts: Iterable[str],
        funs: Mapping[str, tuple[tuple[str, ...], str]] = (),
        rels: Mapping[str, tuple[str, ...]] = (),
        axioms: Iterable[AxiomDecl] = (),
    ):
        self.sorts = tuple(sorts)
        self.funs = dict(funs)
        self.rels = dict(rels)
        self.axioms = {ax.name: ax for ax in axioms}
        self._validate()

    def _validate(self) -> None:
        if len(set(self.sorts)) != len(self.sorts):
            raise SignatureError("duplicate sort name")
        for f, (args, res) in self.funs.items():
            for s in (*args, res):
                if s not in self.sorts:
                    raise SignatureError(f"function {f} uses unknown sort {s}")
        for r, args in self.rels.items():
            for s in args:
                if s not in self.sorts:
                    raise SignatureError(f"relation {r} uses unknown sort {s}")
        for ax in self.axioms.values():
            for side in (ax.dom, ax.cod):
                check_formula(self, side)
                if fv_formula(side):
                    raise SignatureError(f"axiom {ax.name} is not closed")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Signature)
            and self.sorts == other.sorts
            and self.funs == other.funs
            and self.rels == other.rels
            and self.axioms == other.axioms
        )

    def __repr__(self) -> str:
        return (
            f"Signature(sorts={self.sorts!r}, funs={self.funs!r}, "
            f"rels={self.rels!r}, axioms={tuple(self.axioms.values())!r})"
        )


# ---------------------------------------------------------------------------
# logical terms

@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class App:
    fun: str
    args: tuple["LogicalTerm", ...]


LogicalTerm = Union[Var, App]


def sort_of(sig: Signature, t: LogicalTerm) -> str:
    """Sort of a logical term, checking arities along the way."""
    match t:
        case Var(_, s):
            if s not in sig.sorts:
                raise SortError(f"unknown sort {s}")
            return s
        case App(f, args):
            if f not in sig.funs:
                raise SortError(f"unknown function symbol {f}")
            argsorts, res = sig.funs[f]
            if len(args) != len(argsorts):
                raise SortError(f"{f} expects {len(argsorts)} arguments, got {len(args)}")
            for a, s in zip(args, argsorts):
                if sort_of(sig, a) != s:
                    raise SortError(f"argument of {f} has sort {sort_of(sig, a)}, wants {s}")
            return res
    raise SortError(f"not a logical term: {t!r}")


def fv_term(t: LogicalTerm) -> set[tuple[str, str]]:
    match t:
        case Var(x, s):
            return {(x, s)}
        case App(_, args):
            out: set[tuple[str, str]] = set()
            for a in args:
                out |= fv_term(a)
            return out
    raise SortError(f"not a logical term: {t!r}")


def subst_term(t: LogicalTerm, sub: Mapping[tuple[str, str], LogicalTerm]) -> LogicalTerm:
    match t:
        case Var(x, s):
            return sub.get((x, s), t)
        case App(f, args):
            return App(f, tuple(subst_term(a, sub) for a in args))
    raise SortError(f"not a logical term: {t!r}")


# ---------------------------------------------------------------------------
# formulas / types

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class One(Formula):
    pass


@dataclass(frozen=True)
class Zero(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: tuple[LogicalTerm, ...] = ()


@dataclass(frozen=True)
class Prod(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Sum(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Arrow(Formula):
    dom: Formula
    cod: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sort: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sort: str
    body: Formula


ONE = One()
ZERO = Zero()


def check_formula(sig: Signature, f: Formula) -> None:
    """Raise SortError unless f is well formed over sig."""
    match f:
        case One() | Zero():
            return
        case Atom(r, args):
            if r not in sig.rels:
                raise SortError(f"unknown relation symbol {r}")
            want = sig.rels[r]
            if len(args) != len(want):
                raise SortError(f"{r} expects {len(want)} arguments, got {len(args)}")
            for a, s in zip(args, want):
                if sort_of(sig, a) != s:
                    raise SortError(f"argument of {r} has sort {sort_of(sig, a)}, wants {s}")
        case Prod(a, b) | Sum(a, b) | Arrow(a, b):
            check_formula(sig, a)
            check_formula(sig, b)
        case Forall(_, s, body) | Exists(_, s, body):
            if s not in sig.sorts:
                raise SortError(f"unknown sort {s}")
            check_formula(sig, body)
        case _:
            raise SortError(f"not a formula: {f!r}")


def fv_formula(f: Formula) -> set[tuple[str, str]]:
    match f:
        case One() | Zero():
            return set()
        case Atom(_, args):
            out: set[tuple[str, str]] = set()
            for a in args:
                out |= fv_term(a)
            return out
        case Prod(a, b) | Sum(a, b) | Arrow(a, b):
            return fv_formula(a) | fv_formula(b)
        case Forall(x, s, body) | Exists(x, s, body):
            return fv_formula(body) - {(x, s)}
    raise SortError(f"not a formula: {f!r}")


_counter = itertools.count(1)


def fresh(base: str = "x") -> str:
    """A globally fresh name.  The tilde suffix is reserved for generated names."""
    stem = base.split("~", 1)[0] or "x"
    return f"{stem}~{next(_counter)}"


def _ranged_names(sub: Mapping[tuple[str, str], LogicalTerm]) -> set[str]:
    out: set[str] = set()
    for t in sub.values():
        out |= {n for n, _ in fv_term(t)}
    return out


def subst_formula(
    f: Formula, sub: Mapping[tuple[str, str], LogicalTerm]
) -> Formula:
    """Capture-avoiding substitution of logical terms for logical variables."""
    if not sub:
        return f
    match f:
        case One() | Zero():
            return f
        case Atom(r, args):
            return Atom(r, tuple(subst_term(a, sub) for a in args))
        case Prod(a, b):
            return Prod(subst_formula(a, sub), subst_formula(b, sub))
        case Sum(a, b):
            return Sum(subst_formula(a, sub), subst_formula(b, sub))
        case Arrow(a, b):
            return Arrow(subst_formula(a, sub), subst_formula(b, sub))
        case Forall(x, s, body) | Exists(x, s, body):
            cls = Forall if isinstance(f, Forall) else Exists
            inner = {k: v for k, v in sub.items() if k != (x, s)}
            if not inner:
                return cls(x, s, body)
            if x in _ranged_names(inner):
                x2 = fresh(x)
                body = subst_formula(body, {(x, s): Var(x2, s)})
                x = x2
            return cls(x, s, subst_formula(body, inner))
    raise SortError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# lambda terms (16 constructors)

class LambdaTerm:
    __slots__ = ()


@dataclass(frozen=True)
class LVar(LambdaTerm):
    name: str
    type: Formula


@dataclass(frozen=True)
class AxApp(LambdaTerm):
    ax: str
    arg: LambdaTerm


@dataclass(frozen=True)
class Pair(LambdaTerm):
    left: LambdaTerm
    right: LambdaTerm


@dataclass(frozen=True)
class Fst(LambdaTerm):
    arg: LambdaTerm


@dataclass(frozen=True)
class Snd(LambdaTerm):
    arg: LambdaTerm


@dataclass(frozen=True)
class Inl(LambdaTerm):
    other: Formula          # the right summand; result is type(arg) + other
    arg: LambdaTerm


@dataclass(frozen=True)
class Inr(LambdaTerm):
    other: Formula          # the left summand; result is other + type(arg)
    arg: LambdaTerm


@dataclass(frozen=True)
class When(LambdaTerm):
    scrut: LambdaTerm       # of sum type A + B
    left: LambdaTerm        # of type A -> C
    right: LambdaTerm       # of type B -> C


@dataclass(frozen=True)
class Lam(LambdaTerm):
    var: str
    dom: Formula
    body: LambdaTerm


@dataclass(frozen=True)
class Ap(LambdaTerm):
    fun: LambdaTerm
    arg: LambdaTerm


@dataclass(frozen=True)
class Star(LambdaTerm):
    pass


@dataclass(frozen=True)
class Absurd(LambdaTerm):
    """The canonical constant of type 0 -> target."""

    target: Formula


@dataclass(frozen=True)
class AllI(LambdaTerm):
    var: str
    sort: str
    body: LambdaTerm


@dataclass(frozen=True)
class AllE(LambdaTerm):
    arg: LambdaTerm         # of type forall var. body
    index: LogicalTerm


@dataclass(frozen=True)
class ExI(LambdaTerm):
    """Annotated existential introduction.

    var/sort/body_type name the target Exists(var, sort, body_type); witness is
    the term replacing var; arg has type body_type[witness/var].  The
    annotations are part of term identity.
    """

    var: str
    sort: str
    witness: LogicalTerm
    body_type: Formula
    arg: LambdaTerm


@dataclass(frozen=True)
class ExE(LambdaTerm):
    """Existential elimination exE(scrut, lambda var:sort. body)."""

    scrut: LambdaTerm
    var: str
    sort: str
    body: LambdaTerm        # of type A -> B, with var bound in it


STAR = Star()

Context = tuple[tuple[str, Formula], ...]


@dataclass(frozen=True)
class TermInContext:
    ctx: Context
    term: LambdaTerm
    type: Formula


@dataclass(frozen=True)
class EqualityInContext:
    ctx: Context
    lhs: LambdaTerm
    rhs: LambdaTerm
    type: Formula


# ---------------------------------------------------------------------------
# free variables

def fv_lambda(t: LambdaTerm) -> set[tuple[str, Formula]]:
    """Free lambda variables of t, as (name, type) pairs."""
    match t:
        case LVar(x, ty):
            return {(x, ty)}
        case Star() | Absurd(_):
            return set()
        case AxApp(_, a) | Fst(a) | Snd(a) | Inl(_, a) | Inr(_, a) | AllE(a, _) | ExI(_, _, _, _, a):
            return fv_lambda(a)
        case Pair(a, b) | Ap(a, b):
            return fv_lambda(a) | fv_lambda(b)
        case When(s, l, r):
            return fv_lambda(s) | fv_lambda(l) | fv_lambda(r)
        case Lam(x, ty, body):
            return {p for p in fv_lambda(body) if p != (x, ty)}
        case AllI(_, _, body):
            return fv_lambda(body)
        case ExE(s, _, _, body):
            return fv_lambda(s) | fv_lambda(body)
    raise TypingError(f"not a lambda term: {t!r}")


def fv_star(t: LambdaTerm) -> set[tuple[str, str]]:
    """Logical variables free in the types of t's free lambda variables."""
    out: set[tuple[str, str]] = set()
    for _, ty in fv_lambda(t):
        out |= fv_formula(ty)
    return out


def lfv_lambda(t: LambdaTerm) -> set[tuple[str, str]]:
    """All logical variables occurring free anywhere in t.

    That includes type annotations, existential witnesses and instantiation
    indices; used for capture checks when pushing terms under logical binders.
    """
    match t:
        case LVar(_, ty):
            return fv_formula(ty)
        case Star():
            return set()
        case Absurd(a):
            return fv_formula(a)
        case AxApp(_, a):
            return lfv_lambda(a)
        case Fst(a) | Snd(a):
            return lfv_lambda(a)
        case Inl(other, a) | Inr(other, a):
            return fv_formula(other) | lfv_lambda(a)
        case Pair(a, b) | Ap(a, b):
            return lfv_lambda(a) | lfv_lambda(b)
        case When(s, l, r):
            return lfv_lambda(s) | lfv_lambda(l) | lfv_lambda(r)
        case Lam(_, ty, body):
            return fv_formula(ty) | lfv_lambda(body)
        case AllI(x, s, body):
            return lfv_lambda(body) - {(x, s)}
        case AllE(a, r):
            return lfv_lambda(a) | fv_term(r)
        case ExI(x, s, w, bt, a):
            return (fv_formula(bt) - {(x, s)}) | fv_term(w) | lfv_lambda(a)
        case ExE(sc, x, s, body):
            return lfv_lambda(sc) | (lfv_lambda(body) - {(x, s)})
    raise TypingError(f"not a lambda term: {t!r}")


# ---------------------------------------------------------------------------
# substitution into lambda terms

def subst_logical_in_lambda(
    t: LambdaTerm, sub: Mapping[tuple[str, str], LogicalTerm]
) -> LambdaTerm:
    """Substitute logical terms for logical variables throughout a lambda term."""
    if not sub:
        return t
    sf = lambda f: subst_formula(f, sub)  # noqa: E731
    st = lambda r: subst_term(r, sub)  # noqa: E731
    rec = lambda u: subst_logical_in_lambda(u, sub)  # noqa: E731
    match t:
        case LVar(x, ty):
            return LVar(x, sf(ty))
        case Star():
            return t
        case Absurd(a):
            return Absurd(sf(a))
        case AxApp(ax, a):
            return AxApp(ax, rec(a))
        case Fst(a):
            return Fst(rec(a))
        case Snd(a):
            return Snd(rec(a))
        case Inl(other, a):
            return Inl(sf(other), rec(a))
        case Inr(other, a):
            return Inr(sf(other), rec(a))
        case Pair(a, b):
            return Pair(rec(a), rec(b))
        case Ap(a, b):
            return Ap(rec(a), rec(b))
        case When(s, l, r):
            return When(rec(s), rec(l), rec(r))
        case Lam(x, ty, body):
            return Lam(x, sf(ty), rec(body))
        case AllI(x, s, body):
            inner = {k: v for k, v in sub.items() if k != (x, s)}
            if not inner:
                return t
            if x in _ranged_names(inner):
                x2 = fresh(x)
                body = subst_logical_in_lambda(body, {(x, s): Var(x2, s)})
                x = x2
            return AllI(x, s, subst_logical_in_lambda(body, inner))
        case AllE(a, r):
            return AllE(rec(a), st(r))
        case ExI(x, s, w, bt, a):
            inner = {k: v for k, v in sub.items() if k != (x, s)}
            if inner and x in _ranged_names(inner):
                x2 = fresh(x)
                bt = subst_formula(bt, {(x, s): Var(x2, s)})
                x = x2
            return ExI(x, s, st(w), subst_formula(bt, inner), rec(a))
        case ExE(sc, x, s, body):
            inner = {k: v for k, v in sub.items() if k != (x, s)}
            new_sc = rec(sc)
            if not inner:
                return ExE(new_sc, x, s, body)
            if x in _ranged_names(inner):
                x2 = fresh(x)
                body = subst_logical_in_lambda(body, {(x, s): Var(x2, s)})
                x = x2
            return ExE(new_sc, x, s, subst_logical_in_lambda(body, inner))
    raise TypingError(f"not a lambda term: {t!r}")


def subst_lambda(t: LambdaTerm, rep: LambdaTerm, var: str) -> LambdaTerm:
    """Capture-avoiding substitution of rep for the lambda variable var in t.

    Freshens both binder kinds: lambda binders that would capture a free
    lambda variable of rep, and logical binders that would capture a logical
    variable occurring in rep's annotations.
    """
    rep_fv = {n for n, _ in fv_lambda(rep)}
    rep_lfv = lfv_lambda(rep)

    def go(u: LambdaTerm) -> LambdaTerm:
        match u:
            case LVar(x, _):
                return rep if x == var else u
            case Star() | Absurd(_):
                return u
            case AxApp(ax, a):
                return AxApp(ax, go(a))
            case Fst(a):
                return Fst(go(a))
            case Snd(a):
                return Snd(go(a))
            case Inl(other, a):
                return Inl(other, go(a))
            case Inr(other, a):
                return Inr(other, go(a))
            case Pair(a, b):
                return Pair(go(a), go(b))
            case Ap(a, b):
                return Ap(go(a), go(b))
            case When(s, l, r):
                return When(go(s), go(l), go(r))
            case Lam(x, ty, body):
                if x == var:
                    return u
                if x in rep_fv:
                    x2 = fresh(x)
                    body = subst_lambda(body, LVar(x2, ty), x)
                    x = x2
                return Lam(x, ty, go(body))
            case AllI(x, s, body):
                if (x, s) in rep_lfv:
                    x2 = fresh(x)
                    body = subst_logical_in_lambda(body, {(x, s): Var(x2, s)})
                    x = x2
                return AllI(x, s, go(body))
            case AllE(a, r):
                return AllE(go(a), r)
            case ExI(x, s, w, bt, a):
                return ExI(x, s, w, bt, go(a))
            case ExE(sc, x, s, body):
                new_sc = go(sc)
                if (x, s) in rep_lfv:
                    x2 = fresh(x)
                    body = subst_logical_in_lambda(body, {(x, s): Var(x2, s)})
                    x = x2
                return ExE(new_sc, x, s, go(body))
        raise TypingError(f"not a lambda term: {u!r}")

    return go(t)


# ---------------------------------------------------------------------------
# alpha equality via canonical nameless keys

def _key_term(t: LogicalTerm, lenv: Mapping[str, int]) -> tuple:
    match t:
        case Var(x, s):
            if x in lenv:
                return ("bv", lenv[x])
            return ("v", x, s)
        case App(f, args):
            return ("app", f, tuple(_key_term(a, lenv) for a in args))
    raise SortError(f"not a logical term: {t!r}")


def _key_formula(f: Formula, lenv: Mapping[str, int], depth: int) -> tuple:
    match f:
        case One():
            return ("1",)
        case Zero():
            return ("0",)
        case Atom(r, args):
            return ("at", r, tuple(_key_term(a, lenv) for a in args))
        case Prod(a, b):
            return ("*", _key_formula(a, lenv, depth), _key_formula(b, lenv, depth))
        case Sum(a, b):
            return ("+", _key_formula(a, lenv, depth), _key_formula(b, lenv, depth))
        case Arrow(a, b):
            return ("->", _key_formula(a, lenv, depth), _key_formula(b, lenv, depth))
        case Forall(x, s, body):
            return ("all", s, _key_formula(body, {**lenv, x: depth}, depth + 1))
        case Exists(x, s, body):
            return ("ex", s, _key_formula(body, {**lenv, x: depth}, depth + 1))
    raise SortError(f"not a formula: {f!r}")


def alpha_key_formula(f: Formula) -> tuple:
    """Hashable canonical form; equal keys iff alpha-equal formulas."""
    return _key_formula(f, {}, 0)


def _key_lambda(
    t: LambdaTerm, lenv: Mapping[str, int], venv: Mapping[str, int], ld: int, vd: int
) -> tuple:
    kf = lambda f: _key_formula(f, lenv, ld)  # noqa: E731
    kt = lambda r: _key_term(r, lenv)  # noqa: E731
    go = lambda u: _key_lambda(u, lenv, venv, ld, vd)  # noqa: E731
    match t:
        case LVar(x, ty):
            if x in venv:
                return ("blv", venv[x])
            return ("lv", x, kf(ty))
        case Star():
            return ("st",)
        case Absurd(a):
            return ("ab", kf(a))
        case AxApp(ax, a):
            return ("ax", ax, go(a))
        case Fst(a):
            return ("fst", go(a))
        case Snd(a):
            return ("snd", go(a))
        case Inl(o, a):
            return ("inl", kf(o), go(a))
        case Inr(o, a):
            return ("inr", kf(o), go(a))
        case Pair(a, b):
            return ("pair", go(a), go(b))
        case Ap(a, b):
            return ("ap", go(a), go(b))
        case When(s, l, r):
            return ("when", go(s), go(l), go(r))
        case Lam(x, ty, body):
            return ("lam", kf(ty), _key_lambda(body, lenv, {**venv, x: vd}, ld, vd + 1))
        case AllI(x, s, body):
            return ("alli", s, _key_lambda(body, {**lenv, x: ld}, venv, ld + 1, vd))
        case AllE(a, r):
            return ("alle", go(a), kt(r))
        case ExI(x, s, w, bt, a):
            return ("exi", s, kt(w), _key_formula(bt, {**lenv, x: ld}, ld + 1), go(a))
        case ExE(sc, x, s, body):
            return ("exe", go(sc), s, _key_lambda(body, {**lenv, x: ld}, venv, ld + 1, vd))
    raise TypingError(f"not a lambda term: {t!r}")


def alpha_key_lambda(t: LambdaTerm) -> tuple:
    """Hashable canonical form; equal keys iff alpha-equal lambda terms."""
    return _key_lambda(t, {}, {}, 0, 0)


def alpha_eq_formula(a: Formula, b: Formula) -> bool:
    return a == b or alpha_key_formula(a) == alpha_key_formula(b)


def alpha_eq_lambda(a: LambdaTerm, b: LambdaTerm) -> bool:
    return a == b or alpha_key_lambda(a) == alpha_key_lambda(b)


# ---------------------------------------------------------------------------
# type inference

def _lookup(stack: list[tuple[str, Formula]], name: str) -> Optional[Formula]:
    for n, ty in reversed(stack):
        if n == name:
            return ty
    return None


def infer_type(sig: Signature, ctx: Iterable[tuple[str, Formula]], t: LambdaTerm) -> Formula:
    """Type of t in ctx, or raise TypingError.

    Enforces the side conditions on the quantifier constructors: AllI requires
    its bound variable absent from the types of the body's free lambda
    variables, ExE likewise for its minor body, and additionally absent from
    the result type.
    """
    stack = list(ctx)

    def go(u: LambdaTerm) -> Formula:
        match u:
            case LVar(x, ty):
                declared = _lookup(stack, x)
                if declared is None:
                    raise TypingError(f"unbound lambda variable {x}")
                if not alpha_eq_formula(declared, ty):
                    raise TypingError(f"variable {x} annotated {ty!r}, declared {declared!r}")
                return declared
            case Star():
                return ONE
            case Absurd(a):
                check_formula(sig, a)
                return Arrow(ZERO, a)
            case AxApp(ax, a):
                if ax not in sig.axioms:
                    raise TypingError(f"unknown axiom constant {ax}")
                decl = sig.axioms[ax]
                got = go(a)
                if not alpha_eq_formula(got, decl.dom):
                    raise TypingError(f"axiom {ax} wants {decl.dom!r}, got {got!r}")
                return decl.cod
            case Pair(a, b):
                return Prod(go(a), go(b))
            case Fst(a):
                ty = go(a)
                if not isinstance(ty, Prod):
                    raise TypingError(f"fst of non-product {ty!r}")
                return ty.left
            case Snd(a):
                ty = go(a)
                if not isinstance(ty, Prod):
                    raise TypingError(f"snd of non-product {ty!r}")
                return ty.right
            case Inl(other, a):
                check_formula(sig, other)
                return Sum(go(a), other)
            case Inr(other, a):
                check_formula(sig, other)
                return Sum(other, go(a))
            case When(s, l, r):
                sty = go(s)
                if not isinstance(sty, Sum):
                    raise TypingError(f"when on non-sum {sty!r}")
                lty, rty = go(l), go(r)
                if not isinstance(lty, Arrow) or not alpha_eq_formula(lty.dom, sty.left):
                    raise TypingError(f"when left branch {lty!r} does not consume {sty.left!r}")
                if not isinstance(rty, Arrow) or not alpha_eq_formula(rty.dom, sty.right):
                    raise TypingError(f"when right branch {rty!r} does not consume {sty.right!r}")
                if not alpha_eq_formula(lty.cod, rty.cod):
                    raise TypingError("when branches disagree on result type")
                return lty.cod
            case Lam(x, ty, body):
                check_formula(sig, ty)
                stack.append((x, ty))
                try:
                    bty = go(body)
                finally:
                    stack.pop()
                return Arrow(ty, bty)
            case Ap(a, b):
                aty = go(a)
                if not isinstance(aty, Arrow):
                    raise TypingError(f"application of non-arrow {aty!r}")
                bty = go(b)
                if not alpha_eq_formula(aty.dom, bty):
                    raise TypingError(f"argument type {bty!r} does not match {aty.dom!r}")
                return aty.cod
            case AllI(x, s, body):
                if s not in sig.sorts:
                    raise TypingError(f"unknown sort {s}")
                if (x, s) in fv_star(body):
                    raise TypingError(
                        f"variable {x}:{s} occurs in the types of free lambda variables"
                    )
                return Forall(x, s, go(body))
            case AllE(a, r):
                aty = go(a)
                if not isinstance(aty, Forall):
                    raise TypingError(f"instantiation of non-universal {aty!r}")
                if sort_of(sig, r) != aty.sort:
                    raise TypingError(f"index sort {sort_of(sig, r)}, wants {aty.sort}")
                return subst_formula(aty.body, {(aty.var, aty.sort): r})
            case ExI(x, s, w, bt, a):
                if s not in sig.sorts:
                    raise TypingError(f"unknown sort {s}")
                check_formula(sig, Exists(x, s, bt))
                if sort_of(sig, w) != s:
                    raise TypingError(f"witness sort {sort_of(sig, w)}, wants {s}")
                want = subst_formula(bt, {(x, s): w})
                got = go(a)
                if not alpha_eq_formula(got, want):
                    raise TypingError(f"existential body has {got!r}, wants {want!r}")
                return Exists(x, s, bt)
            case ExE(sc, x, s, body):
                scty = go(sc)
                if not isinstance(scty, Exists):
                    raise TypingError(f"elimination of non-existential {scty!r}")
                if scty.sort != s:
                    raise TypingError(f"binder sort {s}, scrutinee wants {scty.sort}")
                if (x, s) in fv_formula(scty):
                    raise TypingError(
                        f"variable {x}:{s} occurs free in the scrutinee type"
                    )
                bty = go(body)
                if not isinstance(bty, Arrow):
                    raise TypingError(f"existential body must be an arrow, got {bty!r}")
                opened = subst_formula(scty.body, {(scty.var, scty.sort): Var(x, s)})
                if not alpha_eq_formula(bty.dom, opened):
                    raise TypingError(f"body consumes {bty.dom!r}, wants {opened!r}")
                if (x, s) in fv_star(body):
                    raise TypingError(
                        f"variable {x}:{s} occurs in the types of free lambda variables"
                    )
                if (x, s) in fv_formula(bty.cod):
                    raise TypingError(f"variable {x}:{s} escapes into the result type")
                return bty.cod
        raise TypingError(f"not a lambda term: {u!r}")

    return go(t)


def check_context(sig: Signature, ctx: Iterable[tuple[str, Formula]]) -> None:
    seen: set[str] = set()
    for name, ty in ctx:
        if name in seen:
            raise TypingError(f"duplicate context variable {name}")
        seen.add(name)
        check_formula(sig, ty)


def check_term_in_context(sig: Signature, tic: TermInContext) -> bool:
    """True iff the context is well formed, the term types, and the stated
    type matches up to alpha."""
    try:
        check_context(sig, tic.ctx)
        got = infer_type(sig, tic.ctx, tic.term)
    except LanguageError:
        return False
    names = {n for n, _ in fv_lambda(tic.term)}
    if not names <= {n for n, _ in tic.ctx}:
        return False
    return alpha_eq_formula(got, tic.type)


def check_equality_in_context(sig: Signature, eq: EqualityInContext) -> bool:
    """True iff both sides type at the stated type in the stated context."""
    return check_term_in_context(
        sig, TermInContext(eq.ctx, eq.lhs, eq.type)
    ) and check_term_in_context(sig, TermInContext(eq.ctx, eq.rhs, eq.type))


def term_size(t: LambdaTerm) -> int:
    match t:
        case LVar(_, _) | Star() | Absurd(_):
            return 1
        case AxApp(_, a) | Fst(a) | Snd(a) | Inl(_, a) | Inr(_, a) | AllE(a, _) | ExI(_, _, _, _, a) | AllI(_, _, a) | Lam(_, _, a):
            return 1 + term_size(a)
        case Pair(a, b) | Ap(a, b) | ExE(a, _, _, b):
            return 1 + term_size(a) + term_size(b)
        case When(s, l, r):
            return 1 + term_size(s) + term_size(l) + term_size(r)
    raise TypingError(f"not a lambda term: {t!r}")
