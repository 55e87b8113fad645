"""Directed rewriting and the decision procedure for term equality.

The equational theory is presented as 25 tagged rule schemas.  The beta-like
schemas and the commuting conversions are oriented into a rewrite system
(x1 x2 p0 p1 a0 f0 e0 e4 e3 p2, then the eta contractions x3 a1); x0 is
applied type-directed during comparison, p3 becomes the inconsistent-context
shortcut, e2 is an expansion whose content the e4 contraction recovers, and
the congruences eq5..eq7 license rewriting under binders.  decide_eq
normalizes, then compares extensionally at 1 / product / arrow / forall,
splits context variables of unit, product or sum type at stuck comparisons,
and finally closes under theory axioms by a depth-bounded bidirectional
search.  Equal verdicts carry replayable traces plus the tags of the rules
the decision leaned on; NotEqual verdicts carry the search bound and are
qualified whenever axioms are present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .syntax import (
    Absurd,
    AllE,
    AllI,
    Ap,
    Arrow,
    AxApp,
    Context,
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
    LVar,
    ONE,
    One,
    Pair,
    Prod,
    Signature,
    Snd,
    STAR,
    Star,
    Sum,
    TypingError,
    Var,
    When,
    Zero,
    ZERO,
    alpha_eq_formula,
    alpha_eq_lambda,
    alpha_key_lambda,
    check_equality_in_context,
    fresh,
    fv_formula,
    fv_lambda,
    infer_type,
    lfv_lambda,
    subst_formula,
    subst_lambda,
    subst_logical_in_lambda,
    term_size,
)


class RewriteError(LanguageError):
    """The step budget ran out; signals a non-terminating orientation."""


class SchemaError(LanguageError):
    """A rule instantiation violates its schema's side conditions."""


RULE_IDS = (
    "eq0", "eq1", "eq2", "eq3", "eq4", "eq5", "eq6", "eq7",
    "x0", "x1", "x2", "x3",
    "p0", "p1", "p2", "p3",
    "a0", "a1",
    "f0", "f1",
    "e0", "e1", "e2", "e3", "e4",
)

CONGRUENCE_SCHEMAS = ("eq5", "eq6", "eq7")
AXIOM_SCHEMAS = (
    "eq2", "x0", "x1", "x2", "x3", "p0", "p1", "p2", "p3",
    "a0", "a1", "f0", "e0", "e2", "e3", "e4",
)
PREMISE_SCHEMAS = ("eq0", "eq1", "eq3", "eq4", "f1", "e1")

# order in which oriented rules are tried at each position
REWRITE_ORDER = (
    "x1", "x2", "p0", "p1", "a0", "f0", "e0", "e4", "e3", "p2", "x3", "a1",
)

DEFAULT_BUDGET = 10_000
DEFAULT_DEPTH = 6


@dataclass(frozen=True)
class TraceStep:
    rule: str
    pos: tuple[int, ...]
    before: LambdaTerm
    after: LambdaTerm


RewriteTrace = tuple[TraceStep, ...]


@dataclass(frozen=True)
class Theory:
    sig: Signature
    axioms: tuple[EqualityInContext, ...] = ()


def check_theory(th: Theory) -> bool:
    return all(check_equality_in_context(th.sig, ax) for ax in th.axioms)


@dataclass(frozen=True)
class Equal:
    rules: tuple[str, ...]
    lhs_trace: RewriteTrace = ()
    rhs_trace: RewriteTrace = ()


@dataclass(frozen=True)
class NotEqual:
    bound: int
    qualified: bool
    reason: str = ""


Verdict = Union[Equal, NotEqual]


# ---------------------------------------------------------------------------
# positions

def children(t: LambdaTerm) -> tuple[LambdaTerm, ...]:
    """Immediate lambda subterms, in a fixed order used by trace positions."""
    match t:
        case LVar(_, _) | Star() | Absurd(_):
            return ()
        case AxApp(_, a) | Fst(a) | Snd(a) | Inl(_, a) | Inr(_, a):
            return (a,)
        case AllE(a, _) | ExI(_, _, _, _, a) | AllI(_, _, a) | Lam(_, _, a):
            return (a,)
        case Pair(a, b) | Ap(a, b) | ExE(a, _, _, b):
            return (a, b)
        case When(s, l, r):
            return (s, l, r)
    raise TypingError(f"not a lambda term: {t!r}")


def _with_children(t: LambdaTerm, kids: tuple[LambdaTerm, ...]) -> LambdaTerm:
    match t:
        case LVar(_, _) | Star() | Absurd(_):
            return t
        case AxApp(ax, _):
            return AxApp(ax, kids[0])
        case Fst(_):
            return Fst(kids[0])
        case Snd(_):
            return Snd(kids[0])
        case Inl(o, _):
            return Inl(o, kids[0])
        case Inr(o, _):
            return Inr(o, kids[0])
        case AllE(_, r):
            return AllE(kids[0], r)
        case ExI(x, s, w, bt, _):
            return ExI(x, s, w, bt, kids[0])
        case AllI(x, s, _):
            return AllI(x, s, kids[0])
        case Lam(x, d, _):
            return Lam(x, d, kids[0])
        case Pair(_, _):
            return Pair(kids[0], kids[1])
        case Ap(_, _):
            return Ap(kids[0], kids[1])
        case ExE(_, x, s, _):
            return ExE(kids[0], x, s, kids[1])
        case When(_, _, _):
            return When(kids[0], kids[1], kids[2])
    raise TypingError(f"not a lambda term: {t!r}")


def subterm_at(t: LambdaTerm, pos: tuple[int, ...]) -> LambdaTerm:
    for i in pos:
        t = children(t)[i]
    return t


def replace_at(t: LambdaTerm, pos: tuple[int, ...], new: LambdaTerm) -> LambdaTerm:
    if not pos:
        return new
    kids = list(children(t))
    kids[pos[0]] = replace_at(kids[pos[0]], pos[1:], new)
    return _with_children(t, tuple(kids))


def _binders_for_child(t: LambdaTerm, i: int) -> tuple[tuple[str, Formula], ...]:
    """Lambda binders brought into scope for child i of t."""
    if isinstance(t, Lam) and i == 0:
        return ((t.var, t.dom),)
    return ()


def env_at(ctx: Context, t: LambdaTerm, pos: tuple[int, ...]) -> tuple:
    """The typing stack (context plus crossed lambda binders) at a position."""
    env = tuple(ctx)
    for i in pos:
        env = env + _binders_for_child(t, i)
        t = children(t)[i]
    return env


# ---------------------------------------------------------------------------
# the oriented rules

def _exi_pattern(y: str, s: str, c: Formula, z: str) -> ExI:
    # exI over the generic witness y with argument z, as used by e2 and e4
    return ExI(y, s, Var(y, s), c, LVar(z, c))


def _abstract_pattern(
    body: LambdaTerm, pat: LambdaTerm, w: str, wty: Formula, y: str, z: str
) -> Optional[LambdaTerm]:
    """Replace occurrences of pat in body by the variable w.

    Subtrees where y or z is rebound are left alone: an alpha-equal node
    there refers to different binders.  Returns None when body keeps a free
    z or y outside the replaced occurrences, since then body is not of the
    form b[pat/w].
    """

    def go(u: LambdaTerm) -> LambdaTerm:
        if alpha_eq_lambda(u, pat):
            return LVar(w, wty)
        match u:
            case Lam(x, _, _) if x == z:
                return u
            case AllI(x, _, _) if x == y:
                return u
            case ExI(x, s2, w2, bt2, a2) if x == y:
                # the binder only scopes over the body annotation
                return ExI(x, s2, w2, bt2, go(a2))
            case ExE(sc, x, s2, b) if x == y:
                return ExE(go(sc), x, s2, b)
        return _with_children(u, tuple(go(k) for k in children(u)))

    b = go(body)
    if any(n == z for n, _ in fv_lambda(b)):
        return None
    if any(n == y for n, _ in lfv_lambda(b)):
        return None
    return b


def try_rule(sig: Signature, env: tuple, t: LambdaTerm, rule: str) -> Optional[LambdaTerm]:
    """Apply one oriented rule at the root of t, or return None."""
    match rule:
        case "x1":
            if isinstance(t, Fst) and isinstance(t.arg, Pair):
                return t.arg.left
        case "x2":
            if isinstance(t, Snd) and isinstance(t.arg, Pair):
                return t.arg.right
        case "p0":
            if isinstance(t, When) and isinstance(t.scrut, Inl):
                return Ap(t.left, t.scrut.arg)
        case "p1":
            if isinstance(t, When) and isinstance(t.scrut, Inr):
                return Ap(t.right, t.scrut.arg)
        case "a0":
            if isinstance(t, Ap) and isinstance(t.fun, Lam):
                return subst_lambda(t.fun.body, t.arg, t.fun.var)
        case "f0":
            if isinstance(t, AllE) and isinstance(t.arg, AllI):
                a = t.arg
                return subst_logical_in_lambda(a.body, {(a.var, a.sort): t.index})
        case "e0":
            if isinstance(t, ExE) and isinstance(t.scrut, ExI):
                i = t.scrut
                v = subst_logical_in_lambda(t.body, {(t.var, t.sort): i.witness})
                return Ap(v, i.arg)
        case "e4":
            if isinstance(t, ExE) and isinstance(t.body, Lam):
                lam = t.body
                pat = _exi_pattern(t.var, t.sort, lam.dom, lam.var)
                w = fresh("w")
                wty = Exists(t.var, t.sort, lam.dom)
                b = _abstract_pattern(lam.body, pat, w, wty, t.var, lam.var)
                if b is not None:
                    return subst_lambda(b, t.scrut, w)
        case "e3":
            if isinstance(t, ExE) and isinstance(t.scrut, ExE) and isinstance(
                t.scrut.body, Lam
            ):
                inner, lam = t.scrut, t.scrut.body
                y1, z = fresh(inner.var), fresh(lam.var)
                body = subst_lambda(lam.body, LVar(z, lam.dom), lam.var)
                body = subst_logical_in_lambda(
                    body, {(inner.var, inner.sort): Var(y1, inner.sort)}
                )
                dom = subst_formula(
                    lam.dom, {(inner.var, inner.sort): Var(y1, inner.sort)}
                )
                return ExE(
                    inner.scrut, y1, inner.sort,
                    Lam(z, dom, ExE(body, t.var, t.sort, t.body)),
                )
        case "p2":
            if isinstance(t, When) and isinstance(t.scrut, When):
                w = t.scrut
                t1 = infer_type(sig, env, w.left)
                t2 = infer_type(sig, env, w.right)
                if isinstance(t1, Arrow) and isinstance(t2, Arrow):
                    y1, y2 = fresh("y"), fresh("y")
                    return When(
                        w.scrut,
                        Lam(y1, t1.dom,
                            When(Ap(w.left, LVar(y1, t1.dom)), t.left, t.right)),
                        Lam(y2, t2.dom,
                            When(Ap(w.right, LVar(y2, t2.dom)), t.left, t.right)),
                    )
        case "x3":
            if (
                isinstance(t, Pair)
                and isinstance(t.left, Fst)
                and isinstance(t.right, Snd)
                and alpha_eq_lambda(t.left.arg, t.right.arg)
            ):
                return t.left.arg
        case "a1":
            if (
                isinstance(t, Lam)
                and isinstance(t.body, Ap)
                and isinstance(t.body.arg, LVar)
                and t.body.arg.name == t.var
                and alpha_eq_formula(t.body.arg.type, t.dom)
                and not any(n == t.var for n, _ in fv_lambda(t.body.fun))
            ):
                return t.body.fun
    return None


# ---------------------------------------------------------------------------
# theory axioms as extra rewrite rules

@dataclass(frozen=True)
class OrientedAxiom:
    tag: str                       # trace rule id, th<i> in theory order
    metas: tuple[tuple[str, Formula], ...]
    lhs: LambdaTerm
    rhs: LambdaTerm


def _match_axiom(
    sig: Signature,
    env: tuple,
    pat: LambdaTerm,
    t: LambdaTerm,
    metas: Mapping[str, Formula],
    bnd: dict,
) -> bool:
    """First-order matching; metavariables are the axiom's context variables.

    The structural recursion never enters a binder, so metavariables are
    instantiated only at binder-free positions of the pattern and no capture
    can occur; binder-headed pattern nodes must match up to alpha exactly.
    """
    if isinstance(pat, LVar) and pat.name in metas:
        if pat.name in bnd:
            return alpha_eq_lambda(bnd[pat.name], t)
        try:
            got = infer_type(sig, env, t)
        except LanguageError:
            return False
        if not alpha_eq_formula(got, metas[pat.name]):
            return False
        bnd[pat.name] = t
        return True
    if type(pat) is not type(t):
        return False
    match pat, t:
        case (LVar(a, ta), LVar(b, tb)):
            return a == b and alpha_eq_formula(ta, tb)
        case (Star(), Star()):
            return True
        case (Absurd(a), Absurd(b)):
            return alpha_eq_formula(a, b)
        case (AxApp(n1, a), AxApp(n2, b)):
            return n1 == n2 and _match_axiom(sig, env, a, b, metas, bnd)
        case (Fst(a), Fst(b)) | (Snd(a), Snd(b)):
            return _match_axiom(sig, env, a, b, metas, bnd)
        case (Inl(o1, a), Inl(o2, b)) | (Inr(o1, a), Inr(o2, b)):
            return alpha_eq_formula(o1, o2) and _match_axiom(sig, env, a, b, metas, bnd)
        case (Pair(a1, a2), Pair(b1, b2)) | (Ap(a1, a2), Ap(b1, b2)):
            return _match_axiom(sig, env, a1, b1, metas, bnd) and _match_axiom(
                sig, env, a2, b2, metas, bnd
            )
        case (When(s1, l1, r1), When(s2, l2, r2)):
            return all(
                _match_axiom(sig, env, a, b, metas, bnd)
                for a, b in ((s1, s2), (l1, l2), (r1, r2))
            )
        case (AllE(a, r1), AllE(b, r2)):
            return r1 == r2 and _match_axiom(sig, env, a, b, metas, bnd)
        case _:
            return alpha_eq_lambda(pat, t)


def orient_axioms(th: Theory) -> tuple[tuple[OrientedAxiom, ...], tuple[int, ...]]:
    """Split theory axioms into size-decreasing rewrites and search-only ones.

    An axiom joins the rewrite set when one side is strictly larger and every
    context variable occurs in the small side at most as often as in the
    large side, so instances shrink too; the rest are returned by index for
    the bounded search.
    """
    oriented: list[OrientedAxiom] = []
    loose: list[int] = []

    def occurrences(t: LambdaTerm, name: str) -> int:
        n = 1 if isinstance(t, LVar) and t.name == name else 0
        return n + sum(occurrences(k, name) for k in children(t))

    for i, ax in enumerate(th.axioms):
        metas = tuple(ax.ctx)
        done = False
        for big, small in ((ax.lhs, ax.rhs), (ax.rhs, ax.lhs)):
            if term_size(big) > term_size(small) and all(
                occurrences(small, n) <= occurrences(big, n) for n, _ in metas
            ):
                oriented.append(OrientedAxiom(f"th{i}", metas, big, small))
                done = True
                break
        if not done:
            loose.append(i)
    return tuple(oriented), tuple(loose)


def _try_axiom(
    sig: Signature, env: tuple, t: LambdaTerm, ax: OrientedAxiom
) -> Optional[LambdaTerm]:
    bnd: dict = {}
    if not _match_axiom(sig, env, ax.lhs, t, dict(ax.metas), bnd):
        return None
    unmatched = {n for n, _ in ax.metas} - set(bnd)
    if any(n in unmatched for n, _ in fv_lambda(ax.rhs)):
        # a variable of the result side was not pinned down by the match;
        # callers that want such axioms must ground them first
        return None
    out = ax.rhs
    # simultaneous substitution: go through temporaries to dodge collisions
    temps = {n: fresh(n) for n, _ in ax.metas}
    for n, ty in ax.metas:
        out = subst_lambda(out, LVar(temps[n], ty), n)
    for n, _ in ax.metas:
        if n in bnd:
            out = subst_lambda(out, bnd[n], temps[n])
    return out


# ---------------------------------------------------------------------------
# stepping and normalization

def _step_once(
    sig: Signature,
    env: tuple,
    t: LambdaTerm,
    extra: tuple[OrientedAxiom, ...],
    pos: tuple[int, ...],
) -> Optional[tuple[tuple[int, ...], str, LambdaTerm, LambdaTerm]]:
    for i, kid in enumerate(children(t)):
        found = _step_once(
            sig, env + _binders_for_child(t, i), kid, extra, pos + (i,)
        )
        if found is not None:
            return found
    for rule in REWRITE_ORDER:
        out = try_rule(sig, env, t, rule)
        if out is not None:
            return (pos, rule, t, out)
    for ax in extra:
        out = _try_axiom(sig, env, t, ax)
        if out is not None:
            return (pos, ax.tag, t, out)
    return None


def step(
    sig: Signature, ctx: Context, t: LambdaTerm,
    extra: tuple[OrientedAxiom, ...] = (),
) -> Optional[tuple[LambdaTerm, str, tuple[int, ...]]]:
    """One leftmost-innermost rewrite step, or None when t is normal."""
    found = _step_once(sig, tuple(ctx), t, extra, ())
    if found is None:
        return None
    pos, rule, _, after = found
    return replace_at(t, pos, after), rule, pos


def normalize(
    sig: Signature, ctx: Context, t: LambdaTerm,
    budget: int = DEFAULT_BUDGET,
    extra: tuple[OrientedAxiom, ...] = (),
) -> tuple[LambdaTerm, RewriteTrace]:
    """Rewrite to a fixpoint, recording each step; error past the budget."""
    trace: list[TraceStep] = []
    cur = t
    for _ in range(budget):
        found = _step_once(sig, tuple(ctx), cur, extra, ())
        if found is None:
            return cur, tuple(trace)
        pos, rule, before, after = found
        trace.append(TraceStep(rule, pos, before, after))
        cur = replace_at(cur, pos, after)
    raise RewriteError(f"no normal form within {budget} steps")


def replay_trace(
    sig: Signature, ctx: Context, t: LambdaTerm, trace: RewriteTrace,
    extra: tuple[OrientedAxiom, ...] = (),
) -> LambdaTerm:
    """Re-run a trace, verifying each step is an instance of its rule."""
    by_tag = {ax.tag: ax for ax in extra}
    cur = t
    for st in trace:
        sub = subterm_at(cur, st.pos)
        if not alpha_eq_lambda(sub, st.before):
            raise RewriteError(f"trace mismatch at {st.pos}: not the recorded redex")
        env = env_at(ctx, cur, st.pos)
        if st.rule in by_tag:
            redo = _try_axiom(sig, env, sub, by_tag[st.rule])
        else:
            redo = try_rule(sig, env, sub, st.rule)
        if redo is None or not alpha_eq_lambda(redo, st.after):
            raise RewriteError(f"step at {st.pos} is not an instance of {st.rule}")
        cur = replace_at(cur, st.pos, st.after)
    return cur


# ---------------------------------------------------------------------------
# the decision procedure

def _splittable(ty: Formula) -> bool:
    return isinstance(ty, (One, Prod, Sum))


def _ctx_replace(
    ctx: Context, name: str, repl: tuple[tuple[str, Formula], ...]
) -> Context:
    out = []
    for n, ty in ctx:
        if n == name:
            out.extend(repl)
        else:
            out.append((n, ty))
    return tuple(out)


def _candidate_pool(
    ctx: Context, a: LambdaTerm, b: LambdaTerm
) -> tuple[LambdaTerm, ...]:
    """Terms available for grounding axiom variables: the unit element, the
    hypotheses, and every subterm of the endpoints that lives in the context.
    """
    names = {n for n, _ in ctx}
    found: dict = {alpha_key_lambda(STAR): STAR}
    for n, ty in ctx:
        v = LVar(n, ty)
        found.setdefault(alpha_key_lambda(v), v)
    stack = [a, b]
    while stack:
        t = stack.pop()
        stack.extend(children(t))
        if all(n in names for n, _ in fv_lambda(t)):
            found.setdefault(alpha_key_lambda(t), t)
    return tuple(found.values())


def decide_eq(
    eq: EqualityInContext,
    th: Theory,
    depth: int = DEFAULT_DEPTH,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Decide an equality-in-context against a theory.

    Equal verdicts are backed by the two normalization traces plus the tags
    of every rule the comparison leaned on; NotEqual verdicts report the
    search depth and are qualified whenever the theory has axioms.
    """
    sig = th.sig
    if not check_equality_in_context(sig, eq):
        raise TypingError("equality-in-context does not typecheck")
    oriented, loose_idx = orient_axioms(th)
    tags: list[str] = []

    def note(*rules: str) -> None:
        for r in rules:
            if r not in tags:
                tags.append(r)

    def norm(ctx: Context, t: LambdaTerm) -> LambdaTerm:
        nf, tr = normalize(sig, ctx, t, budget, oriented)
        note(*(st.rule for st in tr))
        return nf

    def go(ctx: Context, a: LambdaTerm, b: LambdaTerm, ty: Formula) -> bool:
        if any(isinstance(t, Zero) for _, t in ctx):
            note("p3")
            return True
        a, b = norm(ctx, a), norm(ctx, b)
        match ty:
            case One():
                note("x0")
                return True
            case Prod(l, r):
                note("x3", "eq1")
                return go(ctx, Fst(a), Fst(b), l) and go(ctx, Snd(a), Snd(b), r)
            case Arrow(l, r):
                note("a1", "eq5")
                w = fresh("v")
                ctx2 = ctx + ((w, l),)
                return go(ctx2, Ap(a, LVar(w, l)), Ap(b, LVar(w, l)), r)
            case Forall(z, s, body):
                note("f1")
                y = fresh(z)
                inst = subst_formula(body, {(z, s): Var(y, s)})
                return go(ctx, AllE(a, Var(y, s)), AllE(b, Var(y, s)), inst)
        if alpha_eq_lambda(a, b):
            note("eq2")
            return True
        free = {n for n, _ in fv_lambda(a) | fv_lambda(b)}
        for name, vty in ctx:
            if name not in free or not _splittable(vty):
                continue
            if isinstance(vty, One):
                ctx2 = _ctx_replace(ctx, name, ())
                if go(ctx2, subst_lambda(a, STAR, name), subst_lambda(b, STAR, name), ty):
                    note("split", "x0")
                    return True
            elif isinstance(vty, Prod):
                n1, n2 = fresh(name), fresh(name)
                rep = Pair(LVar(n1, vty.left), LVar(n2, vty.right))
                ctx2 = _ctx_replace(ctx, name, ((n1, vty.left), (n2, vty.right)))
                if go(ctx2, subst_lambda(a, rep, name), subst_lambda(b, rep, name), ty):
                    note("split", "x3")
                    return True
            else:
                n1, n2 = fresh(name), fresh(name)
                li = Inl(vty.right, LVar(n1, vty.left))
                ri = Inr(vty.left, LVar(n2, vty.right))
                cl = _ctx_replace(ctx, name, ((n1, vty.left),))
                cr = _ctx_replace(ctx, name, ((n2, vty.right),))
                if go(cl, subst_lambda(a, li, name), subst_lambda(b, li, name), ty) and go(
                    cr, subst_lambda(a, ri, name), subst_lambda(b, ri, name), ty
                ):
                    note("split")
                    return True
        if th.axioms:
            used = _axiom_join(ctx, a, b)
            if used is not None:
                note("eq0", "eq4", *sorted(used))
                return True
        return False

    def _axiom_join(
        ctx: Context, a: LambdaTerm, b: LambdaTerm
    ) -> Optional[set[str]]:
        # bidirectional breadth-first closure under the axioms (the oriented
        # ones are folded into normalization, but both directions matter
        # here); returns the tags used on a meeting path, or None
        pool = _candidate_pool(ctx, a, b)

        def directions(tag: str, metas, lhs: LambdaTerm, rhs: LambdaTerm):
            # a variable occurring only in the result side cannot be fixed
            # by matching, so ground it from the candidate pool up front
            matched = {n for n, _ in fv_lambda(lhs)}
            onesided = [
                (n, mty) for n, mty in metas
                if n not in matched and any(m == n for m, _ in fv_lambda(rhs))
            ]
            combos: list[dict] = [{}]
            for n, mty in onesided:
                fits = []
                for cand in pool:
                    try:
                        got = infer_type(sig, ctx, cand)
                    except LanguageError:
                        continue
                    if alpha_eq_formula(got, mty):
                        fits.append(cand)
                combos = [c | {n: x} for c in combos for x in fits][:200]
            tys = dict(metas)
            for c in combos:
                kept = tuple((n, mty) for n, mty in metas if n not in c)
                yield OrientedAxiom(
                    tag, kept, lhs,
                    _simultaneous_subst(rhs, {n: (c[n], tys[n]) for n in c}),
                )

        rules: list[OrientedAxiom] = []
        for i in loose_idx:
            ax = th.axioms[i]
            metas = tuple(ax.ctx)
            rules.extend(directions(f"th{i}", metas, ax.lhs, ax.rhs))
            rules.extend(directions(f"th{i}", metas, ax.rhs, ax.lhs))
        for ax in oriented:
            rules.append(ax)
            rules.extend(directions(ax.tag, ax.metas, ax.rhs, ax.lhs))

        def neighbors(t: LambdaTerm) -> Iterable[tuple[LambdaTerm, str]]:
            stack = [((), t)]
            positions = []
            while stack:
                p, u = stack.pop()
                positions.append(p)
                for i, k in enumerate(children(u)):
                    stack.append((p + (i,), k))
            for p in positions:
                sub = subterm_at(t, p)
                env = env_at(ctx, t, p)
                for rl in rules:
                    got = _try_axiom(sig, env, sub, rl)
                    if got is not None:
                        try:
                            yield norm(ctx, replace_at(t, p, got)), rl.tag
                        except RewriteError:
                            continue

        seen_a = {alpha_key_lambda(a): frozenset()}
        seen_b = {alpha_key_lambda(b): frozenset()}
        front_a, front_b = [a], [b]

        def meet() -> Optional[set[str]]:
            common = set(seen_a) & set(seen_b)
            if not common:
                return None
            k = next(iter(common))
            return set(seen_a[k] | seen_b[k])

        for _ in range(depth):
            got = meet()
            if got is not None:
                return got
            if not front_a and not front_b:
                break
            for front, seen, nxt in (
                (front_a, seen_a, new_a := []),
                (front_b, seen_b, new_b := []),
            ):
                for t in front:
                    base = seen[alpha_key_lambda(t)]
                    for u, tag in neighbors(t):
                        k = alpha_key_lambda(u)
                        if k not in seen and len(seen) < 2000:
                            seen[k] = base | {tag}
                            nxt.append(u)
            front_a, front_b = new_a, new_b
        return meet()

    if any(isinstance(t, Zero) for _, t in eq.ctx):
        return Equal(("p3",))
    _, lhs_trace = normalize(sig, eq.ctx, eq.lhs, budget, oriented)
    _, rhs_trace = normalize(sig, eq.ctx, eq.rhs, budget, oriented)
    if go(eq.ctx, eq.lhs, eq.rhs, eq.type):
        return Equal(tuple(tags), lhs_trace, rhs_trace)
    return NotEqual(depth, bool(th.axioms), "no derivation found")


# ---------------------------------------------------------------------------
# schema instantiation: the 22 non-congruence rules

def _simultaneous_subst(
    t: LambdaTerm, subs: Mapping[str, tuple[LambdaTerm, Formula]]
) -> LambdaTerm:
    temps = {n: fresh(n) for n in subs}
    for n, (_, ty) in subs.items():
        t = subst_lambda(t, LVar(temps[n], ty), n)
    for n, (rep, _) in subs.items():
        t = subst_lambda(t, rep, temps[n])
    return t


def instantiate_rule(
    sig: Signature, rule: str, b: Mapping
) -> tuple[tuple[EqualityInContext, ...], EqualityInContext]:
    """Build (premises, conclusion) for a schema from named bindings.

    Axiom schemas are taken up to substitution instances (their printed
    context variables replaced by arbitrary well-typed terms, which is the
    eq0 closure); premise schemas take their premises as given equalities.
    Raises SchemaError when a binding breaks a side condition.
    """

    def ty_of(ctx: Context, t: LambdaTerm) -> Formula:
        try:
            return infer_type(sig, ctx, t)
        except LanguageError as e:
            raise SchemaError(f"{rule}: binding does not typecheck: {e}") from e

    def conclude(ctx, lhs, rhs, ty) -> tuple[tuple[EqualityInContext, ...], EqualityInContext]:
        eq = EqualityInContext(tuple(ctx), lhs, rhs, ty)
        if not check_equality_in_context(sig, eq):
            raise SchemaError(f"{rule}: instantiated conclusion does not typecheck")
        return (), eq

    match rule:
        case "eq2":
            ctx, t = b["ctx"], b["t"]
            return conclude(ctx, t, t, ty_of(ctx, t))
        case "x0":
            ctx, t = b["ctx"], b["t"]
            if not isinstance(ty_of(ctx, t), One):
                raise SchemaError("x0: term must have the unit type")
            return conclude(ctx, t, STAR, ONE)
        case "x1":
            ctx, s, t = b["ctx"], b["s"], b["t"]
            ty_of(ctx, t)
            return conclude(ctx, Fst(Pair(s, t)), s, ty_of(ctx, s))
        case "x2":
            ctx, s, t = b["ctx"], b["s"], b["t"]
            ty_of(ctx, s)
            return conclude(ctx, Snd(Pair(s, t)), t, ty_of(ctx, t))
        case "x3":
            ctx, u = b["ctx"], b["u"]
            ty = ty_of(ctx, u)
            if not isinstance(ty, Prod):
                raise SchemaError("x3: term must have a product type")
            return conclude(ctx, Pair(Fst(u), Snd(u)), u, ty)
        case "p0":
            ctx, a, t, s, other = b["ctx"], b["a"], b["t"], b["s"], b["other"]
            tt = ty_of(ctx, t)
            if not isinstance(tt, Arrow):
                raise SchemaError("p0: left branch must be an arrow")
            return conclude(ctx, When(Inl(other, a), t, s), Ap(t, a), tt.cod)
        case "p1":
            ctx, a, t, s, other = b["ctx"], b["a"], b["t"], b["s"], b["other"]
            st = ty_of(ctx, s)
            if not isinstance(st, Arrow):
                raise SchemaError("p1: right branch must be an arrow")
            return conclude(ctx, When(Inr(other, a), t, s), Ap(s, a), st.cod)
        case "p2":
            ctx = b["ctx"]
            x0, x1, x2, x3, x4 = (b[k] for k in ("x0", "x1", "x2", "x3", "x4"))
            t1, t2, t3 = ty_of(ctx, x1), ty_of(ctx, x2), ty_of(ctx, x3)
            if not (isinstance(t1, Arrow) and isinstance(t2, Arrow) and isinstance(t3, Arrow)):
                raise SchemaError("p2: branch bindings must be arrows")
            y1, y2 = fresh("y"), fresh("y")
            lhs = When(When(x0, x1, x2), x3, x4)
            rhs = When(
                x0,
                Lam(y1, t1.dom, When(Ap(x1, LVar(y1, t1.dom)), x3, x4)),
                Lam(y2, t2.dom, When(Ap(x2, LVar(y2, t2.dom)), x3, x4)),
            )
            return conclude(ctx, lhs, rhs, t3.cod)
        case "p3":
            ctx, u, v = b["ctx"], b["u"], b["v"]
            if not isinstance(ty_of(ctx, v), Zero):
                raise SchemaError("p3: second binding must have the empty type")
            ty = ty_of(ctx, u)
            return conclude(ctx, Ap(Absurd(ty), v), u, ty)
        case "a0":
            ctx, y, c, s, t = b["ctx"], b["y"], b["C"], b["s"], b["t"]
            lhs = Ap(Lam(y, c, s), t)
            rhs = subst_lambda(s, t, y)
            return conclude(ctx, lhs, rhs, ty_of(ctx, lhs))
        case "a1":
            ctx, t, y, c = b["ctx"], b["t"], b["y"], b["C"]
            if any(n == y for n, _ in fv_lambda(t)):
                raise SchemaError("a1: bound variable occurs free in the body")
            ty = ty_of(ctx, t)
            if not (isinstance(ty, Arrow) and alpha_eq_formula(ty.dom, c)):
                raise SchemaError("a1: term must be an arrow from the annotation")
            return conclude(ctx, Lam(y, c, Ap(t, LVar(y, c))), t, ty)
        case "f0":
            ctx, z, s, t, r = b["ctx"], b["z"], b["s"], b["t"], b["r"]
            lhs = AllE(AllI(z, s, t), r)
            rhs = subst_logical_in_lambda(t, {(z, s): r})
            return conclude(ctx, lhs, rhs, ty_of(ctx, lhs))
        case "e0":
            ctx, z, s, r, c, t, y, v = (
                b["ctx"], b["z"], b["s"], b["r"], b["C"], b["t"], b["y"], b["v"]
            )
            lhs = ExE(ExI(z, s, r, c, t), y, s, v)
            rhs = Ap(subst_logical_in_lambda(v, {(y, s): r}), t)
            return conclude(ctx, lhs, rhs, ty_of(ctx, lhs))
        case "e2":
            ctx, v, w = b["ctx"], b["v"], b["w"]
            ety = dict(ctx).get(v)
            if not isinstance(ety, Exists):
                raise SchemaError("e2: the named variable must have an existential type")
            y, s, aty = ety.var, ety.sort, ety.body
            wty = ty_of(ctx, w)
            if (y, s) in lfv_lambda(w) or (y, s) in fv_formula(wty):
                raise SchemaError("e2: the existential's binder occurs free in the term")
            z = fresh("z")
            rep = _exi_pattern(y, s, aty, z)
            rhs = ExE(LVar(v, ety), y, s, Lam(z, aty, subst_lambda(w, rep, v)))
            return conclude(ctx, w, rhs, wty)
        case "e3":
            ctx, a, y, s, z, d, bb, y2, s2, c = (
                b["ctx"], b["a"], b["y"], b["s"], b["z"], b["D"],
                b["b"], b["y2"], b["s2"], b["c"],
            )
            lhs = ExE(ExE(a, y, s, Lam(z, d, bb)), y2, s2, c)
            rhs = ExE(a, y, s, Lam(z, d, ExE(bb, y2, s2, c)))
            return conclude(ctx, lhs, rhs, ty_of(ctx, lhs))
        case "e4":
            ctx, a, y, s, z, c, bb, w = (
                b["ctx"], b["a"], b["y"], b["s"], b["z"], b["C"], b["b"], b["w"]
            )
            if any(n == z for n, _ in fv_lambda(bb)):
                raise SchemaError("e4: z must not occur free in b")
            if (y, s) in lfv_lambda(bb):
                raise SchemaError("e4: y must not occur free in b")
            body = subst_lambda(bb, _exi_pattern(y, s, c, z), w)
            lhs = ExE(a, y, s, Lam(z, c, body))
            rhs = subst_lambda(bb, a, w)
            return conclude(ctx, lhs, rhs, ty_of(ctx, rhs))
        case "eq0":
            prem: EqualityInContext = b["premise"]
            ctx2 = tuple(b["ctx2"])
            subs: Mapping[str, LambdaTerm] = b["subs"]
            mapping: dict[str, tuple[LambdaTerm, Formula]] = {}
            for name, want in prem.ctx:
                if name not in subs:
                    raise SchemaError(f"eq0: no substitute for {name}")
                got = ty_of(ctx2, subs[name])
                if not alpha_eq_formula(got, want):
                    raise SchemaError(f"eq0: substitute for {name} has the wrong type")
                mapping[name] = (subs[name], want)
            lhs = _simultaneous_subst(prem.lhs, mapping)
            rhs = _simultaneous_subst(prem.rhs, mapping)
            _, concl = conclude(ctx2, lhs, rhs, prem.type)
            return (prem,), concl
        case "eq1":
            ctx = tuple(b["ctx"])
            r, yvars = b["r"], tuple(b["yvars"])
            ss, ts = tuple(b["ss"]), tuple(b["ts"])
            if not (len(yvars) == len(ss) == len(ts)):
                raise SchemaError("eq1: binding lists must align")
            cty = ty_of(ctx + yvars, r)
            prems = []
            for (y, bt), si, ti in zip(yvars, ss, ts):
                for side in (si, ti):
                    if not alpha_eq_formula(ty_of(ctx, side), bt):
                        raise SchemaError("eq1: component has the wrong type")
                prems.append(EqualityInContext(ctx, si, ti, bt))
            lhs = _simultaneous_subst(r, {y: (s, bt) for (y, bt), s in zip(yvars, ss)})
            rhs = _simultaneous_subst(r, {y: (t, bt) for (y, bt), t in zip(yvars, ts)})
            _, concl = conclude(ctx, lhs, rhs, cty)
            return tuple(prems), concl
        case "eq3":
            prem = b["premise"]
            _, concl = conclude(prem.ctx, prem.rhs, prem.lhs, prem.type)
            return (prem,), concl
        case "eq4":
            p, q = b["p"], b["q"]
            if p.ctx != q.ctx or not alpha_eq_lambda(p.rhs, q.lhs):
                raise SchemaError("eq4: premises do not chain")
            if not alpha_eq_formula(p.type, q.type):
                raise SchemaError("eq4: premises disagree on the type")
            _, concl = conclude(p.ctx, p.lhs, q.rhs, p.type)
            return (p, q), concl
        case "f1":
            ctx, u, v, y = tuple(b["ctx"]), b["u"], b["v"], b["y"]
            uty = ty_of(ctx, u)
            if not isinstance(uty, Forall):
                raise SchemaError("f1: terms must have a universal type")
            s = uty.sort
            banned = lfv_lambda(u) | lfv_lambda(v) | fv_formula(uty)
            if (y, s) in banned:
                raise SchemaError("f1: probe variable occurs in the terms")
            inst = subst_formula(uty.body, {(uty.var, s): Var(y, s)})
            prem = EqualityInContext(
                ctx, AllE(u, Var(y, s)), AllE(v, Var(y, s)), inst
            )
            _, concl = conclude(ctx, u, v, uty)
            return (prem,), concl
        case "e1":
            ctx, u, z, s, r, t = (
                b["ctx"], b["u"], b["z"], b["s"], b["r"], b["t"]
            )
            if fv_lambda(r) != fv_lambda(t):
                raise SchemaError("e1: the two bodies must have the same free variables")
            lp = ExE(u, z, s, r)
            prem = EqualityInContext(tuple(ctx), lp, ExE(u, z, s, t), infer_type_or(
                sig, ctx, lp, rule
            ))
            _, concl = conclude(ctx, r, t, ty_of(ctx, r))
            return (prem,), concl
    raise SchemaError(f"unknown or congruence-only rule {rule}")


def infer_type_or(sig: Signature, ctx, t: LambdaTerm, rule: str) -> Formula:
    try:
        return infer_type(sig, ctx, t)
    except LanguageError as e:
        raise SchemaError(f"{rule}: binding does not typecheck: {e}") from e


def check_rule_instance(
    th: Theory, rule: str, bindings: Mapping,
    depth: int = DEFAULT_DEPTH,
) -> bool:
    """Instantiate a schema and confirm decide_eq validates it.

    Premises of the premise rules must themselves decide Equal; a False
    return means the decision procedure failed on a valid instance.
    """
    premises, concl = instantiate_rule(th.sig, rule, bindings)
    for prem in premises:
        if not check_equality_in_context(th.sig, prem):
            raise SchemaError(f"{rule}: a premise does not typecheck")
        if not isinstance(decide_eq(prem, th, depth), Equal):
            return False
    return isinstance(decide_eq(concl, th, depth), Equal)
