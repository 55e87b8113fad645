"""Depth-bounded exhaustive closure of the equational rules.

An independent check on decide_eq: two terms are related when some chain of
rule applications (at any position, in either direction where the rule set
provides one) connects them within the depth bound.  The search runs
breadth-first from both endpoints on alpha-canonical keys and succeeds when
the frontiers meet; reflexivity, symmetry and transitivity are the path
structure itself, the congruences are positionwise application, and the
simplified forall rule appears as a goal-level probe because it has a
premise and so is not a move on terms.

Deliberately written as blunt enumeration rather than directed rewriting:
slow, but with no shared strategy with the engine under test.
"""

from __future__ import annotations

from lambdafol.syntax import (
    Absurd,
    AllE,
    AllI,
    Ap,
    Arrow,
    AxApp,
    ExE,
    ExI,
    Exists,
    Forall,
    Fst,
    Inl,
    Inr,
    Lam,
    LVar,
    One,
    Pair,
    Prod,
    Snd,
    STAR,
    Star,
    Var,
    When,
    Zero,
    alpha_eq_formula,
    alpha_eq_lambda,
    alpha_key_lambda,
    fresh,
    fv_lambda,
    infer_type,
    lfv_lambda,
    subst_formula,
    subst_lambda,
    subst_logical_in_lambda,
)


def _root_moves(sig, env, t, ground=()):
    """Every term reachable from t by one rule applied at the root."""
    out = []
    for left, right in ground:
        if alpha_eq_lambda(t, left):
            out.append(right)
        if alpha_eq_lambda(t, right):
            out.append(left)
    # product reductions
    if isinstance(t, Fst) and isinstance(t.arg, Pair):
        out.append(t.arg.left)
    if isinstance(t, Snd) and isinstance(t.arg, Pair):
        out.append(t.arg.right)
    if (
        isinstance(t, Pair)
        and isinstance(t.left, Fst)
        and isinstance(t.right, Snd)
        and alpha_eq_lambda(t.left.arg, t.right.arg)
    ):
        out.append(t.left.arg)
    # sum reductions and the nested-when conversion
    if isinstance(t, When) and isinstance(t.scrut, Inl):
        out.append(Ap(t.left, t.scrut.arg))
    if isinstance(t, When) and isinstance(t.scrut, Inr):
        out.append(Ap(t.right, t.scrut.arg))
    if isinstance(t, When) and isinstance(t.scrut, When):
        inner = t.scrut
        try:
            lt = infer_type(sig, env, inner.left)
            rt = infer_type(sig, env, inner.right)
        except Exception:
            lt = rt = None
        if isinstance(lt, Arrow) and isinstance(rt, Arrow):
            u1, u2 = fresh("q"), fresh("q")
            out.append(
                When(
                    inner.scrut,
                    Lam(u1, lt.dom, When(Ap(inner.left, LVar(u1, lt.dom)), t.left, t.right)),
                    Lam(u2, rt.dom, When(Ap(inner.right, LVar(u2, rt.dom)), t.left, t.right)),
                )
            )
    # beta and eta
    if isinstance(t, Ap) and isinstance(t.fun, Lam):
        out.append(subst_lambda(t.fun.body, t.arg, t.fun.var))
    if (
        isinstance(t, Lam)
        and isinstance(t.body, Ap)
        and isinstance(t.body.arg, LVar)
        and t.body.arg.name == t.var
        and not any(n == t.var for n, _ in fv_lambda(t.body.fun))
    ):
        out.append(t.body.fun)
    # quantifier reductions
    if isinstance(t, AllE) and isinstance(t.arg, AllI):
        a = t.arg
        out.append(subst_logical_in_lambda(a.body, {(a.var, a.sort): t.index}))
    if isinstance(t, ExE) and isinstance(t.scrut, ExI):
        i = t.scrut
        out.append(Ap(subst_logical_in_lambda(t.body, {(t.var, t.sort): i.witness}), i.arg))
    if isinstance(t, ExE) and isinstance(t.scrut, ExE) and isinstance(t.scrut.body, Lam):
        inner, lam = t.scrut, t.scrut.body
        y2, z2 = fresh("q"), fresh("q")
        moved = subst_lambda(lam.body, LVar(z2, lam.dom), lam.var)
        moved = subst_logical_in_lambda(moved, {(inner.var, inner.sort): Var(y2, inner.sort)})
        dom2 = subst_formula(lam.dom, {(inner.var, inner.sort): Var(y2, inner.sort)})
        out.append(
            ExE(inner.scrut, y2, inner.sort,
                Lam(z2, dom2, ExE(moved, t.var, t.sort, t.body)))
        )
    got = _unsubstitute(t)
    if got is not None:
        out.append(got)
    # type-directed: anything of unit type collapses, the two uniqueness
    # rules read as expansions, and a falsity hypothesis in scope sends
    # everything to a canonical absurdity
    try:
        ty = infer_type(sig, env, t)
    except Exception:
        ty = None
    if ty is not None:
        for name, f in env:
            if isinstance(f, Zero):
                canon = Ap(Absurd(ty), LVar(name, f))
                if not alpha_eq_lambda(t, canon):
                    out.append(canon)
                break
    if isinstance(ty, One) and not isinstance(t, Star):
        out.append(STAR)
    if isinstance(ty, Prod) and not isinstance(t, Pair):
        out.append(Pair(Fst(t), Snd(t)))
    if isinstance(ty, Arrow) and not isinstance(t, Lam):
        q = fresh("q")
        out.append(Lam(q, ty.dom, Ap(t, LVar(q, ty.dom))))
    return out


def _unsubstitute(t):
    """The garbage-collecting existential rule, rediscovered by brute force."""
    if not (isinstance(t, ExE) and isinstance(t.body, Lam)):
        return None
    y, s, lam = t.var, t.sort, t.body
    z, cty = lam.var, lam.dom
    wanted = ExI(y, s, Var(y, s), cty, LVar(z, cty))
    hole = fresh("q")
    holes = Exists(y, s, cty)

    def walk(u):
        if alpha_eq_lambda(u, wanted):
            return LVar(hole, holes)
        match u:
            case Lam(x, d, b):
                return u if x == z else Lam(x, d, walk(b))
            case AllI(x, s2, b):
                return u if x == y else AllI(x, s2, walk(b))
            case ExI(x, s2, w2, bt, a):
                return ExI(x, s2, w2, bt, walk(a))
            case ExE(sc, x, s2, b):
                return ExE(walk(sc), x, s2, b if x == y else walk(b))
            case LVar(_, _) | Star() | Absurd(_):
                return u
            case Pair(a, b):
                return Pair(walk(a), walk(b))
            case Ap(a, b):
                return Ap(walk(a), walk(b))
            case When(a, b, c):
                return When(walk(a), walk(b), walk(c))
            case Fst(a):
                return Fst(walk(a))
            case Snd(a):
                return Snd(walk(a))
            case Inl(o, a):
                return Inl(o, walk(a))
            case Inr(o, a):
                return Inr(o, walk(a))
            case AllE(a, r):
                return AllE(walk(a), r)
            case AxApp(ax, a):
                return AxApp(ax, walk(a))
        raise AssertionError(f"unhandled term: {u!r}")
    body = walk(lam.body)
    if any(n == z for n, _ in fv_lambda(body)):
        return None
    if any(n == y for n, _ in lfv_lambda(body)):
        return None
    return subst_lambda(body, t.scrut, hole)


def _positions(t):
    """(path, subterm) pairs, where a path is a list of field names."""
    yield (), t
    fields = {
        Fst: ("arg",), Snd: ("arg",), Inl: ("arg",), Inr: ("arg",),
        Pair: ("left", "right"), Ap: ("fun", "arg"),
        When: ("scrut", "left", "right"), Lam: ("body",),
        AllI: ("body",), AllE: ("arg",), ExI: ("arg",),
        ExE: ("scrut", "body"), AxApp: ("arg",),
    }
    for name in fields.get(type(t), ()):
        for p, sub in _positions(getattr(t, name)):
            yield (name,) + p, sub


def _rebuild(t, path, new):
    if not path:
        return new
    name = path[0]
    kwargs = {f: getattr(t, f) for f in t.__dataclass_fields__}
    kwargs[name] = _rebuild(getattr(t, name), path[1:], new)
    return type(t)(**kwargs)


def _env_along(env, t, path):
    for name in path:
        if isinstance(t, Lam) and name == "body":
            env = env + ((t.var, t.dom),)
        t = getattr(t, name)
    return env


def _neighbors(sig, ctx, t, ground=()):
    env0 = tuple(ctx)
    for path, sub in list(_positions(t)):
        env = _env_along(env0, t, path)
        for new in _root_moves(sig, env, sub, ground):
            whole = _rebuild(t, path, new)
            try:
                infer_type(sig, env0, whole)
            except Exception:
                continue
            yield whole


def _ground_instances(sig, ctx, axioms, a, b, cap=400):
    """Closed-over-the-context instances of the theory axioms, with the
    axiom context variables instantiated from subterms of the endpoints."""
    names = {n for n, _ in ctx}
    pool = [STAR] + [LVar(n, f) for n, f in ctx]
    for t in (a, b):
        for _, sub in _positions(t):
            if all(n in names for n, _ in fv_lambda(sub)):
                pool.append(sub)
    dedup = {}
    for cand in pool:
        dedup.setdefault(alpha_key_lambda(cand), cand)
    pool = list(dedup.values())
    out = []
    for ax in axioms:
        slots = []
        for _, f in ax.ctx:
            fits = []
            for cand in pool:
                try:
                    if alpha_eq_formula(infer_type(sig, ctx, cand), f):
                        fits.append(cand)
                except Exception:
                    pass
            slots.append(fits)
        combos = [()]
        for fits in slots:
            combos = [c + (x,) for c in combos for x in fits]
            if len(combos) > cap:
                combos = combos[:cap]
        for combo in combos:
            left, right = ax.lhs, ax.rhs
            temps = []
            for (n, f), val in zip(ax.ctx, combo):
                tn = fresh("q")
                temps.append((tn, val))
                left = subst_lambda(left, LVar(tn, f), n)
                right = subst_lambda(right, LVar(tn, f), n)
            for tn, val in temps:
                left = subst_lambda(left, val, tn)
                right = subst_lambda(right, val, tn)
            if not alpha_eq_lambda(left, right):
                out.append((left, right))
    return out


def joinable(sig, ctx, a, b, depth=6, cap=4000, ground=()):
    """True when chains from both endpoints meet within the depth."""
    seen_a = {alpha_key_lambda(a)}
    seen_b = {alpha_key_lambda(b)}
    front_a, front_b = [a], [b]
    for _ in range(depth):
        if seen_a & seen_b:
            return True
        if not front_a and not front_b:
            return False
        grown = []
        for front, seen in ((front_a, seen_a), (front_b, seen_b)):
            nxt = []
            for u in front:
                for v in _neighbors(sig, ctx, u, ground):
                    k = alpha_key_lambda(v)
                    if k not in seen and len(seen) < cap:
                        seen.add(k)
                        nxt.append(v)
            grown.append(nxt)
        front_a, front_b = grown
    return bool(seen_a & seen_b)


def oracle_decide(sig, ctx, a, b, ty, depth=6, axioms=()):
    """The bounded-closure verdict for ctx |- a = b : ty."""
    if any(isinstance(f, Zero) for _, f in ctx):
        return True
    if alpha_eq_lambda(a, b):
        return True
    ground = _ground_instances(sig, ctx, axioms, a, b) if axioms else ()
    if joinable(sig, ctx, a, b, depth, ground=ground):
        return True
    if isinstance(ty, Forall):
        y = fresh("q")
        inst = subst_formula(ty.body, {(ty.var, ty.sort): Var(y, ty.sort)})
        return oracle_decide(
            sig, ctx, AllE(a, Var(y, ty.sort)), AllE(b, Var(y, ty.sort)), inst,
            depth, axioms,
        )
    return False
