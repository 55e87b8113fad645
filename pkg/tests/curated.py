"""Hand-curated equality decision cases.

Fifty judgements over the standard test signature, twenty five derivably
equal and twenty five not, each annotated with the expected verdict.  The
expectations were fixed by running the bounded-closure oracle in
closure_oracle.py; the acceptance suite re-runs the oracle live and requires
three-way agreement between it, the frozen labels, and decide_eq.

Equalities that hold only by sum-uniqueness reasoning (context splitting on
a sum hypothesis) are deliberately absent: the rule list the oracle closes
over does not derive them, so both sides of the comparison would be silent
on them.  They are exercised by the syntactic-category tests instead.
"""

from __future__ import annotations

from lambdafol.syntax import (
    Absurd,
    AllE,
    AllI,
    Ap,
    App,
    Arrow,
    Atom,
    AxApp,
    EqualityInContext,
    ExE,
    ExI,
    Exists,
    Forall,
    Fst,
    Inl,
    Inr,
    Lam,
    LVar,
    ONE,
    Pair,
    Prod,
    Snd,
    STAR,
    Sum,
    Var,
    When,
    ZERO,
)

from gen import STDSIG, Q0, Q1, Q2

P = lambda t: Atom("p", (t,))
R2 = lambda a, b: Atom("r2", (a, b))
C = App("c", ())
D = App("d", ())
vi = lambda n: Var(n, "i")
lv = LVar

EX_P = Exists("z", "i", P(vi("z")))
ALL_P = Forall("z", "i", P(vi("z")))

# one ground equational axiom: applications of ax0 do not depend on which
# proof of q0 they are fed
IRREL = EqualityInContext(
    (("h", Q0), ("k", Q0)),
    AxApp("ax0", lv("h", Q0)),
    AxApp("ax0", lv("k", Q0)),
    Q1,
)


def _id(f):
    return Lam("x", f, lv("x", f))


def _pairs():
    out = []

    def eq(name, ctx, lhs, rhs, ty, axioms=()):
        out.append((name, EqualityInContext(tuple(ctx), lhs, rhs, ty), axioms, True))

    def ne(name, ctx, lhs, rhs, ty, axioms=()):
        out.append((name, EqualityInContext(tuple(ctx), lhs, rhs, ty), axioms, False))

    a, b = lv("a", Q0), lv("b", Q1)
    g01 = lv("g", Arrow(Q0, Q1))

    # ---- equal ----
    eq("beta", [("a", Q0)], Ap(_id(Q0), a), a, Q0)
    eq("beta-under-lam",
       [("a", Q0)],
       Lam("y", Q1, Ap(_id(Q0), a)), Lam("y", Q1, a), Arrow(Q1, Q0))
    eq("beta-chain",
       [("a", Q0), ("b", Q1)],
       Ap(Ap(Lam("x", Q0, Lam("y", Q1, Pair(lv("x", Q0), lv("y", Q1)))), a), b),
       Pair(a, b), Prod(Q0, Q1))
    eq("eta",
       [("g", Arrow(Q0, Q1))],
       Lam("y", Q0, Ap(g01, lv("y", Q0))), g01, Arrow(Q0, Q1))
    eq("eta-under-pair",
       [("g", Arrow(Q0, Q1)), ("a", Q0)],
       Pair(Lam("y", Q0, Ap(g01, lv("y", Q0))), a),
       Pair(g01, a), Prod(Arrow(Q0, Q1), Q0))
    eq("unit", [("u", ONE)], lv("u", ONE), STAR, ONE)
    eq("unit-deep",
       [("u", ONE), ("a", Q0)],
       Pair(lv("u", ONE), a), Pair(STAR, a), Prod(ONE, Q0))
    eq("fst-pair", [("a", Q0), ("b", Q1)], Fst(Pair(a, b)), a, Q0)
    eq("snd-pair", [("a", Q0), ("b", Q1)], Snd(Pair(a, b)), b, Q1)
    z01 = lv("z", Prod(Q0, Q1))
    eq("pairing", [("z", Prod(Q0, Q1))], Pair(Fst(z01), Snd(z01)), z01, Prod(Q0, Q1))
    z2 = lv("z2", Prod(Prod(Q0, Q1), Q2))
    eq("pairing-nested",
       [("z2", Prod(Prod(Q0, Q1), Q2))],
       Pair(Pair(Fst(Fst(z2)), Snd(Fst(z2))), Snd(z2)), z2,
       Prod(Prod(Q0, Q1), Q2))
    t0, s0 = lv("t0", Arrow(Q0, Q2)), lv("s0", Arrow(Q1, Q2))
    eq("when-inl",
       [("a", Q0), ("t0", Arrow(Q0, Q2)), ("s0", Arrow(Q1, Q2))],
       When(Inl(Q1, a), t0, s0), Ap(t0, a), Q2)
    eq("when-inr",
       [("b", Q1), ("t0", Arrow(Q0, Q2)), ("s0", Arrow(Q1, Q2))],
       When(Inr(Q0, b), t0, s0), Ap(s0, b), Q2)
    sw = lv("s1", Sum(Q0, Q1))
    inner = When(sw,
                 Lam("x", Q0, Inr(Q1, lv("x", Q0))),
                 Lam("y", Q1, Inl(Q0, lv("y", Q1))))
    outL = Lam("y", Q1, Ap(lv("g1", Arrow(Q1, Q2)), lv("y", Q1)))
    outR = Lam("x", Q0, Ap(lv("g2", Arrow(Q0, Q2)), lv("x", Q0)))
    eq("when-of-when",
       [("s1", Sum(Q0, Q1)), ("g1", Arrow(Q1, Q2)), ("g2", Arrow(Q0, Q2))],
       When(inner, outL, outR),
       When(sw,
            Lam("x", Q0, When(Inr(Q1, lv("x", Q0)), outL, outR)),
            Lam("y", Q1, When(Inl(Q0, lv("y", Q1)), outL, outR))),
       Q2)
    eq("from-falsity",
       [("x", Q0), ("n", ZERO)],
       lv("x", Q0), Ap(Absurd(Q0), lv("n", ZERO)), Q0)
    eq("falsity-collapses-all",
       [("a", Q0), ("b", Q0), ("n", ZERO)],
       Pair(a, lv("b", Q0)), Pair(lv("b", Q0), a), Prod(Q0, Q0))
    eq("forall-beta",
       [],
       AllE(AllI("z", "i", _id(P(vi("z")))), C), _id(P(C)), Arrow(P(C), P(C)))
    u = lv("u", ALL_P)
    eq("forall-eta",
       [("u", ALL_P)],
       AllI("w", "i", AllE(u, vi("w"))), u, ALL_P)
    eq("exists-beta",
       [("hp", P(C))],
       ExE(ExI("z", "i", C, P(vi("z")), lv("hp", P(C))),
           "w", "i", Lam("k", P(vi("w")), STAR)),
       Ap(Lam("k", P(C), STAR), lv("hp", P(C))), ONE)
    vex = lv("v", EX_P)
    eq("exists-garbage",
       [("v", EX_P), ("m", Q1)],
       ExE(vex, "y", "i", Lam("zq", P(vi("y")), lv("m", Q1))), lv("m", Q1), Q1)
    innerB = Lam("h", P(vi("y")),
                 ExI("w", "i", C, R2(vi("w"), vi("w")), lv("d0", R2(C, C))))
    eq("exists-commute",
       [("a0", EX_P), ("d0", R2(C, C))],
       ExE(ExE(lv("a0", EX_P), "y", "i", innerB),
           "w2", "i", Lam("h2", R2(vi("w2"), vi("w2")), STAR)),
       ExE(lv("a0", EX_P), "y", "i",
           Lam("h", P(vi("y")),
               ExE(ExI("w", "i", C, R2(vi("w"), vi("w")), lv("d0", R2(C, C))),
                   "w2", "i", Lam("h2", R2(vi("w2"), vi("w2")), STAR)))),
       ONE)
    eq("snd-then-beta",
       [("a", Q0), ("b", Q1)],
       Snd(Pair(a, Ap(_id(Q1), b))), b, Q1)
    eq("vacuous-domain",
       [("x", Q0), ("y", Q0)],
       Lam("n", ZERO, lv("x", Q0)), Lam("n", ZERO, lv("y", Q0)),
       Arrow(ZERO, Q0))
    eq("axiom-irrelevance",
       [("a", Q0), ("b", Q0)],
       AxApp("ax0", a), AxApp("ax0", lv("b", Q0)), Q1, axioms=(IRREL,))
    eq("axiom-after-reduction",
       [("a", Q0), ("b", Q0)],
       AxApp("ax0", Fst(Pair(a, lv("b", Q0)))), AxApp("ax0", lv("b", Q0)),
       Q1, axioms=(IRREL,))

    # ---- not equal ----
    ne("distinct-hyps", [("x", P(C)), ("y", P(C))], lv("x", P(C)), lv("y", P(C)), P(C))
    ne("distinct-hyps-q", [("a", Q0), ("b", Q0)], a, lv("b", Q0), Q0)
    ne("axiom-vs-hyp",
       [("a", Q0), ("h1", Q1)],
       AxApp("ax0", a), lv("h1", Q1), Q1)
    ne("inl-vs-inr",
       [("a", Q0)],
       Inl(Q0, a), Inr(Q0, a), Sum(Q0, Q0))
    ne("inl-payloads",
       [("a", Q0), ("b", Q0)],
       Inl(Q1, a), Inl(Q1, lv("b", Q0)), Sum(Q0, Q1))
    zqq = lv("z", Prod(Q0, Q0))
    ne("fst-vs-snd", [("z", Prod(Q0, Q0))], Fst(zqq), Snd(zqq), Q0)
    ne("id-vs-const",
       [("a", Q0)],
       _id(Q0), Lam("x", Q0, a), Arrow(Q0, Q0))
    ne("fun-vs-const",
       [("g", Arrow(Q0, Q1)), ("h1", Q1)],
       g01, Lam("x", Q0, lv("h1", Q1)), Arrow(Q0, Q1))
    ne("distinct-universals",
       [("u1", ALL_P), ("u2", ALL_P)],
       lv("u1", ALL_P), lv("u2", ALL_P), ALL_P)
    ne("generalized-distinct",
       [("u1", ALL_P), ("u2", ALL_P)],
       AllI("z", "i", AllE(lv("u1", ALL_P), vi("z"))),
       AllI("z", "i", AllE(lv("u2", ALL_P), vi("z"))), ALL_P)
    ne("witnesses-differ",
       [("hc", P(C)), ("hd", P(D))],
       ExI("z", "i", C, P(vi("z")), lv("hc", P(C))),
       ExI("z", "i", D, P(vi("z")), lv("hd", P(D))), EX_P)
    ne("proofs-differ",
       [("h1", P(C)), ("h2", P(C))],
       ExI("z", "i", C, P(vi("z")), lv("h1", P(C))),
       ExI("z", "i", C, P(vi("z")), lv("h2", P(C))), EX_P)
    ne("distinct-existentials",
       [("v1", EX_P), ("v2", EX_P)],
       lv("v1", EX_P), lv("v2", EX_P), EX_P)
    ne("pair-swap",
       [("a", Q0), ("b", Q0)],
       Pair(a, lv("b", Q0)), Pair(lv("b", Q0), a), Prod(Q0, Q0))
    u1c, u2c = lv("u1", Arrow(Q0, Q1)), lv("u2", Arrow(Q0, Q1))
    sww = lv("s1", Sum(Q0, Q0))
    ne("when-branches-swapped",
       [("s1", Sum(Q0, Q0)), ("u1", Arrow(Q0, Q1)), ("u2", Arrow(Q0, Q1))],
       When(sww, u1c, u2c), When(sww, u2c, u1c), Q1)
    ne("hyp-vs-derived",
       [("a", Q0), ("h1", Q1)],
       Pair(a, lv("h1", Q1)), Pair(a, AxApp("ax0", a)), Prod(Q0, Q1))
    ne("eta-vs-const-app",
       [("g", Arrow(Q0, Q1)), ("a", Q0)],
       Lam("x", Q0, Ap(g01, lv("x", Q0))), Lam("x", Q0, Ap(g01, a)),
       Arrow(Q0, Q1))
    ne("unit-pair-components",
       [("u", ONE), ("a", Q0), ("b", Q0)],
       Pair(lv("u", ONE), a), Pair(STAR, lv("b", Q0)), Prod(ONE, Q0))
    ne("theory-does-not-collapse-hyps",
       [("a", Q0), ("b", Q0)],
       a, lv("b", Q0), Q0, axioms=(IRREL,))
    ne("theory-axiom-vs-hyp",
       [("a", Q0), ("h1", Q1)],
       AxApp("ax0", a), lv("h1", Q1), Q1, axioms=(IRREL,))
    ne("ground-witnesses",
       [("hfc", P(App("f", (C,)))), ("hc", P(C))],
       ExI("z", "i", App("f", (C,)), P(vi("z")), lv("hfc", P(App("f", (C,))))),
       ExI("z", "i", C, P(vi("z")), lv("hc", P(C))), EX_P)
    sqq = lv("z", Sum(Q0, Q0))
    ne("sum-swap-vs-id",
       [("z", Sum(Q0, Q0))],
       When(sqq,
            Lam("x", Q0, Inr(Q0, lv("x", Q0))),
            Lam("y", Q0, Inl(Q0, lv("y", Q0)))),
       sqq, Sum(Q0, Q0))
    ne("duplicated-component",
       [("z", Prod(Q0, Q0))],
       Pair(Fst(zqq), Fst(zqq)), zqq, Prod(Q0, Q0))
    u3 = lv("u3", Forall("z", "i", R2(vi("z"), vi("z"))))
    ne("instance-vs-hyp",
       [("u3", Forall("z", "i", R2(vi("z"), vi("z")))), ("y3", R2(C, C))],
       AllE(u3, C), lv("y3", R2(C, C)), R2(C, C))
    ne("distinct-implications",
       [("g1", Arrow(Q0, Q1)), ("g2", Arrow(Q0, Q1))],
       lv("g1", Arrow(Q0, Q1)), lv("g2", Arrow(Q0, Q1)), Arrow(Q0, Q1))

    return out


CASES = tuple(_pairs())
