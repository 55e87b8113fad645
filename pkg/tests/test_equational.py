"""Tests for the equational engine: rewriting, traces, and decide_eq.

The decision procedure is cross-checked against the bounded-closure oracle
in closure_oracle.py on the curated corpus, and its Equal verdicts must
carry traces that replay step by step.
"""

from __future__ import annotations

import dataclasses
import sys

import pytest

sys.path.insert(0, __file__.rsplit("/", 1)[0])

from closure_oracle import oracle_decide
from curated import CASES, IRREL
from gen import GiveUp, Q0, Q1, Q2, SchemaGen, STDSIG, TermGen
from lambdafol.equational import (
    AXIOM_SCHEMAS,
    CONGRUENCE_SCHEMAS,
    DEFAULT_DEPTH,
    Equal,
    NotEqual,
    PREMISE_SCHEMAS,
    RewriteError,
    RULE_IDS,
    SchemaError,
    Theory,
    check_rule_instance,
    check_theory,
    decide_eq,
    instantiate_rule,
    normalize,
    orient_axioms,
    replay_trace,
    step,
)
from lambdafol.syntax import (
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
    Lam,
    LVar,
    ONE,
    Pair,
    Prod,
    STAR,
    Snd,
    Sum,
    TypingError,
    Var,
    When,
    ZERO,
    alpha_eq_formula,
    alpha_eq_lambda,
    fresh,
    infer_type,
    subst_formula,
    subst_logical_in_lambda,
)

EMPTY = Theory(STDSIG, ())
P = lambda t: Atom("p", (t,))
C = App("c", ())


def _decide(ctx, lhs, rhs, ty, axioms=()):
    eq = EqualityInContext(tuple(ctx), lhs, rhs, ty)
    return decide_eq(eq, Theory(STDSIG, tuple(axioms)))


# ---------------------------------------------------------------------------
# single rewrite steps on fixed redexes

def test_step_fst_of_pair():
    ctx = (("a", Q0), ("b", Q1))
    t = Fst(Pair(LVar("a", Q0), LVar("b", Q1)))
    got = step(STDSIG, ctx, t)
    assert got is not None
    after, rule, pos = got
    assert rule == "x1" and pos == ()
    assert alpha_eq_lambda(after, LVar("a", Q0))


def test_step_when_of_inl():
    ctx = (("a", Q0), ("t0", Arrow(Q0, Q2)), ("s0", Arrow(Q1, Q2)))
    t = When(Inl(Q1, LVar("a", Q0)), LVar("t0", Arrow(Q0, Q2)), LVar("s0", Arrow(Q1, Q2)))
    after, rule, _ = step(STDSIG, ctx, t)
    assert rule == "p0"
    assert alpha_eq_lambda(after, Ap(LVar("t0", Arrow(Q0, Q2)), LVar("a", Q0)))


def test_step_forall_beta():
    body = Lam("h", P(Var("z", "i")), LVar("h", P(Var("z", "i"))))
    t = AllE(AllI("z", "i", body), C)
    after, rule, _ = step(STDSIG, (), t)
    assert rule == "f0"
    assert alpha_eq_lambda(after, Lam("h", P(C), LVar("h", P(C))))


def test_step_exists_beta():
    ctx = (("hp", P(C)),)
    scrut = ExI("z", "i", C, P(Var("z", "i")), LVar("hp", P(C)))
    body = Lam("k", P(Var("w", "i")), STAR)
    t = ExE(scrut, "w", "i", body)
    after, rule, _ = step(STDSIG, ctx, t)
    assert rule == "e0"
    assert alpha_eq_lambda(after, Ap(Lam("k", P(C), STAR), LVar("hp", P(C))))


def test_step_is_innermost():
    ctx = (("a", Q0), ("b", Q1))
    inner = Fst(Pair(LVar("a", Q0), LVar("b", Q1)))
    outer = Snd(Pair(LVar("b", Q1), inner))
    _, rule, pos = step(STDSIG, ctx, outer)
    assert rule == "x1" and pos == (0, 1)


def test_normal_form_has_no_step():
    ctx = (("a", Q0),)
    assert step(STDSIG, ctx, LVar("a", Q0)) is None
    assert step(STDSIG, ctx, Pair(LVar("a", Q0), STAR)) is None


def test_normalize_budget_exhaustion():
    ctx = (("a", Q0), ("b", Q1))
    t = LVar("a", Q0)
    for _ in range(5):
        t = Ap(Lam("x", Q0, LVar("x", Q0)), t)
    with pytest.raises(RewriteError):
        normalize(STDSIG, ctx, t, budget=3)
    nf, trace = normalize(STDSIG, ctx, t, budget=10)
    assert alpha_eq_lambda(nf, LVar("a", Q0)) and len(trace) == 5


# ---------------------------------------------------------------------------
# traces: replay, tamper detection, type preservation

def _corpus(seed, n, **kw):
    g = TermGen(seed)
    out = []
    while len(out) < n:
        try:
            out.append(g.typed_term(**kw))
        except GiveUp:
            continue
    return out


def test_replay_and_type_preservation():
    for ctx, t, ty in _corpus(7, 150):
        nf, trace = normalize(STDSIG, ctx, t)
        assert alpha_eq_lambda(replay_trace(STDSIG, ctx, t, trace), nf)
        assert alpha_eq_formula(infer_type(STDSIG, ctx, nf), ty)
        again, more = normalize(STDSIG, ctx, nf)
        assert more == () and alpha_eq_lambda(again, nf)


def test_replay_rejects_tampering():
    ctx = (("a", Q0), ("b", Q1))
    t = Fst(Pair(Ap(Lam("x", Q0, LVar("x", Q0)), LVar("a", Q0)), LVar("b", Q1)))
    nf, trace = normalize(STDSIG, ctx, t)
    assert len(trace) >= 2
    bad = (trace[1], trace[0]) + trace[2:]
    with pytest.raises(RewriteError):
        replay_trace(STDSIG, ctx, t, bad)
    wrong_rule = (dataclasses.replace(trace[0], rule="x2"),) + trace[1:]
    with pytest.raises(RewriteError):
        replay_trace(STDSIG, ctx, t, wrong_rule)


def test_equal_verdict_traces_replay():
    done = 0
    for ctx, t, ty in _corpus(11, 60):
        wrapped = Ap(Lam("x", ty, LVar("x", ty)), t)
        v = _decide(ctx, wrapped, t, ty)
        assert isinstance(v, Equal)
        nf_l = replay_trace(STDSIG, ctx, wrapped, v.lhs_trace)
        nf_r = replay_trace(STDSIG, ctx, t, v.rhs_trace)
        assert alpha_eq_lambda(nf_l, nf_r)
        done += 1
    assert done == 60


# ---------------------------------------------------------------------------
# the decision procedure against the bounded-closure oracle

def test_decide_matches_oracle_on_curated_corpus():
    for name, eq, axioms, expect in CASES:
        got = oracle_decide(STDSIG, eq.ctx, eq.lhs, eq.rhs, eq.type,
                            DEFAULT_DEPTH, axioms)
        assert got == expect, f"oracle disagrees with the label on {name}"
        v = decide_eq(eq, Theory(STDSIG, tuple(axioms)))
        assert isinstance(v, Equal) == expect, f"engine wrong on {name}"


def test_not_equal_reports_bound_and_qualification():
    v = _decide((("x", Q0), ("y", Q0)), LVar("x", Q0), LVar("y", Q0), Q0)
    assert isinstance(v, NotEqual)
    assert v.bound == DEFAULT_DEPTH and not v.qualified
    v = _decide((("x", Q0), ("y", Q0)), LVar("x", Q0), LVar("y", Q0), Q0,
                axioms=(IRREL,))
    assert isinstance(v, NotEqual) and v.qualified


def test_equal_verdict_names_rules():
    v = _decide((("u", ONE),), LVar("u", ONE), STAR, ONE)
    assert isinstance(v, Equal) and "x0" in v.rules
    g = LVar("g", Arrow(Q0, Q1))
    v = _decide((("g", Arrow(Q0, Q1)),),
                Lam("y", Q0, Ap(g, LVar("y", Q0))), g, Arrow(Q0, Q1))
    assert isinstance(v, Equal) and "a1" in v.rules
    assert set(v.rules) <= set(RULE_IDS) | {"split"}


# ---------------------------------------------------------------------------
# reflexivity, symmetry, transitivity on a large corpus

def test_equivalence_laws_on_corpus():
    triples = _corpus(23, 500, n_ctx=2, type_depth=2, term_depth=2)
    for ctx, t, ty in triples:
        assert isinstance(_decide(ctx, t, t, ty), Equal)
    for ctx, t, ty in triples[:120]:
        a = Ap(Lam("x", ty, LVar("x", ty)), t)
        b = Fst(Pair(t, STAR))
        ab = _decide(ctx, a, b, ty)
        ba = _decide(ctx, b, a, ty)
        assert isinstance(ab, Equal) and isinstance(ba, Equal)
        assert isinstance(_decide(ctx, a, t, ty), Equal)
        assert isinstance(_decide(ctx, t, b, ty), Equal)


# ---------------------------------------------------------------------------
# stability of derivable equalities under both substitution notions

def test_stability_under_hypothesis_substitution():
    # replacing a hypothesis by a well-typed term preserves derivability
    g = TermGen(31)
    done = 0
    while done < 40:
        try:
            ctx, t, ty = g.typed_term()
        except GiveUp:
            continue
        wrapped = Ap(Lam("x", ty, LVar("x", ty)), t)
        prem = EqualityInContext(ctx, wrapped, t, ty)
        clones = tuple((fresh(n), f) for n, f in ctx)
        subs = {n: LVar(cn, f) for (n, f), (cn, _) in zip(ctx, clones)}
        _, concl = instantiate_rule(STDSIG, "eq0",
                                    {"premise": prem, "ctx2": clones, "subs": subs})
        assert isinstance(decide_eq(concl, EMPTY), Equal)
        done += 1


def test_stability_under_logical_substitution():
    # replacing a free individual variable by a closed term preserves
    # derivability; built over terms with one free logical variable
    g = TermGen(37)
    done = 0
    while done < 40:
        z = fresh("z")
        ty = g.formula(2, (z,), allow_zero=False)
        ctx = g.context(1)
        if not g._inhabitable(ctx, ty):
            continue
        try:
            t = g.lam_term(ctx, ty, 3, lvars=(z,))
        except GiveUp:
            continue
        wrapped = Ap(Lam("x", ty, LVar("x", ty)), t)
        assert isinstance(_decide(ctx, wrapped, t, ty), Equal)
        sub = {(z, "i"): C}
        t2 = subst_logical_in_lambda(t, sub)
        w2 = subst_logical_in_lambda(wrapped, sub)
        assert isinstance(_decide(ctx, w2, t2, subst_formula(ty, sub)), Equal)
        done += 1


# ---------------------------------------------------------------------------
# schemas: random instances validate, broken side conditions raise

def test_rule_inventory():
    assert len(RULE_IDS) == 25
    assert set(CONGRUENCE_SCHEMAS) == {"eq5", "eq6", "eq7"}
    assert len(AXIOM_SCHEMAS) + len(PREMISE_SCHEMAS) == 22
    assert set(AXIOM_SCHEMAS) | set(PREMISE_SCHEMAS) | set(CONGRUENCE_SCHEMAS) == set(RULE_IDS)


@pytest.mark.parametrize("rule", AXIOM_SCHEMAS + PREMISE_SCHEMAS)
def test_random_schema_instances_check(rule):
    g = SchemaGen(hash(rule) % 1000)
    done = 0
    while done < 10:
        try:
            b = g.bindings(rule)
        except GiveUp:
            continue
        assert check_rule_instance(EMPTY, rule, b)
        done += 1


def test_congruence_schemas_not_instantiable():
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "eq5", {})
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "nonsense", {})


def test_side_condition_violations_raise():
    ctx = (("g", Arrow(Q0, Q1)), ("a", Q0))
    with pytest.raises(SchemaError):
        # eta with the bound variable free in the function
        instantiate_rule(STDSIG, "a1", {"ctx": ctx, "t": LVar("g", Arrow(Q0, Q1)),
                                        "y": "g", "C": Q0})
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "x0", {"ctx": ctx, "t": LVar("a", Q0)})
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "e2", {"ctx": ctx, "v": "a", "w": LVar("a", Q0)})
    prem = EqualityInContext(ctx, LVar("a", Q0), LVar("a", Q0), Q0)
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "eq0", {"premise": prem, "ctx2": ctx, "subs": {}})
    other = EqualityInContext(ctx, LVar("g", Arrow(Q0, Q1)),
                              LVar("g", Arrow(Q0, Q1)), Arrow(Q0, Q1))
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "eq4", {"p": prem, "q": other})


def test_e4_side_conditions():
    y, z, w = "y", "z", "w"
    cy = P(Var(y, "i"))
    ety = Exists(y, "i", cy)
    ctx = (("a0", ety), ("m", Q1))
    good = {"ctx": ctx, "a": LVar("a0", ety), "y": y, "s": "i", "z": z,
            "C": cy, "b": LVar("m", Q1), "w": w}
    prems, concl = instantiate_rule(STDSIG, "e4", good)
    assert prems == () and isinstance(decide_eq(concl, EMPTY), Equal)
    bad = dict(good)
    bad["b"] = LVar(z, Q1)
    with pytest.raises(SchemaError):
        instantiate_rule(STDSIG, "e4", bad)


# ---------------------------------------------------------------------------
# theories

def test_check_theory_rejects_ill_typed_axioms():
    good = Theory(STDSIG, (IRREL,))
    assert check_theory(good)
    bad = Theory(STDSIG, (EqualityInContext((), STAR, LVar("x", Q0), Q0),))
    assert not check_theory(bad)


def test_oriented_axiom_folds_into_rewriting():
    m = ("m", Prod(Q0, Q0))
    collapse = EqualityInContext(
        (m,), Pair(Fst(LVar(*m)), Fst(LVar(*m))), LVar(*m), Prod(Q0, Q0)
    )
    th = Theory(STDSIG, (collapse,))
    oriented, loose = orient_axioms(th)
    assert len(oriented) == 1 and loose == ()
    w = ("w", Prod(Q0, Q0))
    v = decide_eq(
        EqualityInContext((w,), Pair(Fst(LVar(*w)), Fst(LVar(*w))), LVar(*w),
                          Prod(Q0, Q0)),
        th,
    )
    assert isinstance(v, Equal) and "th0" in v.rules
    without = decide_eq(
        EqualityInContext((w,), Pair(Fst(LVar(*w)), Fst(LVar(*w))), LVar(*w),
                          Prod(Q0, Q0)),
        EMPTY,
    )
    assert isinstance(without, NotEqual)


def test_loose_axiom_used_by_bounded_search():
    eq = EqualityInContext(
        (("a", Q0), ("b", Q0)),
        AxApp("ax0", LVar("a", Q0)), AxApp("ax0", LVar("b", Q0)), Q1,
    )
    v = decide_eq(eq, Theory(STDSIG, (IRREL,)))
    assert isinstance(v, Equal)
    assert "th0" in v.rules and "eq0" in v.rules and "eq4" in v.rules


def test_decide_eq_rejects_ill_typed_input():
    with pytest.raises(TypingError):
        _decide((), STAR, LVar("x", Q0), Q0)
