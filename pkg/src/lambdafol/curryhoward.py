"""Natural deduction proofs and their correspondence with lambda terms.

Proof trees carry their conclusions; constructors compute them, the checker
recomputes and verifies them together with the side conditions (label
discharge, eigenvariable conditions checked against the live assumptions of
the relevant subproof).  The two compilers translate checked proofs to typed
terms and back; they are mutually inverse up to assumption labels and alpha.

Formulas are their own types here: the formula/type translation tables
collapse to the identity on this shared representation, and the rule-by-rule
table reads assume ~ variable, axiom ~ axiom constant, andi ~ pair,
andel/ander ~ fst/snd, oril/orir ~ inl/inr, ore ~ when, impi ~ lam,
impe ~ ap, topi ~ star, bote ~ absurd, alli/alle ~ alli/alle, exi/exe ~
exi/exe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
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
    Formula,
    Fst,
    Inl,
    Inr,
    Lam,
    LambdaTerm,
    LanguageError,
    LogicalTerm,
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
    Var,
    When,
    ZERO,
    Zero,
    _key_formula,
    _key_term,
    alpha_eq_formula,
    check_formula,
    fresh,
    fv_formula,
    sort_of,
    subst_formula,
)


class ProofError(LanguageError):
    pass


RULES = (
    "assume", "axiom", "topi", "bote",
    "andi", "andel", "ander",
    "oril", "orir", "ore",
    "impi", "impe",
    "alli", "alle", "exi", "exe",
)


@dataclass(frozen=True)
class NDProof:
    rule: str
    conclusion: Formula
    children: tuple["NDProof", ...] = ()
    label: Optional[str] = None           # assume; impi discharge label
    formula: Optional[Formula] = None     # assume/axiom formula, impi discharged
    #                                       formula, bote target, oril/orir complement
    var: Optional[str] = None             # alli / exe eigenvariable
    sort: Optional[str] = None
    witness: Optional[LogicalTerm] = None  # alle index / exi witness
    body: Optional[Formula] = None        # exi body annotation


AssumptionList = tuple[tuple[str, Formula], ...]


# ---------------------------------------------------------------------------
# constructors: each computes the conclusion and raises ProofError on misuse

def assume(label: str, f: Formula) -> NDProof:
    return NDProof("assume", f, label=label, formula=f)


def axiom(f: Formula) -> NDProof:
    return NDProof("axiom", f, formula=f)


def topi() -> NDProof:
    return NDProof("topi", ONE)


def bote(target: Formula) -> NDProof:
    return NDProof("bote", Arrow(ZERO, target), formula=target)


def andi(p: NDProof, q: NDProof) -> NDProof:
    return NDProof("andi", Prod(p.conclusion, q.conclusion), (p, q))


def andel(p: NDProof) -> NDProof:
    if not isinstance(p.conclusion, Prod):
        raise ProofError(f"andel on {p.conclusion!r}")
    return NDProof("andel", p.conclusion.left, (p,))


def ander(p: NDProof) -> NDProof:
    if not isinstance(p.conclusion, Prod):
        raise ProofError(f"ander on {p.conclusion!r}")
    return NDProof("ander", p.conclusion.right, (p,))


def oril(p: NDProof, other: Formula) -> NDProof:
    return NDProof("oril", Sum(p.conclusion, other), (p,), formula=other)


def orir(p: NDProof, other: Formula) -> NDProof:
    return NDProof("orir", Sum(other, p.conclusion), (p,), formula=other)


def ore(maj: NDProof, left: NDProof, right: NDProof) -> NDProof:
    s = maj.conclusion
    if not isinstance(s, Sum):
        raise ProofError(f"ore major premise {s!r}")
    lt, rt = left.conclusion, right.conclusion
    if not (isinstance(lt, Arrow) and alpha_eq_formula(lt.dom, s.left)):
        raise ProofError("ore left branch does not consume the left disjunct")
    if not (isinstance(rt, Arrow) and alpha_eq_formula(rt.dom, s.right)):
        raise ProofError("ore right branch does not consume the right disjunct")
    if not alpha_eq_formula(lt.cod, rt.cod):
        raise ProofError("ore branches disagree")
    return NDProof("ore", lt.cod, (maj, left, right))


def impi(label: str, discharged: Formula, p: NDProof) -> NDProof:
    return NDProof("impi", Arrow(discharged, p.conclusion), (p,), label=label, formula=discharged)


def impe(p: NDProof, q: NDProof) -> NDProof:
    f = p.conclusion
    if not isinstance(f, Arrow):
        raise ProofError(f"impe major premise {f!r}")
    if not alpha_eq_formula(f.dom, q.conclusion):
        raise ProofError(f"impe minor premise {q.conclusion!r}, wants {f.dom!r}")
    return NDProof("impe", f.cod, (p, q))


def alli(var: str, sort: str, p: NDProof) -> NDProof:
    return NDProof("alli", Forall(var, sort, p.conclusion), (p,), var=var, sort=sort)


def alle(p: NDProof, witness: LogicalTerm) -> NDProof:
    f = p.conclusion
    if not isinstance(f, Forall):
        raise ProofError(f"alle on {f!r}")
    concl = subst_formula(f.body, {(f.var, f.sort): witness})
    return NDProof("alle", concl, (p,), witness=witness)


def exi(var: str, sort: str, witness: LogicalTerm, body: Formula, p: NDProof) -> NDProof:
    want = subst_formula(body, {(var, sort): witness})
    if not alpha_eq_formula(p.conclusion, want):
        raise ProofError(f"exi premise {p.conclusion!r}, wants {want!r}")
    return NDProof("exi", Exists(var, sort, body), (p,), var=var, sort=sort,
                   witness=witness, body=body)


def exe(var: str, sort: str, maj: NDProof, minor: NDProof) -> NDProof:
    e = maj.conclusion
    if not isinstance(e, Exists) or e.sort != sort:
        raise ProofError(f"exe major premise {e!r}")
    if (var, sort) in fv_formula(e):
        raise ProofError(f"exe eigenvariable {var} occurs free in the major premise")
    mt = minor.conclusion
    if not isinstance(mt, Arrow):
        raise ProofError(f"exe minor premise {mt!r}")
    opened = subst_formula(e.body, {(e.var, e.sort): Var(var, sort)})
    if not alpha_eq_formula(mt.dom, opened):
        raise ProofError(f"exe minor consumes {mt.dom!r}, wants {opened!r}")
    if (var, sort) in fv_formula(mt.cod):
        raise ProofError(f"exe eigenvariable {var} escapes into the conclusion")
    return NDProof("exe", mt.cod, (maj, minor), var=var, sort=sort)


# ---------------------------------------------------------------------------
# checking

def live_assumptions(p: NDProof) -> set[tuple[str, tuple]]:
    """Undischarged assumption leaves of p, as (label, formula alpha key)."""
    if p.rule == "assume":
        return {(p.label, _key_formula(p.formula, {}, 0))}
    out: set[tuple[str, tuple]] = set()
    for c in p.children:
        out |= live_assumptions(c)
    if p.rule == "impi":
        out = {(l, k) for (l, k) in out
               if not (l == p.label and k == _key_formula(p.formula, {}, 0))}
    return out


def _check(sig: Signature, p: NDProof, theory_axioms: tuple[Formula, ...]) -> Optional[str]:
    """First failing node's description, or None."""
    for c in p.children:
        err = _check(sig, c, theory_axioms)
        if err:
            return err
    try:
        check_formula(sig, p.conclusion)
    except LanguageError as e:
        return f"{p.rule}: bad conclusion: {e}"
    r = p.rule
    ch = p.children
    try:
        if r == "assume":
            want = assume(p.label, p.formula)
        elif r == "axiom":
            ok = any(alpha_eq_formula(p.formula, a) for a in theory_axioms)
            ok = ok or isinstance(p.formula, One)
            ok = ok or (isinstance(p.formula, Arrow) and isinstance(p.formula.dom, Zero))
            if not ok:
                return f"axiom: formula {p.formula!r} is not an available axiom"
            want = axiom(p.formula)
        elif r == "topi":
            want = topi()
        elif r == "bote":
            want = bote(p.formula)
        elif r == "andi":
            want = andi(*ch)
        elif r == "andel":
            want = andel(*ch)
        elif r == "ander":
            want = ander(*ch)
        elif r == "oril":
            want = oril(ch[0], p.formula)
        elif r == "orir":
            want = orir(ch[0], p.formula)
        elif r == "ore":
            want = ore(*ch)
        elif r == "impi":
            want = impi(p.label, p.formula, ch[0])
            for (l, k) in live_assumptions(ch[0]):
                if l == p.label and k != _key_formula(p.formula, {}, 0):
                    return f"impi: label {p.label} used at a different formula"
        elif r == "impe":
            want = impe(*ch)
        elif r == "alli":
            if p.sort not in sig.sorts:
                return f"alli: unknown sort {p.sort}"
            want = alli(p.var, p.sort, ch[0])
            for (l, k) in live_assumptions(ch[0]):
                if _key_has_free(k, p.var, p.sort):
                    return f"alli: eigenvariable {p.var} free in live assumption {l}"
        elif r == "alle":
            want = alle(ch[0], p.witness)
            if sort_of(sig, p.witness) != ch[0].conclusion.sort:
                return "alle: witness sort mismatch"
        elif r == "exi":
            want = exi(p.var, p.sort, p.witness, p.body, ch[0])
            if sort_of(sig, p.witness) != p.sort:
                return "exi: witness sort mismatch"
        elif r == "exe":
            want = exe(p.var, p.sort, *ch)
            for (l, k) in live_assumptions(ch[1]):
                if _key_has_free(k, p.var, p.sort):
                    return f"exe: eigenvariable {p.var} free in live assumption {l}"
        else:
            return f"unknown rule {r}"
    except (ProofError, LanguageError) as e:
        return f"{r}: {e}"
    if not alpha_eq_formula(want.conclusion, p.conclusion):
        return f"{r}: conclusion {p.conclusion!r} should be {want.conclusion!r}"
    return None


def _key_has_free(key: tuple, var: str, sort: str) -> bool:
    # formula alpha keys embed free variables as ("v", name, sort)
    if isinstance(key, tuple):
        if len(key) == 3 and key[0] == "v" and key[1] == var and key[2] == sort:
            return True
        return any(_key_has_free(k, var, sort) for k in key)
    return False


def check_proof(
    sig: Signature,
    gamma: AssumptionList,
    p: NDProof,
    goal: Formula,
    theory_axioms: Iterable[Formula] = (),
) -> bool:
    ok, _ = check_proof_report(sig, gamma, p, goal, theory_axioms)
    return ok


def check_proof_report(
    sig: Signature,
    gamma: AssumptionList,
    p: NDProof,
    goal: Formula,
    theory_axioms: Iterable[Formula] = (),
) -> tuple[bool, str]:
    """Check p proves goal from gamma; on failure name the first bad node."""
    labels = [l for l, _ in gamma]
    if len(set(labels)) != len(labels):
        return False, "duplicate assumption label"
    err = _check(sig, p, tuple(theory_axioms))
    if err:
        return False, err
    if not alpha_eq_formula(p.conclusion, goal):
        return False, f"proves {p.conclusion!r}, not the goal"
    have = {(l, _key_formula(f, {}, 0)) for l, f in gamma}
    for (l, k) in live_assumptions(p):
        if (l, k) not in have:
            return False, f"undischarged assumption {l} not in the context"
    return True, "ok"


# ---------------------------------------------------------------------------
# formulas are types: the two translations are the identity here

def type_of_formula(f: Formula) -> Formula:
    """Formulas and lambda types share one grammar; the translation is id."""
    return f


def formula_of_type(f: Formula) -> Formula:
    return f


# ---------------------------------------------------------------------------
# compilers

def proof_to_term(sig: Signature, p: NDProof) -> LambdaTerm:
    """Compile a checked proof to a lambda term; labels become variable names."""
    r = p.rule
    ch = p.children
    if r == "assume":
        return LVar(p.label, p.formula)
    if r == "axiom":
        f = p.formula
        if isinstance(f, One):
            return STAR
        if isinstance(f, Arrow) and isinstance(f.dom, Zero):
            return Absurd(f.cod)
        if isinstance(f, Arrow):
            for name, decl in sig.axioms.items():
                if alpha_eq_formula(decl.dom, f.dom) and alpha_eq_formula(decl.cod, f.cod):
                    x = fresh("h")
                    return Lam(x, f.dom, AxApp(name, LVar(x, f.dom)))
        raise ProofError(f"axiom {f!r} has no lambda counterpart in the signature")
    if r == "topi":
        return STAR
    if r == "bote":
        return Absurd(p.formula)
    if r == "andi":
        return Pair(proof_to_term(sig, ch[0]), proof_to_term(sig, ch[1]))
    if r == "andel":
        return Fst(proof_to_term(sig, ch[0]))
    if r == "ander":
        return Snd(proof_to_term(sig, ch[0]))
    if r == "oril":
        return Inl(p.formula, proof_to_term(sig, ch[0]))
    if r == "orir":
        return Inr(p.formula, proof_to_term(sig, ch[0]))
    if r == "ore":
        return When(*(proof_to_term(sig, c) for c in ch))
    if r == "impi":
        return Lam(p.label, p.formula, proof_to_term(sig, ch[0]))
    if r == "impe":
        left, right = ch
        if left.rule == "axiom" and isinstance(left.formula, Arrow) and not (
            isinstance(left.formula.dom, Zero)
        ):
            for name, decl in sig.axioms.items():
                if alpha_eq_formula(decl.dom, left.formula.dom) and alpha_eq_formula(
                    decl.cod, left.formula.cod
                ):
                    return AxApp(name, proof_to_term(sig, right))
        return Ap(proof_to_term(sig, left), proof_to_term(sig, right))
    if r == "alli":
        return AllI(p.var, p.sort, proof_to_term(sig, ch[0]))
    if r == "alle":
        return AllE(proof_to_term(sig, ch[0]), p.witness)
    if r == "exi":
        return ExI(p.var, p.sort, p.witness, p.body, proof_to_term(sig, ch[0]))
    if r == "exe":
        return ExE(proof_to_term(sig, ch[0]), p.var, p.sort, proof_to_term(sig, ch[1]))
    raise ProofError(f"unknown rule {r}")


def term_to_proof(sig: Signature, t: LambdaTerm) -> NDProof:
    """Compile a typed term to a proof; variable names become labels."""
    match t:
        case LVar(x, ty):
            return assume(x, ty)
        case Star():
            return topi()
        case Absurd(a):
            return bote(a)
        case AxApp(name, a):
            decl = sig.axioms[name]
            return impe(axiom(Arrow(decl.dom, decl.cod)), term_to_proof(sig, a))
        case Pair(a, b):
            return andi(term_to_proof(sig, a), term_to_proof(sig, b))
        case Fst(a):
            return andel(term_to_proof(sig, a))
        case Snd(a):
            return ander(term_to_proof(sig, a))
        case Inl(other, a):
            return oril(term_to_proof(sig, a), other)
        case Inr(other, a):
            return orir(term_to_proof(sig, a), other)
        case When(s, l, r):
            return ore(term_to_proof(sig, s), term_to_proof(sig, l), term_to_proof(sig, r))
        case Lam(x, ty, body):
            return impi(x, ty, term_to_proof(sig, body))
        case Ap(a, b):
            return impe(term_to_proof(sig, a), term_to_proof(sig, b))
        case AllI(x, s, body):
            return alli(x, s, term_to_proof(sig, body))
        case AllE(a, r):
            return alle(term_to_proof(sig, a), r)
        case ExI(x, s, w, bt, a):
            return exi(x, s, w, bt, term_to_proof(sig, a))
        case ExE(sc, x, s, body):
            return exe(x, s, term_to_proof(sig, sc), term_to_proof(sig, body))
    raise ProofError(f"not a lambda term: {t!r}")


# ---------------------------------------------------------------------------
# proof comparison up to labels and alpha

def proof_alpha_key(p: NDProof) -> tuple:
    """Canonical key: equal keys iff proofs match up to labels/alpha.

    Discharge labels are numbered like binders, undischarged labels by first
    occurrence, so any consistent relabelling gives the same key; logical
    eigenvariables share the formula keys' index space.
    """
    free_labels: dict[str, int] = {}

    def go(q: NDProof, lab_env: dict, lenv: dict, lab_d: int, ld: int) -> tuple:
        kf = lambda f: _key_formula(f, lenv, ld) if f is not None else None  # noqa: E731
        kt = lambda w: _key_term(w, lenv) if w is not None else None  # noqa: E731
        r = q.rule
        if r == "assume":
            ident = lab_env.get(q.label)
            if ident is None:
                ident = ("free", free_labels.setdefault(q.label, len(free_labels)))
            return ("assume", ident, kf(q.formula))
        if r == "impi":
            child = go(q.children[0], {**lab_env, q.label: ("b", lab_d)}, lenv, lab_d + 1, ld)
            return ("impi", kf(q.formula), child)
        if r == "alli":
            child = go(q.children[0], lab_env, {**lenv, q.var: ld}, lab_d, ld + 1)
            return ("alli", q.sort, child)
        if r == "exe":
            major = go(q.children[0], lab_env, lenv, lab_d, ld)
            minor = go(q.children[1], lab_env, {**lenv, q.var: ld}, lab_d, ld + 1)
            return ("exe", q.sort, major, minor)
        if r == "exi":
            bt = _key_formula(q.body, {**lenv, q.var: ld}, ld + 1)
            return ("exi", q.sort, kt(q.witness), bt,
                    go(q.children[0], lab_env, lenv, lab_d, ld))
        parts = tuple(go(c, lab_env, lenv, lab_d, ld) for c in q.children)
        return (r, kf(q.formula), kt(q.witness), parts)

    return go(p, {}, {}, 0, 0)


def proofs_alpha_eq(p: NDProof, q: NDProof) -> bool:
    return proof_alpha_key(p) == proof_alpha_key(q)
