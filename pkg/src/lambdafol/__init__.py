"""Proof-term kernel for multi-sorted first-order intuitionistic logic.

Subpackages by capability:

- syntax: formulas-as-types, the 16-constructor lambda terms, substitution,
  alpha equality, type inference
- curryhoward: natural-deduction proofs and the proof/term compilers
- equational: normalization and the decision procedure for term equality
- semantics: finite categories, logical distributivity checking, interpretation
- syncat: the term-model category built from a theory, with proof search
- kripke: finite Kripke models, forcing, and the induced categorical model
- sexpr, cli: the s-expression surface syntax and command-line front end
"""

from .syntax import (  # noqa: F401
    AllE,
    AllI,
    Ap,
    App,
    Arrow,
    Atom,
    Absurd,
    AxApp,
    AxiomDecl,
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
    LogicalTerm,
    LVar,
    ONE,
    One,
    Pair,
    Prod,
    Signature,
    SignatureError,
    Snd,
    SortError,
    STAR,
    Star,
    Sum,
    TermInContext,
    TypingError,
    Var,
    When,
    ZERO,
    Zero,
    alpha_eq_formula,
    alpha_eq_lambda,
    alpha_key_formula,
    alpha_key_lambda,
    check_context,
    check_equality_in_context,
    check_formula,
    check_term_in_context,
    fresh,
    fv_formula,
    fv_lambda,
    fv_star,
    fv_term,
    infer_type,
    lfv_lambda,
    sort_of,
    subst_formula,
    subst_lambda,
    subst_logical_in_lambda,
    subst_term,
    term_size,
)

__version__ = "0.1.0"
