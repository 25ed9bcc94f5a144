"""Kernel for freely generated dependent type theories.

Thin re-export of the compiled module: signatures, the normal-form term
calculus, first-order unification, most general generalizations, and
identity-type strictification.
"""

from ._core import (
    Signature,
    Telescope,
    Term,
    Type,
    Subst,
    StrictIdTypes,
    apply_subst_term,
    apply_subst_type,
    compose_subst,
    enumerate_terms,
    generalize_term,
    generalize_type,
    identity_subst,
    infer_type,
    parse_signature,
    parse_telescope,
    parse_term,
    parse_type,
    print_signature,
    print_subst,
    print_telescope,
    print_term,
    print_type,
    run,
    subst,
    unify_terms,
    unify_types,
)

__all__ = [
    "Signature",
    "Telescope",
    "Term",
    "Type",
    "Subst",
    "StrictIdTypes",
    "apply_subst_term",
    "apply_subst_type",
    "compose_subst",
    "enumerate_terms",
    "generalize_term",
    "generalize_type",
    "identity_subst",
    "infer_type",
    "parse_signature",
    "parse_telescope",
    "parse_term",
    "parse_type",
    "print_signature",
    "print_subst",
    "print_telescope",
    "print_term",
    "print_type",
    "run",
    "subst",
    "unify_terms",
    "unify_types",
]

__version__ = "0.1.0"
