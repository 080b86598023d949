"""Exact symbolic calculus for Jacobi pairs, contact forms and Spencer operators."""
from .contact import (
    ContactForm,
    NotContactError,
    b_map,
    decompose_vf,
    induced_jacobi_pair,
    is_contact,
    reconstruct_vf,
    reeb_bracket,
    reeb_field,
    reeb_field_of,
)
from .extcalc import (
    DiffForm,
    MultiVector,
    d,
    interior,
    lie_derivative,
    pairing,
    schouten,
    vf_bracket,
    wedge,
)
from .jacobi import (
    JacobiPair,
    NotJacobiError,
    check_jacobi_pair,
    jacobi_bracket,
    jacobiator,
    poissonization,
)
from .jetalg import (
    JetSection,
    algebroid_bracket,
    anchor,
    bracket_from_algebroid,
    check_spencer_axioms,
    i_incl,
    j1,
    nabla,
    spencer_D,
)
from .symcore import Chart, Expr, ParseError, parse, random_poly

__version__ = "0.1.0"

__all__ = [
    "Chart", "Expr", "ParseError", "parse", "random_poly",
    "MultiVector", "DiffForm", "wedge", "d", "interior", "pairing", "schouten", "vf_bracket", "lie_derivative",
    "JacobiPair", "NotJacobiError", "check_jacobi_pair", "jacobi_bracket", "jacobiator", "poissonization",
    "ContactForm", "NotContactError", "is_contact", "reeb_field", "reeb_field_of", "b_map", "reeb_bracket",
    "induced_jacobi_pair", "decompose_vf", "reconstruct_vf",
    "JetSection", "j1", "i_incl", "spencer_D", "anchor", "algebroid_bracket", "nabla",
    "bracket_from_algebroid", "check_spencer_axioms",
]
