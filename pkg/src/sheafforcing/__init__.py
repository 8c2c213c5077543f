"""Forcing over finite Grothendieck sites."""
from .fincat import (FinCategory, NatTransFin, PresheafFin, ValidationReport, Violation,
                     hom_into, validate_category, validate_nat_trans, validate_presheaf)
from .sieves import (Sieve, Site, Topology, closed_sieves, generate_topology, heyting_bottom,
                     heyting_impl, heyting_join, heyting_meet, heyting_neg, heyting_top,
                     pullback_sieve, validate_topology)
from .names import (BudgetExceeded, Name, atom, check_name, close_name, enumerate_names,
                    op_pair, restrict, set_name, up)
from .formula import parse, tautology_suite, to_text
from .forcing import Verdict, delta0_suite, force, truth_value
from .matching import MatchFn, amalgamate, extract_witness, is_matching
from .izfa import check_axioms
from .settopos import check_equivalence, functor_K_obj, functor_L_obj
from .catalog import CATALOG
from .sitefile import load_site, site_to_doc

__all__ = [
    "FinCategory", "NatTransFin", "PresheafFin", "ValidationReport", "Violation", "hom_into",
    "validate_category", "validate_nat_trans", "validate_presheaf",
    "Sieve", "Site", "Topology", "closed_sieves", "generate_topology", "heyting_bottom",
    "heyting_impl", "heyting_join", "heyting_meet", "heyting_neg", "heyting_top",
    "pullback_sieve", "validate_topology",
    "BudgetExceeded", "Name", "atom", "check_name", "close_name", "enumerate_names",
    "op_pair", "restrict", "set_name", "up",
    "parse", "tautology_suite", "to_text",
    "Verdict", "delta0_suite", "force", "truth_value",
    "MatchFn", "amalgamate", "extract_witness", "is_matching",
    "check_axioms", "check_equivalence", "functor_K_obj", "functor_L_obj",
    "CATALOG", "load_site", "site_to_doc",
]
