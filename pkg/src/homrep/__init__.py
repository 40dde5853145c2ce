"""Homology representations of big mapping class groups, made computable.

Surfaces with finitely many ends (punctures and nonplanar ends), their
first homology with the intersection pairing, flare submodules and the end
filtration, finitely supported automorphisms, and a decision procedure
(with certificates) for which automorphisms are induced by homeomorphisms.
"""
from .automorphism import (FinAutomorphism, apply_class, apply_flare, compose, end_map, invert,
                           make_automorphism, negate, preserves_filtration, puncture_swap_auto,
                           transvection_auto)
from .filtration import (FlareModule, flare_contains, flare_leq, is_flare_module,
                         nested_realization, reconstruct_ends, standard_flare, standard_sample)
from .homology import (BasisIndex, Functional, HClass, ai_pair, basis_extension_simple_test,
                       classify_functional, end_class, end_coordinates, is_simple_isotropic,
                       is_simple_nonisotropic, lends_of_class, make_arc_functional,
                       nonisotropic_witness, twist_action)
from .realization import (Certificate, Generator, MembershipVerdict, Verdict, build_certificate,
                          check_membership, eval_word, factor_window, verify_certificate)
from .surface import (EndKind, EndSpec, SurfaceModel, build_surface, classification_triple,
                      is_homeomorphic, satisfies_star)

__version__ = "0.1.0"
