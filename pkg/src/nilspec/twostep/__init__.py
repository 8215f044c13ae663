"""2-step nilpotent groups: arithmetic, morphisms, Reidemeister numbers."""
from nilspec.twostep.bch import (RationalPoint, bch_inverse, bch_multiply, bch_power,
                                 bch_root, embed_F, lie_bracket, log_coordinates)
from nilspec.twostep.endo import (Endo, EndoFormatError, Hom, RelationError, center_matrix,
                                  compose, endo_from_matrix, identity_endo,
                                  invert_automorphism, is_automorphism, make_endomorphism,
                                  make_homomorphism, parse_endo, project_hom, zero_hom)
from nilspec.twostep.finite import (FiniteQuotient, abelian_image_order,
                                    brute_force_twisted_classes, reduce_mod_p)
from nilspec.twostep.group import (GroupElement, TwoStepGroup, build_graph_group, center_basis,
                                   commutator, direct_product_group, gamma2_basis,
                                   hirsch_length, inverse, is_central, isolator_gamma2,
                                   multiply, multiply_all, power)
from nilspec.twostep.reidemeister import (CensusResult, DomainError, TwistedConjugacy,
                                          abelian_reidemeister, box_elements, census,
                                          reidemeister, reidemeister_via_series,
                                          twisted_conjugate)
from nilspec.twostep.sampling import sample_automorphism
from nilspec.twostep.witt import witt_rank
