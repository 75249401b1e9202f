"""Exact border bases, border basis schemes, and flat deformations over Q."""

from .ring import (Context, Polynomial, PolyMatrix, TermOrdering, LEX, DEGLEX,
                   DEGREVLEX, wdegrevlex, check_weights, default_main_names)
from .parsing import ParseError, parse_polynomial
from .orderideal import (Border, BorderWeb, OrderIdeal, WebEdge, border,
                         border_form, border_web, has_maxdeg_border,
                         higher_border, is_order_ideal, maxdeg_dimension_data,
                         o_index, parse_term, term_set)
from .groebner import (GroebnerBasis, InfeasibleWeights, NotZeroDimensional,
                       buchberger, find_weight_vector, ideal_equal,
                       ideal_member, interreduce, krull_dimension, normal_form,
                       quotient_basis)
from .borderbasis import (BorderPrebasis, CommuteVerdict, DimensionMismatch,
                          NotABasis, border_basis_of_ideal, border_divide,
                          is_border_basis, is_border_basis_via_division,
                          multiplication_matrices)
from .scheme import (CellSolution, EquivalenceReport, GeneratorBlock,
                     IdentityFailed, NotHomogeneous, affine_cell,
                     block_polynomials, check_generation_equivalence,
                     commutator_blocks, corner_certificate,
                     eliminate_linear_parameters, generic_matrices,
                     generic_prebasis, minimal_generator_count,
                     minimalize_blocks, syzygy_blocks, to_coefficient_ring)

__version__ = "0.1.0"
