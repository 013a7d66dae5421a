"""Based free chain complexes over group rings."""

from .complex import (BasedFreeChainComplex, ChainError, ChainHomotopy, ChainMap, MoveWitness,
                      describe_move,
                      SimpleMove, ValidationReport, apply_moves, apply_simple_move, identity_map,
                      reduce_map, tensor_reduce, validate_complex, zero_complex, zero_homotopy,
                      zero_map)
from .matrix import Mat, block_diag, determinant, hstack, vstack
from .homology import (FittingIdeal, HomologyPresentation, UnsupportedRing, Verdict,
                       fitting_ideal, h0_trivial_check, homology_presentation, kernel_generators,
                       laurent_gcd, normalize_generator, realization_hypotheses_check,
                       small_chain_object_check)
from .fileformat import (FormatError, format_chain_map, format_complex, parse_chain_map,
                         parse_complex)
from .reduction import reduce_complex
from .align import (AlignError, AlignResult, align_one_skeleton, is_basis_preserving,
                    random_instance, replay_check)
