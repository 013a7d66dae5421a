"""Words, coefficient groups, group rings, Fox calculus, derived series."""

from .derived import FreeSolvableQuotient, derived_membership
from .fox import fox_derivative, fox_identity_holds, fox_jacobian_row
from .grope import (cap_count, grope_boundary_word, shape_height, simplest_shape,
                    subgropes_at_depth)
from .groups import (AbelianGroup, FreeGroup, GroupError, GroupHom, abelianization,
                     group_pow, hom_apply, identity_hom, trivial_group, trivializing_hom)
from .ring import (GroupRingElem, RingTagError, augmentation, coefficient_change,
                   format_canonical, format_elem, parse_elem, ring_add, ring_mul)
from .words import Word, WordError, commutator, conjugate, format_word, free_reduce, parse_word

__all__ = [
    "AbelianGroup", "FreeGroup", "FreeSolvableQuotient", "GroupError", "GroupHom",
    "GroupRingElem", "RingTagError", "Word", "WordError", "abelianization", "augmentation",
    "cap_count", "coefficient_change", "commutator", "conjugate", "derived_membership",
    "format_canonical", "format_elem", "format_word", "fox_derivative", "fox_identity_holds",
    "fox_jacobian_row", "free_reduce", "grope_boundary_word", "group_pow", "hom_apply",
    "identity_hom", "parse_elem", "parse_word", "ring_add", "ring_mul", "shape_height",
    "simplest_shape", "subgropes_at_depth", "trivial_group", "trivializing_hom",
]
