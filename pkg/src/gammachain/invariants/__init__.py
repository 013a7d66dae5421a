"""Torsion, chain invariants and the tower comparison driver."""

from .torsion import (NotAcyclic, NotSigmaInvertible, SimplenessVerdict, TorsionElement,
                      cohn_invertibility, complex_torsion, factor_class, laurent_det,
                      mapping_cone, simpleness_certificate, torsion_det)
from .tau import (ChainInvariantClass, ScObject, TauVerdict, ThetaError, basis_bijection,
                  identity_invariant, tau_invariant, tau_is_trivial, theta_map, verify_certificate)
from .compare import (EXIT_DIFFERENT, EXIT_TRIVIAL, EXIT_UNDECIDED, EXIT_USAGE, CompareReport,
                      LevelVerdict, tower_compare)


def grope_move_degree(n: int) -> int:
    """Degree of the finite-type modification made by a height-n grope move: 2^n."""
    if n < 1:
        raise ValueError("grope height must be >= 1")
    return 2 ** n
