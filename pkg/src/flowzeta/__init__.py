"""Exact noncommutative zeta functions of gradient-flow data.

Two independent constructions of the same class-indexed homology object --
the Dennis trace of Novikov-complex torsion and the Nielsen-Fuller series
over closed-orbit records -- with the Hochschild-chain machinery, the exact
truncated Novikov arithmetic underneath, and the eta / commutative /
rational companions.
"""

from .groups import (
    CONJUGACY,
    FREE,
    FREE_ABELIAN,
    SEMICONJUGACY,
    ClassIndex,
    GroupError,
    GroupSpec,
    Word,
    centralizer_exponent,
    class_of,
    conjugacy_class,
    semiconjugacy_class,
    smith_normal_form,
    twisted_conjugacy_test,
    witness_to_canonical,
)
from .groupring import INT, RAT, GroupRingElement, RingError
from .hochschild import (
    Chain1,
    Chain2,
    ChainError,
    CompletedChain1,
    EtaSeries,
    HH1ClassValue,
    boundary1,
    boundary2,
    e_hom,
    extract_class_value,
    l_hom,
    project_class,
    rationalize,
    split_classes,
    theta_expand,
    trace_tensor,
)
from .novikov import (
    NovikovMatrix,
    NovikovSeries,
    PrecisionError,
    TorsionUnit,
    exp_series,
    geometric_series,
    log_det_one_minus,
    matrix_geometric,
)
from .rationals import NEG_INF, parse_rational, rational_str
from .zeta import (
    OrbitRecord,
    ZetaError,
    ZetaResult,
    commutative_zeta,
    commutative_zeta_determinant,
    compare_extractions,
    dennis_trace_unit,
    enumerate_orbits_monomial,
    eta,
    eta_from_orbits,
    nielsen_fuller,
    one_parameter_trace,
    rational_zeta,
    verify_main_equality,
    verify_rational_zeta,
    zeta_from_matrices,
)

__version__ = "0.1.0"
