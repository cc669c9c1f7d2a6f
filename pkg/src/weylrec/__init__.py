"""weylrec: recurrent Lorentzian Weyl structures.

Local normal forms, jet-based curvature verification (recurrence, holonomy,
conformal flatness, Einstein-Weyl), rational differential invariants with
their group actions, signature-curve equivalence, and symmetry/cohomogeneity
classification.
"""

__version__ = "0.1.0"

from .exprlang import ExprDomainError, ExprSyntaxError, SourceSpan, eval_jet, eval_number, parse
from .jets import JetDomainError, JetPoly, JetShapeError
from .tensor import (
    Chart,
    Connection,
    HolonomyReport,
    LieDerivativeReport,
    PointTensor,
    RecurrenceReport,
    WeylStructure,
    conformal_weyl_tensor,
    curvature,
    holonomy_span_dim,
    levi_civita,
    lie_derivative_check,
    make_structure,
    nabla_R,
    recurrence_theta,
    weyl_compatibility_residual,
    weyl_connection,
)
from .catalog import (
    CatalogEntry,
    CatalogError,
    killing_and_extra_fields,
    make_3d_case1,
    make_3d_case2,
    make_dim_ge4,
    make_homogeneous_model,
    make_mainth_form,
    riccati_residual,
    standard_catalog,
    symmetric_psi_family,
)
from .invariants import (
    EquivalenceVerdict,
    GroupElem3D2,
    GroupElemD4,
    PairJet,
    PseudoElem3D1,
    PsiJet,
    SignatureCurve,
    SingularStratumError,
    act_3d1,
    act_3d2,
    act_d4,
    derived_invariant,
    equivalence_test,
    pair_invariants,
    pair_signature_curve,
    psi_invariants,
    psi_signature_curve,
    surface_derived_pair,
    surface_invariants,
    surface_signature_curve,
)
from .symmetry import (
    BracketClosure,
    ClassificationResult,
    SymmetryKernel,
    bracket_closure,
    classify_3d2,
    classify_psi,
    kernel_3d2,
    psi_symmetry_kernel,
    symmetry_residual_3d1,
)
from .einsteinweyl import EWReport, dkp_residual, ew_residual, ricci_sym
