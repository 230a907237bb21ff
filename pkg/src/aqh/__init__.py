"""Operator calculus and classification of almost quaternion-Hermitian
intrinsic torsion on R^(4n), n >= 2."""

from .exterior import (
    AltForm,
    DegreeError,
    MixedTorsion,
    MixedTwoFormFamily,
    alternate5,
    contract12,
    hodge,
    inner,
    interior,
    wedge,
    wedge1,
    wedge_power,
)
from .structure import (
    AXES,
    QuatStructure,
    StructureError,
    insert,
    random_rotation,
    rotate_adapted,
    slot_sum,
    standard_structure,
)
from .torsion import (
    F_inverse,
    F_map,
    MembershipError,
    extract_cA,
    fiber_project,
    from_nabla_omegas,
    is_in_W,
    random_W_element,
    w_dim,
)
from .threeform import (
    OneFormTriple,
    hat_dstar,
    proj3,
    torsion_embed,
    table1_member,
    table1_residuals,
    xi,
    xi_triple,
)
from .projectors import (
    COMPONENT_DIMS,
    ComponentLabel,
    ComponentProfile,
    component,
    components,
    profile,
    proj_hpart,
    proj_s3hpart,
)
from .classify import (
    ClassLabel,
    DerivedFromDOmega,
    classification_report,
    classify,
    perp_EH5_test,
    table2_residual,
    table2_residual_dOmega,
    table2_rows,
    table3_residual,
    table3_rows,
    wedge_criteria,
)
from .liealg import (
    AlgebraError,
    MetricLieAlgebra,
    abelian_algebra,
    algebra_from_json,
    algebra_to_json,
    ce_d,
    classify_algebra,
    codiff_Omega,
    koszul,
    load_algebra,
    nabla_Omega,
    nabla_dense,
    nabla_form,
    nabla_omega,
    nijenhuis,
    two_step_nilpotent,
)
from .verify import run_suite

__version__ = "0.1.0"
