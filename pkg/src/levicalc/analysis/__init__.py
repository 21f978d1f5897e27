"""Fixed points, factorization and named classes of infinitely divisible laws."""

from levicalc.analysis.area import AreaReport, stochastic_area_identity
from levicalc.analysis.classes import (
    CLASS_TAGS,
    ClassTag,
    MembershipReport,
    RangeReport,
    build_member,
    class_membership,
    get_class,
    list_classes,
    thorin_range_check,
)
from levicalc.analysis.factorization import (
    ConditionReport,
    FactorizationReport,
    check_factorization,
    factorization_conditions,
    image_interval,
)
from levicalc.analysis.stable import (
    FixedPointReport,
    MultiplicativityReport,
    PreservationReport,
    StableLaw,
    class_preservation_scan,
    fixed_point_constant,
    multiplicativity_check,
    verify_fixed_point,
)

__all__ = [
    "CLASS_TAGS",
    "AreaReport",
    "ClassTag",
    "ConditionReport",
    "FactorizationReport",
    "FixedPointReport",
    "MembershipReport",
    "MultiplicativityReport",
    "PreservationReport",
    "RangeReport",
    "StableLaw",
    "build_member",
    "check_factorization",
    "class_membership",
    "class_preservation_scan",
    "factorization_conditions",
    "fixed_point_constant",
    "get_class",
    "image_interval",
    "list_classes",
    "multiplicativity_check",
    "stochastic_area_identity",
    "thorin_range_check",
    "verify_fixed_point",
]
