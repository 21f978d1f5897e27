"""Composition of integral maps, the closed-form catalog and equivalence checks."""

from levicalc.compose.catalog import (
    CATALOG_VERSION,
    CatalogEntry,
    catalog,
    get_entry,
    list_entries,
)
from levicalc.compose.equivalence import (
    EQUIVALENT_PAIRS,
    CommutativityReport,
    EquivalenceReport,
    commutativity_check,
    equivalence_check,
    get_pair,
    nested_exponent,
)
from levicalc.compose.pushforward import (
    PushforwardResult,
    compose,
    identify,
    image_density_mc,
    image_tail,
    pushforward,
    write_image_tail_csv,
)

__all__ = [
    "CATALOG_VERSION",
    "EQUIVALENT_PAIRS",
    "CatalogEntry",
    "CommutativityReport",
    "EquivalenceReport",
    "PushforwardResult",
    "catalog",
    "commutativity_check",
    "compose",
    "equivalence_check",
    "get_entry",
    "get_pair",
    "identify",
    "image_density_mc",
    "image_tail",
    "list_entries",
    "nested_exponent",
    "pushforward",
    "write_image_tail_csv",
]
