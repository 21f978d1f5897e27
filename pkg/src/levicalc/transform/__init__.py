"""Integral maps acting on exponents and triples."""

from levicalc.transform.domain import DomainCheck, DomainReport, domain_check, log_moment_order
from levicalc.transform.exponent import transform_exponent
from levicalc.transform.retrieval import RetrievalReport, retrieval_limit_check
from levicalc.transform.triple import (
    image_levy_measure,
    separating_level,
    tail_table,
    transform_triple,
    write_tail_csv,
)

__all__ = [
    "DomainCheck",
    "DomainReport",
    "RetrievalReport",
    "domain_check",
    "image_levy_measure",
    "log_moment_order",
    "retrieval_limit_check",
    "separating_level",
    "tail_table",
    "transform_exponent",
    "transform_triple",
    "write_tail_csv",
]
