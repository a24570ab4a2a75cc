"""Nested, crossed and equivalent relationships between partitions."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .design import Partition


class Relationship(str, Enum):
    EQUIVALENT = "Equivalent"
    NESTED_IN = "NestedIn"
    NESTS = "Nests"
    FULLY_CROSSED = "FullyCrossed"
    PARTIALLY_CROSSED = "PartiallyCrossed"

    def converse(self) -> "Relationship":
        if self is Relationship.NESTED_IN:
            return Relationship.NESTS
        if self is Relationship.NESTS:
            return Relationship.NESTED_IN
        return self


def _check(p: Partition, q: Partition):
    if p.n_units != q.n_units:
        raise ValueError(
            f"partitions cover different unit counts ({p.n_units} vs {q.n_units})"
        )


def n_cooccurring(p: Partition, q: Partition) -> int:
    """Number of distinct (class of p, class of q) pairs seen on some unit."""
    _check(p, q)
    return int(np.unique(p.class_of * q.n_classes + q.class_of).size)


def refines(p: Partition, q: Partition) -> bool:
    """True iff every class of ``p`` lies inside a single class of ``q``."""
    return n_cooccurring(p, q) == p.n_classes


def classify(p: Partition, q: Partition) -> Relationship:
    pairs = n_cooccurring(p, q)
    p_in_q = pairs == p.n_classes
    q_in_p = pairs == q.n_classes
    if p_in_q and q_in_p:
        return Relationship.EQUIVALENT
    if p_in_q:
        return Relationship.NESTED_IN
    if q_in_p:
        return Relationship.NESTS
    if pairs == p.n_classes * q.n_classes:
        return Relationship.FULLY_CROSSED
    return Relationship.PARTIALLY_CROSSED
