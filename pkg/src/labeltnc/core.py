"""Shared domain types, typed errors, and input validation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

CVM_IDS = ("dsc", "ch_btwn", "silhouette")


class LtncError(ValueError):
    """Base class for every typed error raised by this package.

    ``exit_code`` is what the CLI returns when the error escapes a command:
    2 for unreadable or malformed input, 3 for precondition violations.
    """

    exit_code = 3


class InputError(LtncError):
    exit_code = 2


class SizeMismatch(InputError):
    pass


class LabelMismatch(InputError):
    pass


class NonFinite(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class RaggedRows(ParseError):
    pass


class DegenerateLabels(LtncError):
    pass


class ClassTooSmall(LtncError):
    pass


class InvalidK(LtncError):
    pass


class InsufficientDims(LtncError):
    pass


class RankTooLarge(LtncError):
    pass


class NoConvergence(LtncError):
    pass


class BadRange(LtncError):
    pass


def remap_labels(labels) -> tuple[np.ndarray, int]:
    """Map arbitrary integer labels to ``0..k-1`` in first-occurrence order.

    >>> remap_labels([3, 3, 7, 7])[0].tolist()
    [0, 0, 1, 1]
    """
    labels = np.asarray(labels)
    uniq, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    # rank unique values by where they first appear
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[order] = np.arange(len(uniq))
    return rank[inverse.reshape(-1)], len(uniq)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """A point matrix with one class label per row.

    Arrays are copied on construction and made read-only. ``labels`` keeps the
    values it was given; ``codes`` is the contiguous first-occurrence remap
    that every measure works on.
    """

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {points.shape}")
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ValueError(f"labels must be 1-D, got shape {labels.shape}")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            as_int = labels.astype(np.int64)
            if not np.array_equal(as_int, labels):
                raise ParseError("labels must be integers")
            labels = as_int
        if len(labels) != len(points):
            raise SizeMismatch(f"{len(points)} points but {len(labels)} labels")
        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @cached_property
    def _remapped(self) -> tuple[np.ndarray, int]:
        codes, k = remap_labels(self.labels)
        return _frozen(codes), k

    @property
    def codes(self) -> np.ndarray:
        return self._remapped[0]

    @property
    def k(self) -> int:
        return self._remapped[1]

    @cached_property
    def class_indices(self) -> tuple[np.ndarray, ...]:
        order = np.argsort(self.codes, kind="stable")
        counts = np.bincount(self.codes, minlength=self.k)
        return tuple(np.split(order, np.cumsum(counts)[:-1]))

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.codes, minlength=self.k)

    def restrict(self, classes) -> "LabeledDataset":
        """Sub-dataset holding only the given classes, in the given class order."""
        idx = np.concatenate([self.class_indices[c] for c in classes])
        return LabeledDataset(self.points[idx], self.codes[idx])

    def with_points(self, points) -> "LabeledDataset":
        return LabeledDataset(points, self.labels)


@dataclass(frozen=True, eq=False)
class EvalPair:
    original: LabeledDataset
    embedding: LabeledDataset

    @property
    def n(self) -> int:
        return self.original.n

    @property
    def k(self) -> int:
        return self.original.k

    def swapped(self) -> "EvalPair":
        return EvalPair(self.embedding, self.original)


@dataclass(frozen=True)
class CvmConfig:
    cvm_id: str = "dsc"
    mc_count: int = 200
    seed: int = 42

    def __post_init__(self):
        if self.cvm_id not in CVM_IDS:
            raise ValueError(f"unknown cvm {self.cvm_id!r}; expected one of {CVM_IDS}")
        if self.cvm_id == "ch_btwn" and self.mc_count < 1:
            raise ValueError("mc_count must be >= 1 for ch_btwn")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def check_dataset(data: LabeledDataset, min_classes: int = 2) -> None:
    if data.n < 2:
        raise DegenerateLabels(f"need at least 2 points, got {data.n}")
    if not np.all(np.isfinite(data.points)):
        bad = int(np.argwhere(~np.isfinite(data.points))[0][0])
        raise NonFinite(f"non-finite coordinate in row {bad}")
    if data.k < min_classes:
        raise DegenerateLabels(f"need at least {min_classes} classes, got {data.k}")


def validate_pair(original: LabeledDataset, embedding: LabeledDataset) -> EvalPair:
    """Check that X and Z describe the same labeled points and remap labels.

    Returns fresh datasets whose labels are the contiguous codes; the inputs
    are left untouched.
    """
    if original.n != embedding.n:
        raise SizeMismatch(f"original has {original.n} points, embedding has {embedding.n}")
    if not np.array_equal(original.labels, embedding.labels):
        first = int(np.argmax(original.labels != embedding.labels))
        raise LabelMismatch(f"label vectors differ, first at row {first}")
    check_dataset(original)
    check_dataset(embedding)
    codes = original.codes
    return EvalPair(
        LabeledDataset(original.points, codes),
        LabeledDataset(embedding.points, codes),
    )
