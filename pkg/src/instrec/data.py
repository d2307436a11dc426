"""Tabular training data shared by the fern and forest learners."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """Feature rows with integer class labels.

    ``rows`` has shape (n_objects, n_attributes); ``labels`` holds class
    indices below ``len(class_labels)``. When ``class_labels`` is omitted
    it defaults to ``class_0 .. class_<max label>``.
    """

    rows: np.ndarray
    labels: np.ndarray
    class_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if rows.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {rows.shape}")
        if labels.shape != (rows.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {rows.shape[0]} rows"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        if not self.class_labels:
            n_classes = int(labels.max()) + 1 if len(labels) else 0
            object.__setattr__(
                self, "class_labels", tuple(f"class_{i}" for i in range(n_classes))
            )
        if len(labels) and (labels.min() < 0 or labels.max() >= len(self.class_labels)):
            raise ValueError("labels must lie in [0, n_classes)")

    @property
    def n_objects(self) -> int:
        return self.rows.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.rows.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)
