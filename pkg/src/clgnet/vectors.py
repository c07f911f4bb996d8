"""Compound statistics vectors.

A compound vector is a list of small per-variable vectors, each tagged with
its variable index.  Keeping the per-variable blocks separate (rather than
one flat array) makes element-wise reduction skeleton-checked: two vectors
can only be combined when they describe the same network.
"""

from __future__ import annotations

import numpy as np


class IndexedElement:
    __slots__ = ("index", "values")

    def __init__(self, index: int, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("element values must be a flat vector")
        values.setflags(write=False)
        self.index = int(index)
        self.values = values

    def __repr__(self):
        return f"IndexedElement({self.index}, {self.values!r})"


class CompoundVector:
    """Immutable list of IndexedElement, sorted by variable index."""

    __slots__ = ("elements",)

    def __init__(self, elements):
        elements = tuple(elements)
        indices = [e.index for e in elements]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate element indices")
        if indices != sorted(indices):
            elements = tuple(sorted(elements, key=lambda e: e.index))
        self.elements = elements

    def skeleton(self) -> tuple:
        return tuple((e.index, len(e.values)) for e in self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i) -> IndexedElement:
        return self.elements[i]

    def element(self, index: int) -> IndexedElement:
        for e in self.elements:
            if e.index == index:
                return e
        raise KeyError(index)

    def _check_same_skeleton(self, other: "CompoundVector"):
        if self.skeleton() != other.skeleton():
            raise ValueError("compound vectors have different skeletons")

    def __add__(self, other: "CompoundVector") -> "CompoundVector":
        self._check_same_skeleton(other)
        return CompoundVector(
            IndexedElement(a.index, a.values + b.values)
            for a, b in zip(self.elements, other.elements)
        )

    def scale(self, c: float) -> "CompoundVector":
        return CompoundVector(
            IndexedElement(e.index, e.values * c) for e in self.elements
        )

    def divide(self, c: float) -> "CompoundVector":
        return CompoundVector(
            IndexedElement(e.index, e.values / c) for e in self.elements
        )

    def to_flat(self) -> np.ndarray:
        return np.concatenate([e.values for e in self.elements]) if self.elements else np.empty(0)

    def allfinite(self) -> bool:
        return all(np.isfinite(e.values).all() for e in self.elements)

    def __eq__(self, other):
        if not isinstance(other, CompoundVector):
            return NotImplemented
        return self.skeleton() == other.skeleton() and all(
            np.array_equal(a.values, b.values)
            for a, b in zip(self.elements, other.elements)
        )

    def __hash__(self):
        return hash(self.skeleton())

    def __repr__(self):
        return f"CompoundVector({len(self.elements)} elements)"


def vector_add(a: CompoundVector, b: CompoundVector) -> CompoundVector:
    return a + b


def vector_scale(a: CompoundVector, c: float) -> CompoundVector:
    return a.scale(c)


def zero_like(skeleton_owner) -> CompoundVector:
    """All-zeros vector with the skeleton of a CompoundVector or stats layout."""
    if isinstance(skeleton_owner, CompoundVector):
        return CompoundVector(
            IndexedElement(e.index, np.zeros(len(e.values))) for e in skeleton_owner
        )
    return skeleton_owner.zero()


class PairwiseSum:
    """Streaming sum with a bracketing fixed by the number of pushes alone.

    Partials are held in a binary-counter ladder: level i stores the sum of a
    run of 2**i consecutive pushes.  The combine tree therefore depends only
    on how many values were pushed, never on scheduling, so reducing the same
    sequence always produces bit-identical floating-point results.
    """

    def __init__(self):
        self._levels = []
        self.count = 0

    def push(self, value):
        self.count += 1
        for i, held in enumerate(self._levels):
            if held is None:
                self._levels[i] = value
                return
            value = held + value
            self._levels[i] = None
        self._levels.append(value)

    def total(self):
        """Combined sum, or None if nothing was pushed."""
        total = None
        for held in self._levels:
            if held is None:
                continue
            total = held if total is None else held + total
        return total
