"""Typed random variables.

A variable is either discrete with a finite number of states (stored as
integer state ids 0..arity-1) or continuous (real valued).  Every variable
carries a dense index giving its position in the network and in data rows.
"""

from __future__ import annotations

from dataclasses import dataclass

DISCRETE = "discrete"
CONTINUOUS = "continuous"


@dataclass(frozen=True)
class Variable:
    name: str
    index: int
    kind: str
    arity: int | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")
        if self.index < 0:
            raise ValueError(f"variable index must be >= 0, got {self.index}")
        if self.kind == DISCRETE:
            if self.arity is None or self.arity < 2:
                raise ValueError(
                    f"discrete variable {self.name!r} needs arity >= 2, got {self.arity}"
                )
        elif self.kind == CONTINUOUS:
            if self.arity is not None:
                raise ValueError(f"continuous variable {self.name!r} cannot have an arity")
        else:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @classmethod
    def discrete(cls, name: str, index: int, arity: int) -> "Variable":
        return cls(name, index, DISCRETE, arity)

    @classmethod
    def continuous(cls, name: str, index: int) -> "Variable":
        return cls(name, index, CONTINUOUS)

    @property
    def is_discrete(self) -> bool:
        return self.kind == DISCRETE


def check_variable_set(variables) -> tuple[Variable, ...]:
    """Validate that indices form a dense 0..n-1 range and names are unique."""
    variables = tuple(variables)
    indices = [v.index for v in variables]
    if sorted(indices) != list(range(len(variables))):
        raise ValueError(f"variable indices must be a permutation of 0..{len(variables) - 1}")
    names = {v.name for v in variables}
    if len(names) != len(variables):
        raise ValueError("variable names must be unique")
    return variables
