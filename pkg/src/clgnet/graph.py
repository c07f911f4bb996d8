"""DAG structure stored as one self-contained parent-set record per variable.

Each record holds the variable itself plus its ordered parent list, so a
record can be processed without touching the rest of the graph.  Structure
queries (link count, children) are simple passes over the record list.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .variables import Variable, check_variable_set


@dataclass(frozen=True)
class ParentSet:
    main: Variable
    parents: tuple[Variable, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        seen = set()
        for p in self.parents:
            if p.index == self.main.index:
                raise ValueError(f"{self.main.name!r} cannot be its own parent")
            if p.index in seen:
                raise ValueError(f"duplicate parent {p.name!r} of {self.main.name!r}")
            seen.add(p.index)

    @property
    def discrete_parents(self) -> tuple[Variable, ...]:
        return tuple(p for p in self.parents if p.is_discrete)

    @property
    def continuous_parents(self) -> tuple[Variable, ...]:
        return tuple(p for p in self.parents if not p.is_discrete)


class ParentSetDag:
    """Ordered list of parent sets, one per variable, indexed 0..n-1.

    Acyclicity is not enforced at construction; ``topological_order`` raises
    on a cyclic graph and ``has_cycle`` reports it, which lets validation
    code surface the problem as a named violation instead of a crash.
    """

    def __init__(self, parent_sets):
        parent_sets = tuple(parent_sets)
        variables = check_variable_set(ps.main for ps in parent_sets)
        for i, ps in enumerate(parent_sets):
            if ps.main.index != i:
                raise ValueError("parent sets must be ordered by variable index")
            for p in ps.parents:
                if p.index >= len(parent_sets) or parent_sets[p.index].main != p:
                    raise ValueError(
                        f"parent {p.name!r} of {ps.main.name!r} is not a variable of this graph"
                    )
        self.parent_sets = parent_sets
        self.variables = variables
        self._topo = None

    def __len__(self):
        return len(self.parent_sets)

    def __iter__(self):
        return iter(self.parent_sets)

    def __getitem__(self, index) -> ParentSet:
        return self.parent_sets[index]

    def variable_named(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ValueError(f"no variable named {name!r}")

    def _check_member(self, var: Variable):
        if var.index >= len(self) or self.parent_sets[var.index].main != var:
            raise ValueError(f"variable {var.name!r} does not belong to this graph")

    def number_of_links(self) -> int:
        return sum(len(ps.parents) for ps in self.parent_sets)

    def parents_of(self, var: Variable) -> tuple[Variable, ...]:
        self._check_member(var)
        return self.parent_sets[var.index].parents

    def children_of(self, var: Variable) -> list[Variable]:
        """All variables that list ``var`` as a parent, in index order."""
        self._check_member(var)
        return [
            ps.main
            for ps in self.parent_sets
            if any(p.index == var.index for p in ps.parents)
        ]

    def has_cycle(self) -> bool:
        try:
            self.topological_order()
        except ValueError:
            return True
        return False

    def topological_order(self) -> tuple[Variable, ...]:
        """Variables ordered parents-first; ties broken by ascending index."""
        if self._topo is None:
            n = len(self)
            indegree = [len(ps.parents) for ps in self.parent_sets]
            children = [[] for _ in range(n)]
            for ps in self.parent_sets:
                for p in ps.parents:
                    children[p.index].append(ps.main.index)
            ready = [i for i in range(n) if indegree[i] == 0]
            order = []
            heapq.heapify(ready)
            while ready:
                i = heapq.heappop(ready)
                order.append(self.variables[i])
                for c in children[i]:
                    indegree[c] -= 1
                    if indegree[c] == 0:
                        heapq.heappush(ready, c)
            if len(order) != n:
                raise ValueError("graph contains a directed cycle")
            self._topo = tuple(order)
        return self._topo
