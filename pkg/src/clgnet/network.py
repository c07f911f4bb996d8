"""Bayesian network: a DAG plus one conditional distribution per variable.

Also home of the text model format:

    variable <name> discrete <arity>
    variable <name> continuous
    parents <name> : <p1> <p2> ...
    cpt <name> <config-j> <p0> <p1> ...
    clg <name> <config-j> <alpha> <beta...> <sigma2>

Variable indices are assigned by order of appearance.  The reader rejects
files whose network fails validation.
"""

from __future__ import annotations

import numpy as np

from .distributions import (
    ROW_SUM_TOL,
    VARIANCE_FLOOR,
    ConditionalLinearGaussian,
    MultinomialTable,
)
from .errors import ModelError
from .graph import ParentSet, ParentSetDag
from .suffstats import NetworkStats
from .variables import Variable
from .vectors import CompoundVector


class BayesianNetwork:
    def __init__(self, dag: ParentSetDag, distributions):
        distributions = tuple(distributions)
        if len(distributions) != len(dag):
            raise ValueError("need exactly one distribution per variable")
        for ps, dist in zip(dag, distributions):
            if dist.var != ps.main:
                raise ValueError(
                    f"distribution for {dist.var.name!r} does not match variable {ps.main.name!r}"
                )
        self.dag = dag
        self.distributions = distributions
        self._stats = None

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.dag.variables

    @property
    def stats_layout(self) -> NetworkStats:
        if self._stats is None:
            self._stats = NetworkStats.from_dag(self.dag)
        return self._stats

    def log_density(self, values) -> float:
        """Joint log density of one fully observed row (chain rule sum)."""
        return sum(dist.log_density(values) for dist in self.distributions)

    def sufficient_statistics(self, values) -> CompoundVector:
        return self.stats_layout.instance_stats(values)


def global_sufficient_statistics(bn: BayesianNetwork, values) -> CompoundVector:
    return bn.sufficient_statistics(values)


def validate(bn: BayesianNetwork) -> list[str]:
    """Structural and parametric checks; empty list means the network is valid.

    Violation codes: "acyclic", "clg-restriction", "alignment", "row-sum",
    "variance-floor".
    """
    violations = []
    if bn.dag.has_cycle():
        violations.append("acyclic: graph contains a directed cycle")
    for ps in bn.dag:
        if ps.main.is_discrete and ps.continuous_parents:
            names = ",".join(p.name for p in ps.continuous_parents)
            violations.append(
                f"clg-restriction: discrete {ps.main.name!r} has continuous parent(s) {names}"
            )
    for ps, dist in zip(bn.dag, bn.distributions):
        if dist.parents != ps.parents:
            expected_d = ps.discrete_parents + ps.continuous_parents
            if isinstance(dist, ConditionalLinearGaussian) and dist.parents == expected_d:
                continue
            violations.append(
                f"alignment: distribution parents of {ps.main.name!r} do not match the graph"
            )
    for dist in bn.distributions:
        if isinstance(dist, MultinomialTable):
            for j, row in enumerate(dist.table):
                if (row < 0).any() or abs(row.sum() - 1.0) > ROW_SUM_TOL:
                    violations.append(
                        f"row-sum: cpt row {j} of {dist.var.name!r} sums to {row.sum():.12g}"
                    )
        else:
            for j, s2 in enumerate(dist.sigma2):
                if not s2 >= VARIANCE_FLOOR:
                    violations.append(
                        f"variance-floor: config {j} of {dist.var.name!r} has variance {s2:.3g}"
                    )
    return violations


def moments_to_parameters(dag: ParentSetDag, expected_ss: CompoundVector, n: int) -> BayesianNetwork:
    """Network whose parameters maximise likelihood given averaged statistics.

    ``expected_ss`` is the per-instance statistics vector averaged over the
    data set of size ``n``.
    """
    if n < 1:
        raise ValueError("need at least one instance to estimate parameters")
    if not expected_ss.allfinite():
        raise ValueError("statistics contain non-finite moments")
    layout = NetworkStats.from_dag(dag)
    if expected_ss.skeleton() != layout.skeleton():
        raise ValueError("statistics skeleton does not match the graph")
    dists = []
    for ps, element in zip(dag, expected_ss):
        if ps.main.is_discrete:
            dists.append(MultinomialTable.from_moments(ps.main, ps.parents, element.values))
        else:
            dists.append(
                ConditionalLinearGaussian.from_moments(
                    ps.main, ps.discrete_parents, ps.continuous_parents, element.values
                )
            )
    return BayesianNetwork(dag, dists)


# --- model file format ---------------------------------------------------


def model_text(bn: BayesianNetwork, precision: int | None = None) -> str:
    """Canonical text form; full round-trip floats unless ``precision`` given."""
    if precision is None:
        def fmt(x):
            return repr(float(x))
    else:
        def fmt(x):
            return "%.*g" % (precision, float(x))

    lines = []
    for v in bn.variables:
        if v.is_discrete:
            lines.append(f"variable {v.name} discrete {v.arity}")
        else:
            lines.append(f"variable {v.name} continuous")
    for ps in bn.dag:
        parents = " ".join(p.name for p in ps.parents)
        lines.append(f"parents {ps.main.name} : {parents}".rstrip())
    for dist in bn.distributions:
        if isinstance(dist, MultinomialTable):
            for j, row in enumerate(dist.table):
                probs = " ".join(fmt(p) for p in row)
                lines.append(f"cpt {dist.var.name} {j} {probs}")
        else:
            for j in range(dist.nconfig):
                coefs = " ".join(fmt(b) for b in dist.beta[j])
                parts = [f"clg {dist.var.name} {j}", fmt(dist.alpha[j])]
                if coefs:
                    parts.append(coefs)
                parts.append(fmt(dist.sigma2[j]))
                lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def write_model(bn: BayesianNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_text(bn))


def read_model(path) -> BayesianNetwork:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise ModelError(f"cannot read model file {path}: {e}") from e
    return parse_model(raw)


def parse_model(text: str) -> BayesianNetwork:
    variables: dict[str, Variable] = {}
    parents: dict[str, list[str]] = {}
    cpt_rows: dict[str, dict[int, list[float]]] = {}
    clg_rows: dict[str, dict[int, list[float]]] = {}

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        kw = tokens[0]
        try:
            if kw == "variable":
                name = tokens[1]
                if name in variables:
                    raise ModelError(f"duplicate variable {name!r}")
                if tokens[2] == "discrete":
                    variables[name] = Variable.discrete(name, len(variables), int(tokens[3]))
                elif tokens[2] == "continuous":
                    variables[name] = Variable.continuous(name, len(variables))
                else:
                    raise ModelError(f"unknown variable kind {tokens[2]!r}")
            elif kw == "parents":
                name = tokens[1]
                if len(tokens) < 3 or tokens[2] != ":":
                    raise ModelError("parents line must contain ':'")
                if name in parents:
                    raise ModelError(f"duplicate parents line for {name!r}")
                parents[name] = tokens[3:]
            elif kw == "cpt":
                rows = cpt_rows.setdefault(tokens[1], {})
                j = int(tokens[2])
                if j in rows:
                    raise ModelError(f"duplicate cpt row {j} for {tokens[1]!r}")
                rows[j] = [float(t) for t in tokens[3:]]
            elif kw == "clg":
                rows = clg_rows.setdefault(tokens[1], {})
                j = int(tokens[2])
                if j in rows:
                    raise ModelError(f"duplicate clg row {j} for {tokens[1]!r}")
                rows[j] = [float(t) for t in tokens[3:]]
            else:
                raise ModelError(f"unknown keyword {kw!r}")
        except ModelError as e:
            raise ModelError(f"line {lineno}: {e}") from None
        except (IndexError, ValueError) as e:
            raise ModelError(f"line {lineno}: malformed {kw!r} line: {e}") from None

    if not variables:
        raise ModelError("model file declares no variables")

    ordered = sorted(variables.values(), key=lambda v: v.index)
    parent_sets = []
    for v in ordered:
        plist = []
        for pname in parents.get(v.name, []):
            if pname not in variables:
                raise ModelError(f"unknown parent {pname!r} of {v.name!r}")
            plist.append(variables[pname])
        try:
            parent_sets.append(ParentSet(v, tuple(plist)))
        except ValueError as e:
            raise ModelError(str(e)) from None
    try:
        dag = ParentSetDag(parent_sets)
    except ValueError as e:
        raise ModelError(str(e)) from None

    dists = []
    for ps in dag:
        v = ps.main
        if v.is_discrete:
            if ps.continuous_parents:
                names = ",".join(p.name for p in ps.continuous_parents)
                raise ModelError(
                    f"invalid network: clg-restriction: discrete {v.name!r} "
                    f"has continuous parent(s) {names}"
                )
            rows = cpt_rows.get(v.name)
            if rows is None:
                raise ModelError(f"missing cpt lines for {v.name!r}")
            dists.append(MultinomialTable(v, ps.parents, _assemble_rows(v.name, rows)))
        else:
            rows = clg_rows.get(v.name)
            if rows is None:
                raise ModelError(f"missing clg lines for {v.name!r}")
            table = _assemble_rows(v.name, rows)
            k = len(ps.continuous_parents)
            if table.shape[1] != k + 2:
                raise ModelError(
                    f"clg lines for {v.name!r} must carry alpha, {k} coefficient(s) and sigma2"
                )
            dists.append(
                ConditionalLinearGaussian(
                    v,
                    ps.discrete_parents,
                    ps.continuous_parents,
                    table[:, 0],
                    table[:, 1 : 1 + k],
                    table[:, 1 + k],
                )
            )

    try:
        bn = BayesianNetwork(dag, dists)
    except ValueError as e:
        raise ModelError(str(e)) from None
    violations = validate(bn)
    if violations:
        raise ModelError("invalid network: " + "; ".join(violations))
    return bn


def _assemble_rows(name: str, rows: dict[int, list[float]]) -> np.ndarray:
    nconfig = len(rows)
    if sorted(rows) != list(range(nconfig)):
        raise ModelError(f"configuration ids for {name!r} must be 0..{nconfig - 1}")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows.values()):
        raise ModelError(f"ragged parameter rows for {name!r}")
    return np.array([rows[j] for j in range(nconfig)], dtype=np.float64)
