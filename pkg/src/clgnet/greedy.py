"""Greedy search with parallel candidate evaluation.

The outer loop is strictly sequential: enumerate candidates, score them all
(concurrently when workers > 1), pick the best, update the state, repeat
until no candidate beats the incumbent by more than the threshold.  Scoring
every candidate before comparing makes the outcome a pure argmax with an
ordinal tie-break, so the search trace cannot depend on scheduling.

The bundled problem is wrapper feature-subset selection: forward selection
scored by the cross-validated accuracy of a naive Bayes classifier over the
currently selected features plus the candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import DataSchema
from .parallel import TaskRunner

DEFAULT_THRESHOLD = 1e-4
NB_VARIANCE_FLOOR = 1e-6


@dataclass
class Candidate:
    payload: object
    ordinal: int
    score: float | None = None


def select_best(candidates, incumbent_score: float, threshold: float) -> Candidate | None:
    """Best evaluated candidate, or None when no candidate clears the bar.

    Ties on score go to the lowest ordinal; acceptance requires
    score > incumbent_score + threshold (strict).
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    best = None
    for c in candidates:
        if c.score is None:
            raise ValueError(f"candidate {c.ordinal} was not evaluated")
        if best is None or c.score > best.score or (c.score == best.score and c.ordinal < best.ordinal):
            best = c
    if best is None or not best.score > incumbent_score + threshold:
        return None
    return best


@dataclass(frozen=True)
class SearchStep:
    payload: object
    ordinal: int
    score: float


_PROBLEM: dict = {}


def _init_problem(problem):
    _PROBLEM["problem"] = problem


def _evaluate_task(task):
    ordinal, state, payload = task
    try:
        return _PROBLEM["problem"].evaluate(state, payload)
    except Exception as e:
        raise RuntimeError(f"evaluation of candidate {payload!r} failed: {e}") from e


def greedy_search(problem, threshold: float = DEFAULT_THRESHOLD, workers: int = 1):
    """Run the search to completion; returns (final state, accepted steps).

    ``problem`` supplies initial_state(), candidates(state), evaluate(state,
    payload) and update(state, payload, score).  evaluate must be a pure
    function of the problem's data; with workers > 1 it runs in worker
    processes, so states and payloads must stay small and picklable.
    """
    state = problem.initial_state()
    incumbent = -math.inf
    trace: list[SearchStep] = []
    with TaskRunner(workers, init=_init_problem, initargs=(problem,)) as runner:
        while True:
            payloads = list(problem.candidates(state))
            if not payloads:
                break
            tasks = [(k, state, payload) for k, payload in enumerate(payloads)]
            scores = list(runner.map(_evaluate_task, tasks))
            candidates = [
                Candidate(payload, k, score)
                for k, (payload, score) in enumerate(zip(payloads, scores))
            ]
            best = select_best(candidates, incumbent, threshold)
            if best is None:
                break
            state = problem.update(state, best.payload, best.score)
            incumbent = best.score
            trace.append(SearchStep(best.payload, best.ordinal, best.score))
    return state, trace


# --- wrapper feature-subset selection --------------------------------------


@dataclass(frozen=True)
class FssState:
    selected: tuple[int, ...] = ()
    score: float = -math.inf


class FeatureSelection:
    """Forward feature selection for a discrete class variable.

    Candidates are the not-yet-selected feature columns, scored by
    ``fss_score`` on this problem's in-memory dataset.
    """

    def __init__(self, schema: DataSchema, values: np.ndarray, class_name: str, folds: int = 5):
        names = [c.name for c in schema]
        if class_name not in names:
            raise ValueError(f"no column named {class_name!r}")
        self.schema = schema
        self.values = np.asarray(values, dtype=np.float64)
        self.class_index = names.index(class_name)
        if not schema.columns[self.class_index].is_discrete:
            raise ValueError(f"class column {class_name!r} must be discrete")
        self.folds = folds

    @property
    def feature_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.schema)) if i != self.class_index)

    def initial_state(self) -> FssState:
        return FssState()

    def candidates(self, state: FssState):
        return [i for i in self.feature_indices if i not in state.selected]

    def evaluate(self, state: FssState, feature: int) -> float:
        return fss_score(
            self.schema,
            self.values,
            state.selected + (feature,),
            self.class_index,
            folds=self.folds,
        )

    def update(self, state: FssState, feature: int, score: float) -> FssState:
        return FssState(state.selected + (feature,), score)

    def feature_name(self, index: int) -> str:
        return self.schema.columns[index].name


class _NaiveBayes:
    """Class -> features classifier with add-one smoothing on tables.

    Continuous features get per-class Gaussians with a floored variance;
    classes absent from the training split fall back to mean 0, variance 1.
    """

    def __init__(self, schema, class_index, features):
        self.class_index = class_index
        self.features = tuple(features)
        self.class_arity = schema.columns[class_index].arity
        self.columns = [schema.columns[i] for i in self.features]

    def fit(self, values: np.ndarray):
        y = values[:, self.class_index].astype(np.intp)
        c = self.class_arity
        counts = np.bincount(y, minlength=c).astype(np.float64)
        self.log_prior = np.log((counts + 1.0) / (counts.sum() + c))
        self.tables = []
        for col, idx in zip(self.columns, self.features):
            x = values[:, idx]
            if col.is_discrete:
                a = col.arity
                joint = np.bincount(y * a + x.astype(np.intp), minlength=c * a)
                joint = joint.reshape(c, a).astype(np.float64)
                theta = (joint + 1.0) / (joint.sum(axis=1, keepdims=True) + a)
                self.tables.append(("d", np.log(theta)))
            else:
                mean = np.zeros(c)
                var = np.ones(c)
                for cls in range(c):
                    xs = x[y == cls]
                    if xs.size:
                        mean[cls] = xs.mean()
                        var[cls] = max(float((xs * xs).mean() - mean[cls] ** 2), NB_VARIANCE_FLOOR)
                self.tables.append(("c", (mean, var)))
        return self

    def predict(self, values: np.ndarray) -> np.ndarray:
        scores = np.tile(self.log_prior, (values.shape[0], 1))
        for (kind, params), idx in zip(self.tables, self.features):
            x = values[:, idx]
            if kind == "d":
                scores += params[:, x.astype(np.intp)].T
            else:
                mean, var = params
                d = x[:, None] - mean[None, :]
                scores += -0.5 * (np.log(2.0 * math.pi * var)[None, :] + d * d / var[None, :])
        return np.argmax(scores, axis=1)


def fss_score(schema, values, features, class_index, folds: int = 5) -> float:
    """Cross-validated accuracy of naive Bayes restricted to ``features``.

    Fold k holds out the rows whose ordinal is congruent to k modulo
    ``folds``; the returned accuracy pools correct predictions over all
    folds.  With no features the classifier predicts the majority class.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n < folds:
        raise ValueError(f"need at least {folds} rows for {folds}-fold cross-validation")
    fold_of = np.arange(n) % folds
    correct = 0
    for k in range(folds):
        test = fold_of == k
        model = _NaiveBayes(schema, class_index, features).fit(values[~test])
        predicted = model.predict(values[test])
        correct += int((predicted == values[test, class_index].astype(np.intp)).sum())
    return correct / n
