"""Grid search over model parameters with stratified cross-validation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from milkspec.errors import ConfigError
from milkspec.learn.models import ModelSpec, fit_model
from milkspec.learn.split import stratified_folds


@dataclass(frozen=True)
class GridPoint:
    params: dict
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float


@dataclass(frozen=True)
class GridSearchResult:
    best_spec: ModelSpec
    best_accuracy: float
    table: tuple[GridPoint, ...]


def grid_search(
    spec_template: ModelSpec,
    grid: dict[str, list],
    X,
    y,
    folds: int = 5,
    seed: int = 0,
) -> GridSearchResult:
    """Evaluate every grid combination by stratified k-fold accuracy.

    All combinations share the same seeded folds. The winner is the highest
    mean accuracy; exact ties resolve to the combination that enumerates
    first (parameter lists are crossed in their given order).
    """
    if not grid:
        raise ConfigError("empty parameter grid")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    fold_indices = stratified_folds(y, folds, seed)
    all_rows = np.arange(y.size)

    names = list(grid.keys())
    table = []
    best = None
    for combo in itertools.product(*(grid[name] for name in names)):
        params = dict(zip(names, combo))
        spec = spec_template.replace(**params)
        accuracies = []
        for held_out in fold_indices:
            train_rows = np.setdiff1d(all_rows, held_out, assume_unique=True)
            model = fit_model(spec, X[train_rows], y[train_rows])
            predictions = model.predict(X[held_out])
            accuracies.append(float(np.mean(predictions == y[held_out])))
        point = GridPoint(
            params=params,
            fold_accuracies=tuple(accuracies),
            mean_accuracy=float(np.mean(accuracies)),
        )
        table.append(point)
        if best is None or point.mean_accuracy > best.mean_accuracy:
            best = point

    return GridSearchResult(
        best_spec=spec_template.replace(**best.params),
        best_accuracy=best.mean_accuracy,
        table=tuple(table),
    )
