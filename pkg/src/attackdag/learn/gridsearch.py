"""Hyperparameter grid search minimizing false negatives.

A missed feasible exploit is the expensive mistake here, so cells are
ranked by false negatives first, false positives second, grid order last.
A cell that fails to train is recorded and skipped; one bad kernel/gamma
combination must not sink the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..model import BranchSample
from .evaluation import evaluate
from .svm import SvmParams, as_arrays, train_svm


@dataclass(frozen=True)
class GridSpec:
    c_values: tuple[float, ...] = (1.0, 2.0, 3.0)
    kernels: tuple[str, ...] = ("rbf", "poly", "sigmoid")
    gamma_values: tuple[float, ...] = (0.01, 0.0556, 0.1, 0.5, 1.0)

    def cells(self) -> list[SvmParams]:
        return [
            SvmParams(c=c, kernel=k, gamma=g)
            for c in self.c_values
            for k in self.kernels
            for g in self.gamma_values
        ]


@dataclass(frozen=True)
class CellResult:
    params: SvmParams
    fn: Optional[int]  # None marks a failed cell
    fp: Optional[int]
    error: Optional[str] = None


def grid_search_min_fn(
    data: Sequence[BranchSample],
    grid: GridSpec | None = None,
    eval_data: Sequence[BranchSample] | None = None,
) -> tuple[SvmParams, list[CellResult]]:
    """Train every cell on `data`, score FN/FP on `eval_data` (default: data).

    Returns the winning cell's params plus the full surface so the caller
    can inspect or plot all of it.
    """
    if grid is None:
        grid = GridSpec()
    if eval_data is None:
        eval_data = data
    eval_x, eval_y = as_arrays(eval_data)
    surface: list[CellResult] = []
    best: tuple[int, int, int] | None = None  # (fn, fp, cell order)
    best_params: SvmParams | None = None
    for order, params in enumerate(grid.cells()):
        try:
            model = train_svm(data, params)
            preds = model.predict_many(eval_x)
            metrics = evaluate([int(p) for p in preds], [int(t) for t in eval_y])
        except Exception as exc:  # record and keep sweeping
            surface.append(CellResult(params=params, fn=None, fp=None, error=str(exc)))
            continue
        surface.append(CellResult(params=params, fn=metrics.fn, fp=metrics.fp))
        key = (metrics.fn, metrics.fp, order)
        if best is None or key < best:
            best = key
            best_params = params
    if best_params is None:
        raise RuntimeError("every grid cell failed to train")
    return best_params, surface
