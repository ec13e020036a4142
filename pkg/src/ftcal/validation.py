"""Validation of candidate calibration matrices.

Cross tables compare matrices through per-axis error percentages relative to
the Workbench matrix on every dataset. The lambda sweep trains matrices over a
grid of regularization weights and scores the residual wrench left on a
held-out dataset where no external contact acts. Per-axis winners can be
merged into a "mixed" matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AXES, CalibrationModel, Dataset, check_nonsingular, pool
from .errors import CalibrationError, DegenerateBaseline, InvalidValue, NoCandidates, SingularMatrix
from .estimation import RegularizedProblem, apply_offset_removal, as_lambda, dataset_offset, solve_regularized

DEFAULT_LAMBDAS = (0.5, 1.0, 1.5, 2.0, 4.0, 6.0, 8.0, 10.0)
METRICS = ("rms", "mae")


def _matrix(m):
    return m.matrix if isinstance(m, CalibrationModel) else np.asarray(m, dtype=float)


def axis_error(residual, metric="rms"):
    if metric == "rms":
        return np.sqrt(np.mean(residual**2, axis=0))
    if metric == "mae":
        return np.mean(np.abs(residual), axis=0)
    raise InvalidValue(f"unknown metric {metric!r}, expected one of {METRICS}")


def residuals(C, data):
    """Per-sample residual ``w_hat - C r_hat`` on offset-free data."""
    return data.wrench - data.raw @ _matrix(C).T


@dataclass(frozen=True)
class ErrorPercentageCell:
    train_name: str
    test_name: str
    per_axis: np.ndarray = field(default_factory=lambda: np.full(6, np.nan))
    aggregate: float = np.nan
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def error_percentage(C_d, C_w, test: Dataset, offset_method="centralized", metric="rms", train_name=None):
    if train_name is None:
        train_name = C_d.label if isinstance(C_d, CalibrationModel) else "candidate"
    data = apply_offset_removal(test, offset_method)
    num = axis_error(residuals(C_d, data), metric)
    den = axis_error(residuals(C_w, data), metric)
    if np.any(den < 1e-12):
        bad = [AXES[j] for j in np.flatnonzero(den < 1e-12)]
        raise DegenerateBaseline(f"Workbench residual vanishes on {test.name!r} axes {bad}")
    per_axis = 100.0 * num / den
    return ErrorPercentageCell(train_name, test.name, per_axis, float(np.mean(per_axis)))


@dataclass
class CrossTable:
    """Rows are test datasets, columns are calibration matrices."""

    datasets: list
    models: list
    cells: list

    def aggregate(self):
        return np.array([[c.aggregate for c in row] for row in self.cells])

    def per_axis(self, axis):
        return np.array([[c.per_axis[axis] for c in row] for row in self.cells])

    def discarded(self):
        """Labels of matrices doing worse than the Workbench (mean aggregate > 100)."""
        agg = self.aggregate()
        out = []
        for k, label in enumerate(self.models):
            col = agg[:, k]
            col = col[np.isfinite(col)]
            if col.size and col.mean() > 100.0:
                out.append(label)
        return out

    def all_failed(self):
        return not any(c.ok for row in self.cells for c in row)


def cross_table(models, datasets, workbench, offset_method="centralized", metric="rms"):
    models = list(models)
    datasets = list(datasets)
    if not models or not datasets:
        raise InvalidValue("cross table needs at least one model and one dataset")
    cells = []
    for d in datasets:
        row = []
        # offset removal is shared by every cell of the row
        try:
            data = apply_offset_removal(d, offset_method)
            den = axis_error(residuals(workbench, data), metric)
        except CalibrationError as exc:
            row = [ErrorPercentageCell(m.label, d.name, error=str(exc)) for m in models]
            cells.append(row)
            continue
        for m in models:
            if np.any(den < 1e-12):
                row.append(ErrorPercentageCell(m.label, d.name, error="degenerate Workbench baseline"))
                continue
            per_axis = 100.0 * axis_error(residuals(m, data), metric) / den
            row.append(ErrorPercentageCell(m.label, d.name, per_axis, float(np.mean(per_axis))))
        cells.append(row)
    return CrossTable([d.name for d in datasets], [m.label for m in models], cells)


@dataclass(frozen=True)
class SweepResult:
    train_name: str
    lam: float
    mean_force_error: float
    mean_torque_error: float
    per_axis_mean_abs: np.ndarray
    model: CalibrationModel | None = field(default=None, compare=False, repr=False)


def residual_external_wrench(model, d: Dataset, offset_method="centralized", lam=np.nan, train_name=None):
    """Residual wrench ``w_hat - C r_hat`` on data where no external contact acts."""
    data = apply_offset_removal(d, offset_method)
    res = residuals(model, data)
    if train_name is None:
        train_name = model.label if isinstance(model, CalibrationModel) else ""
    return SweepResult(
        train_name,
        float(lam),
        float(np.mean(np.linalg.norm(res[:, :3], axis=1))),
        float(np.mean(np.linalg.norm(res[:, 3:], axis=1))),
        np.mean(np.abs(res), axis=0),
        model if isinstance(model, CalibrationModel) else None,
    )


def lambda_sweep(train, test: Dataset, C_w, lambdas=DEFAULT_LAMBDAS, offset_method="centralized", train_name=None):
    """Train one matrix per weight on ``train`` (a dataset or list) and score it on ``test``."""
    lambdas = list(lambdas)
    if not lambdas:
        raise InvalidValue("lambda grid is empty")
    for lam in lambdas:
        as_lambda(lam)
    train = [train] if isinstance(train, Dataset) else list(train)
    if train_name is None:
        train_name = "+".join(d.name for d in train)
    parts = [apply_offset_removal(d, offset_method) for d in train]
    pooled = pool(parts)
    test_data = apply_offset_removal(test, offset_method)
    out = []
    for lam in lambdas:
        C = solve_regularized(RegularizedProblem(pooled, _matrix(C_w), lam))
        model = CalibrationModel(C, dataset_offset(C, parts[0]), f"{train_name}@{lam:g}")
        res = residuals(C, test_data)
        out.append(SweepResult(
            train_name,
            float(lam),
            float(np.mean(np.linalg.norm(res[:, :3], axis=1))),
            float(np.mean(np.linalg.norm(res[:, 3:], axis=1))),
            np.mean(np.abs(res), axis=0),
            model,
        ))
    return out


@dataclass(frozen=True)
class Candidate:
    model: CalibrationModel
    train_name: str
    lam: object = 0.0

    def axis_lambda(self, j):
        return float(as_lambda(self.lam)[j])


@dataclass(frozen=True)
class MixedMatrix:
    rows: tuple  # per axis: (train_name, lambda, row 6-vector)
    assembled: CalibrationModel
    errors: np.ndarray  # per-axis error of the chosen row on the selection set


def candidate_errors(candidates, selection: Dataset, offset_method="centralized", metric="mae"):
    data = apply_offset_removal(selection, offset_method)
    return np.array([axis_error(residuals(c.model, data), metric) for c in candidates])


def assemble_mixed(candidates, errors=None, selection=None, offset_method="centralized", metric="mae", label="mixed"):
    """Pick, for every wrench axis, the candidate row with the smallest error.

    ``errors`` is a ``(k, 6)`` array aligned with ``candidates``; if omitted it
    is computed on ``selection``. Ties go to the lowest lambda, then the
    lexicographically first training-set name.
    """
    candidates = list(candidates)
    if not candidates:
        raise NoCandidates("no candidate matrices to mix")
    if errors is None:
        if selection is None:
            raise InvalidValue("need per-axis errors or a selection dataset")
        errors = candidate_errors(candidates, selection, offset_method, metric)
    errors = np.asarray(errors, dtype=float)
    if errors.shape != (len(candidates), 6):
        raise InvalidValue(f"errors must have shape ({len(candidates)}, 6), got {errors.shape}")
    rows, matrix, offset, chosen = [], np.empty((6, 6)), np.empty(6), np.empty(6)
    for j in range(6):
        best = min(
            range(len(candidates)),
            key=lambda k: (errors[k, j], candidates[k].axis_lambda(j), candidates[k].train_name),
        )
        c = candidates[best]
        matrix[j] = c.model.matrix[j]
        offset[j] = c.model.offset[j]
        chosen[j] = errors[best, j]
        rows.append((c.train_name, c.axis_lambda(j), c.model.matrix[j].copy()))
    if not np.all(np.isfinite(matrix)):
        raise InvalidValue("mixed matrix has non-finite rows")
    check_nonsingular(matrix, "mixed matrix", exc=SingularMatrix)
    return MixedMatrix(tuple(rows), CalibrationModel(matrix, offset, label), chosen)
