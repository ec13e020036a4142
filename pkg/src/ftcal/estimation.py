"""Calibration mathematics.

Notation: ``S = (1/N) sum r_hat r_hat^T`` is the second moment of offset-free
raw data and ``B = (1/N) sum w_hat r_hat^T`` the wrench/raw cross moment. The
regularized objective

    J(C) = (1/N) sum ||w_hat_i - C r_hat_i||^2 + lam * ||C - C_w||_F^2

is minimized by ``C (S + lam I) = B + lam C_w``. ``lam`` is not rescaled by N.
Because the penalty is a Frobenius norm, each row of ``C`` is an independent
six-parameter ridge problem and is solved on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import CalibrationModel, CentralizedDataset, Dataset, as_matrix, as_vector, centralize, pool
from .errors import (
    DatasetTooSmall,
    EllipsoidFitFailed,
    InsufficientExcitation,
    InvalidValue,
    NegativeLambda,
    NumericalFailure,
    RankDeficientData,
)

# Unregularized problems with a moment matrix worse conditioned than this are rejected.
MAX_MOMENT_CONDITION = 1e10
# In-situ offset: 4th raw singular value allowed relative to the 3rd.
SUBSPACE_RATIO = 0.1
OFFSET_METHODS = ("centralized", "insitu-subspace")


def normalize_offset_method(method):
    if method in ("insitu", "insitu-subspace"):
        return "insitu-subspace"
    if method == "centralized":
        return method
    raise InvalidValue(f"unknown offset method {method!r}")


def as_lambda(lam):
    """Scalar or per-row regularization weight, returned as a 6-vector."""
    arr = np.asarray(lam, dtype=float)
    if arr.ndim == 0:
        arr = np.full(6, float(arr))
    if arr.shape != (6,) or not np.all(np.isfinite(arr)):
        raise InvalidValue(f"lambda must be a finite scalar or 6-vector, got {lam!r}")
    if np.any(arr < 0):
        raise NegativeLambda(f"lambda must be >= 0, got {lam!r}")
    return arr


@dataclass(frozen=True)
class RegularizedProblem:
    data: CentralizedDataset
    prior: np.ndarray
    lam: object = 0.0

    def __post_init__(self):
        if len(self.data) < 1:
            raise DatasetTooSmall("regularized problem needs data")
        object.__setattr__(self, "prior", as_matrix(self.prior, name="prior matrix"))
        as_lambda(self.lam)

    @property
    def lambdas(self):
        return as_lambda(self.lam)


@dataclass(frozen=True)
class OffsetEstimate:
    offset: np.ndarray
    space: str
    method: str

    def __post_init__(self):
        object.__setattr__(self, "offset", as_vector(self.offset, 6, "offset"))
        if self.space not in ("raw", "wrench"):
            raise InvalidValue(f"bad offset space {self.space!r}")
        if self.method not in OFFSET_METHODS:
            raise InvalidValue(f"bad offset method {self.method!r}")


def moments(data: CentralizedDataset):
    """Return ``(S, B)`` with ``B`` computed one wrench axis at a time."""
    R = data.raw
    n = R.shape[0]
    S = (R.T @ R) / n
    B = np.empty((6, 6))
    for j in range(6):
        B[j] = (R.T @ np.ascontiguousarray(data.wrench[:, j])) / n
    return S, B


def spd_factor(A):
    try:
        return cho_factor(A, lower=True, check_finite=True)
    except LinAlgError as exc:
        raise NumericalFailure(f"Cholesky factorization failed: {exc}") from exc


def solve_regularized(p: RegularizedProblem) -> np.ndarray:
    S, B = moments(p.data)
    lams = p.lambdas
    if np.any(lams == 0):
        cond = np.linalg.cond(S)
        if not np.isfinite(cond) or cond > MAX_MOMENT_CONDITION:
            raise RankDeficientData(
                f"raw second-moment matrix is singular (condition number {cond:.3g}); "
                "use lambda > 0 or richer excitation"
            )
    C = np.empty((6, 6))
    factors = {}
    for j in range(6):
        lam = lams[j]
        if lam not in factors:
            factors[lam] = spd_factor(S + lam * np.eye(6))
        C[j] = cho_solve(factors[lam], B[j] + lam * p.prior[j])
    return C


def objective(C, data: CentralizedDataset, prior, lam=0.0):
    lams = as_lambda(lam)
    resid = data.wrench - data.raw @ np.asarray(C).T
    fit = np.sum(resid**2) / len(data)
    return fit + float(np.sum(lams[:, None] * (np.asarray(C) - prior) ** 2))


def data_fit(C, data: CentralizedDataset):
    return objective(C, data, np.zeros((6, 6)), 0.0)


def objective_gradient(C, data: CentralizedDataset, prior, lam=0.0):
    S, B = moments(data)
    lams = as_lambda(lam)[:, None]
    C = np.asarray(C)
    return 2.0 * (C @ S - B + lams * (C - prior))


def solve_joint(d: Dataset) -> CalibrationModel:
    """Joint least squares for ``(C, o)`` via the augmented 7x7 normal equations."""
    n = len(d)
    X = np.hstack([d.raw, np.ones((n, 1))])
    M = (X.T @ X) / n
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > MAX_MOMENT_CONDITION:
        raise RankDeficientData(f"augmented moment matrix is singular (condition number {cond:.3g})")
    factor = spd_factor(M)
    G = np.empty((6, 7))
    for j in range(6):
        G[j] = cho_solve(factor, (X.T @ np.ascontiguousarray(d.wrench[:, j])) / n)
    return CalibrationModel(G[:, :6], G[:, 6], label=f"joint:{d.name}")


def recover_offset(C, mu_w, mu_r) -> OffsetEstimate:
    C = as_matrix(C)
    return OffsetEstimate(as_vector(mu_w) - C @ as_vector(mu_r), "wrench", "centralized")


def fit_ellipsoid_center(y):
    """Center of the algebraic least-squares quadric through 3-D points ``y``.

    Fits ``x^T A x + 2 b^T x + k = 0`` with unit-norm coefficients and checks
    that the quadric is a real ellipsoid.
    """
    x, yy, z = y.T
    D = np.column_stack([x * x, yy * yy, z * z, 2 * x * yy, 2 * x * z, 2 * yy * z,
                         2 * x, 2 * yy, 2 * z, np.ones_like(x)])
    if D.shape[0] < 9:
        raise EllipsoidFitFailed("need at least 9 points to fit a quadric")
    _, _, vt = np.linalg.svd(D, full_matrices=False)
    v = vt[-1]
    A = np.array([[v[0], v[3], v[4]], [v[3], v[1], v[5]], [v[4], v[5], v[2]]])
    b = v[6:9]
    k = v[9]
    eig = np.linalg.eigvalsh(A)
    if eig[0] < 0 < eig[-1] or np.min(np.abs(eig)) <= 1e-12 * np.max(np.abs(eig)):
        raise EllipsoidFitFailed(f"fitted quadric is not an ellipsoid (eigenvalues {eig})")
    if eig[0] < 0:
        A, b, k = -A, -b, -k
    center = -np.linalg.solve(A, b)
    if k - b @ np.linalg.solve(A, b) >= 0:
        raise EllipsoidFitFailed("fitted ellipsoid is imaginary")
    return center


def estimate_offset_insitu(d: Dataset) -> OffsetEstimate:
    """Raw-space offset from static data with a constant attached load.

    With gravity the only varying input, offset-free raw readings span a
    3-dim linear subspace and, because ``||g||`` is constant, lie on an
    ellipsoid inside it. The offset is the ellipsoid center lifted back to
    the six raw channels. This is a reconstruction; the original in-situ
    estimator is not published in enough detail to reproduce exactly.
    """
    if len(d) < 10:
        raise DatasetTooSmall(f"in-situ offset estimation needs N >= 10, got {len(d)}")
    mean = d.raw.mean(axis=0)
    X = d.raw - mean
    _, s, vt = np.linalg.svd(X, full_matrices=False)
    if s[2] <= 1e-12 * max(1.0, s[0]) or s[3] > SUBSPACE_RATIO * s[2]:
        raise InsufficientExcitation(
            f"raw data is not close to a 3-dim affine subspace "
            f"(singular values {np.array2string(s, precision=3)}); "
            "expected static poses with a constant load"
        )
    basis = vt[:3].T
    scale = s[2] / np.sqrt(len(d))
    center = fit_ellipsoid_center((X @ basis) / scale) * scale
    return OffsetEstimate(mean + basis @ center, "raw", "insitu-subspace")


def apply_offset_removal(d: Dataset, method="centralized") -> CentralizedDataset:
    method = normalize_offset_method(method)
    if method == "centralized":
        return centralize(d)
    o_r = estimate_offset_insitu(d).offset
    return CentralizedDataset(d.name, o_r, np.zeros(6), d.raw - o_r, d.wrench, method=method)


def dataset_offset(C, data: CentralizedDataset) -> np.ndarray:
    """Wrench-space offset implied by the shift removed from one dataset."""
    C = np.asarray(C)
    if data.method == "centralized":
        return recover_offset(C, data.mean_wrench, data.mean_raw).offset
    return data.mean_wrench - C @ data.mean_raw


def calibrate(datasets, prior, lam=0.0, offset_method="centralized", label=None):
    """In-situ calibration on one or more datasets sharing a calibration matrix.

    Each dataset is freed of its own offset, the results are pooled into a
    single regularized solve. Returns ``(model, offsets)`` where ``offsets``
    maps dataset names to their wrench-space offsets; the model carries the
    offset of the first dataset.
    """
    datasets = list(datasets)
    if not datasets:
        raise DatasetTooSmall("calibration needs at least one dataset")
    parts = [apply_offset_removal(d, offset_method) for d in datasets]
    C = solve_regularized(RegularizedProblem(pool(parts), prior, lam))
    offsets = {p.source: dataset_offset(C, p) for p in parts}
    if label is None:
        label = "insitu-" + "+".join(d.name for d in datasets)
    return CalibrationModel(C, offsets[parts[0].source], label), offsets
