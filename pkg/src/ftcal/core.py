"""Domain types and the elementary wrench/raw algebra.

Wrench ordering is ``(fx, fy, fz, tx, ty, tz)`` everywhere; forces in N,
torques in N*m, raw strain-gauge channels dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetTooSmall, InvalidValue, SingularMatrix

AXES = ("fx", "fy", "fz", "tx", "ty", "tz")
DATASET_KINDS = ("grid", "balancing", "extended-balancing", "custom")

# Above this condition number a calibration matrix is treated as singular.
MAX_CONDITION = 1e12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_vector(x, n=6, name="vector"):
    v = np.asarray(x, dtype=float)
    if v.shape != (n,):
        raise InvalidValue(f"{name} must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidValue(f"{name} has non-finite entries")
    return v


def as_matrix(x, shape=(6, 6), name="matrix"):
    m = np.asarray(x, dtype=float)
    if m.shape != shape:
        raise InvalidValue(f"{name} must have shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidValue(f"{name} has non-finite entries")
    return m


def check_nonsingular(matrix, name="matrix", max_cond=MAX_CONDITION, exc=SingularMatrix):
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > max_cond:
        raise exc(f"{name} is numerically singular (condition number {cond:.3g})")
    return cond


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "force", _frozen(as_vector(self.force, 3, "force")))
        object.__setattr__(self, "torque", _frozen(as_vector(self.torque, 3, "torque")))

    @classmethod
    def from_vector(cls, w):
        w = as_vector(w, 6, "wrench")
        return cls(w[:3], w[3:])

    @property
    def vector(self):
        return np.concatenate([self.force, self.torque])


@dataclass(frozen=True)
class RawReading:
    channels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "channels", _frozen(as_vector(self.channels, 6, "raw reading")))


@dataclass(frozen=True)
class CalibrationModel:
    """Affine sensor model ``w = C r + o``.

    Row ``j`` of ``matrix`` maps the six raw channels to wrench axis ``j``;
    ``offset`` lives in wrench units.
    """

    matrix: np.ndarray
    offset: np.ndarray = field(default_factory=lambda: np.zeros(6))
    label: str = ""

    def __post_init__(self):
        m = as_matrix(self.matrix, name="calibration matrix")
        check_nonsingular(m, "calibration matrix")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "offset", _frozen(as_vector(self.offset, 6, "offset")))

    def predict(self, raw):
        """Map raw readings of shape (6,) or (N, 6) to wrenches of the same shape."""
        raw = np.asarray(raw, dtype=float)
        return raw @ self.matrix.T + self.offset

    def with_label(self, label):
        return CalibrationModel(self.matrix, self.offset, label)


@dataclass(frozen=True)
class Dataset:
    """Time-aligned raw readings and reference wrenches.

    ``raw`` and ``wrench`` are ``(N, 6)`` arrays, ``t`` is ``(N,)`` seconds,
    strictly increasing.
    """

    name: str
    t: np.ndarray
    raw: np.ndarray
    wrench: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        raw = np.asarray(self.raw, dtype=float)
        wrench = np.asarray(self.wrench, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise InvalidValue("dataset needs at least one sample")
        n = t.size
        if raw.shape != (n, 6) or wrench.shape != (n, 6):
            raise InvalidValue(
                f"raw/wrench must have shape ({n}, 6), got {raw.shape} and {wrench.shape}"
            )
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(raw)) and np.all(np.isfinite(wrench))):
            raise InvalidValue(f"dataset {self.name!r} has non-finite samples")
        if n > 1 and not np.all(np.diff(t) > 0):
            raise InvalidValue(f"dataset {self.name!r}: timestamps must be strictly increasing")
        if self.kind not in DATASET_KINDS:
            raise InvalidValue(f"unknown dataset kind {self.kind!r}, expected one of {DATASET_KINDS}")
        object.__setattr__(self, "t", _frozen(t))
        object.__setattr__(self, "raw", _frozen(raw))
        object.__setattr__(self, "wrench", _frozen(wrench))

    def __len__(self):
        return self.t.size

    def samples(self):
        for i in range(len(self)):
            yield self.t[i], RawReading(self.raw[i]), Wrench.from_vector(self.wrench[i])


@dataclass(frozen=True)
class CentralizedDataset:
    """Offset-free pairs ``(r_hat, w_hat)`` fed to the calibration-matrix solver.

    For centralized data ``mean_raw``/``mean_wrench`` are the subtracted sample
    means. Other offset-removal methods reuse the shape and store whatever
    shift they subtracted; ``method`` says which.
    """

    source: str
    mean_raw: np.ndarray
    mean_wrench: np.ndarray
    raw: np.ndarray
    wrench: np.ndarray
    method: str = "centralized"

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=float)
        wrench = np.asarray(self.wrench, dtype=float)
        if raw.ndim != 2 or raw.shape[1] != 6 or raw.shape != wrench.shape or raw.shape[0] < 1:
            raise InvalidValue(f"bad centralized sample shapes {raw.shape}, {wrench.shape}")
        object.__setattr__(self, "raw", _frozen(raw))
        object.__setattr__(self, "wrench", _frozen(wrench))
        object.__setattr__(self, "mean_raw", _frozen(as_vector(self.mean_raw, 6, "mean_raw")))
        object.__setattr__(self, "mean_wrench", _frozen(as_vector(self.mean_wrench, 6, "mean_wrench")))

    def __len__(self):
        return self.raw.shape[0]


def predict_wrench(model: CalibrationModel, raw) -> Wrench:
    if isinstance(raw, RawReading):
        raw = raw.channels
    return Wrench.from_vector(model.predict(as_vector(raw, 6, "raw reading")))


def centralize(d: Dataset) -> CentralizedDataset:
    if len(d) < 2:
        raise DatasetTooSmall(f"centralizing needs N >= 2 samples, dataset {d.name!r} has {len(d)}")
    mu_r = d.raw.mean(axis=0)
    mu_w = d.wrench.mean(axis=0)
    return CentralizedDataset(d.name, mu_r, mu_w, d.raw - mu_r, d.wrench - mu_w)


def pool(parts, source="pooled") -> CentralizedDataset:
    """Concatenate independently offset-freed datasets into one training set.

    Each part keeps its own shift, so datasets recorded with different
    offsets but the same calibration matrix can be solved jointly.
    """
    parts = list(parts)
    if not parts:
        raise DatasetTooSmall("nothing to pool")
    if len(parts) == 1:
        return parts[0]
    raw = np.vstack([p.raw for p in parts])
    wrench = np.vstack([p.wrench for p in parts])
    return CentralizedDataset(source, np.zeros(6), np.zeros(6), raw, wrench, method="pooled")
