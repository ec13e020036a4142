"""File formats: dataset CSV, calibration text files, key=value configs, report tables.

Floats are written with 17 significant digits through Python's own
formatting (never locale-dependent), so files round-trip exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import AXES, CalibrationModel, Dataset
from .dynamics import RigidBodyParams, SensorGroundTruth, TrajectorySpec, quaternion_matrix, random_orientations
from .errors import CalibrationError, ConfigError, FileFormatError, InvalidValue

DATASET_HEADER = "t," + ",".join(f"r{i}" for i in range(6)) + "," + ",".join(f"w{i}" for i in range(6))


def fmt(x):
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def _parse_float(text, where):
    try:
        v = float(text)
    except ValueError:
        raise FileFormatError(f"{where}: cannot parse number {text!r}") from None
    if not math.isfinite(v):
        raise FileFormatError(f"{where}: non-finite number {text!r}")
    return v


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


# --- datasets -----------------------------------------------------------------

def format_dataset(d: Dataset) -> str:
    lines = [f"# name={d.name}", f"# kind={d.kind}", DATASET_HEADER]
    for i in range(len(d)):
        vals = [d.t[i], *d.raw[i], *d.wrench[i]]
        lines.append(",".join(fmt(v) for v in vals))
    return "\n".join(lines) + "\n"


def write_dataset(d: Dataset, path):
    _write(path, format_dataset(d))


def read_dataset(path) -> Dataset:
    path = Path(path)
    meta = {}
    header = None
    rows = []
    for lineno, line in enumerate(_read_lines(path), 1):
        where = f"{path}:{lineno}"
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = [c.strip() for c in stripped.split(",")]
            if header != DATASET_HEADER.split(","):
                unknown = sorted(set(header) - set(DATASET_HEADER.split(",")))
                raise FileFormatError(
                    f"{where}: expected header {DATASET_HEADER!r}"
                    + (f"; unknown columns {unknown}" if unknown else "")
                )
            continue
        fields = stripped.split(",")
        if len(fields) != 13:
            raise FileFormatError(f"{where}: expected 13 columns, got {len(fields)}")
        rows.append([_parse_float(f, where) for f in fields])
    if header is None or not rows:
        raise FileFormatError(f"{path}: no samples")
    arr = np.array(rows)
    try:
        return Dataset(meta.get("name", path.stem), arr[:, 0], arr[:, 1:7], arr[:, 7:13],
                       kind=meta.get("kind", "custom"))
    except InvalidValue as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


# --- calibration files ----------------------------------------------------------

@dataclass
class CalibrationFile:
    model: CalibrationModel
    lam: object = None  # None, float, or 6-vector
    trained_on: list = field(default_factory=list)
    dataset_offsets: dict = field(default_factory=dict)


def _format_lambda(lam):
    arr = np.asarray(lam, dtype=float)
    if arr.ndim == 0:
        return fmt(arr)
    return ",".join(fmt(v) for v in arr)


def parse_lambda(text):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    vals = [_parse_float(p, "lambda") for p in parts]
    if len(vals) == 1:
        return vals[0]
    if len(vals) == 6:
        return np.array(vals)
    raise FileFormatError(f"lambda must be one value or six comma-separated values, got {text!r}")


def format_calibration(cf: CalibrationFile) -> str:
    lines = [f"# label={cf.model.label}"]
    if cf.lam is not None:
        lines.append(f"# lambda={_format_lambda(cf.lam)}")
    if cf.trained_on:
        lines.append(f"# trained_on={','.join(cf.trained_on)}")
    for name, off in cf.dataset_offsets.items():
        lines.append(f"# offset[{name}]=" + " ".join(fmt(v) for v in off))
    for row in cf.model.matrix:
        lines.append(" ".join(fmt(v) for v in row))
    lines.append(" ".join(fmt(v) for v in cf.model.offset))
    return "\n".join(lines) + "\n"


def write_calibration(cf: CalibrationFile, path):
    _write(path, format_calibration(cf))


def read_calibration(path) -> CalibrationFile:
    path = Path(path)
    label, lam, trained_on, offsets = path.stem, None, [], {}
    rows = []
    for lineno, line in enumerate(_read_lines(path), 1):
        where = f"{path}:{lineno}"
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if "=" not in body:
                continue
            key, value = (s.strip() for s in body.split("=", 1))
            if key == "label":
                label = value
            elif key == "lambda":
                lam = parse_lambda(value)
            elif key == "trained_on":
                trained_on = [v for v in value.split(",") if v]
            elif key.startswith("offset[") and key.endswith("]"):
                vals = [_parse_float(v, where) for v in value.split()]
                if len(vals) != 6:
                    raise FileFormatError(f"{where}: offset needs 6 values")
                offsets[key[7:-1]] = np.array(vals)
            continue
        vals = [_parse_float(v, where) for v in stripped.split()]
        if len(vals) != 6:
            raise FileFormatError(f"{where}: expected 6 numbers, got {len(vals)}")
        rows.append(vals)
    if len(rows) != 7:
        raise FileFormatError(f"{path}: expected 6 matrix rows and 1 offset row, got {len(rows)} rows")
    try:
        model = CalibrationModel(np.array(rows[:6]), np.array(rows[6]), label)
    except CalibrationError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    return CalibrationFile(model, lam, trained_on, offsets)


# --- generator configs ----------------------------------------------------------

CONFIG_KEYS = {
    "name", "kind",
    "trajectory", "duration", "sample_rate",
    "grid_quaternions", "grid_random", "grid_seed",
    "amplitude", "frequency", "phase", "center", "lever",
    "mass", "com", "inertia",
    "true_matrix", "true_matrix_file", "true_offset", "noise_std", "seed",
    "flip_sign", "lambda_grid",
}


@dataclass
class GenerateConfig:
    name: str
    kind: str | None
    body: RigidBodyParams
    spec: TrajectorySpec
    truth: SensorGroundTruth
    flip_sign: bool = False
    lambda_grid: tuple | None = None


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines into a dict; unknown or repeated keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}", key)
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}", key)
        values[key] = value
    return values


def _floats(values, key, counts=None):
    try:
        out = [float(v) for v in values[key].replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{key}: expected numbers, got {values[key]!r}", key) from None
    if not all(math.isfinite(v) for v in out):
        raise ConfigError(f"{key}: non-finite value", key)
    if counts is not None and len(out) not in counts:
        raise ConfigError(f"{key}: expected {' or '.join(map(str, counts))} values, got {len(out)}", key)
    return out


def _float(values, key, default=None):
    if key not in values:
        if default is None:
            raise ConfigError(f"missing required key {key!r}", key)
        return default
    return _floats(values, key, (1,))[0]


def _int(values, key, default):
    if key not in values:
        return default
    try:
        return int(values[key])
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {values[key]!r}", key) from None


def _vec3(values, key):
    if key not in values:
        return np.zeros(3)
    v = _floats(values, key, (1, 3))
    return np.array(v * 3 if len(v) == 1 else v)


def _inertia(values):
    v = _floats(values, "inertia", (3, 6, 9))
    if len(v) == 3:
        return np.diag(v)
    if len(v) == 6:  # xx yy zz xy xz yz
        xx, yy, zz, xy, xz, yz = v
        return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
    return np.array(v).reshape(3, 3)


def _bool(values, key):
    v = values.get(key, "false").lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {values[key]!r}", key)


def build_config(values, base_dir=Path(".")) -> GenerateConfig:
    mass = _float(values, "mass")
    if mass <= 0:
        raise ConfigError(f"mass: must be > 0, got {mass:g}", "mass")
    if "inertia" not in values:
        raise ConfigError("missing required key 'inertia'", "inertia")
    try:
        body = RigidBodyParams(mass, _vec3(values, "com"), _inertia(values))
    except InvalidValue as exc:
        raise ConfigError(f"inertia/com: {exc}", "inertia") from exc

    kind = values.get("trajectory", "static-grid")
    orientations = []
    if kind == "static-grid":
        if "grid_quaternions" in values:
            for chunk in values["grid_quaternions"].split(";"):
                if not chunk.strip():
                    continue
                try:
                    q = [float(x) for x in chunk.replace(",", " ").split()]
                    if len(q) != 4:
                        raise InvalidValue(f"quaternion needs 4 values, got {len(q)}")
                    orientations.append(quaternion_matrix(q))
                except (ValueError, InvalidValue) as exc:
                    raise ConfigError(f"grid_quaternions: {exc}", "grid_quaternions") from exc
        if "grid_random" in values:
            n = _int(values, "grid_random", 0)
            if n <= 0:
                raise ConfigError("grid_random: must be a positive integer", "grid_random")
            orientations += random_orientations(n, _int(values, "grid_seed", 0))
        if not orientations:
            raise ConfigError("static-grid needs grid_quaternions or grid_random", "grid_quaternions")
    try:
        spec = TrajectorySpec(
            kind,
            duration=_float(values, "duration", 1.0),
            sample_rate=_float(values, "sample_rate", 100.0),
            orientations=orientations,
            amplitude=_vec3(values, "amplitude"),
            frequency=_vec3(values, "frequency"),
            phase=_vec3(values, "phase"),
            center=_vec3(values, "center"),
            lever=_vec3(values, "lever"),
        )
    except InvalidValue as exc:
        raise ConfigError(f"trajectory: {exc}", "trajectory") from exc

    if "true_matrix" in values and "true_matrix_file" in values:
        raise ConfigError("give only one of true_matrix / true_matrix_file", "true_matrix")
    if "true_matrix_file" in values:
        model = read_calibration(base_dir / values["true_matrix_file"]).model
        matrix, offset = model.matrix, model.offset
    elif "true_matrix" in values:
        matrix = np.array(_floats(values, "true_matrix", (36,))).reshape(6, 6)
        offset = np.zeros(6)
    else:
        matrix, offset = np.eye(6), np.zeros(6)
    if "true_offset" in values:
        offset = np.array(_floats(values, "true_offset", (6,)))
    noise = _floats(values, "noise_std", (1, 6)) if "noise_std" in values else [0.0]
    if min(noise) < 0:
        raise ConfigError("noise_std: must be >= 0", "noise_std")
    try:
        truth = SensorGroundTruth(CalibrationModel(matrix, offset, "truth"),
                                  np.broadcast_to(noise, (6,)), _int(values, "seed", 0))
    except CalibrationError as exc:
        raise ConfigError(f"true_matrix: {exc}", "true_matrix") from exc

    grid = None
    if "lambda_grid" in values:
        grid = tuple(_floats(values, "lambda_grid"))
        if any(v < 0 for v in grid):
            raise ConfigError("lambda_grid: values must be >= 0", "lambda_grid")
    ds_kind = values.get("kind")
    return GenerateConfig(values.get("name", "synthetic"), ds_kind, body, spec, truth,
                          _bool(values, "flip_sign"), grid)


def read_config(path) -> GenerateConfig:
    path = Path(path)
    text = "\n".join(_read_lines(path))
    return build_config(parse_config_text(text, str(path)), path.parent)


# --- report tables --------------------------------------------------------------

def _cell(x, spec):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "NA"
    if isinstance(x, str):
        return x
    return format(float(x), spec)


def format_csv(header, rows, spec=".17g"):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v, spec) for v in row))
    return "\n".join(lines) + "\n"


def format_text_table(header, rows, spec=".4f"):
    cells = [list(header)] + [[_cell(v, spec) for v in row] for row in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    out = []
    for i, r in enumerate(cells):
        out.append("  ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(r, widths))).rstrip())
        if i == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def crosstab_tables(table):
    """Wide aggregate table (rows = test dataset, columns = matrix) and per-axis long table."""
    header = ["dataset", *table.models]
    agg = table.aggregate()
    wide = [[name, *agg[i]] for i, name in enumerate(table.datasets)]
    long_header = ["dataset", "matrix", *AXES, "aggregate", "status"]
    long_rows = []
    for row in table.cells:
        for c in row:
            long_rows.append([c.test_name, c.train_name, *c.per_axis, c.aggregate, "ok" if c.ok else "NA"])
    return header, wide, long_header, long_rows


def sweep_tables(results, lambdas, workbench_result=None):
    """Table with one row per training set and one column per lambda (mean force error)."""
    header = ["train", "workbench", *[format(l, "g") for l in lambdas]]
    rows = []
    if workbench_result is not None:
        rows.append(["Workbench", workbench_result.mean_force_error, *[None] * len(lambdas)])
    by_train = {}
    for r in results:
        by_train.setdefault(r.train_name, {})[r.lam] = r
    for name, cells in by_train.items():
        rows.append([name, None, *[cells[l].mean_force_error if l in cells else None for l in lambdas]])
    detail_header = ["train", "lambda", "mean_force_error", "mean_torque_error", *AXES]
    detail = []
    if workbench_result is not None:
        r = workbench_result
        detail.append(["Workbench", None, r.mean_force_error, r.mean_torque_error, *r.per_axis_mean_abs])
    for r in results:
        detail.append([r.train_name, r.lam, r.mean_force_error, r.mean_torque_error, *r.per_axis_mean_abs])
    return header, rows, detail_header, detail


def mixed_table(mixed):
    header = ["axis", "source", "lambda", "error"]
    rows = [[AXES[j], src, lam, mixed.errors[j]] for j, (src, lam, _) in enumerate(mixed.rows)]
    return header, rows
