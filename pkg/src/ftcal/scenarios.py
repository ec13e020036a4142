"""Reusable synthetic setups for tests, acceptance checks and scripts."""

from __future__ import annotations

import numpy as np

from .core import CalibrationModel
from .dynamics import RigidBodyParams, SensorGroundTruth, TrajectorySpec, random_orientations, synthesize_dataset

# Gauge sensitivity per wrench axis: raw channels come out at comparable
# magnitudes for forces of ~10 N and torques of ~0.5 N*m.
AXIS_SCALE = np.array([1.0, 1.0, 1.0, 0.05, 0.05, 0.05])


def random_true_model(rng, coupling=0.2, offset_scale=2.0, label="truth"):
    """Diagonally dominant calibration matrix with cross-coupling and a random offset."""
    C = np.diag(AXIS_SCALE) @ (np.eye(6) + coupling * rng.standard_normal((6, 6)))
    o = offset_scale * AXIS_SCALE * rng.standard_normal(6)
    return CalibrationModel(C, o, label)


def random_body(rng, mass=(0.5, 2.0), com_radius=0.1):
    mass = rng.uniform(*mass)
    com = rng.uniform(-com_radius, com_radius, 3)
    # principal moments of a box with random side lengths
    sides = rng.uniform(0.05, 0.3, 3)
    a, b, c = sides**2
    moments = mass / 12.0 * np.array([b + c, a + c, a + b])
    Q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    return RigidBodyParams(mass, com, Q @ np.diag(moments) @ Q.T)


def grid_spec(n_orientations, seed, sample_rate=10.0):
    return TrajectorySpec("static-grid", duration=1.0, sample_rate=sample_rate,
                          orientations=random_orientations(n_orientations, seed))


def sinusoid_spec(rng, duration=10.0, sample_rate=50.0, amplitude=1.2, frequency=(0.2, 0.6), lever=0.1):
    return TrajectorySpec(
        "sinusoid",
        duration=duration,
        sample_rate=sample_rate,
        amplitude=rng.uniform(0.5, 1.0, 3) * amplitude,
        frequency=rng.uniform(*frequency, 3),
        phase=rng.uniform(0, 2 * np.pi, 3),
        lever=rng.uniform(-lever, lever, 3),
    )


def noiseless_raw_scale(dataset, truth_model):
    """Largest noiseless raw magnitude, used as the raw full scale."""
    raw0 = np.linalg.solve(truth_model.matrix, (dataset.wrench - truth_model.offset).T).T
    return float(np.abs(raw0).max())


def make_dataset(body, spec, truth_model, name, noise_std=0.0, seed=0, kind=None):
    truth = SensorGroundTruth(truth_model, np.full(6, noise_std), seed)
    return synthesize_dataset(body, spec, truth, name, kind=kind)


def multi_load_grids(truth_model, rng, n_loads=3, n_orientations=60, noise_std=0.0, seed=0, offset_drift=1.0):
    """Static grids with different attached loads, each with its own offset.

    One load only excites a 3-dim raw subspace; three loads with
    non-collinear centers of mass excite all six channels.
    """
    out = []
    for k in range(n_loads):
        body = random_body(rng)
        drift = offset_drift * AXIS_SCALE * rng.standard_normal(6)
        model = CalibrationModel(truth_model.matrix, truth_model.offset + drift, truth_model.label)
        spec = grid_spec(n_orientations, seed=seed * 1000 + k)
        out.append(make_dataset(body, spec, model, f"grid{k}", noise_std, seed * 1000 + k, kind="grid"))
    return out
