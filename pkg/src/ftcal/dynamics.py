"""Single-rigid-body wrench oracle and sensor emulator.

A load with known inertial parameters hangs from the sensor. Given the motion
of the sensor frame, the Newton-Euler equations give the wrench the load
exerts through the sensor; inverting the affine sensor model with a known
ground-truth calibration then yields synthetic raw readings.

All vectors are expressed in the sensor frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .core import CalibrationModel, Dataset, _frozen, as_matrix, as_vector, check_nonsingular
from .errors import EmptyTrajectory, InvalidValue, SingularTruthMatrix

STANDARD_GRAVITY = 9.80665
GRAVITY_WORLD = np.array([0.0, 0.0, -STANDARD_GRAVITY])
TRAJECTORY_KINDS = ("static-grid", "sinusoid")


def skew(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


@dataclass(frozen=True)
class RigidBodyParams:
    mass: float
    com: np.ndarray
    inertia_com: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.mass) or self.mass <= 0:
            raise InvalidValue(f"mass must be > 0, got {self.mass}")
        inertia = as_matrix(self.inertia_com, (3, 3), "inertia")
        if not np.allclose(inertia, inertia.T, rtol=0, atol=1e-12 * max(1.0, np.abs(inertia).max())):
            raise InvalidValue("inertia must be symmetric")
        inertia = 0.5 * (inertia + inertia.T)
        moments = np.linalg.eigvalsh(inertia)
        if moments[0] <= 0:
            raise InvalidValue("inertia must be positive definite")
        slack = 1e-12 * moments.sum()
        a, b, c = moments
        if a + b < c - slack:
            raise InvalidValue("inertia violates the triangle inequality on principal moments")
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "com", _frozen(as_vector(self.com, 3, "com")))
        object.__setattr__(self, "inertia_com", _frozen(inertia))

    @property
    def inertia_origin(self):
        """Rotational inertia about the sensor origin (parallel-axis shift)."""
        c = skew(self.com)
        return self.inertia_com - self.mass * c @ c


@dataclass(frozen=True)
class MotionState:
    gravity_s: np.ndarray
    ang_vel: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ang_acc: np.ndarray = field(default_factory=lambda: np.zeros(3))
    lin_acc: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("gravity_s", "ang_vel", "ang_acc", "lin_acc"):
            object.__setattr__(self, name, _frozen(as_vector(getattr(self, name), 3, name)))


@dataclass(frozen=True)
class TrajectorySpec:
    """Motion of the sensor frame.

    ``static-grid`` visits each rotation in ``orientations`` (sensor-to-world,
    3x3) once and holds it still. ``sinusoid`` drives ZYX Euler angles
    ``(roll, pitch, yaw) = center + amplitude * sin(2*pi*frequency*t + phase)``
    and rotates the sensor about a pivot placed at ``-lever`` from the sensor
    origin, so a non-zero lever also produces linear acceleration.
    """

    kind: str
    duration: float = 1.0
    sample_rate: float = 100.0
    orientations: tuple = ()
    amplitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    frequency: np.ndarray = field(default_factory=lambda: np.zeros(3))
    phase: np.ndarray = field(default_factory=lambda: np.zeros(3))
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    lever: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.kind not in TRAJECTORY_KINDS:
            raise InvalidValue(f"unknown trajectory kind {self.kind!r}")
        if not (np.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise InvalidValue(f"sample_rate must be > 0, got {self.sample_rate}")
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise InvalidValue(f"duration must be > 0, got {self.duration}")
        rots = []
        for R in self.orientations:
            R = as_matrix(R, (3, 3), "orientation")
            if np.abs(R.T @ R - np.eye(3)).max() > 1e-10 or np.linalg.det(R) < 0:
                raise InvalidValue("orientations must be proper rotation matrices (orthonormal to 1e-10)")
            rots.append(_frozen(R))
        object.__setattr__(self, "orientations", tuple(rots))
        for name in ("amplitude", "frequency", "phase", "center", "lever"):
            object.__setattr__(self, name, _frozen(as_vector(getattr(self, name), 3, name)))


@dataclass(frozen=True)
class SensorGroundTruth:
    true_model: CalibrationModel
    noise_std_raw: np.ndarray = field(default_factory=lambda: np.zeros(6))
    seed: int = 0

    def __post_init__(self):
        std = np.broadcast_to(np.asarray(self.noise_std_raw, dtype=float), (6,))
        std = as_vector(std, 6, "noise_std_raw")
        if np.any(std < 0):
            raise InvalidValue("noise_std_raw must be >= 0")
        object.__setattr__(self, "noise_std_raw", _frozen(std))
        object.__setattr__(self, "seed", int(self.seed))


def newton_euler_wrench(body: RigidBodyParams, state: MotionState) -> np.ndarray:
    """Wrench ``(f, tau)`` the load exerts through the sensor, about its origin."""
    m, c = body.mass, body.com
    I_o = body.inertia_origin
    w, dw = state.ang_vel, state.ang_acc
    a_rel = state.lin_acc - state.gravity_s
    f = m * (a_rel + np.cross(dw, c) + np.cross(w, np.cross(w, c)))
    tau = I_o @ dw + np.cross(w, I_o @ w) + m * np.cross(c, a_rel)
    return np.concatenate([f, tau])


def euler_zyx_matrix(roll, pitch, yaw):
    """Rotation ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``."""
    return Rotation.from_euler("ZYX", [yaw, pitch, roll]).as_matrix()


def euler_zyx_rates(angles, rates, accels):
    """Body-frame angular velocity and acceleration for ZYX Euler angles.

    ``angles``, ``rates`` and ``accels`` are ``(roll, pitch, yaw)`` and their
    first and second time derivatives.
    """
    phi, theta, _ = angles
    dphi, dtheta, dpsi = rates
    ddphi, ddtheta, ddpsi = accels
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    omega = np.array([
        dphi - dpsi * st,
        dtheta * cp + dpsi * sp * ct,
        -dtheta * sp + dpsi * cp * ct,
    ])
    domega = np.array([
        ddphi - ddpsi * st - dpsi * dtheta * ct,
        ddtheta * cp - dtheta * dphi * sp + ddpsi * sp * ct + dpsi * (dphi * cp * ct - dtheta * sp * st),
        -ddtheta * sp - dtheta * dphi * cp + ddpsi * cp * ct - dpsi * (dphi * sp * ct + dtheta * cp * st),
    ])
    return omega, domega


def sinusoid_angles(spec: TrajectorySpec, t):
    """Euler angles and their first two derivatives at time ``t``."""
    wt = 2 * np.pi * spec.frequency
    arg = wt * t + spec.phase
    angles = spec.center + spec.amplitude * np.sin(arg)
    rates = spec.amplitude * wt * np.cos(arg)
    accels = -spec.amplitude * wt**2 * np.sin(arg)
    return angles, rates, accels


def sinusoid_orientation(spec: TrajectorySpec, t):
    angles, _, _ = sinusoid_angles(spec, t)
    return euler_zyx_matrix(*angles)


def generate_states(spec: TrajectorySpec):
    """Sample the trajectory; returns a list of ``(timestamp, MotionState)``."""
    states = []
    if spec.kind == "static-grid":
        for i, R in enumerate(spec.orientations):
            states.append((i / spec.sample_rate, MotionState(R.T @ GRAVITY_WORLD)))
    else:
        n = int(round(spec.duration * spec.sample_rate))
        for i in range(n):
            t = i / spec.sample_rate
            angles, rates, accels = sinusoid_angles(spec, t)
            R = euler_zyx_matrix(*angles)
            omega, domega = euler_zyx_rates(angles, rates, accels)
            lever = spec.lever
            lin_acc = np.cross(domega, lever) + np.cross(omega, np.cross(omega, lever))
            states.append((t, MotionState(R.T @ GRAVITY_WORLD, omega, domega, lin_acc)))
    if not states:
        raise EmptyTrajectory(f"{spec.kind} trajectory produced no samples")
    return states


def sample_noise(seed, index, std):
    """Raw-channel noise for one sample, derived from ``(seed, index)`` only."""
    rng = np.random.default_rng([seed, index])
    return rng.standard_normal(6) * std


def synthesize_dataset(body, spec, truth, name, kind=None, flip_sign=False) -> Dataset:
    C = truth.true_model.matrix
    check_nonsingular(C, "true calibration matrix", exc=SingularTruthMatrix)
    states = generate_states(spec)
    t = np.array([s[0] for s in states])
    w = np.array([newton_euler_wrench(body, s[1]) for s in states])
    if flip_sign:
        w = -w
    raw0 = np.linalg.solve(C, (w - truth.true_model.offset).T).T
    noise = np.array([sample_noise(truth.seed, i, truth.noise_std_raw) for i in range(len(t))])
    if kind is None:
        kind = "grid" if spec.kind == "static-grid" else "custom"
    return Dataset(name, t, raw0 + noise, w, kind=kind)


def random_orientations(n, seed):
    return list(Rotation.random(n, random_state=seed).as_matrix())


def quaternion_matrix(q):
    """Rotation matrix of a unit quaternion given scalar-first ``(w, x, y, z)``."""
    q = np.asarray(q, dtype=float)
    if abs(np.linalg.norm(q) - 1.0) > 1e-9:
        raise InvalidValue(f"quaternion {q} is not unit length")
    return Rotation.from_quat([q[1], q[2], q[3], q[0]]).as_matrix()
