"""Model-based in-situ calibration of six-axis force/torque sensors."""

from .core import (
    AXES,
    CalibrationModel,
    CentralizedDataset,
    Dataset,
    RawReading,
    Wrench,
    centralize,
    pool,
    predict_wrench,
)
from .dynamics import (
    MotionState,
    RigidBodyParams,
    SensorGroundTruth,
    TrajectorySpec,
    generate_states,
    newton_euler_wrench,
    synthesize_dataset,
)
from .estimation import (
    OffsetEstimate,
    RegularizedProblem,
    apply_offset_removal,
    calibrate,
    estimate_offset_insitu,
    recover_offset,
    solve_joint,
    solve_regularized,
)
from .validation import (
    DEFAULT_LAMBDAS,
    Candidate,
    assemble_mixed,
    cross_table,
    error_percentage,
    lambda_sweep,
    residual_external_wrench,
)

__version__ = "0.1.0"
