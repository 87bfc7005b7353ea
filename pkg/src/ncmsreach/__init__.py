"""Reachability underapproximation for nondeterministic complete Markovian systems.

A system is a set of trajectories on a uniform time grid that is closed under
proper restrictions, Markovian and complete. ``reach`` holds the certificate
check (f-backward extensibility plus a right-range test), ``oracle`` checks it
exhaustively against BFS on finite transition systems, and ``systems`` turns
ODEs and switched systems into trajectory sets.
"""

from .classk import ClassKFunction, classk_eval, classk_fminus
from .core import (
    DEFAULT_CAP,
    DEFAULT_EPS,
    GridInterval,
    LabelSpace,
    NCMSReport,
    TimeGrid,
    Trajectory,
    TrajectorySet,
    VectorSpace,
    check_complete,
    check_cpr,
    check_markovian,
    check_ncms,
    closure,
    concat,
    is_subtrajectory,
    restrict,
)
from .errors import (
    CertificateError,
    DomainError,
    EvaluationError,
    GridMismatchError,
    NCMSError,
    NotNCMSError,
    ParseError,
    ResourceCapError,
)
from .oracle import FiniteTS, OracleConfig, bfs_reach, run_oracle, ts_to_ncms, verify_theorem, witness_from_initials
from .reach import (
    Certificate,
    NCMSInstance,
    certify_underapprox,
    check_f_backward_extensible,
    initial_trajectories,
    is_backward_escape,
    is_backward_extension,
    is_sub_ncms,
    reach_set,
    restrict_states,
    right_range_set,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CertificateError",
    "ClassKFunction",
    "DEFAULT_CAP",
    "DEFAULT_EPS",
    "DomainError",
    "EvaluationError",
    "FiniteTS",
    "GridInterval",
    "GridMismatchError",
    "LabelSpace",
    "NCMSError",
    "NCMSInstance",
    "NCMSReport",
    "NotNCMSError",
    "OracleConfig",
    "ParseError",
    "ResourceCapError",
    "TimeGrid",
    "Trajectory",
    "TrajectorySet",
    "VectorSpace",
    "bfs_reach",
    "certify_underapprox",
    "check_complete",
    "check_cpr",
    "check_f_backward_extensible",
    "check_markovian",
    "check_ncms",
    "classk_eval",
    "classk_fminus",
    "closure",
    "concat",
    "initial_trajectories",
    "is_backward_escape",
    "is_backward_extension",
    "is_sub_ncms",
    "is_subtrajectory",
    "reach_set",
    "restrict",
    "restrict_states",
    "right_range_set",
    "run_oracle",
    "ts_to_ncms",
    "verify_theorem",
    "witness_from_initials",
]
