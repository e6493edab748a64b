"""Decision procedures for blow-up of solutions to phi-Laplacian inequalities."""
from .asymptotics import AsymptoticAtom, AsymptoticProfile, Convergence, infer_profile
from .barrier import BarrierTable, build_barrier, check_lower_bound, verify_cauchy
from .criteria import (
    ConvergenceReport,
    ProblemSpec,
    Verdict,
    classify_integral,
    decide_theorem,
)
from .eta import EtaBundle, build_eta
from .families import power_log_phi
from .funcdsl import MonotoneFunction, parse_expression
from .radial_verify import RadialCandidate, verify_example2

__version__ = "0.1.0"

__all__ = [
    "AsymptoticAtom",
    "AsymptoticProfile",
    "BarrierTable",
    "Convergence",
    "ConvergenceReport",
    "EtaBundle",
    "MonotoneFunction",
    "ProblemSpec",
    "RadialCandidate",
    "Verdict",
    "build_barrier",
    "build_eta",
    "check_lower_bound",
    "classify_integral",
    "decide_theorem",
    "infer_profile",
    "parse_expression",
    "power_log_phi",
    "verify_cauchy",
    "verify_example2",
]
