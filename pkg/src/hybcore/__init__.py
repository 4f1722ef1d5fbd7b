"""HybCore: a while-language for hybrid computation.

Programs mix instantaneous steps with continuous evolutions. Five engines
evaluate them: small-step and big-step duration semantics, the big-step
evolution semantics, and denotations in the duration monad Q and the hybrid
monad H.
"""

from .denote import denote_h, denote_q
from .errors import FrontendError, HybError, ParseError, RuntimeFault, TypeCheckError
from .frontend import parse, pretty
from .hybrid import Traj, eval_traj
from .opsem import Converged, Diverged, bs_duration, evo_eval, ss_run, ss_step
from .params import DEFAULT_PARAMS, EvalParams
from .typecheck import check_program

__all__ = [
    "DEFAULT_PARAMS",
    "Converged",
    "Diverged",
    "EvalParams",
    "FrontendError",
    "HybError",
    "ParseError",
    "RuntimeFault",
    "Traj",
    "TypeCheckError",
    "bs_duration",
    "check_program",
    "denote_h",
    "denote_q",
    "eval_traj",
    "evo_eval",
    "parse",
    "pretty",
    "ss_run",
    "ss_step",
]
