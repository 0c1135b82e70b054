"""singtrace: Dixmier traces from singular values."""
from .errors import (BoundViolation, DomainError, HorizonOverflow, InputError, NotInSpaceError,
                     QuadratureError, SingtraceError, TailBoundError)
from .singular_values import (AnalyticData, DirectSumData, ScaledData, SequenceData, StepFunctionData,
                              SumData, decreasing_rearrangement)
from .families import build_family, finite_rank, harmonic, log_oscillator, power
from .marcinkiewicz import (get_kappa, get_psi, kappa_weighted_mean_profile, marcinkiewicz_norm,
                            riesz_seminorm, weighted_mean)

__version__ = "0.1.0"
