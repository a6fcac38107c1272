"""
Numerical tools for spectral gaps of discrete measures: gap-constrained
synthesis and optimization, majorant-based determinacy diagnostics and
uniform-sequence statistics.
"""

__version__ = "0.1.0"

from .errors import (BracketError, ConsistencyError, GaplabError, InfeasibleGapError,
                     NotApplicableError, PreconditionError, ProfileSupportError,
                     SingularGramError, WeightDomainError, ZeroMeasureError)
from .measures import (DiscreteMeasure, RealSequence, counting_function, jordan_decompose,
                       sign_change_report, sign_changes, weighted_norm)
from .fourier import ft_eval, gap_residual, make_highpass_lattice, clark_lattice
from .determinacy import gram_matrix, majorant, riesz_log_integral, determinacy_verdict
from .gapsolver import (GapProblem, min_gap_residual, estimate_gap_characteristic,
                        interlacing_check, det_probe)
from .krein import (ZeroSetFunction, partial_fraction_check, residue_measure,
                    double_zero_replacement, oscillation_rate_check)
