"""Audio gap restoration by weighted l1 minimisation over learned Gabor dictionaries."""

from .dictlearn import (Deformation, LearnConfig, apply_deformation,
                        apply_deformation_adjoint, learn_deformation)
from .gabor import GaborFrame, adjoint, analyze, atom, hann_frame, hann_window, make_tight, synthesize
from .janssen import JanssenConfig, janssen_inpaint
from .metrics import SdrReport, sdr, sdr_on_gaps
from .problem import (GapSpec, NeighborhoodSelection, ReliabilityMask, build_mask,
                      extract_neighborhood_coeffs, project_feasible, select_neighborhood)
from .solver import (SolverConfig, SolveResult, clip, default_step_sizes, solve_cp,
                     solve_cp_learned)
from .weights import energy_weights, learned_energy_weights

__version__ = "0.1.0"
