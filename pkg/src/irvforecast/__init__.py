"""Probabilistic winner forecasts for instant-runoff elections."""
from .dist import DiscreteDist, convolve, convolve_fft, convolve_naive, discretized_normal
from .domain import Candidate, make_candidates, parse_ranking, format_ranking
from .engine import ElectionModel, elimination_probs, project, win_vector, win_vector_memoized
from .errors import (DomainMismatchError, IRVError, NumericalError, ParseError, StateSpaceError,
                     TieError, ValidationError)
from .oracle import exhaustive_win_probs, mc_win_probs
from .tabulator import run_irv
from .tree import EliminationTree, WinVector

__version__ = "0.1.0"

__all__ = [
    "Candidate", "DiscreteDist", "DomainMismatchError", "ElectionModel", "EliminationTree",
    "IRVError", "NumericalError", "ParseError", "StateSpaceError", "TieError", "ValidationError",
    "WinVector", "convolve", "convolve_fft", "convolve_naive", "discretized_normal",
    "elimination_probs", "exhaustive_win_probs", "format_ranking", "make_candidates",
    "mc_win_probs", "parse_ranking", "project", "run_irv", "win_vector", "win_vector_memoized",
]
