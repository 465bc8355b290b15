"""Nonnegative C^2 interpolation of planar data.

Typical use::

    state = c2plus.preprocess(points)            # depends on the points only
    M = c2plus.trace_norm(state, f)              # order of magnitude of the norm
    F = c2plus.Interpolant(state, f, M)
    F.jets(X)                                    # value, gradient and Hessian rows
"""

from .config import Config
from .extension import (FinitenessFamily, Interpolant, PreprocessedState, global_jet, pou_jet,
                        preprocess, representative_set, sfp_sets, trace_norm, trace_norm_detail)
from .jets import Jet1, Jet2, WhitneyField
from .small_trace import m0_minimize, m1_minimize, small_trace_norm

__version__ = "0.1.0"

__all__ = [
    "Config",
    "FinitenessFamily",
    "Interpolant",
    "Jet1",
    "Jet2",
    "PreprocessedState",
    "WhitneyField",
    "__version__",
    "global_jet",
    "m0_minimize",
    "m1_minimize",
    "pou_jet",
    "preprocess",
    "representative_set",
    "sfp_sets",
    "small_trace_norm",
    "trace_norm",
    "trace_norm_detail",
]
