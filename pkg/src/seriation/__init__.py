"""Seriation of latent-position random graphs.

The coarse pipeline (:func:`main_estimate`) orders a graph from aligned
votes over small interval-ordered subsamples of its thresholded square;
:func:`iterative_estimate` refines such an ordering in stages.
"""
from .alphascan import AlphaDiagnostics, diagnose_sharp_boundary, pick_alpha, scan_alpha
from .estimator import IterativeSeriation, SketchSeriation
from .graph import Graph, common_neighbors, induced_subgraph, threshold_square
from .graphon import (
    Constant,
    GraphonError,
    Profile,
    SampledGraph,
    Step,
    UnsupportedVariantWarning,
    Warped,
    check_assumptions,
    sample_graph,
)
from .interval import IntervalStatus, recognize_unit_interval
from .metrics import ErrorReport, comparison_accuracy, induced_order, ordering_error, precision_agreement
from .refine import RefineSchedule, build_schedule, iterative_estimate, refine
from .sketch import (
    BudgetExhaustedError,
    SketchParams,
    comparison_to_order,
    desk_default_params,
    local_refinement,
    main_estimate,
    paper_default_params,
    sparse_sketch,
)

__version__ = "0.1.0"
