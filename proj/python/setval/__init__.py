"""Set-valued martingales: interval arithmetic, Aumann expectation, tree
transforms, Monte Carlo martingale tests and representation checks."""

import json as _json

from ._setval import (
    ConvexBody,
    Interval,
    SetvalError,
    aumann_expectation,
    body_hausdorff_distance,
    castaing_weight,
    contains,
    experiment_ids,
    gen_brownian,
    geometric_martingale,
    hausdorff_distance,
    hukuhara_diff,
    is_degenerate_by_expectation,
    ito_integral,
    minkowski_add,
    scalar_mul,
    tree_classification,
    tree_transform,
)
from . import _setval

__version__ = _setval.__version__


def run_experiment(experiment_id, **config):
    """Run one named experiment and return its report as a dict."""
    return _json.loads(_setval.run_experiment_json(experiment_id, **config))


def martingale_test(x, paths, horizon, alpha=0.01):
    """Orthogonality martingale test of a sampled process against paths of B."""
    return _json.loads(_setval.martingale_test_json(x, paths, horizon, alpha))


def finite_check(problem):
    """Classify a set-valued process on a finite space given as a dict."""
    return _json.loads(_setval.finite_check_json(_json.dumps(problem)))


def represent_check(process):
    """Representability cross-check of a tree interval process given as a dict."""
    return _json.loads(_setval.represent_check_json(_json.dumps(process)))
