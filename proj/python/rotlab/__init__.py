"""Python access to the rotation-lab core."""

import json as _json

from ._rotlab import (
    CSV_HEADERS,
    BudgetError,
    PrecisionError,
    PreconditionError,
    UnknownExperiment,
    bohr_enumerate,
    canonical_alpha,
    continued_fraction,
    cute_identity,
    frac_part,
    gap_ks,
    key_lemma_ratio,
    list_experiments,
    ostrowski_decode,
    ostrowski_encode,
    phi,
    r_k,
    residue_counts,
    rough_correlation,
    rough_numbers,
    singular_series,
    tuple_count,
    walk_tv,
)
from ._rotlab import run_experiment as _run_experiment


def run_experiment(name, **overrides):
    """Run a named experiment; returns the parsed summary."""
    config = {"schema_version": 1, "experiment": name}
    config.update(overrides)
    return _json.loads(_run_experiment(_json.dumps(config)))


__all__ = [
    "CSV_HEADERS",
    "BudgetError",
    "PrecisionError",
    "PreconditionError",
    "UnknownExperiment",
    "bohr_enumerate",
    "canonical_alpha",
    "continued_fraction",
    "cute_identity",
    "frac_part",
    "gap_ks",
    "key_lemma_ratio",
    "list_experiments",
    "ostrowski_decode",
    "ostrowski_encode",
    "phi",
    "r_k",
    "residue_counts",
    "rough_correlation",
    "rough_numbers",
    "run_experiment",
    "singular_series",
    "tuple_count",
    "walk_tv",
]
