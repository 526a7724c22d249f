"""sigma_k quotient operators on transformed spectra.

Thin wrapper over the compiled _etaq module; see the individual
function docstrings for the calling conventions.
"""

from ._etaq import (
    cone_contains,
    eta_spectrum,
    eval_expression,
    evaluate,
    key_lemma_ratio,
    quotient,
    quotient_gradient,
    quotient_hessian,
    run_cli,
    sigma,
    sphere_oracle,
)

__all__ = [
    "cone_contains",
    "eta_spectrum",
    "eval_expression",
    "evaluate",
    "key_lemma_ratio",
    "quotient",
    "quotient_gradient",
    "quotient_hessian",
    "run_cli",
    "sigma",
    "sphere_oracle",
]
