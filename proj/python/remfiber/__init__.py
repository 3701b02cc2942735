"""Twisted de Rham cohomology vs remote fibers of real polynomials."""

import json

from ._remfiber import (
    RemfiberError,
    canonical,
    fit_puiseux_exponent,
    jacobian_quotient_dim,
    levelset_min_gradnorm,
    phi_cochain_residual,
    reduced_betti,
    sample_fiber,
    transport,
    verify_semigroup,
)
from . import _remfiber

__all__ = [
    "RemfiberError",
    "canonical",
    "fit_puiseux_exponent",
    "jacobian_quotient_dim",
    "levelset_min_gradnorm",
    "phi_cochain_residual",
    "phi_eval",
    "reduced_betti",
    "run",
    "sample_fiber",
    "stabilize",
    "transport",
    "verify_semigroup",
]


def stabilize(poly, n_vars, D_max=8):
    return json.loads(_remfiber.stabilize_json(poly, n_vars, D_max))


def phi_eval(form, poly, n_vars, x, t, quad_tol=1e-12):
    return json.loads(_remfiber.phi_eval(form, poly, n_vars, list(x), t, quad_tol))


def run(config, write_artifacts=False):
    """Run a configuration dict; returns the report as a dict."""
    return json.loads(_remfiber.run_json(json.dumps(config), write_artifacts))
