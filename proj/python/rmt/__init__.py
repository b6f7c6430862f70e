"""Random-matrix semicircle toolkit.

Thin wrappers over the C++ core: ensemble specs are plain dicts, exact
values come back as ``fractions.Fraction``.
"""

import json
from fractions import Fraction

from . import _rmt
from ._rmt import (
    RmtError,
    aut_order,
    canonical_form,
    eigenvalues_hermitian,
    esd_moment,
    is_eulerian,
    ks_distance_to_semicircle,
    semicircle_density,
    semicircle_moment,
    semicircle_resolvent,
)

__version__ = _rmt.__version__

__all__ = [
    "RmtError",
    "aut_order",
    "canonical_form",
    "catalan",
    "cumulant_scan",
    "eigenvalues_hermitian",
    "esd_moment",
    "is_eulerian",
    "ks_distance_to_semicircle",
    "rg_flow",
    "sample_matrix",
    "sample_spectra",
    "scaling_exponent",
    "semicircle_density",
    "semicircle_moment",
    "semicircle_resolvent",
    "trace_moment_expectation",
]


def _spec(spec):
    return spec if isinstance(spec, str) else json.dumps(spec)


def sample_matrix(spec, n, seed, stream=0):
    """One Hermitian matrix M (unscaled) as an n x n complex array."""
    return _rmt.sample_matrix(_spec(spec), n, seed, stream)


def sample_spectra(spec, n, samples, seed, threads=0):
    """Eigenvalues of M/sqrt(N), one array per sample."""
    return _rmt.sample_spectra(_spec(spec), n, samples, seed, threads)


def trace_moment_expectation(n, k, sigma_squared=1):
    return Fraction(_rmt.trace_moment_expectation(n, k, str(Fraction(sigma_squared))))


def catalan(l):
    return int(_rmt.catalan(l))


def scaling_exponent(graph):
    return Fraction(_rmt.scaling_exponent(graph))


def cumulant_scan(spec, graphs, n_grid, samples, seed, threads=0):
    return _rmt.cumulant_scan(_spec(spec), list(graphs), list(n_grid), samples, seed, threads)


def rg_flow(order, sigma=1, perturbations=None, max_edges=6):
    """Resolvent coefficients of 1/z .. 1/z^order from the exact replica flow."""
    pert = "" if perturbations is None else _spec(perturbations)
    out = _rmt.rg_flow(order, str(Fraction(sigma)), pert, max_edges)
    return {
        "resolvent": [Fraction(c) for c in out["resolvent"]],
        "flow": json.loads(out["flow_json"]),
        "bounds_ok": out["bounds_ok"],
        "truncated": out["truncated"],
    }
