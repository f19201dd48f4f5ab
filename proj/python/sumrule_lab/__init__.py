"""Numerical verification of spectral-theory sum rules.

The compiled core exposes measures on the real line and the unit circle,
recursion-coefficient extraction (Jacobi, Verblunsky, canonical moments,
z-coefficients), the Szego / Delsarte-Genin / DVZ / Mobius pushforwards and
independent evaluation of both sides of the supported sum rules.
"""

import json as _json

from ._core import (  # noqa: F401
    Measure,
    SumruleError,
    apply_maps,
    canonical_from_jacobi,
    canonical_moments,
    deformed_verblunsky,
    dg_pull,
    jacobi,
    jacobi_from_canonical,
    kl,
    mixture_kl_decompose,
    nevanlinna_pick,
    schur_coefficients,
    szego_pull,
    trig_moments,
    verblunsky,
    z_from_jacobi,
)
from . import _core as _c


def _dumps(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def measure(dsl):
    """Build a measure from its DSL document (dict or JSON string)."""
    return _c.measure(_dumps(dsl))


def verify(rule, measure_doc, rule_params=None, N=200, tol=1e-6):
    """Verify one sum rule; returns the report as a dict."""
    m = measure_doc if isinstance(measure_doc, Measure) else measure(measure_doc)
    return _c.verify(rule, m, _dumps(rule_params or {}), N, tol)


__all__ = [
    "Measure",
    "SumruleError",
    "apply_maps",
    "canonical_from_jacobi",
    "canonical_moments",
    "deformed_verblunsky",
    "dg_pull",
    "jacobi",
    "jacobi_from_canonical",
    "kl",
    "measure",
    "mixture_kl_decompose",
    "nevanlinna_pick",
    "schur_coefficients",
    "szego_pull",
    "trig_moments",
    "verblunsky",
    "verify",
    "z_from_jacobi",
]
