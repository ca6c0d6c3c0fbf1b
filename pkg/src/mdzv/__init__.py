"""Multiple Dedekind zeta values: nested series, membrane integrals and checks."""

__version__ = "0.1.0"

from .algexp import Monomial, alg_pow, monomial_eval
from .cone import Cone, cone_new, enumerate_cone, f0_closed, f0_series
from .membrane import (
    QuadratureSpec,
    MembranePoint,
    integrand_eval,
    mdzv_integral,
    omega_alpha_check,
    tangent_limits,
)
from .moduli_catalog import build_catalog, catalog_counts
from .numfield import (
    AlgebraicInt,
    NumberField,
    embed,
    embedding_det,
    field_new,
    norm,
    regular_rep,
    ring_op,
)
from .series import Composition, epsilon_pattern, mdzv_sum, tail_bound

__all__ = [
    "AlgebraicInt",
    "Composition",
    "Cone",
    "MembranePoint",
    "Monomial",
    "NumberField",
    "QuadratureSpec",
    "alg_pow",
    "build_catalog",
    "catalog_counts",
    "cone_new",
    "embed",
    "embedding_det",
    "enumerate_cone",
    "epsilon_pattern",
    "f0_closed",
    "f0_series",
    "field_new",
    "integrand_eval",
    "mdzv_integral",
    "mdzv_sum",
    "monomial_eval",
    "norm",
    "omega_alpha_check",
    "regular_rep",
    "ring_op",
    "tail_bound",
    "tangent_limits",
]
