"""Built-in test fields and cones."""

from __future__ import annotations

from functools import lru_cache

from .cone import Cone, cone_new
from .numfield import DEFAULT_PRECISION, NumberField, field_new

# name -> (min_poly ascending, integral basis, cone generators in that basis)
FIXTURES = {
    "Q": ([-1, 1], [[1]], [[1]]),
    "Q(sqrt2)": ([-2, 0, 1], [[1, 0], [0, 1]], [[1, 0], [3, 2]]),
    # complex cubic of discriminant -23; generators 1, 1 + theta, theta^2
    "cubic": ([-1, -1, 0, 1], [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [1, 1, 0], [0, 0, 1]]),
    # totally real cubic of discriminant 81; generators theta + 2, theta^2, 2 - theta
    "cubic-real": ([1, -3, 0, 1], [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[2, 1, 0], [0, 0, 1], [2, -1, 0]]),
}


@lru_cache(maxsize=None)
def field(name: str, precision: int = DEFAULT_PRECISION) -> NumberField:
    poly, basis, _ = FIXTURES[name]
    return field_new(poly, basis, precision)


@lru_cache(maxsize=None)
def cone(name: str, precision: int = DEFAULT_PRECISION) -> Cone:
    return cone_new(field(name, precision), FIXTURES[name][2])
