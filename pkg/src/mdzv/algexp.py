"""Algebraic exponents: raising monomials to powers in the ring of integers.

A monomial prod_k y_k^{v_k} is stored as its exponent vector ``v``.  Raising
to the power gamma multiplies ``v`` on the right by the regular
representation C of gamma, so that y_i maps to prod_k y_k^{c_ik}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath

from .errors import FieldMismatch, NonPositivePoint
from .numfield import AlgebraicInt, NumberField, regular_rep


@dataclass(frozen=True)
class Monomial:
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @classmethod
    def basis(cls, n: int, i: int) -> "Monomial":
        """The variable y_i (1-based) in n variables."""
        return cls(tuple(1 if k == i - 1 else 0 for k in range(n)))

    @property
    def degree(self) -> int:
        return len(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if self.degree != other.degree:
            raise FieldMismatch("monomials in different numbers of variables")
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __str__(self):
        parts = [f"y{k + 1}" + (f"^{e}" if e != 1 else "") for k, e in enumerate(self.exponents) if e]
        return "*".join(parts) or "1"


def alg_pow(nf: NumberField, gamma: AlgebraicInt, mon: Monomial) -> Monomial:
    """f^gamma applied to a monomial: exponent vector v -> v C."""
    if mon.degree != nf.degree:
        raise FieldMismatch(f"monomial in {mon.degree} variables over a degree-{nf.degree} field")
    c = regular_rep(nf, gamma).entries
    n = nf.degree
    return Monomial(tuple(sum(mon.exponents[i] * c[i][k] for i in range(n)) for k in range(n)))


def monomial_eval(mon: Monomial, point: Sequence, precision: int | None = None):
    """prod_k point_k^{v_k}; the point must be strictly positive."""
    if len(point) != mon.degree:
        raise FieldMismatch("point dimension does not match the monomial")
    prec = precision if precision is not None else mpmath.mp.prec
    with mpmath.workprec(prec):
        out = mpmath.mpf(1)
        for x, e in zip(point, mon.exponents):
            x = mpmath.mpf(x)
            if not x > 0:
                raise NonPositivePoint(f"coordinate {x} is not strictly positive")
            if e:
                out *= x ** e
        return out
