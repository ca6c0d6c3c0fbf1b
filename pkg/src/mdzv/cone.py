"""Cones C = N{e_1, ..., e_n} and their exponential generating function f_0.

N starts at 1: every coefficient a_i of a cone element is a positive integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import mpmath
import numpy as np
import sympy

from .errors import DomainError, NegativeEmbedding, NotLinearlyIndependent, WrongTupleLength
from .numfield import GUARD_BITS, AlgebraicInt, NumberField, embed, regular_rep


class Cone:
    """Validated simplicial cone with cached embedding data.

    ``embedding_matrix[i][j]`` is sigma_{j+1}(e_{i+1}); ``sqrt_D`` is its
    determinant.
    """

    def __init__(self, field: NumberField, generators: Sequence[AlgebraicInt], embedding_matrix, sqrt_D):
        self.field = field
        self.generators = tuple(generators)
        self.embedding_matrix = tuple(tuple(r) for r in embedding_matrix)
        self.sqrt_D = sqrt_D

    @property
    def n(self) -> int:
        return self.field.degree

    def __repr__(self):
        return f"Cone({[list(g.coords) for g in self.generators]} over {self.field!r})"

    @cached_property
    def sigma(self) -> np.ndarray:
        """Real parts of the embedding matrix as binary64, shape (n, n)."""
        return np.array([[float(mpmath.re(v)) for v in row] for row in self.embedding_matrix])

    @cached_property
    def norm_form(self) -> dict[tuple[int, ...], int]:
        """Integer coefficients of a -> N(a_1 e_1 + ... + a_n e_n)."""
        n = self.n
        a = sympy.symbols(f"a1:{n + 1}")
        reps = [sympy.Matrix(regular_rep(self.field, e).rows()) for e in self.generators]
        mat = sum((ai * r for ai, r in zip(a, reps)), sympy.zeros(n, n))
        poly = sympy.Poly(sympy.expand(mat.det(method="berkowitz")), *a)
        return {tuple(int(e) for e in mon): int(c) for mon, c in poly.terms()}

    def element(self, coeffs: Sequence[int]) -> AlgebraicInt:
        n = self.n
        coords = [0] * n
        for a, e in zip(coeffs, self.generators):
            for k in range(n):
                coords[k] += a * e.coords[k]
        return self.field.element(coords)


def cone_new(nf: NumberField, generators: Sequence) -> Cone:
    """Validate generators: n of them, Q-independent, with non-negative real embeddings.

    For totally real fields every sigma_j(e_i) must be strictly positive.
    """
    gens = [g if isinstance(g, AlgebraicInt) else nf.element(g) for g in generators]
    if len(gens) != nf.degree:
        raise WrongTupleLength(f"a cone over a degree-{nf.degree} field needs {nf.degree} generators")
    nf._check(*gens)
    if sympy.Matrix([list(g.coords) for g in gens]).rank() < nf.degree:
        raise NotLinearlyIndependent("generators are linearly dependent over Q")

    strict = nf.is_totally_real
    tol = mpmath.mpf(2) ** (-(nf.precision // 2))
    matrix = []
    for i, g in enumerate(gens, start=1):
        row = []
        for j in range(1, nf.degree + 1):
            v = embed(nf, g, j)
            re = mpmath.re(v)
            if re < -tol or (strict and re <= tol):
                raise NegativeEmbedding(i, j, mpmath.nstr(re, 12))
            row.append(v)
        matrix.append(row)
    with mpmath.workprec(nf.precision + GUARD_BITS):
        sqrt_d = mpmath.det(mpmath.matrix(matrix))
    with mpmath.workprec(nf.precision):
        sqrt_d = +sqrt_d
    return Cone(nf, gens, matrix, sqrt_d)


def enumerate_cone(cone: Cone, coeff_bound: int) -> Iterator[tuple[tuple[int, ...], AlgebraicInt]]:
    """Yield (a, sum a_i e_i) for all a in [1, A]^n in lexicographic order."""
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be >= 1")
    for a in itertools.product(range(1, coeff_bound + 1), repeat=cone.n):
        yield a, cone.element(a)


def exponent_rates(cone: Cone, t: Sequence) -> list:
    """lambda_i = sum_j t_j sigma_j(e_i); raises DomainError unless every Re lambda_i > 0."""
    if len(t) != cone.n:
        raise WrongTupleLength(f"need {cone.n} values of t")
    with mpmath.workprec(cone.field.precision + GUARD_BITS):
        ts = [mpmath.mpf(x) for x in t]
        lams = [mpmath.fsum(tj * s for tj, s in zip(ts, row)) for row in cone.embedding_matrix]
    for i, lam in enumerate(lams, start=1):
        if not mpmath.re(lam) > 0:
            raise DomainError(f"sum_j t_j sigma_j(e_{i}) = {mpmath.nstr(lam, 10)} is not positive")
    return lams


def f0_closed(cone: Cone, t: Sequence):
    """Product of n geometric series: prod_i e^{-lambda_i} / (1 - e^{-lambda_i})."""
    lams = exponent_rates(cone, t)
    with mpmath.workprec(cone.field.precision + GUARD_BITS):
        out = mpmath.mpf(1)
        for lam in lams:
            out /= mpmath.expm1(lam)
    with mpmath.workprec(cone.field.precision):
        return +out


@dataclass(frozen=True)
class F0Series:
    value: object
    tail_bound: object
    coeff_bound: int


def _f0_tail(lams, coeff_bound):
    # complement of the box lies in the union of {a_i > A}; |e^{-a lam}| = e^{-a Re lam}
    whole = mpmath.mpf(1)
    for lam in lams:
        whole /= mpmath.expm1(mpmath.re(lam))
    return mpmath.fsum(mpmath.exp(-coeff_bound * mpmath.re(lam)) for lam in lams) * whole


def f0_series(cone: Cone, t: Sequence, coeff_bound: int) -> F0Series:
    """Partial sum of exp(-sum_j t_j sigma_j(alpha)) over the coefficient box, with a tail bound."""
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be >= 1")
    lams = exponent_rates(cone, t)
    nf = cone.field
    with mpmath.workprec(nf.precision + GUARD_BITS):
        ts = [mpmath.mpf(x) for x in t]
        terms = []
        for _a, alpha in enumerate_cone(cone, coeff_bound):
            sig = [mpmath.fdot(alpha.coords, nf._sigma_mu[j]) for j in range(nf.degree)]
            terms.append(mpmath.exp(-mpmath.fdot(ts, sig)))
        value = mpmath.fsum(terms)
        # the bound is exact for n = 1; allow for rounding the outputs to nf.precision
        tail = _f0_tail(lams, coeff_bound) + abs(value) * mpmath.mpf(2) ** (8 - nf.precision)
    with mpmath.workprec(nf.precision):
        return F0Series(+value, +tail, coeff_bound)


def f0_coeff_bound(cone: Cone, t: Sequence, tol: float) -> int:
    """Smallest A whose f0_series tail bound is below ``tol``."""
    lams = exponent_rates(cone, t)
    with mpmath.workprec(64):
        whole = _f0_tail(lams, 0) / len(lams)
        guess = max(mpmath.log(len(lams) * whole / tol) / mpmath.re(lam) for lam in lams)
        a = max(1, int(mpmath.ceil(guess)))
        while _f0_tail(lams, a) >= tol:
            a += 1
        while a > 1 and _f0_tail(lams, a - 1) < tol:
            a -= 1
        return a


def f0_float(cone: Cone, grids: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorised binary64 f_0 on broadcastable coordinate arrays (totally real cones)."""
    sig = cone.sigma
    out = 1.0
    for i in range(cone.n):
        lam = sum(grids[j] * sig[i, j] for j in range(cone.n))
        out = out / np.expm1(lam)
    return out


def min_rate(cone: Cone) -> list[float]:
    """rho_j = sigma_j(e_1 + ... + e_n): the smallest sigma_j over cone elements."""
    return [math.fsum(cone.sigma[:, j]) for j in range(cone.n)]
