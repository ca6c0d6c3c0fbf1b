"""Number fields given by a minimal polynomial and a user-supplied integral basis.

Arithmetic in the order spanned by the basis is exact (integers and
fractions).  Embeddings are isolated with exact rational root isolation and
then polished by Newton iteration at the working precision.

Embedding indices ``j`` are 1-based everywhere in the public API and follow a
fixed order: real roots ascending, then complex roots by imaginary part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath
import sympy

from .errors import (
    BasisSingular,
    FieldMismatch,
    FirstBasisElementNotOne,
    IndexOutOfRange,
    NonIntegralProduct,
    NotIrreducible,
    NotMonic,
    NotSquareFree,
    WrongTupleLength,
)

DEFAULT_PRECISION = 128
GUARD_BITS = 32

_X = sympy.Symbol("x")


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        if not v.is_integer():
            raise TypeError(f"non-integral float {v!r} in basis; pass a 'p/q' string")
        return Fraction(int(v))
    if isinstance(v, sympy.Rational):
        return Fraction(int(v.p), int(v.q))
    return Fraction(v)


def _poly_mulmod(a: Sequence[Fraction], b: Sequence[Fraction], f: Sequence[int]) -> list[Fraction]:
    """Product of two power-basis vectors modulo the monic polynomial ``f``."""
    n = len(f) - 1
    prod = [Fraction(0)] * (2 * n - 1 if n else 1)
    for i, ai in enumerate(a):
        if ai:
            for k, bk in enumerate(b):
                prod[i + k] += ai * bk
    for d in range(len(prod) - 1, n - 1, -1):
        c = prod[d]
        if c:
            # theta^d = -sum_{p<n} f_p theta^(d-n+p)
            for p in range(n):
                prod[d - n + p] -= c * f[p]
        prod[d] = Fraction(0)
    return prod[:n]


@dataclass(frozen=True)
class AlgebraicInt:
    """Element of the order, as integer coordinates in the integral basis."""

    coords: tuple[int, ...]
    field_key: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def degree(self) -> int:
        return len(self.coords)

    def __repr__(self):
        return f"AlgebraicInt({list(self.coords)})"


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        n = self.n
        return IntMatrix(tuple(
            tuple(sum(self.entries[i][l] * other.entries[l][k] for l in range(n)) for k in range(n))
            for i in range(n)
        ))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


class NumberField:
    """Immutable number field K = Q[x]/(min_poly) with an integral basis.

    ``min_poly`` holds ascending integer coefficients; ``integral_basis[i]``
    expresses mu_{i+1} in the power basis 1, theta, ..., theta^(n-1).
    """

    def __init__(self, min_poly, integral_basis, precision, embeddings, basis_inverse):
        self.min_poly = tuple(min_poly)
        self.integral_basis = tuple(tuple(r) for r in integral_basis)
        self.precision = int(precision)
        self.embeddings = tuple(embeddings)
        self._basis_inverse = basis_inverse
        self.key = (self.min_poly, self.integral_basis)

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @property
    def n_real(self) -> int:
        return sum(1 for r in self.embeddings if not isinstance(r, mpmath.mpc))

    @property
    def is_totally_real(self) -> bool:
        return self.n_real == self.degree

    def __repr__(self):
        return f"NumberField(min_poly={list(self.min_poly)}, degree={self.degree})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def element(self, coords) -> AlgebraicInt:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.degree:
            raise FieldMismatch(f"expected {self.degree} coordinates, got {len(coords)}")
        return AlgebraicInt(coords, self.key)

    def zero(self) -> AlgebraicInt:
        return self.element([0] * self.degree)

    def one(self) -> AlgebraicInt:
        return self.element([1] + [0] * (self.degree - 1))

    def _check(self, *elts: AlgebraicInt):
        for a in elts:
            if len(a.coords) != self.degree or (a.field_key and a.field_key != self.key):
                raise FieldMismatch(f"{a!r} does not belong to {self!r}")

    @cached_property
    def structure_constants(self) -> list[list[list[Fraction]]]:
        """``T[a][b][c]``: coordinate c of mu_a * mu_b in the integral basis."""
        n = self.degree
        f = self.min_poly
        binv = self._basis_inverse
        table = []
        for a in range(n):
            row = []
            for b in range(n):
                p = _poly_mulmod(self.integral_basis[a], self.integral_basis[b], f)
                row.append([sum(p[q] * binv[q][c] for q in range(n)) for c in range(n)])
            table.append(row)
        return table

    @cached_property
    def _sigma_mu(self) -> list[list]:
        """``_sigma_mu[j][l]`` = sigma_{j+1}(mu_{l+1}) with guard bits."""
        out = []
        with mpmath.workprec(self.precision + GUARD_BITS):
            for rho in self.embeddings:
                powers = [mpmath.mpf(1)]
                for _ in range(1, self.degree):
                    powers.append(powers[-1] * rho)
                out.append([
                    mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * pw
                                for c, pw in zip(row, powers))
                    for row in self.integral_basis
                ])
        return out


def _mpf_rational(q) -> mpmath.mpf:
    q = sympy.Rational(q)
    return mpmath.mpf(int(q.p)) / int(q.q)


def _isolate_roots(min_poly: Sequence[int], precision: int) -> list:
    """Certified roots of ``min_poly`` ordered real-ascending then by imaginary part."""
    poly = sympy.Poly(list(reversed(min_poly)), _X)
    if poly.degree() == 1:
        return [mpmath.mpf(-min_poly[0])]
    real_iv, complex_iv = poly.intervals(all=True, eps=Fraction(1, 2 ** 16))
    coeffs = list(reversed(min_poly))
    tol = mpmath.mpf(2) ** (-(precision // 2))
    roots = []
    with mpmath.workprec(precision + GUARD_BITS):
        f = lambda z: mpmath.polyval(coeffs, z)
        for (a, b), _mult in real_iv:
            lo, hi = _mpf_rational(a), _mpf_rational(b)
            if lo == hi:
                roots.append(lo)
                continue
            r = mpmath.findroot(f, (lo + hi) / 2, solver="newton")
            if not (lo <= r <= hi) or abs(f(r)) >= tol:
                r = mpmath.findroot(f, (lo, hi), solver="anderson")
            if not (lo <= r <= hi) or abs(f(r)) >= tol:
                raise ArithmeticError(f"root refinement failed in [{a}, {b}]")
            roots.append(mpmath.mpf(r))
        cplx = []
        for (lower, upper), _mult in complex_iv:
            lower, upper = complex(lower), complex(upper)
            z0 = mpmath.mpc((lower.real + upper.real) / 2, (lower.imag + upper.imag) / 2)
            r = mpmath.findroot(f, z0, solver="newton")
            inside = (lower.real - 1e-9 <= float(r.real) <= upper.real + 1e-9
                      and lower.imag - 1e-9 <= float(r.imag) <= upper.imag + 1e-9)
            if not inside or abs(f(r)) >= tol:
                raise ArithmeticError("complex root refinement left its isolating rectangle")
            cplx.append(mpmath.mpc(r))
    roots.sort()
    cplx.sort(key=lambda z: (z.imag, z.real))
    return roots + cplx


def field_new(min_poly, integral_basis=None, precision: int = DEFAULT_PRECISION) -> NumberField:
    """Validate the field data and compute certified embeddings."""
    min_poly = [int(c) for c in min_poly]
    while len(min_poly) > 1 and min_poly[-1] == 0:
        min_poly.pop()
    n = len(min_poly) - 1
    if n < 1 or min_poly[-1] != 1:
        raise NotMonic(f"minimal polynomial {min_poly} must be monic of degree >= 1")
    poly = sympy.Poly(list(reversed(min_poly)), _X)
    if sympy.degree(sympy.gcd(poly, poly.diff(_X)), _X) > 0:
        raise NotSquareFree(f"minimal polynomial {min_poly} has a repeated factor")
    if n > 1 and not poly.is_irreducible:
        raise NotIrreducible(f"minimal polynomial {min_poly} is reducible over Q")

    if integral_basis is None:
        integral_basis = [[1 if i == k else 0 for k in range(n)] for i in range(n)]
    basis = [[_to_fraction(v) for v in row] for row in integral_basis]
    if len(basis) != n or any(len(r) != n for r in basis):
        raise BasisSingular(f"integral basis must be {n}x{n}")
    mat = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in basis])
    if mat.det() == 0:
        raise BasisSingular("integral basis is not invertible over Q")
    if basis[0] != [Fraction(1)] + [Fraction(0)] * (n - 1):
        raise FirstBasisElementNotOne("the first basis element must be mu_1 = 1")
    inv = mat.inv()
    basis_inverse = [[Fraction(int(inv[i, k].p), int(inv[i, k].q)) for k in range(n)] for i in range(n)]

    embeddings = _isolate_roots(min_poly, int(precision))
    return NumberField(min_poly, basis, precision, embeddings, basis_inverse)


def regular_rep(nf: NumberField, gamma: AlgebraicInt) -> IntMatrix:
    """Matrix (c_ik) with gamma * mu_i = sum_k c_ik mu_k."""
    nf._check(gamma)
    n = nf.degree
    T = nf.structure_constants
    rows = []
    for i in range(n):
        row = []
        for k in range(n):
            c = sum(g * T[l][i][k] for l, g in enumerate(gamma.coords) if g)
            c = Fraction(c)
            if c.denominator != 1:
                raise NonIntegralProduct(
                    f"gamma*mu_{i + 1} has non-integral coordinate {c}; the basis is not an order"
                )
            row.append(int(c))
        rows.append(tuple(row))
    return IntMatrix(tuple(rows))


def ring_op(nf: NumberField, alpha: AlgebraicInt, beta: AlgebraicInt, kind: str) -> AlgebraicInt:
    nf._check(alpha, beta)
    if kind == "add":
        return nf.element(a + b for a, b in zip(alpha.coords, beta.coords))
    if kind == "mul":
        c = regular_rep(nf, alpha).entries
        n = nf.degree
        return nf.element(sum(beta.coords[i] * c[i][k] for i in range(n)) for k in range(n))
    raise ValueError(f"unknown ring operation {kind!r}")


def add(nf, alpha, beta):
    return ring_op(nf, alpha, beta, "add")


def mul(nf, alpha, beta):
    return ring_op(nf, alpha, beta, "mul")


def scale(nf: NumberField, k: int, alpha: AlgebraicInt) -> AlgebraicInt:
    nf._check(alpha)
    return nf.element(k * a for a in alpha.coords)


def _int_det(rows) -> int:
    return int(sympy.Matrix(rows).det(method="bareiss"))


def norm(nf: NumberField, alpha: AlgebraicInt) -> int:
    """Exact norm as the determinant of the regular representation."""
    return _int_det(regular_rep(nf, alpha).rows())


def trace(nf: NumberField, alpha: AlgebraicInt) -> int:
    c = regular_rep(nf, alpha).entries
    return sum(c[i][i] for i in range(nf.degree))


def embed(nf: NumberField, alpha: AlgebraicInt, j: int):
    """sigma_j(alpha) at the field's working precision (j is 1-based)."""
    nf._check(alpha)
    if not 1 <= j <= nf.degree:
        raise IndexOutOfRange(f"embedding index {j} outside 1..{nf.degree}")
    sig = nf._sigma_mu[j - 1]
    with mpmath.workprec(nf.precision):
        return +mpmath.fdot(alpha.coords, sig)


def embed_all(nf: NumberField, alpha: AlgebraicInt) -> list:
    return [embed(nf, alpha, j) for j in range(1, nf.degree + 1)]


def trace_form_discriminant(nf: NumberField, elements: Sequence[AlgebraicInt]) -> int:
    """det(Tr(e_i e_k)), exact."""
    rows = [[trace(nf, mul(nf, a, b)) for b in elements] for a in elements]
    return _int_det(rows)


def field_discriminant(nf: NumberField) -> int:
    """Discriminant of the integral basis via the trace form."""
    basis = [nf.element([1 if i == k else 0 for k in range(nf.degree)]) for i in range(nf.degree)]
    return trace_form_discriminant(nf, basis)


def poly_discriminant_over_index(nf: NumberField) -> Fraction:
    """disc(min_poly) * det(basis)^2, computed from the resultant (independent of the trace form)."""
    poly = sympy.Poly(list(reversed(nf.min_poly)), _X)
    disc = sympy.discriminant(poly) if nf.degree > 1 else sympy.Integer(1)
    det_b = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r]
                          for r in nf.integral_basis]).det()
    val = sympy.Rational(disc) * det_b ** 2
    return Fraction(int(val.p), int(val.q))


@dataclass(frozen=True)
class EmbeddingDet:
    det: object          # mpf or mpc
    D_numeric: object    # det**2
    D: int               # exact, via the trace form
    disc_K: int
    ratio: Fraction      # D / disc_K


def embedding_det(nf: NumberField, elements: Sequence[AlgebraicInt]) -> EmbeddingDet:
    """det of the matrix with entry (i, j) = sigma_j(e_i), plus exact D and D/disc(K)."""
    elements = list(elements)
    if len(elements) != nf.degree:
        raise WrongTupleLength(f"need exactly {nf.degree} elements, got {len(elements)}")
    nf._check(*elements)
    with mpmath.workprec(nf.precision + GUARD_BITS):
        m = mpmath.matrix([[mpmath.fdot(e.coords, nf._sigma_mu[j]) for j in range(nf.degree)]
                           for e in elements])
        det = mpmath.det(m)
    with mpmath.workprec(nf.precision):
        det = +det
        d_num = det * det
    D = trace_form_discriminant(nf, elements)
    disc_k = field_discriminant(nf)
    return EmbeddingDet(det, d_num, D, disc_k, Fraction(D, disc_k))
