"""Multiple Dedekind zeta values as nested series over a cone.

    zeta_{K;C}(s_1, ..., s_m) = sum_{beta_1..beta_m in C}
        prod_k N(beta_1 + ... + beta_k)^(-s_k)

The truncated sum keeps every beta_k in the coefficient box [1, A]^n.  It is
evaluated as a dynamic programme over the partial sums gamma_k = beta_1 + ...
+ beta_k, so the cost is O(m (mA)^n) rather than A^(nm).

The tail bound is the difference between a rigorous upper bound for the full
series and the truncated sum.  The upper bound runs the same dynamic programme
on a grid that is exact up to mA and made of geometrically growing blocks
beyond (each block charged its cardinality times the largest term), plus an
explicit remainder for chains leaving the grid.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cone import Cone
from .errors import DomainError, EmptyComposition, LastExponentTooSmall, NonTotallyReal, Overflow

DEFAULT_MAX_CELLS = 64_000_000
AUTO_CELLS = 16_000_000
UNIT_CELLS = 2 ** 22
REMAINDER_TOL = 2.0 ** -60
_U = 2.0 ** -53
_INT64_SAFE = 2 ** 62
_BLOCK_RATIO = {1: 1e-5, 2: 1e-2}


@dataclass(frozen=True)
class Composition:
    s: tuple[int, ...]
    epsilon: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.s)

    @property
    def M(self) -> int:
        return sum(self.s)


def epsilon_pattern(s: Sequence[int]) -> Composition:
    """Block pattern: each block of length s_k is (1, 0, ..., 0)."""
    s = tuple(int(x) for x in s)
    if not s:
        raise EmptyComposition("composition must have at least one entry")
    if any(x < 1 for x in s):
        raise LastExponentTooSmall(f"all exponents must be positive integers, got {s}")
    if s[-1] < 2:
        raise LastExponentTooSmall(f"last exponent must be >= 2, got {s}")
    eps = []
    for x in s:
        eps.extend([1] + [0] * (x - 1))
    return Composition(s, tuple(eps))


def _as_composition(s) -> Composition:
    return s if isinstance(s, Composition) else epsilon_pattern(s)


@dataclass
class SeriesResult:
    value: float
    tail_bound: float
    terms_used: int
    coeff_bound: int
    upper_bound: float = math.nan
    cells: int = 0
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)


def _axis_shape(n, axis, length):
    return tuple(length if d == axis else 1 for d in range(n))


def _norm_grid(cone: Cone, length: int) -> np.ndarray:
    """Exact norms N(sum a_i e_i) for a in [1, length]^n, as int64."""
    n = cone.n
    form = cone.norm_form
    if sum(abs(c) for c in form.values()) * length ** n >= _INT64_SAFE:
        raise Overflow(f"norms on a box of side {length} overflow 64-bit integers")
    axes = [np.arange(1, length + 1, dtype=np.int64).reshape(_axis_shape(n, i, length)) for i in range(n)]
    out = np.zeros((length,) * n, dtype=np.int64)
    for mono, coef in form.items():
        term = np.int64(coef)
        for ax, e in zip(axes, mono):
            if e:
                term = term * ax ** e
        out += term
    if out.min() < 1:
        raise DomainError("a cone element has norm < 1; the cone is not totally positive")
    return out


def _check_inputs(cone: Cone, comp: Composition, coeff_bound: int, max_cells: int):
    if not cone.field.is_totally_real:
        raise NonTotallyReal("series summation is implemented for totally real fields only")
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be >= 1")
    cells = (comp.m * coeff_bound) ** cone.n
    if cells > max_cells:
        raise Overflow(f"(m*A)^n = {cells} grid cells exceeds the budget of {max_cells}")
    return cells


def auto_coeff_bound(cone: Cone, s, cells: int = AUTO_CELLS) -> int:
    comp = _as_composition(s)
    return max(1, int(cells ** (1.0 / cone.n) + 1e-9) // comp.m)


def _along(ax: int, n: int, sl: slice) -> tuple:
    return tuple(sl if d == ax else slice(None) for d in range(n))


def _box_sum(cone: Cone, comp: Composition, A: int) -> tuple[float, int]:
    """Truncated series with every beta_k in [1, A]^n; returns (value, cells touched)."""
    n = cone.n
    S = None
    touched = 0
    for k, sk in enumerate(comp.s, start=1):
        L = k * A
        f = _norm_grid(cone, L).astype(np.float64)
        np.power(f, -float(sk), out=f)
        touched += f.size
        if S is None:
            S = f
            continue
        # W(gamma) = sum of S(gamma') over gamma - gamma' in [1, A]^n
        W = np.zeros((L,) * n)
        W[(slice(0, (k - 1) * A),) * n] = S
        del S
        E = np.zeros(tuple(L + 1 if d == 0 else L for d in range(n)))
        for ax in range(n):
            if ax:
                E = E.reshape(tuple(L + 1 if d == ax else L for d in range(n)))
                E[_along(ax, n, slice(0, 1))] = 0.0
            np.cumsum(W, axis=ax, out=E[_along(ax, n, slice(1, None))])
            W[...] = E[_along(ax, n, slice(0, L))]
            W[_along(ax, n, slice(A, None))] -= E[_along(ax, n, slice(0, L - A))]
        del E
        f *= W
        del W
        S = f
    total = math.fsum(S.ravel().tolist()) if S.size <= 4_000_000 else float(_pairwise_sum(S))
    return total, touched


def _axis_shape_like(arr, axis):
    shape = list(arr.shape)
    shape[axis] = 1
    return tuple(shape)


def _pairwise_sum(arr):
    # numpy's pairwise summation keeps the error O(log N u); fine for the final reduction
    return np.sum(arr, dtype=np.float64)


def _block_cells(R0: int, R_max: int, ratio: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit cells 1..R0 then blocks between global breakpoints floor((1+ratio)^q) up to R_max."""
    qmax = math.ceil(math.log(R_max) / math.log1p(ratio)) + 1
    brk = np.unique(np.floor(np.exp(np.arange(qmax + 1) * math.log1p(ratio))))
    brk = brk[(brk > R0) & (brk < R_max)]
    his = np.concatenate([brk, [float(R_max)]])
    los = np.concatenate([[float(R0 + 1)], his[:-1] + 1])
    lo = np.concatenate([np.arange(1, R0 + 1, dtype=np.float64), los])
    hi = np.concatenate([np.arange(1, R0 + 1, dtype=np.float64), his])
    return lo, hi


def _crude_remainder(cone: Cone, comp: Composition, R: float) -> float:
    """Bound on all chains whose last partial sum leaves [1, R]^n.

    Uses N(gamma) >= c |gamma|_1^n with c = prod_j min_i sigma_j(e_i), which
    reduces the chain sum to a one-dimensional nested sum.
    """
    n, m = cone.n, comp.m
    c = float(np.prod(cone.sigma.min(axis=0))) * (1 - 1e-12)
    r = n * (comp.s[-1] - 1) + 1
    p = m - 1
    lnR = 1 + math.log(R)
    if lnR < p / r:
        return math.inf
    integral = sum(
        math.factorial(p) / math.factorial(p - j) * lnR ** (p - j) * R ** (1 - r) / (r - 1) ** (j + 1)
        for j in range(p + 1)
    )
    return c ** (-comp.M) / math.factorial(n - 1) ** m / math.factorial(p) * integral


def _grid_extent(cone: Cone, comp: Composition) -> int:
    R = 2 ** 30
    while R < 2 ** 50 and _crude_remainder(cone, comp, R) > REMAINDER_TOL:
        R *= 2
    return R


def _upper_sum(cone: Cone, comp: Composition, R0: int, max_cells: int) -> tuple[float, float, int]:
    """Rigorous upper bound for the full series; returns (bound, remainder part, cells)."""
    n = cone.n
    R0 = min(R0, int(UNIT_CELLS ** (1.0 / n) + 1e-9))
    R_max = _grid_extent(cone, comp)
    lo, hi = _block_cells(R0, R_max, _BLOCK_RATIO.get(n, 5e-2))
    P = lo.size
    if P ** n > max_cells:
        raise Overflow(f"upper-bound grid of {P ** n} cells exceeds the budget of {max_cells}")
    count = hi - lo + 1
    del hi
    sig = cone.sigma
    # lower bound for the norm on each cell: every embedding is increasing in every coefficient
    norm_lo = None
    for j in range(n):
        ell = sum(lo.reshape(_axis_shape(n, i, P)) * sig[i, j] for i in range(n)) * (1 - 1e-13)
        norm_lo = ell if norm_lo is None else norm_lo * ell
    norm_lo = np.broadcast_to(norm_lo, (P,) * n) * (1 - 1e-12)
    U = None
    for sk in comp.s:
        F = np.power(norm_lo, -float(sk))
        for i in range(n):
            F *= count.reshape(_axis_shape(n, i, P))
        if U is not None:
            # predecessors: strictly smaller index on unit cells, same block allowed otherwise
            for ax in range(n):
                np.cumsum(U, axis=ax, out=U)
                U[_along(ax, n, slice(1, R0))] = U[_along(ax, n, slice(0, R0 - 1))].copy()
                U[_along(ax, n, slice(0, 1))] = 0.0
            F *= U
        U = F
    grid = float(_pairwise_sum(U))
    rem = _crude_remainder(cone, comp, R_max)
    return grid + rem, rem, P ** n


def _rounding_allowance(value: float, cells: int, comp: Composition, n: int) -> float:
    return (comp.m * n + 2) * cells * _U * abs(value)


def mdzv_sum(cone: Cone, s, coeff_bound: int | None = None, max_cells: int = DEFAULT_MAX_CELLS) -> SeriesResult:
    """Truncated nested series with a rigorous bound on the discarded terms."""
    comp = _as_composition(s)
    A = coeff_bound if coeff_bound is not None else auto_coeff_bound(cone, comp)
    _check_inputs(cone, comp, A, max_cells)
    t0 = time.perf_counter()
    value, cells = _box_sum(cone, comp, A)
    upper, rem, ucells = _upper_sum(cone, comp, comp.m * A, max_cells)
    tail = max(upper - value, 0.0)
    tail += _rounding_allowance(value, cells, comp, cone.n) + _rounding_allowance(upper, ucells, comp, cone.n)
    return SeriesResult(
        value=value,
        tail_bound=tail,
        terms_used=A ** (cone.n * comp.m),
        coeff_bound=A,
        upper_bound=upper,
        cells=cells + ucells,
        seconds=time.perf_counter() - t0,
        notes={"remainder_beyond_grid": rem},
    )


def tail_bound(cone: Cone, s, coeff_bound: int, max_cells: int = DEFAULT_MAX_CELLS) -> float:
    """Proven upper bound on the mass discarded by the box truncation at A."""
    return mdzv_sum(cone, s, coeff_bound, max_cells).tail_bound
