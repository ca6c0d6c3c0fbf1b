"""Iterated integrals on membranes.

The domain is a product over embeddings j of ordered simplices
t_{j,1} > t_{j,2} > ... > t_{j,M} > 0.  Column k of a point is the vector
(t_{1,k}, ..., t_{n,k}); the density at column k is f_0 when eps_k = 1 and 1
otherwise.

The nested scheme integrates column by column from the largest t inwards.
With an upper-cumulative rule (Q h)(x) = int_x^T h(y) dy on a fixed node set,
the integral is a chain of tensor applications

    H_1 = g_1,   H_k = g_k * (Q x ... x Q) H_{k-1},   value = <w x ... x w, H_M>.

Each axis uses two Gauss-Legendre panels: one in log t on [t_lo, split] to
resolve the 1/t behaviour of f_0 near the origin, and a linear one on
[split, T].  The cumulative matrix inside a panel comes from exact
integration of the Legendre interpolant.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from numpy.polynomial import legendre
from scipy import special
from scipy.stats import qmc

from .cone import Cone, f0_closed, f0_float, min_rate
from .errors import (
    DimensionBudgetExceeded,
    DomainError,
    EqualModulusEmbeddings,
    IndexOutOfRange,
    NonTotallyReal,
    StepTooLarge,
    WrongTupleLength,
)
from .numfield import GUARD_BITS
from .series import Composition, epsilon_pattern

NESTED = "nested"
QUASI_RANDOM = "quasi-random"
_SCHEME_ALIASES = {
    "nested": NESTED,
    "nested-ordered-quadrature": NESTED,
    "quasi-random": QUASI_RANDOM,
    "qmc": QUASI_RANDOM,
}


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = NESTED
    points_per_axis: int = 96
    sample_count: int = 2 ** 14
    upper_cutoff: float = 40.0
    lower_cutoff: float = 1e-12
    split: float = 1.0
    replicates: int = 8
    seed: int = 0
    max_dim: int = 8
    max_nodes: int = 4_000_000
    error_model: str = (
        "nested: |V(N) - V(3N/4)| + upper-cutoff Gamma tail + lower-cutoff estimate; "
        "quasi-random: standard error over scrambled Sobol replicates"
    )

    def __post_init__(self):
        scheme = _SCHEME_ALIASES.get(self.scheme)
        if scheme is None:
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")
        object.__setattr__(self, "scheme", scheme)
        if self.points_per_axis < 2:
            raise DomainError("points_per_axis must be >= 2")
        if not self.upper_cutoff > 0:
            raise DomainError("upper_cutoff must be positive")
        if self.sample_count < 1:
            raise DomainError("sample_count must be >= 1")
        if not 0 < self.lower_cutoff < self.split < self.upper_cutoff:
            raise DomainError("need 0 < lower_cutoff < split < upper_cutoff")


@dataclass(frozen=True)
class MembranePoint:
    """n x M matrix; row j is a strictly decreasing sequence of positive reals."""

    t: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.t)
        for j, row in enumerate(rows, start=1):
            if any(not row[k] > row[k + 1] for k in range(len(row) - 1)) or not row[-1] > 0:
                raise DomainError(f"row {j} is not an ordered simplex point: {row}")
        object.__setattr__(self, "t", rows)

    def column(self, k: int) -> tuple:
        return tuple(row[k - 1] for row in self.t)


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    nodes: int
    seconds: float = 0.0
    components: dict = field(default_factory=dict)


def _as_composition(s) -> Composition:
    return s if isinstance(s, Composition) else epsilon_pattern(s)


def integrand_eval(cone: Cone, comp, p: MembranePoint):
    """prod over columns with eps_k = 1 of f_0(column k), at working precision."""
    comp = _as_composition(comp)
    if len(p.t) != cone.n or any(len(r) != len(comp.epsilon) for r in p.t):
        raise WrongTupleLength(f"point must be {cone.n} x {len(comp.epsilon)}")
    out = mpmath.mpf(1)
    with mpmath.workprec(cone.field.precision + GUARD_BITS):
        for k, e in enumerate(comp.epsilon, start=1):
            if e:
                out *= f0_closed(cone, p.column(k))
    with mpmath.workprec(cone.field.precision):
        return +out


# --- nested ordered quadrature -------------------------------------------------


@lru_cache(maxsize=32)
def _panel(N: int):
    """Gauss-Legendre nodes, weights and the matrix mapping samples to int_x^1."""
    x, w = legendre.leggauss(N)
    V = legendre.legvander(x, N - 1)
    to_coeffs = ((2 * np.arange(N) + 1) / 2)[:, None] * V.T * w[None, :]
    E = np.empty((N, N))
    for l in range(N):
        c = np.zeros(N)
        c[l] = 1.0
        anti = legendre.legint(c)
        E[:, l] = legendre.legval(1.0, anti) - legendre.legval(x, anti)
    return x, w, E @ to_coeffs


def cumulative_rule(spec: QuadratureSpec, points: int | None = None):
    """Nodes t, weights w and the upper-cumulative matrix Q on [t_lo, T]."""
    N = points or spec.points_per_axis
    n_log = N // 2
    n_lin = N - n_log
    panels = [
        (n_log, math.log(spec.lower_cutoff), math.log(spec.split), np.exp, np.exp),
        (n_lin, spec.split, spec.upper_cutoff, lambda y: y, np.ones_like),
    ]
    ts, ws, blocks = [], [], []
    for m, a, b, tmap, dmap in panels:
        x, w, S = _panel(m)
        h = 0.5 * (b - a)
        y = h * x + 0.5 * (a + b)
        jac = h * dmap(y)
        ts.append(tmap(y))
        ws.append(w * jac)
        blocks.append(S * jac[None, :])
    t = np.concatenate(ts)
    Q = np.zeros((t.size, t.size))
    start = 0
    for p, blk in enumerate(blocks):
        size = blk.shape[0]
        Q[start:start + size, start:start + size] = blk
        # everything in later panels lies above every node of this one
        Q[start:start + size, start + size:] = np.concatenate(ws[p + 1:])[None, :] if p + 1 < len(ws) else 0.0
        start += size
    return t, np.concatenate(ws), Q


def _apply_all_axes(Q: np.ndarray, H: np.ndarray) -> np.ndarray:
    for ax in range(H.ndim):
        H = np.moveaxis(np.tensordot(Q, H, axes=([1], [ax])), 0, ax)
    return H


def _nested_value(cone: Cone, comp: Composition, spec: QuadratureSpec, points: int):
    t, w, Q = cumulative_rule(spec, points)
    n = cone.n
    grids = [t.reshape(tuple(-1 if d == j else 1 for d in range(n))) for j in range(n)]
    g = f0_float(cone, grids)
    g = np.broadcast_to(g, (t.size,) * n)
    H = None
    for e in comp.epsilon:
        if H is None:
            H = g.copy() if e else np.ones_like(g)
        else:
            H = _apply_all_axes(Q, H)
            if e:
                H *= g
    value = H
    for _ in range(n):
        value = np.tensordot(w, value, axes=([0], [0]))
    # contribution density along the lowest node of each axis, for the cutoff estimate
    edge = []
    for j in range(n):
        slab = np.take(H, 0, axis=j)
        for _ in range(n - 1):
            slab = np.tensordot(w, slab, axes=([0], [0]))
        edge.append(float(slab))
    return float(value), edge


def _upper_cutoff_fraction(cone: Cone, comp: Composition, T: float) -> float:
    # the largest coordinate of row j is a sum of M gaps, each with rate >= rho_j
    return sum(float(special.gammaincc(comp.M, r * T)) for r in min_rate(cone))


def _nested(cone: Cone, comp: Composition, spec: QuadratureSpec) -> IntegralResult:
    n = cone.n
    if n * comp.M > spec.max_dim:
        raise DimensionBudgetExceeded(f"nM = {n * comp.M} exceeds the nested-scheme limit {spec.max_dim}")
    N = spec.points_per_axis
    if N ** n > spec.max_nodes:
        raise DimensionBudgetExceeded(f"{N}^{n} nodes per column exceeds the budget {spec.max_nodes}")
    t0 = time.perf_counter()
    value, edge = _nested_value(cone, comp, spec, N)
    coarse_pts = max(2, (3 * N) // 4)
    coarse, _ = _nested_value(cone, comp, spec, coarse_pts)
    q = _upper_cutoff_fraction(cone, comp, spec.upper_cutoff)
    upper_tail = abs(value) * q / (1 - q) if q < 1 else math.inf
    lower = 2 * spec.lower_cutoff * sum(abs(e) for e in edge)
    discretisation = abs(value - coarse)
    return IntegralResult(
        value=value,
        error_estimate=discretisation + upper_tail + lower,
        nodes=N ** n,
        seconds=time.perf_counter() - t0,
        components={
            "discretisation": discretisation,
            "upper_cutoff": upper_tail,
            "lower_cutoff": lower,
            "coarse_value": coarse,
            "coarse_points": coarse_pts,
        },
    )


# --- quasi-random ----------------------------------------------------------------


def _quasi_random(cone: Cone, comp: Composition, spec: QuadratureSpec) -> IntegralResult:
    """Exponential importance sampling on the gaps d_{j,l} = t_{j,l} - t_{j,l+1}.

    The gap below column l is damped by every f_0 factor at columns <= l, so its
    rate is kappa(l) rho_j with kappa(l) the number of ones among eps_1..eps_l.
    """
    n, M = cone.n, comp.M
    t0 = time.perf_counter()
    kappa = np.cumsum(comp.epsilon)
    rho = np.array(min_rate(cone))
    rates = kappa[None, :] * rho[:, None]  # (n, M)
    m = max(0, math.ceil(math.log2(max(spec.sample_count, 1))))
    estimates = []
    rng = np.random.default_rng(spec.seed)
    for _ in range(spec.replicates):
        sob = qmc.Sobol(d=n * M, scramble=True, seed=rng)
        u = sob.random_base2(m).reshape(-1, n, M)
        u = np.clip(u, 1e-300, 1 - 1e-16)
        gaps = -np.log1p(-u) / rates[None]
        log_density = np.sum(np.log(rates)[None] - rates[None] * gaps, axis=(1, 2))
        t = np.cumsum(gaps[:, :, ::-1], axis=2)[:, :, ::-1]
        val = np.ones(u.shape[0])
        for k, e in enumerate(comp.epsilon):
            if e:
                val *= f0_float(cone, [t[:, j, k] for j in range(n)])
        estimates.append(float(np.mean(val * np.exp(-log_density))))
    est = np.array(estimates)
    value = float(est.mean())
    stderr = float(est.std(ddof=1) / math.sqrt(len(est))) if len(est) > 1 else math.inf
    return IntegralResult(
        value=value,
        error_estimate=3 * stderr,
        nodes=len(est) * 2 ** m,
        seconds=time.perf_counter() - t0,
        components={"replicates": estimates, "standard_error": stderr},
    )


def mdzv_integral(cone: Cone, s, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Numerical value of the membrane integral, equal to zeta_{K;C}(s)."""
    comp = _as_composition(s)
    spec = spec or QuadratureSpec()
    if not cone.field.is_totally_real:
        raise NonTotallyReal("membrane integration is implemented for totally real fields only")
    if spec.scheme == NESTED:
        return _nested(cone, comp, spec)
    return _quasi_random(cone, comp, spec)


# --- alpha/omega pullback ------------------------------------------------------


@dataclass
class JacobianCheck:
    jacobian_det: object
    sqrt_D: object
    ratio: object
    omega1_ratio: object
    error: float
    error_half_step: float

    @property
    def order_ratio(self) -> float:
        return self.error / self.error_half_step if self.error_half_step else math.inf


def _fd_jacobian(cone: Cone, t, h):
    n = cone.n
    sig = cone.embedding_matrix

    def z(tt):
        return [mpmath.exp(-mpmath.fsum(tt[j] * mpmath.re(sig[i][j]) for j in range(n))) for i in range(n)]

    cols = []
    for j in range(n):
        up = list(t)
        dn = list(t)
        up[j] += h
        dn[j] -= h
        zu, zd = z(up), z(dn)
        cols.append([(zu[i] - zd[i]) / (2 * h) for i in range(n)])
    J = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            J[i, j] = cols[j][i]
    return mpmath.det(J), z(list(t))


def _ratios(cone: Cone, t, h):
    det, z = _fd_jacobian(cone, t, h)
    sqrt_d = abs(mpmath.re(cone.sqrt_D))
    prod_z = mpmath.fprod(z)
    ratio = abs(det) / (sqrt_d * prod_z)
    omega1 = abs(det) * mpmath.fprod(1 / (1 - zi) for zi in z) / (f0_closed(cone, t) * sqrt_d)
    return det, ratio, omega1


def omega_alpha_check(cone: Cone, t: Sequence, h: float = 1e-5) -> JacobianCheck:
    """Finite-difference pullback of dz_1/z_1 ^ ... ^ dz_n/z_n against |sqrt D| dt.

    The step is halved once; a correct second-order difference shrinks the error
    about fourfold.
    """
    if len(t) != cone.n:
        raise WrongTupleLength(f"need {cone.n} values of t")
    with mpmath.workprec(cone.field.precision + GUARD_BITS):
        ts = [mpmath.mpf(x) for x in t]
        hh = mpmath.mpf(h)
        if not hh > 0 or hh >= min(ts):
            raise StepTooLarge(f"step {h} must be positive and smaller than every t_j")
        det, ratio, omega1 = _ratios(cone, ts, hh)
        _, ratio_half, _ = _ratios(cone, ts, hh / 2)
        err, err_half = float(abs(ratio - 1)), float(abs(ratio_half - 1))
        noise = 2.0 ** (-cone.field.precision // 2)
        if err_half >= err and err > noise:
            raise StepTooLarge(f"error did not decrease under step halving ({err:.3g} -> {err_half:.3g})")
        return JacobianCheck(det, cone.sqrt_D, ratio, omega1, err, err_half)


# --- tangential base points ----------------------------------------------------


@dataclass(frozen=True)
class TangentLimits:
    p: tuple[int, int]
    q: tuple


def projective_limits(b, c, precision: int = 128) -> TangentLimits:
    """Limits of [b : c]-type coordinate pairs.

    q = [b : c] is the t -> 0 limit of the ratio of the differentials of
    e^{-bt} and e^{-ct}; p is the t -> oo limit of [e^{bt} : e^{ct}], which is
    [0:1] when |b| < |c| and [1:0] otherwise.
    """
    with mpmath.workprec(precision):
        b, c = mpmath.mpmathify(b), mpmath.mpmathify(c)
        tol = mpmath.mpf(2) ** (-(precision // 2)) * max(abs(b), abs(c), 1)
        if abs(abs(b) - abs(c)) <= tol:
            raise EqualModulusEmbeddings(f"|{mpmath.nstr(b, 10)}| = |{mpmath.nstr(c, 10)}|; the limit is undefined")
        p = (0, 1) if abs(b) < abs(c) else (1, 0)
        return TangentLimits(p, (+b, +c))


def tangent_limits(cone: Cone, i: int, k: int, j: int) -> TangentLimits:
    """[p(i,k)] and [q(i,k)] for embedding j (all indices 1-based)."""
    n = cone.n
    for name, v in (("i", i), ("k", k), ("j", j)):
        if not 1 <= v <= n:
            raise IndexOutOfRange(f"{name}={v} outside 1..{n}")
    if i == k:
        raise EqualModulusEmbeddings("i and k must differ")
    b = cone.embedding_matrix[i - 1][j - 1]
    c = cone.embedding_matrix[k - 1][j - 1]
    return projective_limits(b, c, cone.field.precision)


def q_difference_quotients(b, c, ts: Sequence[float] = (1e-3, 1e-4, 1e-5), precision: int = 128):
    """(1 - e^{-bt}) / (1 - e^{-ct}) at each t, tending to b/c, plus a Richardson extrapolant."""
    with mpmath.workprec(precision):
        b, c = mpmath.mpf(b), mpmath.mpf(c)
        vals = [(-mpmath.expm1(-b * t)) / (-mpmath.expm1(-c * t)) for t in map(mpmath.mpf, ts)]
        # the error is linear in t; eliminate it from the last two levels
        r = mpmath.mpf(ts[-2]) / mpmath.mpf(ts[-1])
        extrap = (r * vals[-1] - vals[-2]) / (r - 1)
        return vals, extrap


def p_direction(b, c, t: float, precision: int = 128) -> tuple:
    """Normalised secant direction of (e^{bt}, e^{ct}) at large t."""
    with mpmath.workprec(precision):
        y, z = mpmath.exp(mpmath.mpf(b) * t), mpmath.exp(mpmath.mpf(c) * t)
        scale = max(y, z)
        return (y / scale, z / scale)


def classify_direction(direction: tuple, tol: float = 1e-6) -> tuple[int, int] | None:
    """Round a normalised direction to [0:1] or [1:0]; None when neither is close."""
    y, z = (float(v) for v in direction)
    if y <= tol and abs(z - 1) <= tol:
        return (0, 1)
    if z <= tol and abs(y - 1) <= tol:
        return (1, 0)
    return None
