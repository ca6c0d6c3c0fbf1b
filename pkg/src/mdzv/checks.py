"""Property suites run by ``mdzv check``.

Each suite returns a :class:`SuiteResult` with pass counts; the random
draws use a fixed seed so results are reproducible.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import mpmath

from . import fixtures as fx
from .algexp import Monomial, alg_pow
from .cone import f0_closed, f0_coeff_bound, f0_series
from .errors import UnknownSuite
from .membrane import classify_direction, omega_alpha_check, p_direction, q_difference_quotients, tangent_limits
from .moduli_catalog import build_catalog, catalog_counts, expected_counts
from .numfield import (
    add,
    embed,
    embedding_det,
    field_discriminant,
    mul,
    norm,
    poly_discriminant_over_index,
    regular_rep,
)

SUITES = ("algexp", "numfield", "f0", "jacobian", "tangent", "catalog")


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    seconds: float = 0.0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def record(self, ok: bool, what) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < 20:
            self.failures.append(str(what))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "total": self.total,
            "ok": self.ok,
            "seconds": self.seconds,
            "failures": self.failures,
            "details": self.details,
        }


def _rand_elt(rng, nf, lo=-10, hi=10):
    return nf.element([rng.randint(lo, hi) for _ in range(nf.degree)])


def check_algexp(pairs: int = 1000, seed: int = 1) -> SuiteResult:
    """f^beta(f^alpha(y_i)) = f^{alpha beta}(y_i) exactly, for every basis monomial."""
    res = SuiteResult("algexp")
    rng = random.Random(seed)
    for name in ("Q(sqrt2)", "cubic"):
        nf = fx.field(name)
        n = nf.degree
        for _ in range(pairs):
            a, b = _rand_elt(rng, nf), _rand_elt(rng, nf)
            ab = mul(nf, a, b)
            ok = all(
                alg_pow(nf, b, alg_pow(nf, a, Monomial.basis(n, i))) == alg_pow(nf, ab, Monomial.basis(n, i))
                for i in range(1, n + 1)
            )
            res.record(ok, (name, a.coords, b.coords))
    return res


def check_numfield(samples: int = 100, seed: int = 2) -> SuiteResult:
    res = SuiteResult("numfield")
    rng = random.Random(seed)
    for name in ("Q", "Q(sqrt2)", "cubic"):
        nf = fx.field(name)
        tol = mpmath.mpf(2) ** (-nf.precision // 4)
        for _ in range(samples):
            a, b = _rand_elt(rng, nf), _rand_elt(rng, nf)
            exact = norm(nf, a)
            with mpmath.workprec(nf.precision):
                numeric = mpmath.fprod(embed(nf, a, j) for j in range(1, nf.degree + 1))
                res.record(abs(numeric - exact) < tol * max(1, abs(exact)), ("norm", name, a.coords))
            ra, rb = regular_rep(nf, a), regular_rep(nf, b)
            res.record(regular_rep(nf, mul(nf, a, b)) == ra @ rb, ("mul-hom", name, a.coords, b.coords))
            res.record(regular_rep(nf, add(nf, a, b)) == ra + rb, ("add-hom", name, a.coords, b.coords))
        res.record(field_discriminant(nf) == poly_discriminant_over_index(nf), ("disc", name))
    return res


def _random_t(rng, n, lo=0.5, hi=3.0):
    return [rng.uniform(lo, hi) for _ in range(n)]


def check_f0(points: int = 50, seed: int = 3, tol: float = 1e-11, fields=("Q", "Q(sqrt2)")) -> SuiteResult:
    """Closed form against the truncated series, within the series' own tail bound."""
    res = SuiteResult("f0")
    rng = random.Random(seed)
    worst = 0.0
    for name in fields:
        c = fx.cone(name)
        for _ in range(points):
            t = _random_t(rng, c.n)
            A = f0_coeff_bound(c, t, tol)
            ser = f0_series(c, t, A)
            closed = f0_closed(c, t)
            with mpmath.workprec(c.field.precision):
                diff = abs(closed - ser.value)
            worst = max(worst, float(ser.tail_bound))
            res.record(diff <= ser.tail_bound and ser.tail_bound < 1e-10, (name, t, float(diff)))
    res.details["max_tail_bound"] = worst
    return res


def check_jacobian(points: int = 20, seed: int = 4, h: float = 1e-5, tol: float = 1e-5) -> SuiteResult:
    """Pullback ratio within tol, second-order step convergence, and the exact D / disc(K)."""
    res = SuiteResult("jacobian")
    rng = random.Random(seed)
    worst = 0.0
    orders = []
    for name in ("Q", "Q(sqrt2)"):
        c = fx.cone(name)
        for _ in range(points):
            t = _random_t(rng, c.n, 0.2, 2.0)
            chk = omega_alpha_check(c, t, h)
            err = max(abs(float(chk.ratio) - 1), abs(float(chk.omega1_ratio) - 1))
            worst = max(worst, err)
            orders.append(chk.order_ratio)
            res.record(err <= tol and 3.0 <= chk.order_ratio <= 5.0, (name, t, err, chk.order_ratio))
    nf = fx.field("Q(sqrt2)")
    expected = {((1, 0), (0, 1)): 1, ((1, 0), (3, 2)): 4}
    ratios = {}
    for gens, want in expected.items():
        ed = embedding_det(nf, [nf.element(g) for g in gens])
        ratios[str(gens)] = str(ed.ratio)
        res.record(ed.ratio == want, ("D/disc", gens, ed.ratio))
    res.details.update(max_ratio_error=worst, order_ratios=[min(orders), max(orders)], D_over_disc=ratios)
    return res


def check_tangent(fields=("Q(sqrt2)", "cubic-real"), q_tol: float = 1e-4) -> SuiteResult:
    """p against the large-t secant direction; q against difference quotients at small t."""
    res = SuiteResult("tangent")
    ts = (1e-3, 1e-4, 1e-5)
    for name in fields:
        c = fx.cone(name)
        n = c.n
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                if i == k:
                    continue
                for j in range(1, n + 1):
                    lim = tangent_limits(c, i, k, j)
                    b, cc = lim.q
                    t_big = 60 / abs(float(b) - float(cc))
                    res.record(classify_direction(p_direction(b, cc, t_big)) == lim.p, ("p", name, i, k, j))
                    vals, extrap = q_difference_quotients(b, cc, ts)
                    target = b / cc
                    errs = [abs(v / target - 1) for v in vals]
                    ok = errs[-1] < q_tol and errs[0] > errs[1] > errs[2] and abs(extrap / target - 1) < errs[-1]
                    res.record(ok, ("q", name, i, k, j, [float(e) for e in errs]))
    return res


def check_catalog(weights=range(2, 7)) -> SuiteResult:
    res = SuiteResult("catalog")
    for name in ("Q", "Q(sqrt2)", "cubic-real"):
        c = fx.cone(name)
        for W in weights:
            cat = build_catalog(c, (W,))
            res.record(catalog_counts(cat) == expected_counts(c.n, W), (name, W))
    res.record(build_catalog(fx.cone("Q"), (2,)).marked_points == 5, "n=1 W=2 marked points")
    res.record(build_catalog(fx.cone("Q"), (3,)).marked_points == 6, "n=1 W=3 marked points")
    return res


_RUNNERS = {
    "algexp": check_algexp,
    "numfield": check_numfield,
    "f0": check_f0,
    "jacobian": check_jacobian,
    "tangent": check_tangent,
    "catalog": check_catalog,
}


def run_suite(name: str) -> SuiteResult:
    if name not in _RUNNERS:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    t0 = time.perf_counter()
    res = _RUNNERS[name]()
    res.seconds = time.perf_counter() - t0
    return res


def suite_names(name: str) -> list[str]:
    if name == "all":
        return list(SUITES)
    if name not in _RUNNERS:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return [name]
