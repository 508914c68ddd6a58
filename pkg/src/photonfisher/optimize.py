"""Variance maximization on bounded support, scaling fits and critical points."""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import zeta as riemann_zeta

from .dist import (
    Borel,
    Coherent,
    DistributionSpec,
    Geometric,
    Logarithmic,
    NegativeBinomial,
    SqueezedVacuum,
    Zeta,
)
from .errors import (
    DegenerateSweep,
    DivergentMember,
    Infeasible,
    InstanceTooLarge,
    InvalidParameter,
)
from .moments import Status, moments_closed_form
from .qfi import bhatia_davis_bound, qfi_mandm_fixed_n

__all__ = [
    "OptimizationProblem",
    "Optimum",
    "ScalingFit",
    "maximize_variance",
    "brute_force_variance",
    "fit_scaling_exponent",
    "parameter_for_mean",
    "log_spaced_parameters",
    "logarithmic_critical_mu",
    "crossover_m",
]


@dataclass(frozen=True)
class OptimizationProblem:
    """Maximize Var(n) over pmfs on {m..M} with mean N."""

    m: int
    M: int
    N: float

    def __post_init__(self):
        if self.m < 0 or self.m >= self.M:
            raise InvalidParameter(f"need 0 <= m < M, got m={self.m}, M={self.M}")
        if not self.m <= self.N <= self.M:
            raise Infeasible(f"mean N={self.N} lies outside [{self.m}, {self.M}]")


@dataclass(frozen=True)
class Optimum:
    support_points: tuple[int, ...]
    weights: tuple[float, ...]
    variance: float
    bound_gap: float

    @property
    def qfi(self) -> float:
        return 4.0 * self.variance


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    intercept: float
    r_squared: float
    n_range: tuple[float, float]
    points: int

    @property
    def delta_phi_exponent(self) -> float:
        """Exponent of N in the precision bound, -slope/2."""
        return -self.exponent / 2.0


def maximize_variance(prob: OptimizationProblem) -> Optimum:
    """Global maximum of the fixed-mean variance LP by vertex enumeration.

    The feasible set has two equality constraints, so every vertex carries at
    most two nonzero weights. All pairs i <= N <= j are solved in closed form
    and the best one is returned.
    """
    m, M, N = prob.m, prob.M, float(prob.N)
    bound = bhatia_davis_bound(m, M, N)
    if N == m or N == M:
        return Optimum((int(N),), (1.0,), 0.0, -bound)

    left = np.arange(m, math.floor(N) + 1, dtype=np.float64)
    right = np.arange(math.ceil(N), M + 1, dtype=np.float64)
    i, j = np.meshgrid(left, right, indexing="ij")
    valid = j > i
    span = np.where(valid, j - i, 1.0)
    w_j = np.where(valid, (N - i) / span, 0.0)
    w_i = 1.0 - w_j
    var = np.where(valid, w_i * (i - N) ** 2 + w_j * (j - N) ** 2, -np.inf)

    a, b = np.unravel_index(int(np.argmax(var)), var.shape)
    best = float(var[a, b])
    return Optimum(
        (int(left[a]), int(right[b])),
        (float(w_i[a, b]), float(w_j[a, b])),
        best,
        best - bound,
    )


def brute_force_variance(prob: OptimizationProblem, grid: int = 100) -> float:
    """Best variance found by grid search over every support of <= 3 points.

    Independent oracle for :func:`maximize_variance`: it makes no use of the
    two-point vertex argument. For each triple i < j < k the middle weight is
    swept over ``grid + 1`` values in [0, 1], the outer two are solved from the
    normalization and mean constraints, and infeasible (negative) solutions
    are dropped. The variance is evaluated directly from the weights.
    """
    m, M, N = prob.m, prob.M, float(prob.N)
    if M - m > 30:
        raise InstanceTooLarge(f"brute force limited to M - m <= 30, got {M - m}")
    if grid < 100:
        raise InvalidParameter(f"grid resolution must be >= 100, got {grid}")

    best = 0.0 if float(N).is_integer() else -math.inf
    triples = np.array(list(itertools.combinations(range(m, M + 1), 3)), dtype=np.float64)
    if triples.size == 0:
        return best
    i, j, k = (triples[:, c][:, None] for c in range(3))
    t = np.linspace(0.0, 1.0, grid + 1)[None, :]
    w_k = (N - j * t - i * (1.0 - t)) / (k - i)
    w_i = 1.0 - t - w_k
    ok = (w_i >= 0.0) & (w_k >= 0.0)
    var = i * i * w_i + j * j * t + k * k * w_k - N * N
    if np.any(ok):
        best = max(best, float(var[ok].max()))
    return best


def parameter_for_mean(template: DistributionSpec, N: float) -> tuple[str, float]:
    """Name and value of the free parameter giving mean photon number N."""
    if not N > 0:
        raise InvalidParameter(f"N must be positive, got {N}")
    if isinstance(template, Geometric):
        return "mu", 1.0 / (N + 1.0)
    if isinstance(template, Borel):
        if N < 1:
            raise InvalidParameter(f"Borel mean is at least 1, got N={N}")
        return "mu", 1.0 - 1.0 / N
    if isinstance(template, SqueezedVacuum):
        return "r", math.asinh(math.sqrt(N))
    if isinstance(template, Coherent):
        return "alpha_sq", float(N)
    if isinstance(template, NegativeBinomial):
        return "mu", N / (N + template.eta)
    if isinstance(template, Logarithmic):
        if N <= 1:
            raise InvalidParameter(f"logarithmic mean exceeds 1, got N={N}")
        f = lambda mu: -mu / ((1.0 - mu) * math.log1p(-mu)) - N
        return "mu", brentq(f, 1e-12, 1.0 - 1e-15, xtol=1e-15, rtol=1e-15)
    if isinstance(template, Zeta):
        if N <= 1:
            raise InvalidParameter(f"zeta mean exceeds 1, got N={N}")
        f = lambda s: float(riemann_zeta(s - 1.0) / riemann_zeta(s)) - N
        return "s", brentq(f, 2.0 + 1e-12, 80.0, xtol=1e-14)
    raise InvalidParameter(f"no mean inversion for {type(template).__name__}")


def log_spaced_parameters(template: DistributionSpec, n_min: float, n_max: float,
                          points: int = 16) -> tuple[str, list[float]]:
    """Parameter values whose means are log-spaced over [n_min, n_max]."""
    if not 0 < n_min < n_max:
        raise InvalidParameter(f"need 0 < n_min < n_max, got {n_min}, {n_max}")
    name = None
    values = []
    for N in np.geomspace(n_min, n_max, points):
        name, v = parameter_for_mean(template, float(N))
        values.append(v)
    return name, values


def fit_scaling_exponent(template: DistributionSpec, values: Sequence[float],
                         parameter: str = "mu") -> ScalingFit:
    """Least-squares slope of log H against log N over a parameter sweep.

    ``template`` is a family instance whose ``parameter`` field is replaced by
    each entry of ``values``. Moments come from the closed forms.
    """
    values = list(values)
    if len(values) < 8:
        raise DegenerateSweep(f"a scaling fit needs >= 8 points, got {len(values)}")
    Ns, Hs = [], []
    for v in values:
        spec = dataclasses.replace(template, **{parameter: v})
        mom = moments_closed_form(spec)
        if mom.status is Status.DIVERGES:
            raise DivergentMember(f"{spec} has divergent variance")
        Ns.append(mom.mean)
        Hs.append(4.0 * mom.variance)
    Ns, Hs = np.asarray(Ns), np.asarray(Hs)
    if Ns.min() <= 0 or Hs.min() <= 0:
        raise DegenerateSweep("sweep contains states with zero mean or zero QFI")
    if Ns.max() / Ns.min() < 100.0 * (1.0 - 1e-9):
        raise DegenerateSweep(f"N spans {Ns.min():g}..{Ns.max():g}, less than two decades")

    x, y = np.log(Ns), np.log(Hs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0),
                      (float(Ns.min()), float(Ns.max())), len(values))


def logarithmic_critical_mu(tol: float = 1e-6) -> float:
    """Root of 2 mu + ln(1 - mu) = 0 on (0.5, 0.999) by bisection.

    Above this mu the logarithmic variance exceeds N^2.
    """
    if not tol > 0:
        raise InvalidParameter(f"tol must be positive, got {tol}")

    def f(mu):
        return 2.0 * mu + math.log1p(-mu)

    lo, hi = 0.5, 0.999
    f_lo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def crossover_m(N: float, target_qfi: float) -> int:
    """Smallest integer M >= ceil(N) whose 0&M state reaches ``target_qfi``."""
    if not (N > 0 and math.isfinite(N)):
        raise InvalidParameter(f"N must be positive and finite, got {N}")
    if not (target_qfi > 0 and math.isfinite(target_qfi)):
        raise InvalidParameter(f"target QFI must be positive and finite, got {target_qfi}")

    floor_M = max(math.ceil(N), 1)
    M = max(floor_M, math.ceil(N + target_qfi / (4.0 * N)))
    # guard the closed-form inversion against rounding at the boundary
    while M > floor_M and qfi_mandm_fixed_n(0, M - 1, N) >= target_qfi:
        M -= 1
    while qfi_mandm_fixed_n(0, M, N) < target_qfi:
        M += 1
    return M
