"""Photon-number moments by closed form and by adaptive summation.

The two routes are kept independent: :func:`moments_closed_form` evaluates
analytic mean/variance formulas and never sums a pmf, while
:func:`moments_by_summation` only ever looks at pmf values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import zeta as riemann_zeta

from .dist import (
    SS,
    SSW,
    Borel,
    Coherent,
    Dowling,
    DistributionSpec,
    Geometric,
    Logarithmic,
    MAndM,
    NegativeBinomial,
    Pmf,
    SmallPeak,
    SqueezedVacuum,
    Zeta,
    negative_binomial_variance_excess,
    logarithmic_variance_excess,
)
from .errors import InvalidParameter, Unsupported

__all__ = [
    "Status",
    "MomentResult",
    "TruncationConfig",
    "moments_closed_form",
    "moments_by_summation",
    "moments",
]


class Status(enum.Enum):
    EXACT = "exact"
    CONVERGED = "converged"
    DIVERGES = "diverges"
    NOT_CONVERGED = "not_converged"


@dataclass(frozen=True)
class MomentResult:
    mean: float
    variance: float
    second_moment: float
    status: Status
    terms_used: int = 0
    achieved_tail: Optional[float] = None

    @property
    def finite(self) -> bool:
        return self.status in (Status.EXACT, Status.CONVERGED) and math.isfinite(self.variance)

    @classmethod
    def diverging(cls, mean: float = math.nan, terms_used: int = 0) -> "MomentResult":
        return cls(mean, math.inf, math.inf, Status.DIVERGES, terms_used)


@dataclass(frozen=True)
class TruncationConfig:
    """Stopping rules for :func:`moments_by_summation`.

    ``window`` is both the evaluation block size and the divergence-detection
    window. Divergence is declared when the partial second moment grew by more
    than ``growth_fraction`` of itself in each of the last
    ``divergence_windows`` windows.
    """

    eps_tail: float = 1e-14
    max_terms: int = 10_000_000
    window: int = 10_000
    growth_fraction: float = 1e-3
    divergence_windows: int = 50
    extrapolation_rtol: float = 1e-11
    trust_analytic_flag: bool = True

    def __post_init__(self):
        if not self.eps_tail > 0:
            raise InvalidParameter(f"eps_tail must be positive, got {self.eps_tail}")
        if self.window < 16:
            raise InvalidParameter(f"window must be >= 16, got {self.window}")
        if self.max_terms < self.window:
            raise InvalidParameter("max_terms must be at least one window")


def _exact(mean: float, variance: float) -> MomentResult:
    return MomentResult(mean, variance, variance + mean * mean, Status.EXACT)


def moments_closed_form(spec: DistributionSpec) -> MomentResult:
    """Analytic mean and variance of ``spec``.

    Raises :class:`Unsupported` for the SSW, SS and Dowling families.
    """
    if isinstance(spec, MAndM):
        a = float(spec.a)
        return _exact((1.0 - a) * spec.m + a * spec.M, a * (1.0 - a) * (spec.M - spec.m) ** 2)

    if isinstance(spec, Coherent):
        return _exact(float(spec.alpha_sq), float(spec.alpha_sq))

    if isinstance(spec, SqueezedVacuum):
        N = math.sinh(spec.r) ** 2
        return _exact(N, 2.0 * (N * N + N))

    if isinstance(spec, Geometric):
        mu = float(spec.mu)
        N = (1.0 - mu) / mu
        return _exact(N, N * N + N)

    if isinstance(spec, NegativeBinomial):
        mu, eta = float(spec.mu), float(spec.eta)
        N = mu * eta / (1.0 - mu)
        return _exact(N, N * N + negative_binomial_variance_excess(mu, eta))

    if isinstance(spec, Logarithmic):
        mu = float(spec.mu)
        N = -mu / ((1.0 - mu) * math.log1p(-mu))
        return _exact(N, N * N + logarithmic_variance_excess(mu))

    if isinstance(spec, Borel):
        mu = float(spec.mu)
        return _exact(1.0 / (1.0 - mu), mu / (1.0 - mu) ** 3)

    if isinstance(spec, Zeta):
        s = float(spec.s)
        zs = float(riemann_zeta(s))
        mean = float(riemann_zeta(s - 1.0)) / zs if s > 2.0 else math.inf
        if s <= 3.0:
            return MomentResult.diverging(mean)
        return _exact(mean, float(riemann_zeta(s - 2.0)) / zs - mean * mean)

    if isinstance(spec, SmallPeak):
        inner = moments_closed_form(spec.inner)
        if inner.status is Status.DIVERGES:
            return MomentResult.diverging(spec.a * inner.mean)
        a = float(spec.a)
        N = a * inner.mean
        # E[n^2] = a (var_pi + N_pi^2)
        return _exact(N, a * inner.variance + a * (1.0 - a) * inner.mean ** 2)

    if isinstance(spec, (SSW, SS, Dowling)):
        raise Unsupported(f"{type(spec).__name__} has no closed-form moments; use summation")

    raise InvalidParameter(f"unknown distribution family {type(spec).__name__}")


# --------------------------------------------------------------------------
# Summation oracle


def _power_tail(t_mid: float, t_end: float, t_quarter: float, k_quarter: int, k_mid: int, k_end: int):
    """Euler-Maclaurin remainder of a sum whose terms follow C n^-p past ``k_end``.

    Returns ``(tail, p)`` or ``None`` when the local exponents measured on
    [k/4, k/2] and [k/2, k] disagree (the terms are not a clean power law yet)
    or when p <= 1 (no finite remainder).
    """
    if min(t_quarter, t_mid, t_end) <= 0.0:
        return None
    p_lo = -math.log(t_mid / t_quarter) / math.log(k_mid / k_quarter)
    p_hi = -math.log(t_end / t_mid) / math.log(k_end / k_mid)
    if abs(p_hi - p_lo) > 1e-6 * abs(p_hi) or p_hi <= 1.0 + 1e-3:
        return None
    p, K = p_hi, float(k_end)
    return t_end * (K / (p - 1.0) - 0.5 + p / (12.0 * K)), p


def moments_by_summation(pmf: Pmf, cfg: Optional[TruncationConfig] = None) -> MomentResult:
    """Mean and variance by summing p(n), n p(n) and n^2 p(n).

    Bounded supports are summed in full (status EXACT). Unbounded supports are
    summed block by block until one of:

    * the probability tail and the last second-moment term both fall under
      ``eps_tail`` and a geometric ratio bound certifies the remainder;
    * the terms settle into a power law n^-p with p > 1, whose Euler-Maclaurin
      remainder stabilises between consecutive blocks (heavy tails);
    * the divergence heuristic fires;
    * ``max_terms`` is exhausted (NOT_CONVERGED).

    Never raises on slow convergence; the verdict is in ``status``.
    """
    cfg = cfg or TruncationConfig()
    support = pmf.support

    if support.is_bounded:
        n, p = pmf.block(support.start, support.stop + 1)
        nf = n.astype(np.float64)
        s1 = math.fsum(nf * p)
        s2 = math.fsum(nf * nf * p)
        return MomentResult(s1, s2 - s1 * s1, s2, Status.EXACT, int(n.size))

    flag = pmf.second_moment_finite if cfg.trust_analytic_flag else None
    lo = support.start
    s0 = s1 = s2 = 0.0
    growth_streak = 0
    prev_extrapolated = None

    while lo - support.start < cfg.max_terms:
        hi = lo + cfg.window
        n, p = pmf.block(lo, hi)
        nf = n.astype(np.float64)
        t1 = nf * p
        t2 = nf * t1
        old_s2 = s2
        s0 += float(np.sum(p))
        s1 += float(np.sum(t1))
        s2 += float(np.sum(t2))
        terms = hi - support.start
        lo = hi

        # geometric certificate
        nz = np.flatnonzero(t2 > 0.0)
        if nz.size == 0 or nz[-1] < 0.9 * t2.size:
            # tail underflowed to exact zeros
            if abs(1.0 - s0) <= _mass_slack(cfg):
                return _converged(s1, s2, terms, 0.0, flag)
        else:
            tail_idx = nz[-64:]
            if tail_idx.size >= 2:
                r2 = t2[tail_idx[1:]] / t2[tail_idx[:-1]]
                r0 = p[tail_idx[1:]] / p[tail_idx[:-1]]
                q2, q0 = float(r2.max()), float(r0.max())
                if q2 < 1.0 and q0 < 1.0:
                    rem2 = float(t2[tail_idx[-1]]) * q2 / (1.0 - q2)
                    rem0 = float(p[tail_idx[-1]]) * q0 / (1.0 - q0)
                    last_small = t2[tail_idx[-1]] < cfg.eps_tail * s2
                    if (s0 >= 1.0 - _mass_slack(cfg) and rem0 <= cfg.eps_tail
                            and last_small and rem2 <= cfg.eps_tail * s2):
                        return _converged(s1, s2, terms, max(rem2 / s2, rem0), flag)

        # power-law tail for heavy tails where the ratio test cannot certify
        k_end = hi - 1
        extrapolated = _extrapolate(pmf, k_end, s0, s1, s2)
        if extrapolated is not None:
            if prev_extrapolated is not None:
                e0, e1, e2 = extrapolated
                d = max(abs(e2 - prev_extrapolated[2]) / e2,
                        abs(e1 - prev_extrapolated[1]) / e1,
                        abs(e0 - prev_extrapolated[0]))
                if d <= cfg.extrapolation_rtol and abs(e0 - 1.0) <= 1e3 * cfg.extrapolation_rtol:
                    return _converged(e1, e2, terms, d, flag)
            prev_extrapolated = extrapolated
        else:
            prev_extrapolated = None

        # divergence heuristic on second-moment growth per window
        if s2 > 0 and (s2 - old_s2) > cfg.growth_fraction * s2:
            growth_streak += 1
        else:
            growth_streak = 0
        if growth_streak >= cfg.divergence_windows and flag is not True:
            return MomentResult.diverging(math.nan, terms)

    if flag is False:
        return MomentResult.diverging(math.nan, lo - support.start)
    var = s2 - s1 * s1
    return MomentResult(s1, var, s2, Status.NOT_CONVERGED, lo - support.start)


def _mass_slack(cfg: TruncationConfig) -> float:
    # The summed mass only has to show the bulk has been passed; kernels built
    # from gammaln carry ~1e-14 normalization rounding of their own.
    return max(cfg.eps_tail, _NORM_ROUNDING)


_NORM_ROUNDING = 1e-10


def _converged(s1: float, s2: float, terms: int, tail: float, flag) -> MomentResult:
    if flag is False:
        # analytic flag takes precedence over a numerical convergence verdict
        return MomentResult.diverging(s1, terms)
    return MomentResult(s1, s2 - s1 * s1, s2, Status.CONVERGED, terms, tail)


def _extrapolate(pmf: Pmf, k_end: int, s0: float, s1: float, s2: float):
    """Tail-corrected (s0, s1, s2), or None if the tail is not power-law."""
    k_quarter, k_mid = k_end // 4, k_end // 2
    if k_quarter < max(pmf.support.start, 64):
        return None
    pts = np.array([k_quarter, k_mid, k_end], dtype=np.int64)
    pq, pm, pe = (float(x) for x in pmf.kernel(pts))
    out = []
    for power, total in ((0, s0), (1, s1), (2, s2)):
        res = _power_tail(pm * k_mid ** power, pe * k_end ** power, pq * k_quarter ** power,
                          k_quarter, k_mid, k_end)
        if res is None:
            return None
        out.append(total + res[0])
    return tuple(out)


def moments(spec: DistributionSpec, cfg: Optional[TruncationConfig] = None) -> MomentResult:
    """Closed form when the family has one, summation otherwise."""
    try:
        return moments_closed_form(spec)
    except Unsupported:
        from .dist import make_pmf
        return moments_by_summation(make_pmf(spec), cfg)
