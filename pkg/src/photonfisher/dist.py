"""Photon-number distributions of single-mode probe states.

Each family is a frozen dataclass that validates its parameters on
construction. :func:`make_pmf` turns a family into a :class:`Pmf`, an
evaluable probability mass function over the non-negative integers.

Only probabilities are modelled. Amplitude phases do not enter the phase QFI
of a pure state, so they are never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaln, xlogy, zeta as riemann_zeta

from .errors import InvalidParameter, VacuumOverlap

__all__ = [
    "Support",
    "MAndM",
    "Coherent",
    "SqueezedVacuum",
    "SSW",
    "SS",
    "Dowling",
    "SmallPeak",
    "Geometric",
    "NegativeBinomial",
    "Logarithmic",
    "Borel",
    "Zeta",
    "DistributionSpec",
    "Pmf",
    "make_pmf",
    "compose_small_peak",
    "logarithmic_variance_excess",
    "negative_binomial_variance_excess",
]


@dataclass(frozen=True)
class Support:
    """Integer support ``[start, stop]``; ``stop=None`` means unbounded."""

    start: int
    stop: Optional[int] = None

    def __post_init__(self):
        if self.start < 0:
            raise InvalidParameter(f"support start must be >= 0, got {self.start}")
        if self.stop is not None and self.stop < self.start:
            raise InvalidParameter(f"bounded support needs m <= M, got [{self.start}, {self.stop}]")

    @classmethod
    def bounded(cls, m: int, M: int) -> "Support":
        return cls(m, M)

    @classmethod
    def unbounded(cls, start: int = 0) -> "Support":
        return cls(start, None)

    @property
    def is_bounded(self) -> bool:
        return self.stop is not None

    def __contains__(self, n: int) -> bool:
        return n >= self.start and (self.stop is None or n <= self.stop)


def _check_int(name: str, value, minimum: int = 0) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidParameter(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParameter(f"{name} must be >= {minimum}, got {value}")


def _check_real(name: str, value, lo: float, hi: float, lo_open=False, hi_open=False) -> None:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(x) and not (hi == math.inf and x == math.inf and not hi_open):
        raise InvalidParameter(f"{name} must be finite, got {value!r}")
    below = x <= lo if lo_open else x < lo
    above = x >= hi if hi_open else x > hi
    if below or above:
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise InvalidParameter(f"{name} must lie in {lb}{lo}, {hi}{rb}, got {value}")


# --------------------------------------------------------------------------
# Families


@dataclass(frozen=True)
class MAndM:
    """Two-point state sqrt(1-a)|m> + sqrt(a)|M>."""

    m: int
    M: int
    a: float

    def __post_init__(self):
        _check_int("m", self.m)
        _check_int("M", self.M)
        if self.m >= self.M:
            raise InvalidParameter(f"m&M state needs m < M, got m={self.m}, M={self.M}")
        _check_real("a", self.a, 0.0, 1.0)

    @classmethod
    def fixed_mean(cls, m: int, M: int, N: float) -> "MAndM":
        """Weight chosen so the mean photon number equals ``N``."""
        _check_int("m", m)
        _check_int("M", M)
        if m >= M:
            raise InvalidParameter(f"m&M state needs m < M, got m={m}, M={M}")
        _check_real("N", N, m, M)
        return cls(m, M, (N - m) / (M - m))

    second_moment_finite = True


@dataclass(frozen=True)
class Coherent:
    """Coherent state; Poissonian statistics with mean ``alpha_sq``."""

    alpha_sq: float

    def __post_init__(self):
        _check_real("alpha_sq", self.alpha_sq, 0.0, math.inf, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class SqueezedVacuum:
    """Squeezed vacuum with squeezing magnitude ``r``; only even n populated."""

    r: float

    def __post_init__(self):
        _check_real("r", self.r, 0.0, math.inf, hi_open=True)

    @classmethod
    def from_mean(cls, N: float) -> "SqueezedVacuum":
        _check_real("N", N, 0.0, math.inf, hi_open=True)
        return cls(math.asinh(math.sqrt(N)))

    second_moment_finite = True


@dataclass(frozen=True)
class SSW:
    """Amplitudes 1/(n+1) on 0..M."""

    M: int = 100

    def __post_init__(self):
        _check_int("M", self.M)

    second_moment_finite = True


@dataclass(frozen=True)
class SS:
    """Amplitudes 1/(n+z) on 0..M."""

    M: int = 100
    z: float = 1.0

    def __post_init__(self):
        _check_int("M", self.M)
        _check_real("z", self.z, 0.0, math.inf, lo_open=True, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class Dowling:
    """Amplitudes exp(-n/eta)/(n+z) on all n >= 0."""

    z: float = 1.0
    eta: float = 10.0

    def __post_init__(self):
        _check_real("z", self.z, 0.0, math.inf, lo_open=True, hi_open=True)
        _check_real("eta", self.eta, 0.0, math.inf, lo_open=True, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class Geometric:
    mu: float

    def __post_init__(self):
        _check_real("mu", self.mu, 0.0, 1.0, lo_open=True, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class NegativeBinomial:
    mu: float
    eta: float

    def __post_init__(self):
        _check_real("mu", self.mu, 0.0, 1.0, lo_open=True, hi_open=True)
        _check_real("eta", self.eta, 0.0, math.inf, lo_open=True, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class Logarithmic:
    mu: float

    def __post_init__(self):
        _check_real("mu", self.mu, 0.0, 1.0, lo_open=True, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class Borel:
    mu: float

    def __post_init__(self):
        _check_real("mu", self.mu, 0.0, 1.0, hi_open=True)

    second_moment_finite = True


@dataclass(frozen=True)
class Zeta:
    """Zeta (discrete Pareto) law p(n) = n^-s / zeta(s), n >= 1."""

    s: float

    def __post_init__(self):
        _check_real("s", self.s, 1.0, math.inf, lo_open=True, hi_open=True)

    @property
    def second_moment_finite(self) -> bool:
        return self.s > 3.0


@dataclass(frozen=True)
class SmallPeak:
    """Vacuum plus a peak: sqrt(1-a)|0> + sqrt(a)|pi>, with <0|pi> = 0.

    Orthogonality is enforced at the probability level: the inner
    distribution must give zero weight to n = 0.
    """

    a: float
    inner: "DistributionSpec"

    def __post_init__(self):
        _check_real("a", self.a, 0.0, 1.0)
        if isinstance(self.inner, SmallPeak):
            raise InvalidParameter("small-peak inner state cannot itself be a small-peak state")
        p0 = make_pmf(self.inner)(0)
        if p0 > 0.0:
            raise VacuumOverlap(f"inner distribution has p(0) = {p0:g}; it must be orthogonal to vacuum")

    @property
    def second_moment_finite(self):
        return self.inner.second_moment_finite


DistributionSpec = Union[
    MAndM, Coherent, SqueezedVacuum, SSW, SS, Dowling, SmallPeak,
    Geometric, NegativeBinomial, Logarithmic, Borel, Zeta,
]

FAMILIES = (
    MAndM, Coherent, SqueezedVacuum, SSW, SS, Dowling, SmallPeak,
    Geometric, NegativeBinomial, Logarithmic, Borel, Zeta,
)


# --------------------------------------------------------------------------
# Pmf


@dataclass(frozen=True)
class Pmf:
    """Evaluable pmf. ``kernel`` maps an int64 array inside the support to
    probabilities; points outside the support evaluate to zero."""

    spec: DistributionSpec
    support: Support
    kernel: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def __call__(self, n: int) -> float:
        if n not in self.support:
            return 0.0
        return float(self.kernel(np.array([n], dtype=np.int64))[0])

    def block(self, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(n, p(n))`` for ``lo <= n < hi`` clipped to the support."""
        lo = max(lo, self.support.start)
        if self.support.stop is not None:
            hi = min(hi, self.support.stop + 1)
        n = np.arange(lo, max(lo, hi), dtype=np.int64)
        if n.size == 0:
            return n, np.zeros(0)
        return n, self.kernel(n)

    @property
    def second_moment_finite(self) -> Optional[bool]:
        """Analytic flag for a finite second moment, None if unknown."""
        return getattr(self.spec, "second_moment_finite", None)


def _point_kernel(points: dict[int, float]) -> Callable[[np.ndarray], np.ndarray]:
    def kernel(n):
        out = np.zeros(n.shape)
        for k, w in points.items():
            out[n == k] = w
        return out
    return kernel


def _bounded_table(weights: np.ndarray, start: int) -> Callable[[np.ndarray], np.ndarray]:
    # normalized by direct summation over the whole support
    table = weights / math.fsum(weights)

    def kernel(n):
        return table[n - start]
    return kernel


def _squeezed_kernel(r: float) -> Callable[[np.ndarray], np.ndarray]:
    if r == 0.0:
        return _point_kernel({0: 1.0})
    log_t2 = 2.0 * math.log(math.tanh(r))
    log_p0 = -math.log(math.cosh(r))

    def log_p_even(k: int) -> float:
        # log p(2k) seeds the recurrence at the start of a block
        return (log_p0 + k * log_t2 + gammaln(2 * k + 1) - 2 * gammaln(k + 1)
                - 2 * k * math.log(2.0))

    def kernel(n):
        out = np.zeros(n.shape)
        even = n[n % 2 == 0]
        if even.size == 0:
            return out
        k = even // 2
        k0, k1 = int(k[0]), int(k[-1])
        # p(2k+2)/p(2k) = tanh^2 r (2k+1)/(2k+2), accumulated in log space
        j = np.arange(k0, k1, dtype=np.float64)
        steps = log_t2 + np.log1p(-1.0 / (2.0 * j + 2.0))
        logs = log_p_even(k0) + np.concatenate(([0.0], np.cumsum(steps)))
        out[n % 2 == 0] = np.exp(logs[k - k0])
        return out
    return kernel


_DOWLING_MAX_TERMS = 50_000_000


def _dowling_kernel(z: float, eta: float) -> Callable[[np.ndarray], np.ndarray]:
    def weight(n):
        return np.exp(-2.0 * n / eta) / (n + z) ** 2

    # Normalize by summation. Past index K the remainder is at most
    # q^(K+1) * min(1 / ((1-q)(K+1+z)^2), 1 / (K+z)) with q = exp(-2/eta).
    one_minus_q = -math.expm1(-2.0 / eta)
    total, lo, chunk = 0.0, 0, 4096
    while True:
        w = weight(np.arange(lo, lo + chunk, dtype=np.float64))
        total += math.fsum(w)
        lo += chunk
        K = lo - 1
        head = math.exp(-2.0 * (K + 1) / eta)
        bound = head * min(1.0 / (one_minus_q * (K + 1 + z) ** 2), 1.0 / (K + z))
        if bound <= 1e-17 * total:
            break
        if lo >= _DOWLING_MAX_TERMS:
            raise InvalidParameter(
                f"Dowling normalization needs more than {_DOWLING_MAX_TERMS} terms at eta={eta}")
        chunk = min(2 * chunk, 1 << 20)
    norm = total

    def kernel(n):
        return weight(n.astype(np.float64)) / norm
    return kernel


def make_pmf(spec: DistributionSpec) -> Pmf:
    """Build the pmf of ``spec`` with its normalization computed internally."""
    if isinstance(spec, MAndM):
        pts: dict[int, float] = {}
        if spec.a < 1.0:
            pts[spec.m] = 1.0 - spec.a
        if spec.a > 0.0:
            pts[spec.M] = spec.a
        return Pmf(spec, Support.bounded(spec.m, spec.M), _point_kernel(pts))

    if isinstance(spec, Coherent):
        lam = float(spec.alpha_sq)
        if lam == 0.0:
            return Pmf(spec, Support.unbounded(0), _point_kernel({0: 1.0}))
        return Pmf(spec, Support.unbounded(0),
                   lambda n: np.exp(xlogy(n, lam) - lam - gammaln(n + 1.0)))

    if isinstance(spec, SqueezedVacuum):
        return Pmf(spec, Support.unbounded(0), _squeezed_kernel(float(spec.r)))

    if isinstance(spec, (SSW, SS)):
        z = 1.0 if isinstance(spec, SSW) else float(spec.z)
        n = np.arange(0, spec.M + 1, dtype=np.float64)
        return Pmf(spec, Support.bounded(0, spec.M), _bounded_table(1.0 / (n + z) ** 2, 0))

    if isinstance(spec, Dowling):
        return Pmf(spec, Support.unbounded(0), _dowling_kernel(float(spec.z), float(spec.eta)))

    if isinstance(spec, Geometric):
        mu = float(spec.mu)
        return Pmf(spec, Support.unbounded(0),
                   lambda n: mu * np.exp(n * math.log1p(-mu)))

    if isinstance(spec, NegativeBinomial):
        mu, eta = float(spec.mu), float(spec.eta)
        c = eta * math.log1p(-mu) - gammaln(eta)
        return Pmf(spec, Support.unbounded(0),
                   lambda n: np.exp(gammaln(n + eta) - gammaln(n + 1.0) + n * math.log(mu) + c))

    if isinstance(spec, Logarithmic):
        mu = float(spec.mu)
        c = -math.log(-math.log1p(-mu))
        return Pmf(spec, Support.unbounded(1),
                   lambda n: np.exp(n * math.log(mu) - np.log(n) + c))

    if isinstance(spec, Borel):
        mu = float(spec.mu)
        return Pmf(spec, Support.unbounded(1),
                   lambda n: np.exp(xlogy(n - 1.0, mu * n) - mu * n - gammaln(n + 1.0)))

    if isinstance(spec, Zeta):
        s = float(spec.s)
        norm = float(riemann_zeta(s))
        return Pmf(spec, Support.unbounded(1),
                   lambda n: np.power(n.astype(np.float64), -s) / norm)

    if isinstance(spec, SmallPeak):
        return compose_small_peak(spec.a, spec.inner, _spec=spec)

    raise InvalidParameter(f"unknown distribution family {type(spec).__name__}")


def compose_small_peak(a: float, inner: DistributionSpec, _spec: Optional[SmallPeak] = None) -> Pmf:
    """pmf of sqrt(1-a)|0> + sqrt(a)|pi>: p(0) = 1-a, p(n) = a p_pi(n) for n >= 1."""
    _check_real("a", a, 0.0, 1.0)
    inner_pmf = make_pmf(inner)
    if inner_pmf(0) > 0.0:
        raise VacuumOverlap(f"inner distribution has p(0) = {inner_pmf(0):g}")
    spec = _spec if _spec is not None else SmallPeak(a, inner)
    stop = inner_pmf.support.stop
    support = Support(0, stop)
    a = float(a)

    def kernel(n):
        out = np.zeros(n.shape)
        out[n == 0] = 1.0 - a
        pos = n >= inner_pmf.support.start
        pos &= n > 0
        if np.any(pos):
            out[pos] = a * inner_pmf.kernel(n[pos])
        return out

    return Pmf(spec, support, kernel)


def negative_binomial_variance_excess(mu: float, eta: float) -> float:
    """Second term of the NB variance, mu*eta*(1 - mu*eta)/(1 - mu)^2.

    Positive exactly when mu*eta < 1.
    """
    return mu * eta * (1.0 - mu * eta) / (1.0 - mu) ** 2


def logarithmic_variance_excess(mu: float) -> float:
    """Variance of the logarithmic law minus its squared mean.

    Negative below the critical mu where 2*mu + ln(1 - mu) = 0, positive above.
    """
    L = math.log1p(-mu)
    return -mu * (2.0 * mu + L) / ((1.0 - mu) ** 2 * L * L)
