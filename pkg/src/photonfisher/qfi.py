"""Quantum Fisher information for single-mode phase estimation.

For a pure probe and generator n = a^dagger a the QFI is four times the
photon-number variance. Everything here is a plain function of moments or
scalar parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DivergentQfi, InvalidParameter, NonPositiveQfi, NotConvergedInput
from .moments import MomentResult, Status

__all__ = [
    "QfiReport",
    "qfi_from_moments",
    "qfi_coherent",
    "qfi_squeezed",
    "qfi_mandm",
    "qfi_mandm_fixed_n",
    "qfi_small_peak",
    "crlb",
    "popoviciu_bound",
    "bhatia_davis_bound",
]


@dataclass(frozen=True)
class QfiReport:
    qfi: float
    variance: float
    mean: float
    delta_phi: Optional[float]
    nu: int = 1
    finite: bool = True


def qfi_from_moments(m: MomentResult, nu: int = 1) -> QfiReport:
    """QFI = 4 Var(n). Divergent variance gives ``finite=False`` and no
    precision bound; unconverged moments are refused."""
    _check_nu(nu)
    if m.status is Status.NOT_CONVERGED:
        raise NotConvergedInput(f"moments did not converge after {m.terms_used} terms")
    if m.status is Status.DIVERGES or not math.isfinite(m.variance):
        return QfiReport(math.inf, math.inf, m.mean, None, nu, finite=False)
    qfi = 4.0 * m.variance
    delta_phi = crlb(qfi, nu) if qfi > 0 else None
    return QfiReport(qfi, m.variance, m.mean, delta_phi, nu, finite=True)


def qfi_coherent(N: float) -> float:
    """Shot-noise benchmark 4N."""
    _nonneg("N", N)
    return 4.0 * N


def qfi_squeezed(N: float) -> float:
    """Squeezed vacuum with mean photon number N: 8(N^2 + N)."""
    _nonneg("N", N)
    return 8.0 * (N * N + N)


def qfi_mandm(a: float, m: int, M: int) -> float:
    """QFI of sqrt(1-a)|m> + sqrt(a)|M>: 4a(1-a)(M-m)^2."""
    if not 0.0 <= a <= 1.0:
        raise InvalidParameter(f"a must lie in [0, 1], got {a}")
    _ordered(m, M)
    return 4.0 * a * (1.0 - a) * (M - m) ** 2


def qfi_mandm_fixed_n(m: int, M: int, N: float) -> float:
    """m&M QFI with the weight set by the mean: 4(M-N)(N-m)."""
    _ordered(m, M)
    if not m <= N <= M:
        raise InvalidParameter(f"N must lie in [m, M] = [{m}, {M}], got {N}")
    return 4.0 * (M - N) * (N - m)


def qfi_small_peak(a: float, N_pi: float, var_pi: float) -> float:
    """QFI of vacuum plus a peak of mean N_pi and variance var_pi.

    With N = a N_pi this is 4N(N_pi - N) + 4 var_pi N / N_pi.
    """
    if not 0.0 <= a <= 1.0:
        raise InvalidParameter(f"a must lie in [0, 1], got {a}")
    if not N_pi > 0:
        raise InvalidParameter(f"N_pi must be positive, got {N_pi}")
    _nonneg("var_pi", var_pi)
    N = a * N_pi
    return 4.0 * N * (N_pi - N) + 4.0 * var_pi * N / N_pi


def crlb(qfi: float, nu: int = 1) -> float:
    """Quantum Cramer-Rao bound on the rms phase error: 1/sqrt(nu H)."""
    _check_nu(nu)
    if math.isinf(qfi) and qfi > 0:
        raise DivergentQfi("infinite QFI does not give a usable precision bound")
    if not qfi > 0:
        raise NonPositiveQfi(f"QFI must be positive, got {qfi}")
    return 1.0 / math.sqrt(nu * qfi)


def popoviciu_bound(m: int, M: int) -> float:
    """Largest variance of any distribution on [m, M]: (M-m)^2/4."""
    if m > M:
        raise InvalidParameter(f"need m <= M, got m={m}, M={M}")
    return (M - m) ** 2 / 4.0


def bhatia_davis_bound(m: int, M: int, N: float) -> float:
    """Largest variance on [m, M] at fixed mean N: (M-N)(N-m)."""
    if m > M:
        raise InvalidParameter(f"need m <= M, got m={m}, M={M}")
    if not m <= N <= M:
        raise InvalidParameter(f"N must lie in [m, M] = [{m}, {M}], got {N}")
    return (M - N) * (N - m)


def _ordered(m, M):
    if m < 0 or m >= M:
        raise InvalidParameter(f"need 0 <= m < M, got m={m}, M={M}")


def _nonneg(name, x):
    if not (x >= 0 and math.isfinite(x)):
        raise InvalidParameter(f"{name} must be finite and >= 0, got {x}")


def _check_nu(nu):
    if isinstance(nu, bool) or not isinstance(nu, int) or nu < 1:
        raise InvalidParameter(f"nu must be a positive integer, got {nu!r}")
