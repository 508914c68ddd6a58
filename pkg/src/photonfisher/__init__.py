"""Photon-number statistics and quantum Fisher information for single-mode
phase estimation."""

__version__ = "0.1.0"

from .dist import (  # noqa: E402
    SS,
    SSW,
    Borel,
    Coherent,
    Dowling,
    Geometric,
    Logarithmic,
    MAndM,
    NegativeBinomial,
    Pmf,
    SmallPeak,
    SqueezedVacuum,
    Support,
    Zeta,
    compose_small_peak,
    make_pmf,
)
from .moments import (  # noqa: E402
    MomentResult,
    Status,
    TruncationConfig,
    moments,
    moments_by_summation,
    moments_closed_form,
)
from .qfi import (  # noqa: E402
    QfiReport,
    bhatia_davis_bound,
    crlb,
    popoviciu_bound,
    qfi_coherent,
    qfi_from_moments,
    qfi_mandm,
    qfi_mandm_fixed_n,
    qfi_small_peak,
    qfi_squeezed,
)
