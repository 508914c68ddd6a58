"""Parameter sweeps, comparison tables and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Any, ClassVar, Optional, Sequence

from .dist import DistributionSpec, MAndM
from .errors import InvalidParameter, NotConvergedInput, PhotonFisherError
from .moments import MomentResult, Status, TruncationConfig, moments
from .optimize import Optimum, OptimizationProblem, ScalingFit
from .qfi import qfi_from_moments, qfi_mandm_fixed_n, qfi_squeezed, crlb

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "EvalRecord",
    "OptimumRecord",
    "ScalingRecord",
    "CriticalMuRecord",
    "run_sweep",
    "figure1_dataset",
    "evaluate_spec",
    "compare_specs",
    "serialize",
    "parse_sweep",
]

SWEEP_HEADER = ("param", "mean", "variance", "qfi", "delta_phi", "weight_a", "status")


@dataclass(frozen=True)
class SweepSpec:
    template: DistributionSpec
    parameter: str
    values: Sequence[float]
    fixed_n: Optional[float] = None
    nu: int = 1
    cfg: Optional[TruncationConfig] = None

    def __post_init__(self):
        if len(self.values) == 0:
            raise InvalidParameter("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise InvalidParameter("sweep values must be strictly increasing")
        if self.parameter not in {f.name for f in dataclasses.fields(self.template)}:
            raise InvalidParameter(f"{type(self.template).__name__} has no parameter {self.parameter!r}")
        if self.fixed_n is not None:
            if not isinstance(self.template, MAndM) or self.parameter not in ("m", "M"):
                raise InvalidParameter("fixed_n sweeps are defined for m&M states over m or M")


@dataclass(frozen=True)
class SweepRecord:
    param_value: float
    mean: Optional[float]
    variance: Optional[float]
    qfi: Optional[float]
    delta_phi: Optional[float]
    weight_a: Optional[float] = None
    status: str = Status.EXACT.value
    # comparison column, e.g. the squeezed-vacuum QFI at the same N
    reference_qfi: Optional[float] = None

    COLUMNS: ClassVar[tuple[tuple[str, str], ...]] = (
        ("param", "param_value"),
        ("mean", "mean"),
        ("variance", "variance"),
        ("qfi", "qfi"),
        ("delta_phi", "delta_phi"),
        ("weight_a", "weight_a"),
        ("status", "status"),
    )
    OPTIONAL_COLUMNS: ClassVar[tuple[tuple[str, str], ...]] = (("reference_qfi", "reference_qfi"),)


@dataclass(frozen=True)
class EvalRecord:
    family: str
    mean: Optional[float]
    variance: Optional[float]
    qfi: Optional[float]
    delta_phi: Optional[float]
    ratio: Optional[float] = None
    status: str = Status.EXACT.value

    COLUMNS: ClassVar = (
        ("family", "family"),
        ("mean", "mean"),
        ("variance", "variance"),
        ("qfi", "qfi"),
        ("delta_phi", "delta_phi"),
        ("ratio", "ratio"),
        ("status", "status"),
    )
    OPTIONAL_COLUMNS: ClassVar = ()


@dataclass(frozen=True)
class OptimumRecord:
    m: int
    M: int
    N: float
    support: str
    weights: str
    variance: float
    qfi: float
    bound_gap: float

    COLUMNS: ClassVar = tuple((k, k) for k in
                              ("m", "M", "N", "support", "weights", "variance", "qfi", "bound_gap"))
    OPTIONAL_COLUMNS: ClassVar = ()

    @classmethod
    def from_optimum(cls, prob: OptimizationProblem, opt: Optimum) -> "OptimumRecord":
        return cls(prob.m, prob.M, float(prob.N),
                   ";".join(str(p) for p in opt.support_points),
                   ";".join(_fmt_float(w) for w in opt.weights),
                   opt.variance, opt.qfi, opt.bound_gap)


@dataclass(frozen=True)
class ScalingRecord:
    family: str
    exponent: float
    intercept: float
    r_squared: float
    n_min: float
    n_max: float
    points: int
    delta_phi_exponent: float

    COLUMNS: ClassVar = tuple((k, k) for k in
                              ("family", "exponent", "intercept", "r_squared", "n_min", "n_max",
                               "points", "delta_phi_exponent"))
    OPTIONAL_COLUMNS: ClassVar = ()

    @classmethod
    def from_fit(cls, family: str, fit: ScalingFit) -> "ScalingRecord":
        return cls(family, fit.exponent, fit.intercept, fit.r_squared,
                   fit.n_range[0], fit.n_range[1], fit.points, fit.delta_phi_exponent)


@dataclass(frozen=True)
class CriticalMuRecord:
    mu_c: float
    tol: float
    residual: float

    COLUMNS: ClassVar = (("mu_c", "mu_c"), ("tol", "tol"), ("residual", "residual"))
    OPTIONAL_COLUMNS: ClassVar = ()


# --------------------------------------------------------------------------
# Sweeps


def _record_from_moments(value: float, mom: MomentResult, nu: int) -> SweepRecord:
    try:
        rep = qfi_from_moments(mom, nu)
    except NotConvergedInput:
        return SweepRecord(value, mom.mean, mom.variance, None, None, status=mom.status.value)
    mean = mom.mean if math.isfinite(mom.mean) else None
    return SweepRecord(value, mean, rep.variance, rep.qfi, rep.delta_phi, status=mom.status.value)


def _sweep_point(spec: SweepSpec, value) -> SweepRecord:
    try:
        if spec.fixed_n is not None:
            t = spec.template
            m = value if spec.parameter == "m" else t.m
            M = value if spec.parameter == "M" else t.M
            state = MAndM.fixed_mean(m, M, spec.fixed_n)
            qfi = qfi_mandm_fixed_n(m, M, spec.fixed_n)
            dphi = crlb(qfi, spec.nu) if qfi > 0 else None
            return SweepRecord(value, float(spec.fixed_n), qfi / 4.0, qfi, dphi,
                               weight_a=state.a, status=Status.EXACT.value)
        point = dataclasses.replace(spec.template, **{spec.parameter: value})
        return _record_from_moments(value, moments(point, spec.cfg), spec.nu)
    except PhotonFisherError:
        return SweepRecord(value, None, None, None, None, status="error")


def run_sweep(spec: SweepSpec, executor: Optional[Executor] = None) -> list[SweepRecord]:
    """One record per sweep value. Failing points become records with an
    ``error`` or non-convergence status; the sweep itself never aborts."""
    if executor is None:
        return [_sweep_point(spec, v) for v in spec.values]
    return list(executor.map(lambda v: _sweep_point(spec, v), spec.values))


def figure1_dataset(N: float, M_max: int) -> list[SweepRecord]:
    """0&M QFI against cutoff M at fixed mean N, M = ceil(N)+1 .. M_max.

    Each record carries the weight a = N/M and, as ``reference_qfi``, the
    squeezed-vacuum QFI at the same mean.
    """
    if not (N > 0 and math.isfinite(N)):
        raise InvalidParameter(f"N must be positive, got {N}")
    if not M_max > N:
        raise InvalidParameter(f"M_max must exceed N, got M_max={M_max}, N={N}")
    values = list(range(math.ceil(N) + 1, int(M_max) + 1))
    if not values:
        raise InvalidParameter(f"no integer M in [ceil(N)+1, M_max] for N={N}, M_max={M_max}")
    spec = SweepSpec(MAndM(0, values[0], 0.0), "M", values, fixed_n=N)
    h_sq = qfi_squeezed(N)
    return [dataclasses.replace(r, reference_qfi=h_sq) for r in run_sweep(spec)]


def describe(spec: DistributionSpec) -> str:
    return repr(spec)


def evaluate_spec(spec: DistributionSpec, nu: int = 1, cfg: Optional[TruncationConfig] = None,
                  label: Optional[str] = None) -> EvalRecord:
    """Mean, variance, QFI and precision bound for a single state."""
    rec = _record_from_moments(0.0, moments(spec, cfg), nu)
    return EvalRecord(label or describe(spec), rec.mean, rec.variance, rec.qfi, rec.delta_phi,
                      status=rec.status)


def compare_specs(specs: Sequence[DistributionSpec], nu: int = 1,
                  cfg: Optional[TruncationConfig] = None) -> list[EvalRecord]:
    """Evaluate each state; ``ratio`` is its QFI over the first state's QFI."""
    if len(specs) < 2:
        raise InvalidParameter("comparison needs at least two states")
    rows = [evaluate_spec(s, nu, cfg) for s in specs]
    base = rows[0].qfi
    out = []
    for r in rows:
        ratio = None
        if base is not None and r.qfi is not None and base > 0 and not math.isinf(base):
            ratio = r.qfi / base
        out.append(dataclasses.replace(r, ratio=ratio))
    return out


# --------------------------------------------------------------------------
# Serialization


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return _fmt_float(v)
    return v


def _columns(records: Sequence[Any]) -> list[tuple[str, str]]:
    cls = type(records[0])
    cols = list(cls.COLUMNS)
    for key, attr in cls.OPTIONAL_COLUMNS:
        if any(getattr(r, attr) is not None for r in records):
            cols.append((key, attr))
    return cols


def _check_qfi(records: Sequence[Any]) -> None:
    for r in records:
        q, v = getattr(r, "qfi", None), getattr(r, "variance", None)
        if q is None or v is None or not (math.isfinite(q) and math.isfinite(v)):
            continue
        if abs(q - 4.0 * v) > 1e-12 * max(abs(q), 1e-300):
            raise ValueError(f"record violates qfi = 4 variance: {r}")


def serialize(records: Sequence[Any], fmt: str = "csv",
              metadata: Optional[dict[str, Any]] = None) -> bytes:
    """Render records as CSV or JSON bytes.

    CSV floats use 17 significant digits, missing optionals are empty cells and
    infinities are the literal ``inf``. Metadata, when given, becomes leading
    ``# key: value`` comment lines (CSV) or a first ``{"record": "metadata"}``
    object (JSON).
    """
    if not records:
        raise InvalidParameter("nothing to serialize")
    _check_qfi(records)
    cols = _columns(records)

    if fmt == "csv":
        buf = io.StringIO()
        if metadata:
            for k, v in metadata.items():
                buf.write(f"# {k}: {_cell(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([k for k, _ in cols])
        for r in records:
            w.writerow([_cell(getattr(r, attr)) for _, attr in cols])
        return buf.getvalue().encode("utf-8")

    if fmt == "json":
        rows = []
        if metadata:
            rows.append({"record": "metadata", **{k: _json_value(v) for k, v in metadata.items()}})
        for r in records:
            rows.append({k: _json_value(getattr(r, attr)) for k, attr in cols
                         if getattr(r, attr) is not None})
        return (json.dumps(rows, indent=2, allow_nan=False) + "\n").encode("utf-8")

    raise InvalidParameter(f"unknown format {fmt!r}; expected csv or json")


def _parse_float(s: str) -> Optional[float]:
    return None if s == "" else float(s)


def _from_fields(d: dict[str, Any]) -> SweepRecord:
    def num(key):
        v = d.get(key)
        if v is None or v == "":
            return None
        return float(v)
    return SweepRecord(num("param"), num("mean"), num("variance"), num("qfi"), num("delta_phi"),
                       num("weight_a"), str(d.get("status", "")), num("reference_qfi"))


def parse_sweep(data: bytes, fmt: str = "csv") -> list[SweepRecord]:
    """Inverse of :func:`serialize` for sweep records; metadata is skipped."""
    text = data.decode("utf-8")
    if fmt == "csv":
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        return [_from_fields(row) for row in csv.DictReader(lines)]
    if fmt == "json":
        return [_from_fields(o) for o in json.loads(text) if o.get("record") != "metadata"]
    raise InvalidParameter(f"unknown format {fmt!r}; expected csv or json")
