"""Command-line front end.

Exit codes: 0 success, 2 argument error, 3 non-convergence, 4 divergence
where the command cannot proceed. Data goes to stdout (or ``--output``),
diagnostics to stderr. All numbers come from library calls; this module only
parses arguments and formats output.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from typing import Any, Optional, Sequence

from . import __version__
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
    SmallPeak,
    SqueezedVacuum,
    Zeta,
)
from .errors import DivergentMember, PhotonFisherError
from .moments import Status, TruncationConfig
from .optimize import (
    OptimizationProblem,
    fit_scaling_exponent,
    log_spaced_parameters,
    logarithmic_critical_mu,
    maximize_variance,
)
from .report import (
    CriticalMuRecord,
    OptimumRecord,
    ScalingRecord,
    compare_specs,
    evaluate_spec,
    figure1_dataset,
    serialize,
)

EXIT_OK, EXIT_ARGS, EXIT_NOT_CONVERGED, EXIT_DIVERGES = 0, 2, 3, 4

FAMILIES = ("mandm", "coherent", "squeezed", "ssw", "ss", "dowling", "small-peak",
            "geometric", "negbin", "logarithmic", "borel", "zeta")

# parameter name -> converter; M and m are photon numbers, integers only
PARAM_TYPES = {
    "mu": float, "eta": float, "s": float, "r": float, "n": float, "alpha_sq": float,
    "m": int, "M": int, "a": float, "n_fixed": float, "z": float, "inner": str,
}


class CliError(Exception):
    pass


def _take(params: dict[str, Any], family: str, required: Sequence[str] = (),
          optional: dict[str, Any] | None = None, one_of: Sequence[Sequence[str]] = ()) -> dict:
    optional = optional or {}
    allowed = set(required) | set(optional) | {k for group in one_of for k in group}
    extra = set(params) - allowed
    if extra:
        raise CliError(f"family {family!r} does not take {', '.join('--' + k.replace('_', '-') for k in sorted(extra))}")
    missing = [k for k in required if k not in params]
    if missing:
        raise CliError(f"family {family!r} needs {', '.join('--' + k.replace('_', '-') for k in missing)}")
    for group in one_of:
        given = [k for k in group if k in params]
        if len(given) != 1:
            raise CliError(f"family {family!r} needs exactly one of "
                           f"{', '.join('--' + k.replace('_', '-') for k in group)}")
    return {**optional, **params}


def build_spec(family: str, params: dict[str, Any]) -> DistributionSpec:
    """Turn a family name and parsed parameters into a distribution."""
    if family == "mandm":
        p = _take(params, family, ["M"], {"m": 0}, [("a", "n_fixed")])
        if "n_fixed" in p:
            return MAndM.fixed_mean(p["m"], p["M"], p["n_fixed"])
        return MAndM(p["m"], p["M"], p["a"])
    if family == "coherent":
        p = _take(params, family, one_of=[("n", "alpha_sq")])
        return Coherent(p.get("n", p.get("alpha_sq")))
    if family == "squeezed":
        p = _take(params, family, one_of=[("n", "r")])
        return SqueezedVacuum.from_mean(p["n"]) if "n" in p else SqueezedVacuum(p["r"])
    if family == "ssw":
        return SSW(_take(params, family, optional={"M": 100})["M"])
    if family == "ss":
        p = _take(params, family, optional={"M": 100, "z": 1.0})
        return SS(p["M"], p["z"])
    if family == "dowling":
        p = _take(params, family, optional={"z": 1.0, "eta": 10.0})
        return Dowling(p["z"], p["eta"])
    if family == "geometric":
        return Geometric(_take(params, family, ["mu"])["mu"])
    if family == "negbin":
        p = _take(params, family, ["mu", "eta"])
        return NegativeBinomial(p["mu"], p["eta"])
    if family == "logarithmic":
        return Logarithmic(_take(params, family, ["mu"])["mu"])
    if family == "borel":
        return Borel(_take(params, family, ["mu"])["mu"])
    if family == "zeta":
        return Zeta(_take(params, family, ["s"])["s"])
    if family == "small-peak":
        p = _take(params, family, ["a", "inner"])
        return SmallPeak(p["a"], parse_spec_string(p["inner"]))
    raise CliError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def _convert(key: str, raw: str) -> Any:
    key = key.replace("-", "_")
    if key not in PARAM_TYPES:
        raise CliError(f"unknown parameter {key!r}")
    try:
        return key, PARAM_TYPES[key](raw)
    except ValueError:
        kind = "an integer" if PARAM_TYPES[key] is int else "a number"
        raise CliError(f"parameter {key!r} must be {kind}, got {raw!r}") from None


def parse_spec_string(text: str) -> DistributionSpec:
    """Parse ``family:key=value,key=value`` (e.g. ``mandm:m=0,M=25,n-fixed=7.46``).

    A small-peak inner state uses ``/`` between its own pairs:
    ``small-peak:a=0.3,inner=borel:mu=0.5``.
    """
    family, _, rest = text.partition(":")
    family = family.strip()
    params: dict[str, Any] = {}
    if family == "small-peak" and "inner=" in rest:
        rest, _, inner = rest.partition("inner=")
        params["inner"] = inner.replace("/", ",")
        rest = rest.rstrip(",")
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, raw = item.partition("=")
        if not eq:
            raise CliError(f"malformed parameter {item!r} in {text!r}; expected key=value")
        k, v = _convert(key.strip(), raw.strip())
        params[k] = v
    return build_spec(family, params)


# --------------------------------------------------------------------------
# Output


def _metadata(argv: Sequence[str], tail_epsilon: float) -> dict[str, Any]:
    return {"tool": "photonfisher", "version": __version__,
            "argv": shlex.join(["photonfisher", *argv]), "tail_epsilon": tail_epsilon}


def _human(records: Sequence[Any], metadata: dict[str, Any], notes: Sequence[str] = ()) -> bytes:
    lines = [f"# {k}: {v}" for k, v in metadata.items()]
    cols = type(records[0]).COLUMNS
    cells = [[_show(getattr(r, attr)) for _, attr in cols] for r in records]
    if len(records) == 1:
        width = max(len(k) for k, _ in cols)
        lines += [f"{k:<{width}}  {c}" for (k, _), c in zip(cols, cells[0])]
    else:
        widths = [max(len(k), *(len(row[i]) for row in cells)) for i, (k, _) in enumerate(cols)]
        lines.append("  ".join(k.rjust(w) for (k, _), w in zip(cols, widths)))
        lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines += [f"note: {n}" for n in notes]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _show(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _emit(args, records: Sequence[Any], notes: Sequence[str] = ()) -> None:
    meta = _metadata(args.argv, args.tail_epsilon)
    if args.format == "human":
        data = _human(records, meta, notes)
    else:
        data = serialize(records, args.format, meta)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for n in notes:
        print(f"photonfisher: {n}", file=sys.stderr)


def _cfg(args) -> TruncationConfig:
    return TruncationConfig(eps_tail=args.tail_epsilon)


def _divergence_notes(records) -> list[str]:
    return [f"{r.family}: QFI diverges; delta_phi omitted (no finite precision bound)"
            for r in records if r.status == Status.DIVERGES.value]


def _not_converged(records) -> int:
    bad = [r for r in records if r.status == Status.NOT_CONVERGED.value]
    for r in bad:
        print(f"photonfisher: {r.family}: moments did not converge", file=sys.stderr)
    return EXIT_NOT_CONVERGED if bad else EXIT_OK


# --------------------------------------------------------------------------
# Commands


def cmd_eval(args) -> int:
    params = {k: getattr(args, k) for k in PARAM_TYPES if getattr(args, k, None) is not None}
    spec = build_spec(args.family, params)
    rec = evaluate_spec(spec, args.nu, _cfg(args))
    _emit(args, [rec], _divergence_notes([rec]))
    return _not_converged([rec])


def cmd_compare(args) -> int:
    if not args.spec or len(args.spec) < 2:
        raise CliError("compare needs at least two --spec entries")
    specs = [parse_spec_string(s) for s in args.spec]
    rows = compare_specs(specs, args.nu, _cfg(args))
    _emit(args, rows, _divergence_notes(rows))
    return _not_converged(rows)


def cmd_optimize(args) -> int:
    prob = OptimizationProblem(args.m, args.M, args.n)
    _emit(args, [OptimumRecord.from_optimum(prob, maximize_variance(prob))])
    return EXIT_OK


def cmd_scaling(args) -> int:
    params = {"eta": args.eta} if args.eta is not None else {}
    if args.family in ("negbin",) and not params:
        raise CliError("negbin scaling needs --eta")
    if args.family not in ("geometric", "borel", "squeezed", "coherent", "negbin",
                           "logarithmic", "zeta"):
        raise CliError(f"no scaling sweep for family {args.family!r}")
    template = _template(args.family, params)
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",")]
        except ValueError:
            raise CliError(f"--values must be comma-separated numbers, got {args.values!r}") from None
        name = _free_parameter(args.family)
    else:
        name, values = log_spaced_parameters(template, args.n_min, args.n_max, args.points)
    try:
        fit = fit_scaling_exponent(template, values, name)
    except DivergentMember as exc:
        print(f"photonfisher: {exc}", file=sys.stderr)
        return EXIT_DIVERGES
    _emit(args, [ScalingRecord.from_fit(args.family, fit)])
    return EXIT_OK


def _free_parameter(family: str) -> str:
    return {"squeezed": "r", "coherent": "alpha_sq", "zeta": "s"}.get(family, "mu")


def _template(family: str, params: dict) -> DistributionSpec:
    # any valid member; the swept parameter is replaced point by point
    seed = {"geometric": {"mu": 0.5}, "borel": {"mu": 0.5}, "squeezed": {"r": 1.0},
            "coherent": {"n": 1.0}, "negbin": {"mu": 0.5}, "logarithmic": {"mu": 0.5},
            "zeta": {"s": 4.0}}[family]
    return build_spec(family, {**seed, **params})


def cmd_figure1(args) -> int:
    _emit(args, figure1_dataset(args.n, args.M_max))
    return EXIT_OK


def cmd_critical_mu(args) -> int:
    import math
    mu = logarithmic_critical_mu(args.tol)
    _emit(args, [CriticalMuRecord(mu, args.tol, 2.0 * mu + math.log1p(-mu))])
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "csv", "json"), default="human")
    common.add_argument("--output", metavar="PATH", help="write data here instead of stdout")
    common.add_argument("--nu", type=_positive_int, default=1, help="measurement repetitions")
    common.add_argument("--tail-epsilon", type=_positive_float, default=1e-14,
                        help="tail tolerance for summed moments")

    parser = argparse.ArgumentParser(
        prog="photonfisher",
        description="Photon-number statistics and quantum Fisher information "
                    "for single-mode phase estimation.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], allow_abbrev=False,
                       help="moments, QFI and precision bound of one state")
    p.add_argument("--family", choices=FAMILIES, required=True)
    for flag, key in (("--mu", "mu"), ("--eta", "eta"), ("--s", "s"), ("--r", "r"),
                      ("--n", "n"), ("--alpha-sq", "alpha_sq"), ("--a", "a"),
                      ("--n-fixed", "n_fixed"), ("--z", "z")):
        p.add_argument(flag, dest=key, type=float)
    p.add_argument("--m", dest="m", type=int)
    p.add_argument("--M", dest="M", type=int)
    p.add_argument("--inner", help="inner state of a small-peak probe, family:key=value,...")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", parents=[common], allow_abbrev=False,
                       help="table of several states with QFI ratios to the first")
    p.add_argument("--spec", action="append", metavar="FAMILY:K=V,...",
                   help="state to compare; repeat at least twice")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("optimize", parents=[common], allow_abbrev=False,
                       help="maximum variance on {m..M} at fixed mean")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--n", type=float, required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("scaling", parents=[common], allow_abbrev=False,
                       help="fit the exponent of QFI against N")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n-min", type=_positive_float, default=1e2)
    p.add_argument("--n-max", type=_positive_float, default=1e4)
    p.add_argument("--points", type=_positive_int, default=16)
    p.add_argument("--eta", type=float, help="negative-binomial shape")
    p.add_argument("--values", help="explicit comma-separated parameter values")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("figure1", parents=[common], allow_abbrev=False,
                       help="0&M QFI against M at fixed N, with the squeezed reference")
    p.add_argument("--n", type=_positive_float, default=7.46)
    p.add_argument("--M-max", dest="M_max", type=int, default=100)
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("critical-mu", parents=[common], allow_abbrev=False,
                       help="critical mu of the logarithmic distribution")
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.set_defaults(func=cmd_critical_mu)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        return args.func(args)
    except (CliError, PhotonFisherError) as exc:
        print(f"photonfisher: error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
