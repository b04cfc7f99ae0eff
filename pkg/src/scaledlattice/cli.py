"""Command-line experiment runner.

Exit codes: 0 success, 2 domain error, 3 resource error, 4 computation error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .baselines import (
    gauss_hermite_1d,
    level_count,
    smolyak_node_count,
    smolyak_quadrature_lebesgue,
    tensor_quadrature_lebesgue,
)
from .errors import ComputationError, DomainError, ScaledLatticeError
from .integrator import integrate, total_error_bound_report
from .lattice import (
    GeneratingVector,
    brute_force_tail_bound,
    cbc_construct,
    read_generating_vector,
    wce_korobov_bruteforce,
    wce_korobov_closed_form,
    write_generating_vector,
)
from .testbed import TestbedSpec, box_integral, decay_norm_estimate, integrand_from_spec, parse_spec

CSV_HEADER = ("n", "a", "estimate", "rel_error", "trunc", "cubature")
MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    a: float
    estimate: float
    rel_error: Optional[float] = None
    truncation_part: Optional[float] = None
    cubature_part: Optional[float] = None


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    range: tuple


def _vector_for(spec: TestbedSpec, gv: Optional[GeneratingVector], n: int) -> GeneratingVector:
    if gv is None:
        return GeneratingVector.fixed(n, spec.d)
    if gv.d < spec.d:
        raise DomainError(f"generating vector has {gv.d} components, integrand needs {spec.d}")
    return gv.prefix(spec.d).with_n(n) if gv.n != n else gv.prefix(spec.d)


def run_convergence(spec: TestbedSpec, gv: Optional[GeneratingVector], m_min: int, m_max: int,
                    *, decompose: Optional[bool] = None) -> List[ConvergenceRecord]:
    """Integrate at ``n = 2^m_min .. 2^m_max`` with the decay-selected boxes.

    ``gv`` supplies ``z``; it is reused (reduced mod ``n``) for every ``n``.
    ``None`` selects the built-in fixed vector.
    """
    if int(m_min) != m_min or m_min < 1 or m_max < m_min:
        raise DomainError(f"need 1 <= m_min <= m_max, got {m_min}, {m_max}")
    decompose = spec.decompose if decompose is None else decompose
    f = integrand_from_spec(spec)
    exact = f.exact_integral
    records = []
    for m in range(int(m_min), int(m_max) + 1):
        n = 2 ** m
        res = integrate(f, _vector_for(spec, gv, n))
        rel = abs(res.estimate - exact) / abs(exact) if exact else None
        trunc = cub = None
        if decompose:
            inside = box_integral(spec.family, spec.params, res.box.lower, res.box.upper)
            trunc = abs(exact - inside)
            cub = abs(inside - res.estimate)
        records.append(ConvergenceRecord(n, res.half_width, res.estimate, rel, trunc, cub))
    return records


def fit_slope(records: Iterable[ConvergenceRecord]) -> SlopeFit:
    """Least squares of ``log2 rel_error`` against ``log2 n``; zero errors are skipped."""
    pts = [(r.n, r.rel_error) for r in records if r.rel_error is not None and r.rel_error > 0]
    if len(pts) < MIN_FIT_POINTS:
        raise ComputationError(f"slope fit needs >= {MIN_FIT_POINTS} records with positive error, got {len(pts)}")
    x = np.log2([p[0] for p in pts])
    y = np.log2([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), r2, (pts[0][0], pts[-1][0]))


def _fmt(v) -> str:
    return "" if v is None else "%.17g" % v


def _write_csv(fh, records: Sequence[ConvergenceRecord]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([str(r.n), _fmt(r.a), _fmt(r.estimate), _fmt(r.rel_error),
                    _fmt(r.truncation_part), _fmt(r.cubature_part)])


def emit_csv(records: Sequence[ConvergenceRecord], path) -> None:
    """Header ``n,a,estimate,rel_error,trunc,cubature``, 17 significant digits, LF endings."""
    with open(path, "w", newline="") as fh:
        _write_csv(fh, records)


def read_csv(path) -> List[ConvergenceRecord]:
    def num(s):
        return float(s) if s else None

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise DomainError(f"{path}: missing or wrong CSV header")
    return [ConvergenceRecord(int(r[0]), float(r[1]), float(r[2]), num(r[3]), num(r[4]), num(r[5]))
            for r in rows[1:]]


def emit_gnuplot(csv_path, script_path, title: str = "") -> None:
    text = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set logscale xy 2",
        "set xlabel 'n'",
        "set ylabel 'error'",
        f"set title '{title}'",
    ]
    text.append(f"plot '{Path(csv_path).name}' using 1:4 with linespoints title 'relative error', \\\n"
                "     '' using 1:5 with lines title 'truncation', '' using 1:6 with lines title 'cubature'")
    Path(script_path).write_text("\n".join(text) + "\n")


def _load_gv(path) -> Optional[GeneratingVector]:
    return None if path is None else read_generating_vector(path)


def _cmd_integrate(args) -> int:
    spec = parse_spec(args.spec)
    if args.alpha is not None:
        spec = TestbedSpec(spec.family, spec.params, spec.d, args.alpha, spec.decompose, spec.extra)
    gv = _load_gv(args.gv)
    n = args.n if args.n is not None else (gv.n if gv is not None else None)
    if n is None:
        raise DomainError("--n is required without --gv")
    f = integrand_from_spec(spec)
    res = integrate(f, _vector_for(spec, gv, n))
    fields = [str(res.n), "%.17g" % res.half_width, "%.17g" % res.estimate]
    if args.bounds:
        norm = decay_norm_estimate(spec.family, spec.params, spec.alpha, f.decay, spec.d)
        f = integrand_from_spec(spec, decay_norm=norm)
        rep = total_error_bound_report(f, _vector_for(spec, gv, n), res.box)
        fields += ["%.6g" % rep.truncation, "%.6g" % rep.cubature, "%.6g" % rep.projection]
    _write_lines([" ".join(fields)], args.out)
    return 0


def _write_lines(lines, out) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_convergence(args) -> int:
    spec = parse_spec(args.spec)
    if args.alpha is not None:
        spec = TestbedSpec(spec.family, spec.params, spec.d, args.alpha, spec.decompose, spec.extra)
    records = run_convergence(spec, _load_gv(args.gv), args.m_min, args.m_max,
                              decompose=True if args.decompose else None)
    if args.out is None:
        _write_csv(sys.stdout, records)
    else:
        emit_csv(records, args.out)
        if args.plot:
            emit_gnuplot(args.out, Path(args.out).with_suffix(".gp"), spec.family)
    try:
        fit = fit_slope(records)
        print(f"slope={fit.slope:.4f} intercept={fit.intercept:.4f} r2={fit.r2:.4f} "
              f"n={fit.range[0]}..{fit.range[1]}", file=sys.stderr)
    except ComputationError as exc:
        print(f"no slope fit: {exc}", file=sys.stderr)
    return 0


def _cmd_cbc(args) -> int:
    gv = cbc_construct(args.n, args.d, args.alpha)
    if args.out is None:
        print(" ".join(str(v) for v in (gv.n, gv.d, *gv.z)))
    else:
        write_generating_vector(gv, args.out)
    return 0


def _cmd_wce(args) -> int:
    gv = _load_gv(args.gv) if args.gv else GeneratingVector.fixed(args.n or 1024, args.d)
    if args.n is not None and gv.n != args.n:
        gv = gv.with_n(args.n)
    alpha = 2 if args.alpha is None else args.alpha
    fields = [str(gv.n), "%.17g" % wce_korobov_closed_form(gv, alpha)]
    if args.hmax is not None:
        fields += ["%.17g" % wce_korobov_bruteforce(gv, alpha, args.hmax),
                   "%.3g" % brute_force_tail_bound(gv.d, alpha, args.hmax)]
    _write_lines([" ".join(fields)], args.out)
    return 0


def _cmd_baseline(args) -> int:
    spec = parse_spec(args.spec)
    f = integrand_from_spec(spec)
    if args.method == "gh-tensor":
        count = level_count(args.level)
        est = tensor_quadrature_lebesgue(gauss_hermite_1d(count), spec.d, f.evaluate)
        nodes = count ** spec.d
    else:
        est = smolyak_quadrature_lebesgue(args.level, spec.d, f.evaluate)
        nodes = smolyak_node_count(args.level, spec.d)
    rel = abs(est - f.exact_integral) / abs(f.exact_integral)
    _write_lines([f"{nodes} {est:.17g} {rel:.17g}"], args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scaledlattice",
                                     description="Scaled rank-1 lattice rules for integrals over R^d.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", required=True, help="key=value integrand spec file")
        p.add_argument("--gv", help="generating-vector file 'n d z1 ... zd' (default: built-in vector)")
        p.add_argument("--alpha", type=int, help="override the smoothness order")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--plot", action="store_true", help="also write a gnuplot script next to --out")

    p = sub.add_parser("integrate", help="one scaled-lattice estimate")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--bounds", action="store_true", help="append truncation, cubature and projection bounds")
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("convergence", help="sweep n = 2^m and write CSV records")
    common(p)
    p.add_argument("--m-min", type=int, default=8)
    p.add_argument("--m-max", type=int, default=16)
    p.add_argument("--decompose", action="store_true", help="split the error into truncation and cubature parts")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("cbc", help="component-by-component generating vector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cbc)

    p = sub.add_parser("wce", help="Korobov worst-case error of a lattice rule")
    common(p, spec=False)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--hmax", type=int, help="also evaluate the truncated dual-lattice series")
    p.set_defaults(func=_cmd_wce)

    p = sub.add_parser("baseline", help="Gauss-Hermite tensor or Smolyak estimate")
    p.add_argument("--method", choices=("gh-tensor", "smolyak"), required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_baseline)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScaledLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
