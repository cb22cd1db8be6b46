"""Command-line front end.

Subcommands: roots, weyl, poincare, series, correction, eval, classify,
verify, grid, check.  Output is deterministic JSON lines (or CSV where
noted); all human-facing indices (subset members, word letters, matrix
positions in error messages) are 1-based, while the Python API is
0-based throughout.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from .analytic import Evaluator, classify
from .cartan import GCM, is_w_finite, load_gcm, validate_gcm
from .errors import KmError
from .formal import (
    correction_factor,
    delta_ratio,
    macdonald_identity_check,
    weyl_sum,
)
from .roots import enumerate_roots
from .weyl import (
    build_tables,
    enumerate_weyl,
    estimate_radius,
    minimal_coset_reps,
    poincare,
)


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as JSON on stderr."""

    def error(self, message: str):
        json.dump({"error": "usage", "message": message}, sys.stderr)
        sys.stderr.write("\n")
        raise SystemExit(2)


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` literals: ``0.3``, ``0.5i``, ``1-2i``, ``-i``."""
    s = text.strip().replace(" ", "").replace("I", "i")
    if s.endswith("i"):
        head = s[:-1]
        if head in ("", "+", "-"):
            head += "1"
        s = head + "j"
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"cannot parse complex literal {text!r}") from None


def parse_complex_list(text: str) -> tuple[complex, ...]:
    return tuple(parse_complex(part) for part in text.split(","))


def parse_subset(text: str, size: int) -> frozenset[int]:
    """1-based comma list like ``1,3`` (empty string for the empty set)."""
    s = text.strip()
    if not s:
        return frozenset()
    out = set()
    for part in s.split(","):
        k = int(part)
        if not 1 <= k <= size:
            raise ValueError(f"index {k} outside 1..{size}")
        out.add(k - 1)
    return frozenset(out)


def format_subset(subset) -> str:
    return ",".join(str(i + 1) for i in sorted(subset))


def parse_index(token: str, size: int) -> int:
    """A single 1-based generator/coordinate index."""
    k = int(token)
    if not 1 <= k <= size:
        raise ValueError(f"index {k} outside 1..{size}")
    return k - 1


def parse_word(text: str, size: int) -> tuple[int, ...]:
    return tuple(parse_index(token, size) for token in text.split(",") if token.strip())


def parse_range(text: str) -> list[float]:
    """Grid axis ``start:stop:count`` (inclusive endpoints)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:count, got {text!r}")
    start, stop = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + k * step for k in range(count)]


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "infinity"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return x


def _emit(stream, obj) -> None:
    stream.write(json.dumps(obj, sort_keys=True) + "\n")


def _report_fields(report) -> dict:
    return {
        "product_tail": _num(report.product_tail),
        "sum_tail": _num(report.sum_tail),
        "tail_estimate": _num(report.tail_estimate),
        "tail_ok": report.tail_ok,
        "r1": _num(report.r1),
        "exceptional_count": report.exceptional_count,
        "min_denominator": _num(report.min_denominator),
        "flags": list(report.flags),
    }


def _load_matrix(args) -> GCM:
    if getattr(args, "matrix", None):
        return validate_gcm(json.loads(args.matrix))
    if getattr(args, "gcm", None):
        return load_gcm(args.gcm)
    raise ValueError("provide --gcm FILE or --matrix JSON")


def _add_common(p: argparse.ArgumentParser, *, matrix: bool = True) -> None:
    if matrix:
        p.add_argument("--gcm", help="path to a GCM JSON file")
        p.add_argument("--matrix", help="inline matrix JSON, e.g. '[[2,-1],[-1,2]]'")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


# ---------------------------------------------------------------------
# subcommands


def cmd_roots(args, out) -> int:
    gcm = _load_matrix(args)
    table = enumerate_roots(gcm, args.height, cap=args.cap)
    if args.format == "csv":
        writer = csv.writer(out)
        l = gcm.size
        writer.writerow([f"n{i + 1}" for i in range(l)]
                        + [f"m{i + 1}" for i in range(l)] + ["height"])
        for e in table:
            writer.writerow(list(e.n) + list(e.m) + [e.height])
    else:
        for e in table:
            _emit(out, {"n": list(e.n), "m": list(e.m), "height": e.height})
    return 0


def cmd_weyl(args, out) -> int:
    gcm = _load_matrix(args)
    table = enumerate_weyl(gcm, args.max_length, None, cap=args.cap)
    if args.coset is not None:
        subset = parse_subset(args.coset, gcm.size)
        for w in minimal_coset_reps(table, subset):
            _emit(out, {"word": [i + 1 for i in w.word], "length": w.length})
        return 0
    if args.words:
        for w in table.elements():
            _emit(out, {"word": [i + 1 for i in w.word], "length": w.length})
        return 0
    for k, c in enumerate(table.counts):
        _emit(out, {"count": c, "length": k})
    return 0


def cmd_poincare(args, out) -> int:
    gcm = _load_matrix(args)
    table = enumerate_weyl(gcm, args.max_length, None, cap=args.cap)
    subset = parse_subset(args.subset, gcm.size) if args.subset is not None else None
    series = poincare(table, subset)
    for k, c in enumerate(series.coefficients):
        _emit(out, {"count": c, "length": k})
    summary = {"exact": series.exact}
    if subset is None:
        try:
            summary["radius_estimate"] = _num(estimate_radius(series))
        except KmError:
            summary["radius_estimate"] = None
    _emit(out, summary)
    return 0


def _emit_series(out, series, degree) -> None:
    for mu, poly in series.terms():
        padded = list(poly) + [0] * (degree + 1 - len(poly))
        _emit(out, {"mu": list(mu), "poly": padded})


def cmd_series(args, out) -> int:
    gcm = _load_matrix(args)
    if args.check_macdonald is not None:
        subset = parse_subset(args.check_macdonald, gcm.size)
        res = macdonald_identity_check(gcm, subset, args.height, args.degree,
                                       cap=args.cap)
        obj = {
            "passed": res.passed,
            "poincare": list(res.poincare_coefficients),
            "subset": format_subset(res.subset),
        }
        if res.discrepancy is not None:
            mu, got, want = res.discrepancy
            obj["discrepancy"] = {"mu": list(mu), "got": list(got), "want": list(want)}
        _emit(out, obj)
        return 0 if res.passed else 1
    length = args.max_length if args.max_length is not None \
        else args.height + args.degree + 2
    if args.kind == "delta":
        series = delta_ratio(gcm, args.height, args.degree, cap=args.cap)
    else:
        _, wtable = build_tables(gcm, length, cap=args.cap)
        base = delta_ratio(gcm, args.height, args.degree, cap=args.cap)
        series = weyl_sum(wtable, base).series
    _emit_series(out, series, args.degree)
    return 0


def cmd_correction(args, out) -> int:
    gcm = _load_matrix(args)
    length = args.max_length if args.max_length is not None \
        else args.height + args.degree + 2
    res = correction_factor(gcm, args.height, args.degree, length, cap=args.cap)
    rows_m = [{"mu": list(mu), "poly": list(p) + [0] * (args.degree + 1 - len(p))}
              for mu, p in res.m.terms()]
    rows_inv = [{"mu": list(mu), "poly": list(p) + [0] * (args.degree + 1 - len(p))}
                for mu, p in res.m_inv.terms()]
    _emit(out, {
        "m": rows_m,
        "m_inv": rows_inv,
        "poincare": list(res.poincare_coefficients),
    })
    return 0


def _make_evaluator(args, gcm: GCM) -> Evaluator:
    return Evaluator(
        gcm,
        height=args.height,
        max_length=args.max_length,
        tol=args.tol,
        cap=args.cap,
    )


def cmd_eval(args, out) -> int:
    gcm = _load_matrix(args)
    ev = _make_evaluator(args, gcm)
    t = parse_complex(args.t)
    z = parse_complex_list(args.z)
    if args.atlas:
        res = ev.continuation_atlas(t, z, tail_target=args.tail_target)
        obj = {
            "value_re": res.outcome.value.real,
            "value_im": res.outcome.value.imag,
            "chart": format_subset(res.chart),
            "cross_ok": res.cross_ok,
            "max_cross_deviation": _num(res.max_cross_deviation),
        }
        obj.update(_report_fields(res.outcome.report))
        _emit(out, obj)
        return 0
    if args.subset is not None:
        outcome = ev.eval_c_x(t, z, parse_subset(args.subset, gcm.size),
                              tail_target=args.tail_target)
    elif args.sumform:
        outcome = ev.eval_c_sumform(t, z, tail_target=args.tail_target)
    else:
        outcome = ev.eval_c(t, z, tail_target=args.tail_target)
    obj = {"value_re": outcome.value.real, "value_im": outcome.value.imag}
    obj.update(_report_fields(outcome.report))
    _emit(out, obj)
    return 0


def cmd_classify(args, out) -> int:
    gcm = _load_matrix(args)
    p = tuple(float(x) for x in args.pairings.split(","))
    desc = classify(gcm, p, tol=args.tol, max_iter=args.max_iter)
    _emit(out, {
        "word": [i + 1 for i in desc.word],
        "subset": format_subset(desc.subset),
        "representative": list(desc.representative),
        "status": desc.status.value,
        "iterations": desc.iterations,
    })
    return 0


def cmd_verify(args, out) -> int:
    gcm = _load_matrix(args)
    ev = _make_evaluator(args, gcm)
    t = parse_complex(args.t)
    z = parse_complex_list(args.z)
    subset = parse_subset(args.subset, gcm.size) if args.subset else frozenset()
    words: list[tuple[int, ...]] = []
    if args.words:
        words = [parse_word(w, gcm.size) for w in args.words.split(";")]
    if args.word_length:
        gens = range(gcm.size)
        level: list[tuple[int, ...]] = [()]
        for _ in range(args.word_length):
            level = [w + (i,) for w in level for i in gens]
            words.extend(level)
    res = ev.verify_invariance(t, z, subset, words, tail_target=args.tail_target)
    entries = []
    for word, value, error in res.entries:
        row: dict = {"word": [i + 1 for i in word]}
        if value is not None:
            row["value_re"] = value.real
            row["value_im"] = value.imag
        if error is not None:
            row["error"] = error
        entries.append(row)
    _emit(out, {
        "base_re": res.base_value.real,
        "base_im": res.base_value.imag,
        "max_deviation": _num(res.max_deviation),
        "entries": entries,
    })
    return 0


def cmd_grid(args, out) -> int:
    gcm = _load_matrix(args)
    ev = _make_evaluator(args, gcm)
    t = parse_complex(args.t)
    axes: dict[int, list[float]] = {}
    for spec in args.axis or []:
        name, _, rng = spec.partition("=")
        k = parse_index(name.strip().lstrip("z"), gcm.size)
        axes[k] = parse_range(rng)
    if not axes:
        raise ValueError("grid needs at least one --axis k=start:stop:count")
    reals = ([float(x) for x in args.real.split(",")]
             if args.real else [0.0] * gcm.size)
    if len(reals) != gcm.size:
        raise ValueError(f"--real needs {gcm.size} entries")
    keys = sorted(axes)
    points: list[tuple[complex, ...]] = []
    stack: list[list[float]] = [[]]
    for k in keys:
        stack = [vals + [v] for vals in stack for v in axes[k]]
    for vals in stack:
        imag = [0.0] * gcm.size
        for k, v in zip(keys, vals):
            imag[k] = v
        points.append(tuple(complex(r, y) for r, y in zip(reals, imag)))

    def run(idx_point):
        idx, z = idx_point
        try:
            res = ev.continuation_atlas(t, z, tail_target=args.tail_target)
            return (idx, z, res, None)
        except KmError as exc:
            return (idx, z, None, f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(run, enumerate(points)))
    results.sort(key=lambda r: r[0])

    header = (["index", "t_re", "t_im"]
              + [f"z{i + 1}_{p}" for i in range(gcm.size) for p in ("re", "im")]
              + ["C_re", "C_im", "tail_bound", "chart_X", "error"])
    failed = False
    if args.format == "csv":
        writer = csv.writer(out)
        writer.writerow(header)
    for idx, z, res, err in results:
        zcols = [c for v in z for c in (v.real, v.imag)]
        if err is None:
            row = ([idx, t.real, t.imag] + zcols
                   + [res.outcome.value.real, res.outcome.value.imag,
                      res.outcome.report.tail_estimate,
                      format_subset(res.chart), ""])
        else:
            failed = True
            row = [idx, t.real, t.imag] + zcols + ["", "", "", "", err]
        if args.format == "csv":
            writer.writerow(row)
        else:
            _emit(out, {k: _num(v) for k, v in zip(header, row)})
    return 1 if failed else 0


# ---------------------------------------------------------------------
# identity check harness


def run_check_suite(gcm: GCM, *, height: int = 8, degree: int = 6,
                    max_length: int = 12, tol: float = 1e-6,
                    seed: int = 0, cap: int = 200_000) -> list[dict]:
    """Run the identity checks against one matrix; returns result rows.

    Covers the finite-type product identity on finite parabolic subsets,
    triviality of the correction factor in finite type, the
    constant-term/Poincare match, numeric invariance under short words,
    and cross-chart agreement at a wall.
    """
    rows: list[dict] = []
    rng = random.Random(seed)
    l = gcm.size

    def add(name: str, status: str, detail: str) -> None:
        rows.append({"name": name, "status": status, "detail": detail})

    subsets = [frozenset({i}) for i in range(l) if is_w_finite(gcm, {i})]
    full = frozenset(range(l))
    finite_type = is_w_finite(gcm, full)
    if finite_type:
        subsets.append(full)
    for subset in subsets:
        res = macdonald_identity_check(gcm, subset, degree, degree, cap=cap)
        add(
            f"macdonald[{format_subset(subset) or 'empty'}]",
            "pass" if res.passed else "fail",
            f"poincare {list(res.poincare_coefficients)}",
        )

    if finite_type:
        cf = correction_factor(gcm, degree, degree, max(degree + 2, max_length), cap=cap)
        trivial = cf.m == type(cf.m).one(l, degree, degree)
        add("correction-factor-trivial", "pass" if trivial else "fail",
            f"{len(cf.m.coeffs)} coefficient(s)")
    else:
        add("correction-factor-trivial", "skip", "not finite type")

    length = degree + 2
    _, wtable = build_tables(gcm, length, cap=cap)
    base = delta_ratio(gcm, 2, degree, cap=cap)
    sum_res = weyl_sum(wtable, base)
    constant = list(sum_res.series.constant_term())
    constant += [0] * (degree + 1 - len(constant))
    expected = list(poincare(wtable).truncated(degree))
    add("constant-term-poincare",
        "pass" if constant == expected else "fail",
        f"constant term {constant}")

    effective_length = max(max_length, 10)
    ev = Evaluator(gcm, height=max(height, 16, 2 * effective_length + 2),
                   max_length=effective_length, cap=cap)
    t = 0.15
    words = [(i,) for i in range(l)] + [(i, j) for i in range(l) for j in range(l)]
    worst = 0.0
    for _ in range(5):
        z = tuple(complex(rng.uniform(-0.3, 0.3), rng.uniform(0.4, 1.2))
                  for _ in range(l))
        res = ev.verify_invariance(t, z, frozenset(), words)
        worst = max(worst, res.max_deviation)
    add("invariance", "pass" if worst < tol else "fail",
        f"max deviation {worst:.3e} over {len(words)} words x 5 points")

    # the transported product is tight only when every enumerated
    # inversion root fits under the height cut
    max_inv = max(
        (ev.roots[idx].coheight for w in ev.weyl.elements() for idx in w.inversions),
        default=0,
    )
    if max_inv <= ev.height:
        z = tuple(complex(0.1, rng.uniform(0.5, 1.0)) for _ in range(l))
        direct = ev.eval_c(t, z).value
        summed = ev.eval_c_sumform(t, z).value
        dev = abs(direct - summed)
        add("sum-form-agreement", "pass" if dev < tol else "fail",
            f"deviation {dev:.3e}")
    else:
        add("sum-form-agreement", "skip",
            f"inversion roots reach coroot height {max_inv} > cut {ev.height}")

    wall_like = [i for i in range(l) if is_w_finite(gcm, {i})]
    if wall_like:
        i = wall_like[0]
        y = [1.0] * l
        y[i] = 0.0
        z = tuple(complex(0.0, v) for v in y)
        res = ev.continuation_atlas(t, z, chart_tol=tol)
        add("chart-agreement",
            "pass" if res.cross_ok else "fail",
            f"chart {{{format_subset(res.chart)}}} max cross deviation "
            f"{res.max_cross_deviation:.3e}")
    else:
        add("chart-agreement", "skip", "no finite singleton subset")
    return rows


def cmd_check(args, out) -> int:
    gcm = _load_matrix(args)
    rows = run_check_suite(
        gcm,
        height=args.height,
        degree=args.degree,
        max_length=args.max_length,
        tol=args.tol,
        seed=args.seed,
        cap=args.cap,
    )
    if args.format == "json":
        for row in rows:
            _emit(out, row)
    else:
        for row in rows:
            out.write(f"{row['status'].upper():4s} {row['name']}: {row['detail']}\n")
    return 0 if all(r["status"] != "fail" for r in rows) else 1


# ---------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="kmfactor",
                     description="Correction-factor computations for "
                                 "Kac-Moody root systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="enumerate positive real roots")
    _add_common(p)
    p.add_argument("--height", type=int, default=10)
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("weyl", help="enumerate Weyl group elements")
    _add_common(p)
    p.add_argument("--max-length", type=int, default=8)
    p.add_argument("--words", action="store_true", help="list words, not counts")
    p.add_argument("--coset", help="1-based subset; list minimal coset reps")
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("poincare", help="length generating coefficients")
    _add_common(p)
    p.add_argument("--max-length", type=int, default=16)
    p.add_argument("--subset", help="1-based subset for a parabolic subgroup")
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser("series", help="truncated series (ratio product or group sum)")
    _add_common(p)
    p.add_argument("--height", type=int, default=6)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--kind", choices=("delta", "sum"), default="sum")
    p.add_argument("--check-macdonald", metavar="SUBSET",
                   help="verify the finite-type identity for a 1-based subset")
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("correction", help="correction factor and its inverse")
    _add_common(p)
    p.add_argument("--height", type=int, default=6)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_correction)

    for name, helptext in (("eval", "evaluate the function at one point"),
                           ("verify", "invariance deviations at one point")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--t", required=True, help="complex literal a+bi")
        p.add_argument("--z", required=True, help="comma list of complex literals")
        p.add_argument("--height", type=int, default=40)
        p.add_argument("--max-length", type=int, default=20)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--tail-target", type=float, default=None)
        p.add_argument("--cap", type=int, default=200_000)
        if name == "eval":
            p.add_argument("--subset", help="1-based chart subset (may be empty)")
            p.add_argument("--sumform", action="store_true")
            p.add_argument("--atlas", action="store_true",
                           help="dispatch through the continuation atlas")
            p.set_defaults(func=cmd_eval)
        else:
            p.add_argument("--subset", help="1-based chart subset", default="")
            p.add_argument("--words", help="semicolon-separated 1-based words")
            p.add_argument("--word-length", type=int, default=0,
                           help="also test all words up to this length")
            p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="reduce pairings into the chamber")
    _add_common(p)
    p.add_argument("--pairings", required=True, help="comma list of reals")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("grid", help="evaluate on a grid, CSV rows out")
    _add_common(p)
    p.add_argument("--t", required=True)
    p.add_argument("--axis", action="append",
                   help="k=start:stop:count over the imaginary part of z_k "
                        "(1-based k, repeatable)")
    p.add_argument("--real", help="comma list of real parts (default zeros)")
    p.add_argument("--height", type=int, default=40)
    p.add_argument("--max-length", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--tail-target", type=float, default=None)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("check", help="run the identity check suite")
    _add_common(p)
    p.add_argument("--height", type=int, default=8)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--max-length", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                return args.func(args, fh)
        return args.func(args, sys.stdout)
    except KmError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except ValueError as exc:
        json.dump({"error": "usage", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
