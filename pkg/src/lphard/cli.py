"""Command-line front end.

Exit codes: 0 success, 1 computational failure (or a failing verify suite),
2 usage or schema error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import constants as hc
from . import fixtures as fx
from . import io as iox
from . import reductions as rd
from . import theta as th
from . import verify as vf
from .basis import RationalBasis
from .counting import count_lattice, count_zn
from .enumeration import EnumerationBudget
from .errors import BudgetExceeded, LphardError
from .lattice import (AGBddInstance, AGGapCvpInstance, BddInstance, CvpPrimeInstance, SvpInstance,
                      classify_agbdd, classify_agcvp, classify_bdd, classify_cvp_prime, classify_svp)
from .rng import fresh_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
PRECISION_ENV = "LPHARD_PRECISION"


class UsageError(Exception):
    pass


def rational(text) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"malformed rational {text!r}") from None


def exponent(text):
    f = rational(text)
    if f < 1:
        raise argparse.ArgumentTypeError("p must be >= 1")
    return int(f) if f.denominator == 1 else float(f)


def default_precision():
    mode = os.environ.get(PRECISION_ENV, "double")
    if mode not in ("double", "extended"):
        raise UsageError(f"{PRECISION_ENV} must be 'double' or 'extended', got {mode!r}")
    return mode


def resolve_seed(args):
    if args.seed is None:
        args.seed = fresh_seed()
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, float)):
        return f"{x:.10g}"
    return str(x)


# ---------------------------------------------------------------- constants

def _p_grid(p_min, p_max, p_step):
    count = int(math.floor((p_max - p_min) / p_step + 1e-9)) + 1
    return [round(p_min + i * p_step, 12) for i in range(count)]


def _row(job):
    p, C_list, c_kn, precision = job
    return hc.constants_row(p, C_list, hc.KissingConstant(c_kn), precision)


def constants_csv(p_values, C_list, c_kn, precision, jobs=1) -> str:
    work = [(p, tuple(C_list), c_kn, precision) for p in p_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row, work))
    else:
        rows = [_row(w) for w in work]
    buf = _io.StringIO()
    buf.write(f"# c_kn={fmt(c_kn)} precision={precision} version={iox.software_version()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    header = ["p", "alpha_star", "alpha_ddagger", "t_star", "a_star"]
    header += [f"alpha_dagger@{fmt(C)}" for C in C_list]
    header += ["alpha_kn", "Cp", "Cp_bound", "error"]
    writer.writerow(header)
    for r in rows:
        vals = [r.p, r.alpha_star, r.alpha_ddagger, r.t_star, r.a_star]
        vals += [r.alpha_dagger.get(C) for C in C_list]
        vals += [r.alpha_kn, r.Cp, r.Cp_bound, r.error]
        writer.writerow([fmt(v) for v in vals])
    return buf.getvalue()


def cmd_constants(args):
    resolve_seed(args)
    if args.p_min < 1 or args.p_step <= 0 or args.p_max < args.p_min:
        raise UsageError("need 1 <= p-min <= p-max and p-step > 0")
    hc.KissingConstant(args.c_kn)
    text = constants_csv(_p_grid(args.p_min, args.p_max, args.p_step), args.C, args.c_kn,
                         args.precision or default_precision(), args.jobs)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -------------------------------------------------------------------- count

def cmd_count(args):
    resolve_seed(args)
    budget = EnumerationBudget(args.max_nodes)
    if args.zn:
        if args.n is None or args.t is None:
            raise UsageError("--zn needs --n and --t")
        res = count_zn(args.p, args.n, args.t, args.radius_pow, strict=args.strict, budget=budget)
        print(f"count: {res.count}")
        print(f"boundary_points: {res.boundary_points}")
        print(f"exact: {str(res.exact).lower()}")
        a = float(args.radius_pow / args.n) ** (1 / float(args.p))
        if a > float(args.t):
            b = th.beta(args.p, args.t, a, precision=args.precision or default_precision()).value
            log_ratio = (math.log(res.count) / args.n - math.log(b)) if res.count else -math.inf
            print(f"beta: {b:.10g}")
            print(f"beta^n: {b ** args.n:.10g}")
            print(f"log(count)/n - log(beta): {log_ratio:.10g}")
        return EXIT_OK
    if not args.instance:
        raise UsageError("give --zn or --instance")
    inst, p, _ = iox.read_instance(args.instance)
    target = getattr(inst, "target", None)
    res = count_lattice(inst.basis, p, args.radius_pow, target, strict=args.strict, budget=budget)
    print(f"count: {res.count}")
    print(f"boundary_points: {res.boundary_points}")
    print(f"exact: {str(res.exact).lower()}")
    return EXIT_OK


# ------------------------------------------------------------------- reduce

def _load_cvp(args):
    if args.sample:
        inst = fx.sample_yes_cvp(args.gamma or 2) if args.sample == "yes" else fx.sample_no_cvp(args.gamma or 2)
        return inst, args.p or 2, [iox.provenance_record("sample", {"case": args.sample}, None)]
    if not args.input:
        raise UsageError("give --input or --sample")
    inst, p, prov = iox.read_instance(args.input)
    return inst, p, prov


def _load_gadget(args):
    if args.gadget_zn:
        k = args.gadget_zn
        return RationalBasis.identity(k), (Fraction(1, 2),) * k
    if args.gadget:
        g, _, _ = iox.read_instance(args.gadget)
        return g.basis, g.target
    raise UsageError("give --gadget or --gadget-zn")


def cmd_reduce(args):
    seed = resolve_seed(args)
    inst, p, prov = _load_cvp(args)
    kind = args.stage
    params = {}
    if kind == "sparsify":
        if not hasattr(inst, "target") or inst.target is None:
            raise UsageError("sparsify needs an instance with a target")
        from .rng import RandomStream
        spec = rd.SparsifySpec.sample(inst.basis.n, args.q, RandomStream(seed), args.homogeneous)
        sub, t2 = rd.sparsify(inst.basis, inst.target, spec)
        out = _same_kind(inst, sub, t2)
        params = {"q": args.q, "x": list(spec.x), "z": list(spec.z)}
    elif kind == "gadget":
        _need(inst, CvpPrimeInstance)
        gb, gt = _load_gadget(args)
        B, t = rd.gadget_transform(inst.basis, inst.target, args.s_pow, gb, gt)
        out = iox.GadgetInstance(B, t)
        params = {"s_pow": str(args.s_pow)}
    elif kind == "bdd":
        _need(inst, CvpPrimeInstance)
        gb, gt = _load_gadget(args)
        nu1 = math.inf if args.nu1 is None else args.nu1
        profile = hc.GadgetProfile(args.alpha_G, args.alpha_A, args.nu0, nu1)
        res = rd.end_to_end_bdd(inst, p, profile, gb, gt, args.alpha, args.C, seed,
                                EnumerationBudget(args.max_nodes))
        out = res.instance
        params = {"alpha": args.alpha, "C": args.C, "r_pow": res.r_pow, "A": res.A, "G": res.G,
                  "q": res.q, "regime_ok": res.regime_ok}
        if not res.regime_ok:
            print("warning: G < 400 alpha A; the bounded-error guarantee does not apply", file=sys.stderr)
    elif kind == "agcvp":
        _need(inst, CvpPrimeInstance)
        gam = inst.gamma
        agp = rd.AgcvpParams(args.epsilon, gam, args.gamma_prime, inst.basis.n, args.n, p=p, c=args.c)
        out = rd.cvp_to_agcvp(inst, p, agp)
        params = {"epsilon": str(args.epsilon), "gamma_prime": str(args.gamma_prime), "n": args.n, "c": args.c}
    elif kind == "svp":
        _need(inst, AGGapCvpInstance)
        red = rd.agcvp_to_svp(inst, p, seed)
        out = red.instance
        params = {"q": red.q, "x": list(red.spec.x), "regime_ok": red.regime_ok}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown stage {kind}")
    prov = list(prov) + [iox.provenance_record(kind, params, seed)]
    text = iox.dumps(out, p, prov)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _need(inst, cls):
    if not isinstance(inst, cls):
        raise UsageError(f"this stage needs a {cls.__name__}, got {type(inst).__name__}")


def _same_kind(inst, basis, target):
    if isinstance(inst, CvpPrimeInstance):
        return CvpPrimeInstance(basis, target, inst.gamma)
    if isinstance(inst, BddInstance):
        return BddInstance(basis, target, inst.alpha)
    if isinstance(inst, AGBddInstance):
        return AGBddInstance(basis, target, inst.r_pow, inst.alpha, inst.A, inst.G)
    if isinstance(inst, AGGapCvpInstance):
        return AGGapCvpInstance(basis, target, inst.r_pow, inst.u_pow, inst.gamma_prime, inst.A, inst.G)
    return iox.GadgetInstance(basis, target)


# ----------------------------------------------------------------- classify

def cmd_classify(args):
    resolve_seed(args)
    inst, p, _ = iox.read_instance(args.input)
    budget = EnumerationBudget(args.max_nodes)
    if isinstance(inst, CvpPrimeInstance):
        print(f"case: {classify_cvp_prime(inst, p, budget)}")
    elif isinstance(inst, BddInstance):
        st = classify_bdd(inst, p, budget)
        print(f"lambda1: {st.lambda1:.10g}\ndist: {st.dist:.10g}\nvalid: {str(st.valid).lower()}")
        print("witness: " + " ".join(iox.encode_number(v) for v in st.witness))
    elif isinstance(inst, AGBddInstance):
        st = classify_agbdd(inst, p, budget)
        print(f"short: {st.short_count}\nclose: {st.close_count}\ncase: {st.case}")
    elif isinstance(inst, AGGapCvpInstance):
        st = classify_agcvp(inst, p, budget)
        print(f"close: {st.close_count}\nannoying: {st.annoying}\ncase: {st.case}")
    elif isinstance(inst, SvpInstance):
        st = classify_svp(inst, p, budget)
        print(f"lambda1: {st.lambda1:.10g}\ncase: {st.case}")
    else:
        raise UsageError(f"nothing to classify for {type(inst).__name__}")
    return EXIT_OK


# ------------------------------------------------------------------- verify

def cmd_verify(args):
    seed = resolve_seed(args)
    name = args.suite
    kwargs = {}
    if name in ("sparsify", "sparsify-stats"):
        kwargs = {"trials": args.trials or 2000, "seed": seed}
    elif name in ("gadget-counts", "agcvp-no", "counting"):
        kwargs = {"seed": seed}
    elif name == "end-to-end":
        kwargs = {"seeds": args.trials or 500, "seed": seed}
    checks = vf.SUITES[name](**kwargs)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{name}: {len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


# ------------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(prog="lphard", description="l_p lattice hardness toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="random seed (drawn and printed if omitted)")
        p.add_argument("--precision", choices=("double", "extended"), default=None,
                       help=f"numeric mode (default from ${PRECISION_ENV} or double)")
        p.add_argument("--max-nodes", type=int, default=50_000_000, help="enumeration node cap")

    c = sub.add_parser("constants", help="CSV sweep of the hardness constants over p")
    common(c)
    c.add_argument("--p-min", type=float, default=1.0)
    c.add_argument("--p-max", type=float, default=8.0)
    c.add_argument("--p-step", type=float, default=0.5)
    c.add_argument("--C", type=float, nargs="+", default=[200.0], help="rank factors for alpha_dagger")
    c.add_argument("--c-kn", type=float, default=hc.DEFAULT_C_KN)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_constants)

    k = sub.add_parser("count", help="lattice point counts in l_p balls")
    common(k)
    k.add_argument("--zn", action="store_true", help="count Z^n around t*1")
    k.add_argument("--p", type=exponent, default=2)
    k.add_argument("--n", type=int)
    k.add_argument("--t", type=rational)
    k.add_argument("--radius-pow", type=rational, required=True, help="r^p as a rational")
    k.add_argument("--strict", action="store_true", help="open ball")
    k.add_argument("--instance", help="instance file (counts around its target)")
    k.set_defaults(func=cmd_count)

    r = sub.add_parser("reduce", help="run one reduction stage on an instance file")
    common(r)
    r.add_argument("stage", choices=("sparsify", "gadget", "bdd", "agcvp", "svp"))
    r.add_argument("--input")
    r.add_argument("--output")
    r.add_argument("--sample", choices=("yes", "no"), help="use the bundled planted CVP' sample")
    r.add_argument("--p", type=exponent, default=None, help="exponent for --sample inputs")
    r.add_argument("--gamma", type=rational, default=None, help="gap of the bundled sample")
    r.add_argument("--q", type=int, help="prime for sparsify")
    r.add_argument("--homogeneous", action="store_true", help="sparsify with z = 0")
    r.add_argument("--s-pow", type=rational, default=Fraction(1))
    r.add_argument("--gadget", help="gadget instance file")
    r.add_argument("--gadget-zn", type=int, help="use Z^k with target 1/2 as the gadget")
    r.add_argument("--alpha", type=float, default=1.6)
    r.add_argument("--C", type=float, default=4.0)
    r.add_argument("--alpha-G", dest="alpha_G", type=float)
    r.add_argument("--alpha-A", dest="alpha_A", type=float)
    r.add_argument("--nu0", type=float)
    r.add_argument("--nu1", type=float, default=None, help="omit for a gadget with no too-close vectors")
    r.add_argument("--epsilon", type=rational, default=Fraction(1, 10))
    r.add_argument("--gamma-prime", type=rational, default=Fraction(1))
    r.add_argument("--n", type=int, help="output rank for agcvp")
    r.add_argument("--c", type=float, default=1.0, help="annoying-count constant for agcvp")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("classify", help="brute-force classification of an instance file")
    common(s)
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("suite", choices=sorted(vf.SUITES))
    v.add_argument("--trials", type=int, default=None, help="trials (sparsify) or seeds (end-to-end)")
    v.set_defaults(func=cmd_verify)
    return ap


def _check_stage_args(args):
    if args.command != "reduce":
        return
    if args.stage == "sparsify" and args.q is None:
        raise UsageError("sparsify needs --q")
    if args.stage == "bdd":
        missing = [n for n in ("alpha_G", "alpha_A", "nu0") if getattr(args, n) is None]
        if args.gadget_zn and missing:
            k = args.gadget_zn
            p = float(args.p or 2)
            args.alpha_G = args.alpha_G or (k / 2 ** p) ** (1 / p)
            args.alpha_A = args.alpha_A or args.alpha_G
            args.nu0 = args.nu0 or 1.3
        elif missing:
            raise UsageError(f"bdd needs {', '.join('--' + m.replace('_', '-') for m in missing)}")
    if args.stage == "agcvp" and args.n is None:
        raise UsageError("agcvp needs --n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _check_stage_args(args)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except iox.SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (LphardError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
